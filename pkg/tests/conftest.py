import os
import sys

import pytest
from hypothesis import settings

from causalflow.blrm import BlrmParams
from causalflow.ffl import REFERENCE_FFL

settings.register_profile("default", max_examples=60, deadline=None)
settings.register_profile("thorough", max_examples=600, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def ref_blrm():
    """alpha=0.1, beta=0.2, t_rel=10, D=10 (beta t_rel = 2)."""
    return BlrmParams(alpha=0.1, beta=0.2, t_rel=10.0, d=10.0)


@pytest.fixture
def ref_net(ref_blrm):
    return ref_blrm.network()


@pytest.fixture
def ref_ffl():
    return REFERENCE_FFL


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    verdicts = getattr(module, "VERDICTS", None)
    if not verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(verdicts):
        terminalreporter.write_line(verdicts[number])
