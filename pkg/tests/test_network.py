import numpy as np
import pytest
from hypothesis import given, strategies as st

from causalflow import exceptions as ex
from causalflow.network import (
    EdgeSpec,
    LinearNetwork,
    NodeSpec,
    drift_matrix,
    format_network,
    noise_matrix,
    parents,
    parse_network,
    validate,
)


def net(nodes, edges=()):
    return LinearNetwork(tuple(NodeSpec(*n) for n in nodes), tuple(EdgeSpec(*e) for e in edges))


BLRM = net([("x", 0.1, 10.0), ("y", 0.2, 0.0)], [("x", "y", 0.1)])
FFL = net([("z", 0.1, 10.0), ("x", 0.2, 0.1), ("y", 0.2, 0.1)],
          [("z", "x", 1.0), ("z", "y", 1.0), ("x", "y", 1.0)])


def test_blrm_is_valid_and_drift_is_transcribed():
    v = validate(BLRM)
    assert v.names == ("x", "y")
    np.testing.assert_array_equal(drift_matrix(v), [[-0.1, 0.0], [0.1, -0.2]])
    np.testing.assert_array_equal(noise_matrix(v), [[10.0, 0.0], [0.0, 0.0]])


def test_single_node_is_valid():
    assert validate(net([("x", 0.1, 10.0)])).names == ("x",)


def test_ffl_drift_in_topological_order():
    np.testing.assert_array_equal(
        drift_matrix(validate(FFL)), [[-0.1, 0, 0], [1, -0.2, 0], [1, 1, -0.2]])


def test_empty_edge_set_gives_diagonal_drift():
    v = validate(net([("a", 1.0, 1.0), ("b", 2.0, 1.0), ("c", 3.0, 1.0)]))
    np.testing.assert_array_equal(drift_matrix(v), np.diag([-1.0, -2.0, -3.0]))


@pytest.mark.parametrize("bad,error", [
    (net([("x", 1, 1), ("y", 1, 1)], [("x", "y", 1), ("y", "x", 1)]), ex.CycleDetected),
    (net([("x", 0.0, 1)]), ex.NonPositiveDecay),
    (net([("x", -1.0, 1)]), ex.NonPositiveDecay),
    (net([("x", 1.0, -1.0)]), ex.NegativeNoise),
    (net([("x", 1.0, 0.0)]), ex.RootWithoutNoise),
    (net([("x", 1, 1), ("x", 2, 1)]), ex.DuplicateNode),
    (net([("x", 1, 1), ("y", 1, 0)], [("x", "y", 1), ("x", "y", 2)]), ex.DuplicateEdge),
    (net([("x", 1, 1)], [("x", "x", 1)]), ex.SelfLoop),
    (net([("x", 1, 1)], [("x", "q", 1)]), ex.UnknownNode),
])
def test_invalid_networks(bad, error):
    with pytest.raises(error):
        validate(bad)


def test_errors_share_a_base_class():
    with pytest.raises(ex.NetworkError):
        validate(net([("x", 1.0, 0.0)]))


def test_zero_gain_edge_is_flagged_and_pruned_from_parents():
    v = validate(net([("z", 0.1, 1), ("x", 1, 1), ("y", 1, 1)],
                     [("z", "x", 1), ("z", "y", 1), ("x", "y", 0.0)]))
    assert [(e.source, e.target) for e in v.zero_gain_edges] == [("x", "y")]
    assert parents(v, ("x", "y")) == {"z"}
    assert parents(v, "y") == {"z"}


def test_zero_gain_edge_still_counts_for_cycles():
    with pytest.raises(ex.CycleDetected):
        validate(net([("x", 1, 1), ("y", 1, 1)], [("x", "y", 1), ("y", "x", 0.0)]))


def test_node_driven_only_by_zero_gain_needs_noise():
    with pytest.raises(ex.RootWithoutNoise):
        validate(net([("x", 1, 1), ("y", 1, 0)], [("x", "y", 0.0)]))


def test_parents_examples():
    assert parents(validate(FFL), ("x", "y")) == {"z"}
    assert parents(validate(BLRM), ("x", "y")) == frozenset()
    chain = validate(net([("z", 1, 1), ("x", 1, 0), ("y", 1, 0)], [("z", "x", 1), ("x", "y", 1)]))
    assert parents(chain, "y") == {"z", "x"}
    with pytest.raises(ex.UnknownNode):
        parents(chain, "nope")


def test_validate_is_idempotent():
    once = validate(FFL)
    twice = validate(once)
    assert once == twice and once.names == twice.names


def test_negative_gains_are_allowed():
    v = validate(net([("x", 1, 1), ("y", 1, 0)], [("x", "y", -3.0)]))
    assert drift_matrix(v)[1, 0] == -3.0


def test_topological_order_independent_of_declaration():
    v = validate(net([("y", 0.2, 0), ("x", 0.1, 1)], [("x", "y", 0.1)]))
    assert v.names == ("x", "y")
    a = drift_matrix(v)
    assert np.all(np.triu(a, 1) == 0)


def test_parse_and_format_roundtrip():
    text = """
    # the basic response model
    node x decay=1e-1 noise=10   # signal
    node y decay=0.2
    edge x y gain=0.1
    """
    v = parse_network(text)
    assert v == validate(BLRM)
    assert parse_network(format_network(v)) == v


@pytest.mark.parametrize("text", [
    "node x noise=1",
    "node x decay=abc noise=1",
    "edge x y",
    "vertex x decay=1",
    "node x decay=1 noise=1 colour=3",
    "node 1x decay=1 noise=1",
])
def test_parse_errors(text):
    with pytest.raises(ex.NetworkParseError):
        parse_network(text)


@st.composite
def dags(draw):
    n = draw(st.integers(1, 6))
    names = [f"n{i}" for i in range(n)]
    perm = draw(st.permutations(names))
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if draw(st.booleans()):
                edges.append(EdgeSpec(perm[i], perm[j], draw(st.floats(-3, 3).filter(lambda g: g != 0))))
    nodes = [NodeSpec(m, draw(st.floats(0.05, 5.0)), draw(st.floats(0.1, 5.0))) for m in names]
    return LinearNetwork(tuple(nodes), tuple(edges))


@given(dags())
def test_drift_is_lower_triangular_with_negated_decay_spectrum(network):
    v = validate(network)
    a = drift_matrix(v)
    assert np.all(np.triu(a, 1) == 0)
    np.testing.assert_allclose(np.sort(np.linalg.eigvals(a).real), np.sort(-v.decays), atol=1e-12)


@given(dags(), st.data())
def test_parents_are_monotone(network, data):
    v = validate(network)
    x = data.draw(st.sampled_from(v.names))
    y = data.draw(st.sampled_from(v.names))
    both = parents(v, (x, y))
    assert both >= (parents(v, x) | parents(v, y)) - {x, y}
    assert x not in both and y not in both
