"""Numerical settings and cancellation-free special functions.

All tolerances in the package derive from one global epsilon, ``get_eps()``,
which defaults to 1e-12 and can be overridden by the ``CAUSALFLOW_EPS``
environment variable or by :func:`set_eps`.

The helpers below evaluate the exponential differences that appear in the
closed forms of linear response models without the removable singularities
(equal rates) or catastrophic cancellation (short lags) of the textbook
expressions.
"""

import math
import os

import numpy as np
from scipy import special

_DEFAULT_EPS = 1e-12
_eps = float(os.environ.get("CAUSALFLOW_EPS", _DEFAULT_EPS))

# below this |x| the series branches are used
SERIES_SWITCH = 1e-6


def get_eps():
    return _eps


def set_eps(value):
    """Set the global epsilon and return the previous value."""
    global _eps
    value = float(value)
    if not (0.0 < value < 1e-3):
        raise ValueError(f"eps must lie in (0, 1e-3), got {value}")
    old, _eps = _eps, value
    return old


def singular_rtol():
    """Relative eigenvalue threshold below which a covariance counts as singular."""
    return get_eps()


def deterministic_rtol():
    """Relative residual variance below which a Schur complement counts as zero."""
    return 1e-2 * get_eps()


def relexp(x):
    """``(1 - exp(-x)) / x``, equal to 1 at ``x = 0``."""
    if abs(x) < SERIES_SWITCH:
        return 1.0 - x / 2.0 + x * x / 6.0
    return -math.expm1(-x) / x


def log1p_over(x):
    """``log1p(x) / x``, equal to 1 at ``x = 0``."""
    if abs(x) < SERIES_SWITCH:
        return 1.0 - x / 2.0 + x * x / 3.0
    return math.log1p(x) / x


def expdiff(p, q, tau):
    """``(exp(-p tau) - exp(-q tau)) / (q - p)`` for rates p, q > 0.

    Symmetric in ``p`` and ``q``; the equal-rate limit ``tau exp(-p tau)`` is
    reached continuously.
    """
    lo, hi = (p, q) if p <= q else (q, p)
    return tau * math.exp(-lo * tau) * relexp((hi - lo) * tau)


def _scaled_moment(n, x):
    """``int_0^1 u^n exp(-x u) du`` for integer n >= 0 and x >= 0."""
    if x <= 1.0:
        # Kummer series, all terms positive
        term = 1.0 / (n + 1)
        total = term
        k = 0
        while term > 1e-18 * total:
            k += 1
            term *= x / (n + 1 + k)
            total += term
        return math.exp(-x) * total
    logp = math.log(special.gammainc(n + 1, x))
    return math.exp(special.gammaln(n + 1) - (n + 1) * math.log(x) + logp)


def expdiff_sq_integral(p, q, tau):
    """``int_0^tau expdiff(p, q, s)**2 ds``.

    Three regimes keep the relative error near machine precision:

    * ``|q - p| tau <= 2``: a positive series in ``(q - p) tau`` built from
      moments of ``exp(-(p + q) s)``;
    * slow decay over the window: second difference of
      ``(1 - exp(-r tau)) / r`` in the rate ``r``;
    * long windows: infinite integral minus the tail.
    """
    if tau < 0:
        raise ValueError("tau must be >= 0")
    if tau == 0.0:
        return 0.0
    lo, hi = (p, q) if p <= q else (q, p)
    delta = hi - lo
    c = hi + lo
    if delta * tau <= 2.0:
        dt2 = (delta * tau) ** 2
        total = 0.0
        coef = 0.5  # (delta tau)^(2m-2) / (2m)!
        for m in range(1, 60):
            term = coef * _scaled_moment(2 * m, c * tau)
            total += term
            if term <= 1e-18 * total:
                break
            coef *= dt2 / ((2 * m + 2) * (2 * m + 1))
        return 2.0 * tau ** 3 * total

    def window(rate):
        return tau * relexp(rate * tau)

    if lo * tau <= 1.0:
        return (window(2 * lo) - 2.0 * window(c) + window(2 * hi)) / delta ** 2
    j_inf = 1.0 / (2.0 * lo * hi * c)
    tail = math.exp(-2.0 * lo * tau) * (
        1.0 / (2.0 * lo)
        - 2.0 * math.exp(-delta * tau) / c
        + math.exp(-2.0 * delta * tau) / (2.0 * hi)
    ) / delta ** 2
    return j_inf - tail


def half_log_ratio(num, den):
    """``0.5 * log(num / den)`` for conditional variances, with exact limits.

    Returns 0 when ``num`` vanishes (nothing left to learn) and ``inf`` when
    ``den`` vanishes while ``num`` does not.
    """
    if num <= 0.0:
        return 0.0
    if den <= 0.0:
        return math.inf
    value = 0.5 * math.log(num / den)
    if value < 0.0 and value > -get_eps():
        return 0.0
    return value


def symmetrize(m):
    m = np.asarray(m, dtype=float)
    return 0.5 * (m + m.T)
