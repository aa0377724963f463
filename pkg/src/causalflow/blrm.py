"""Closed forms for the two-node basic linear response model.

An Ornstein-Uhlenbeck signal ``x`` drives a noiseless response ``y``::

    dx/dt = -x / t_rel + sqrt(d) Gamma(t)
    dy/dt = alpha x - beta y

All information measures depend only on the product ``beta * t_rel`` (and
lags in units of ``t_rel``). The expressions here are exact rearrangements
of the textbook formulas that stay accurate at short lags and across the
removable singularity ``beta * t_rel = 1``; they serve both as analytics and
as oracles for the general covariance engine.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from ._numeric import expdiff, expdiff_sq_integral, log1p_over
from .measures import assemble_point
from .network import EdgeSpec, LinearNetwork, NodeSpec, validate

__all__ = [
    "BlrmParams",
    "conditional_mean_past",
    "conditional_mean_future",
    "response_slope",
    "lagged_mi",
    "snr",
    "i_xy",
    "tau_opt",
    "i_opt",
    "te_closed_form",
    "closed_form_point",
    "peak_causal_influence",
    "peak_lagged_mi",
    "CapacityResult",
    "causation_capacity",
]


@dataclass(frozen=True)
class BlrmParams:
    alpha: float
    beta: float
    t_rel: float
    d: float

    def __post_init__(self):
        if self.alpha == 0 or not math.isfinite(self.alpha):
            raise ValueError("alpha must be finite and non-zero")
        if not (self.beta > 0 and self.t_rel > 0 and self.d > 0):
            raise ValueError("beta, t_rel and d must be > 0")

    @property
    def beta_t_rel(self):
        return self.beta * self.t_rel

    @property
    def sigma_x2(self):
        return self.d * self.t_rel / 2.0

    @property
    def sigma_y2(self):
        k = self.beta_t_rel
        return self.alpha ** 2 * self.t_rel * self.sigma_x2 / (self.beta * (k + 1.0))

    def network(self, signal="x", response="y"):
        return validate(LinearNetwork(
            (NodeSpec(signal, 1.0 / self.t_rel, self.d), NodeSpec(response, self.beta, 0.0)),
            (EdgeSpec(signal, response, self.alpha),),
        ))

    @classmethod
    def from_network(cls, network):
        """Recognise a two-node signal/response network; ``ValueError`` otherwise."""
        network = validate(network)
        if len(network.nodes) != 2 or len(network.edges) != 1:
            raise ValueError("not a two-node, one-edge network")
        e = network.edges[0]
        x, y = network.node(e.source), network.node(e.target)
        if y.noise != 0.0 or e.gain == 0.0:
            raise ValueError("response must be noiseless and driven by a non-zero gain")
        return cls(alpha=e.gain, beta=y.decay, t_rel=1.0 / x.decay, d=x.noise)


def _rates(p):
    return p.beta, 1.0 / p.t_rel


def response_slope(p, tau):
    """Regression slope of ``y(t+tau)`` on ``x(t)``; negative ``tau`` looks back."""
    a, b = _rates(p)
    k = p.beta_t_rel
    if tau < 0:
        return p.alpha * p.t_rel / (k + 1.0) * math.exp(tau * b)
    # alpha t/(k-1) (e^{-b tau} - 2 e^{-a tau}/(k+1)) without the k = 1 pole
    return p.alpha / (k + 1.0) * (p.t_rel * math.exp(-b * tau) + 2.0 * expdiff(b, a, tau))


def conditional_mean_past(p, x_now, tau):
    """``<y(t - tau) | x(t)>`` for ``tau >= 0``."""
    if tau < 0:
        raise ValueError("tau must be >= 0")
    return x_now * response_slope(p, -tau) if tau > 0 else x_now * response_slope(p, 0.0)


def conditional_mean_future(p, x_now, tau):
    """``<y(t + tau) | x(t)>`` for ``tau >= 0``."""
    if tau < 0:
        raise ValueError("tau must be >= 0")
    return x_now * response_slope(p, tau)


def _innovation(p, tau):
    """``Var(y(t+tau) | x(t), y(t))``."""
    a, b = _rates(p)
    return p.d * p.alpha ** 2 * expdiff_sq_integral(b, a, tau)


def _var_given_signal(p, tau):
    """``Var(y(t+tau) | x(t))`` for real ``tau``."""
    a, b = _rates(p)
    k = p.beta_t_rel
    if tau < 0:
        # y(t-|tau|) given a later x(t): only the decorrelation of x enters
        return p.sigma_y2 * (1.0 - k * math.expm1(2.0 * b * tau)) / (k + 1.0)
    return math.exp(-2.0 * a * tau) * p.sigma_y2 / (k + 1.0) + _innovation(p, tau)


def _var_given_response(p, tau):
    """``Var(y(t+tau) | y(t))`` for ``tau >= 0``."""
    a, b = _rates(p)
    k = p.beta_t_rel
    g = p.alpha * expdiff(b, a, tau)
    return _innovation(p, tau) + g * g * p.sigma_x2 / (k + 1.0)


def snr(p, tau):
    """Signal-to-noise ratio of the linear estimate of ``y(t+tau)`` from ``x(t)``."""
    slope = response_slope(p, tau)
    return slope * slope * p.sigma_x2 / _var_given_signal(p, tau)


def lagged_mi(p, tau):
    """``I(x(t); y(t+tau))`` in nats, for real ``tau``."""
    return 0.5 * math.log1p(snr(p, tau))


def i_xy(p):
    """Equal-time information ``I(x(t); y(t)) = 0.5 ln(1 + beta t_rel)``."""
    return 0.5 * math.log1p(p.beta_t_rel)


def _log_ratio_term(k):
    # ln(2k/(k+1)) / ((k-1)/(k+1)), i.e. log1p(u)/u with u = (k-1)/(k+1)
    u = (k - 1.0) / (k + 1.0)
    if abs(u) < 0.5:
        return log1p_over(u)
    return (math.log(2.0 * k) - math.log1p(k)) / u


def tau_opt(p):
    """Lag maximising ``I(x(t); y(t+tau))``; equals ``t_rel / 2`` at ``beta t_rel = 1``."""
    k = p.beta_t_rel
    return p.t_rel / (k + 1.0) * _log_ratio_term(k)


def i_opt(p):
    """Lagged information at ``tau_opt``; depends on ``beta t_rel`` only."""
    k = p.beta_t_rel
    # 1 - 2 ((k+1)/(2k))^((k+1)/(k-1)) = 1 - exp(-excess), excess = el - ln 2
    if abs(k - 1.0) < 0.5 * (k + 1.0):
        excess = _log_ratio_term(k) - math.log(2.0)
    else:
        # away from k = 1 the direct difference cancels for large k
        excess = (2.0 * math.log(2.0) - (k + 1.0) * math.log1p(1.0 / k)) / (k - 1.0)
    return -0.5 * math.log(-math.expm1(-excess))


def te_closed_form(p, tau, direction="x->y"):
    """Transfer entropy at lag ``tau > 0``.

    ``x->y``: ``0.5 ln(1 + g^2 / (2 (beta + 1/t_rel) J))`` with
    ``g = (e^{-tau/t_rel} - e^{-beta tau}) / (beta - 1/t_rel)`` and
    ``J = int_0^tau g(s)^2 ds``. ``y->x`` is identically zero.
    """
    if tau <= 0:
        raise ValueError("tau must be > 0")
    if direction == "y->x":
        return 0.0
    if direction != "x->y":
        raise ValueError(f"unknown direction {direction!r}")
    a, b = _rates(p)
    g = expdiff(b, a, tau)
    j = expdiff_sq_integral(b, a, tau)
    if j == 0.0:
        return math.inf
    return 0.5 * math.log1p(g * g / (2.0 * (a + b) * j))


def closed_form_point(p, tau, direction="x->y"):
    """Full decomposition at one lag from closed-form conditional variances."""
    if tau < 0:
        raise ValueError("tau must be >= 0")
    k = p.beta_t_rel
    if direction == "x->y":
        v_none = p.sigma_y2
        v_src = _var_given_signal(p, tau)
        v_dst = _var_given_response(p, tau)
        v_both = _innovation(p, tau)
    elif direction == "y->x":
        b = 1.0 / p.t_rel
        own = -math.expm1(-2.0 * b * tau) * p.sigma_x2
        v_none = p.sigma_x2
        v_src = math.exp(-2.0 * b * tau) * p.sigma_x2 / (k + 1.0) + own
        v_dst = own
        v_both = own
    else:
        raise ValueError(f"unknown direction {direction!r}")
    return assemble_point(tau, v_none, v_src, v_dst, v_both, i_xy(p))


def _maximize(f, lo, hi, n=240, xtol=None):
    """Maximise a smooth unimodal ``f`` on ``[lo, hi]``: log grid, then golden section."""
    grid = np.geomspace(lo, hi, n)
    vals = np.array([f(t) for t in grid])
    i = int(np.argmax(vals))
    if i == 0 or i == n - 1:
        return float(grid[i]), float(vals[i])
    bracket = (grid[i - 1], grid[i], grid[i + 1])
    # golden's xtol is relative; never looser than 1e-9 of the bracket centre
    tol = 1e-9 if xtol is None else min(max(xtol / grid[i], 1e-12), 1e-9)
    res = optimize.minimize_scalar(lambda t: -f(t), bracket=bracket, method="golden",
                                   options={"xtol": tol})
    if -res.fun < vals[i]:
        return float(grid[i]), float(vals[i])
    return float(res.x), float(-res.fun)


def _lag_window(p):
    fast = min(p.t_rel, 1.0 / p.beta)
    slow = max(p.t_rel, 1.0 / p.beta)
    return 1e-4 * fast, 30.0 * slow


def peak_causal_influence(p):
    """``(tau_res, max_tau C(tau))`` from the closed forms."""
    lo, hi = _lag_window(p)
    return _maximize(lambda t: closed_form_point(p, t).c, lo, hi, xtol=1e-6 * p.t_rel)


def peak_lagged_mi(p):
    """Numeric ``(tau_opt, I_opt)``, independent of the analytic optimum."""
    lo, hi = _lag_window(p)
    return _maximize(lambda t: lagged_mi(p, t), lo, hi, xtol=1e-6 * p.t_rel)


@dataclass(frozen=True)
class CapacityResult:
    beta_t_rel: np.ndarray
    peak_c: np.ndarray
    tau_res: np.ndarray
    i_opt: np.ndarray
    estimate: float = None
    uncertainty: float = None


def causation_capacity(beta_t_rel_grid):
    """Peak causal influence over a grid of ``beta t_rel`` and its large-value limit.

    Lags are in units of ``t_rel``. The limit is extrapolated with Aitken's
    delta-squared step over the last three grid points (log-spaced grids make
    power-law convergence geometric); ``uncertainty`` is the size of that
    extrapolation step. Fewer than three points give no estimate.
    """
    grid = np.atleast_1d(np.asarray(beta_t_rel_grid, dtype=float))
    if grid.size == 0 or np.any(grid <= 0):
        raise ValueError("beta t_rel values must be > 0")
    peaks, taus, iopt = [], [], []
    for k in grid:
        p = BlrmParams(alpha=1.0, beta=float(k), t_rel=1.0, d=2.0)
        t, c = peak_causal_influence(p)
        peaks.append(c)
        taus.append(t)
        iopt.append(i_opt(p))
    peaks = np.array(peaks)
    estimate = uncertainty = None
    if grid.size >= 3:
        c1, c2, c3 = peaks[-3:]
        d1, d2 = c2 - c1, c3 - c2
        denom = d2 - d1
        if abs(denom) > 1e-3 * max(abs(d2), 1e-300) and abs(d2) < abs(d1):
            estimate = c3 - d2 * d2 / denom
        else:
            estimate = c3
        uncertainty = abs(estimate - c3) + abs(d2)
    return CapacityResult(grid, peaks, np.array(taus), np.array(iopt), estimate, uncertainty)
