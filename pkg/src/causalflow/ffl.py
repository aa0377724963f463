"""Three-node feed-forward loop ``z -> x``, ``z -> y``, ``x -> y``.

::

    dz/dt = -z / t_rel                      + sqrt(d_z) Gamma_z
    dx/dt = alpha_x z - beta_x x            + sqrt(d_x) Gamma_x
    dy/dt = alpha_y z - beta_y y + gamma x  + sqrt(d_y) Gamma_y

With ``gamma = 0`` the pair ``(x, y)`` is correlated only through the common
parent ``z``, and the closed forms below show that the causal influence
``x -> y`` conditioned on ``z`` vanishes at every lag. Non-zero ``gamma`` is
handled by the general covariance engine.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ._numeric import expdiff_sq_integral
from .blrm import BlrmParams, response_slope
from .exceptions import GammaNonZero
from .measures import assemble_point, decompose_curve, linear_redundancy
from .network import EdgeSpec, LinearNetwork, NodeSpec, validate

__all__ = [
    "FflParams",
    "cond_sigma_y",
    "cond_cross_moment",
    "cond_second_moment",
    "cond_measures",
    "closed_form_point",
    "ZeroInfluenceReport",
    "verify_zero_influence",
    "fig7_curve",
    "REFERENCE_FFL",
]


@dataclass(frozen=True)
class FflParams:
    t_rel: float
    alpha_x: float
    alpha_y: float
    beta_x: float
    beta_y: float
    gamma: float = 0.0
    d_z: float = 1.0
    d_x: float = 0.0
    d_y: float = 0.0

    def __post_init__(self):
        if not (self.t_rel > 0 and self.beta_x > 0 and self.beta_y > 0):
            raise ValueError("t_rel, beta_x and beta_y must be > 0")
        if not self.d_z > 0:
            raise ValueError("d_z must be > 0")
        if self.d_x < 0 or self.d_y < 0:
            raise ValueError("d_x and d_y must be >= 0")
        for name in ("alpha_x", "alpha_y", "gamma"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def sigma_z2(self):
        return self.d_z * self.t_rel / 2.0

    def network(self):
        return validate(LinearNetwork(
            (
                NodeSpec("z", 1.0 / self.t_rel, self.d_z),
                NodeSpec("x", self.beta_x, self.d_x),
                NodeSpec("y", self.beta_y, self.d_y),
            ),
            (
                EdgeSpec("z", "x", self.alpha_x),
                EdgeSpec("z", "y", self.alpha_y),
                EdgeSpec("x", "y", self.gamma),
            ),
        ))


# t_rel=10, gamma=alpha_x=alpha_y=1, beta_x=beta_y=0.2, d_z=10, d_x=d_y=0.1
REFERENCE_FFL = FflParams(t_rel=10.0, alpha_x=1.0, alpha_y=1.0, beta_x=0.2, beta_y=0.2,
                        gamma=1.0, d_z=10.0, d_x=0.1, d_y=0.1)


def _require_no_gamma(p):
    if p.gamma != 0.0:
        raise GammaNonZero(f"closed form holds for gamma = 0 only, got {p.gamma}")


def _branch(p, which):
    """The ``z -> which`` leg seen as a basic response model (``alpha != 0`` only)."""
    alpha = p.alpha_x if which == "x" else p.alpha_y
    beta = p.beta_x if which == "x" else p.beta_y
    return alpha, beta


def cond_sigma_y(p):
    """Stationary variance of ``y`` (``gamma = 0``)."""
    _require_no_gamma(p)
    return (p.sigma_z2 * p.alpha_y ** 2 * p.t_rel / (p.beta_y * (1.0 + p.beta_y * p.t_rel))
            + p.d_y / (2.0 * p.beta_y))


def _var_given_z(p, which):
    """``Var(which(t) | z(t))``: the z-driven part shrinks by ``1 / (1 + beta t_rel)``."""
    alpha, beta = _branch(p, which)
    k = beta * p.t_rel
    own = (p.d_x if which == "x" else p.d_y) / (2.0 * beta)
    return p.sigma_z2 * alpha ** 2 * p.t_rel / (beta * (1.0 + k) ** 2) + own


def _mean_slope(p, which, tau):
    """``<which(t + tau) | z(t)> / z(t)``."""
    alpha, beta = _branch(p, which)
    if alpha == 0.0:
        return 0.0
    return response_slope(BlrmParams(alpha, beta, p.t_rel, p.d_z), tau)


def cond_cross_moment(p, tau):
    """``Cov(x(t), y(t+tau) | z(t))``, independent of the value of ``z(t)``."""
    _require_no_gamma(p)
    if tau < 0:
        raise ValueError("tau must be >= 0")
    kx, ky = p.beta_x * p.t_rel, p.beta_y * p.t_rel
    return (p.sigma_z2 * 2.0 * p.alpha_x * p.alpha_y * p.t_rel * math.exp(-p.beta_y * tau)
            / ((kx + 1.0) * (ky + 1.0) * (p.beta_x + p.beta_y)))


def cond_second_moment(p, tau, z_now):
    """Raw moment ``<x(t) y(t+tau) | z(t)>`` and the two conditional means.

    The raw moment carries a ``z(t)**2`` term; subtracting the product of the
    means leaves :func:`cond_cross_moment`.
    """
    _require_no_gamma(p)
    mx = z_now * _mean_slope(p, "x", 0.0)
    my = z_now * _mean_slope(p, "y", tau)
    return mx * my + cond_cross_moment(p, tau), mx, my


def _innovation_y(p, tau):
    """``Var(y(t+tau) | x(t), y(t), z(t))``."""
    z_part = p.d_z * p.alpha_y ** 2 * expdiff_sq_integral(1.0 / p.t_rel, p.beta_y, tau)
    return z_part - p.d_y / (2.0 * p.beta_y) * math.expm1(-2.0 * p.beta_y * tau)


def _var_y_later_given_z(p, tau):
    # given z(t), y(t) is independent of the future z path
    return math.exp(-2.0 * p.beta_y * tau) * _var_given_z(p, "y") + _innovation_y(p, tau)


def cond_measures(p, tau):
    """``(I_xy|z, I_lag|z, I_tot|z)`` in nats, from correlation coefficients.

    ``I_lag|z = -0.5 ln(1 - rho^2)`` with ``rho`` the conditional correlation
    of ``x(t)`` and ``y(t+tau)``; ``I_tot|z`` is half the log ratio of
    ``Var(y(t+tau) | z)`` to ``Var(y(t+tau) | x, y, z)``.
    """
    _require_no_gamma(p)
    if tau < 0:
        raise ValueError("tau must be >= 0")
    vx = _var_given_z(p, "x")
    vy = _var_given_z(p, "y")
    rho0 = cond_cross_moment(p, 0.0) / math.sqrt(vx * vy)
    # noiseless legs with equal rates make x and y proportional given z
    i_xy = -0.5 * math.log1p(-rho0 * rho0) if rho0 * rho0 < 1.0 else math.inf
    if tau == 0:
        return i_xy, i_xy, math.inf
    v_later = _var_y_later_given_z(p, tau)
    rho = cond_cross_moment(p, tau) / math.sqrt(vx * v_later)
    i_lag = -0.5 * math.log1p(-rho * rho)
    i_tot = 0.5 * math.log(v_later / _innovation_y(p, tau))
    return i_xy, i_lag, i_tot


def closed_form_point(p, tau):
    """Full ``x -> y`` decomposition conditioned on ``z`` (``gamma = 0``)."""
    _require_no_gamma(p)
    if tau < 0:
        raise ValueError("tau must be >= 0")
    vx = _var_given_z(p, "x")
    vy = _var_given_z(p, "y")
    c0 = cond_cross_moment(p, 0.0)
    decay2 = math.exp(-2.0 * p.beta_y * tau)
    q = _innovation_y(p, tau) if tau > 0 else 0.0
    v_none = decay2 * vy + q
    # x(t) informs y(t+tau) only through y(t)
    v_src = decay2 * (vy - c0 * c0 / vx) + q
    i_xy = -0.5 * math.log1p(-c0 * c0 / (vx * vy))
    return assemble_point(tau, v_none, v_src, q, q, i_xy)


@dataclass(frozen=True)
class ZeroInfluenceReport:
    taus: np.ndarray
    c_closed_form: np.ndarray
    c_engine: np.ndarray
    tolerance: float
    details: dict = field(default_factory=dict, compare=False)

    @property
    def max_abs_closed_form(self):
        return float(np.max(np.abs(self.c_closed_form)))

    @property
    def max_abs_engine(self):
        return float(np.max(np.abs(self.c_engine)))

    @property
    def max_abs(self):
        return max(self.max_abs_closed_form, self.max_abs_engine)

    @property
    def passed(self):
        return self.max_abs <= self.tolerance


def _c_from_measures(p, tau):
    i_xy, i_lag, i_tot = cond_measures(p, tau)
    return i_lag - linear_redundancy(i_xy, i_tot)


def verify_zero_influence(p, tau_grid, tolerance=1e-9):
    """Evaluate ``C_{x->y} | z`` on a grid by closed forms and by the general engine."""
    _require_no_gamma(p)
    taus = np.asarray(tau_grid, dtype=float)
    closed = np.array([_c_from_measures(p, t) for t in taus])
    curve = decompose_curve(p.network(), "x", "y", taus, condition_on_parents=True)
    engine = curve.column("c")
    return ZeroInfluenceReport(taus, closed, engine, tolerance,
                               {"conditioned_on": sorted(curve.conditioned_on)})


def fig7_curve(p, tau_grid, spurious_tolerance=1e-9):
    """Parent-conditioned ``x -> y`` curve via the general engine.

    Pairs without a directed path (``y -> x``, ``x -> z``, ``y -> z``) are
    evaluated too; their largest ``|C|`` is stored in ``metadata`` under
    ``spurious`` together with a ``spurious_ok`` flag.
    """
    net = p.network()
    curve = decompose_curve(net, "x", "y", tau_grid, condition_on_parents=True)
    spurious = {}
    for src, dst in (("y", "x"), ("x", "z"), ("y", "z")):
        other = decompose_curve(net, src, dst, tau_grid, condition_on_parents=True)
        spurious[f"{src}->{dst}"] = float(np.max(np.abs(other.column("c"))))
    curve.metadata["spurious"] = spurious
    curve.metadata["spurious_ok"] = all(v <= spurious_tolerance for v in spurious.values())
    return curve
