"""Gaussian information measures and the linear information decomposition.

For a source ``x`` and target ``y`` at lag ``tau`` the information that the
present pair ``(x(t), y(t))`` carries about ``y(t+tau)`` is split as::

    i_tot = r_linear + u_x + u_y + s
    i_lag = r_linear + u_x          (lagged mutual information)
    te    = u_x + s                 (transfer entropy)

where the redundancy ``r_linear`` is composed from ``i_xy = I(x(t); y(t))``
and ``i_tot`` like the information between the ends of a Gaussian Markov
chain. The unique information ``u_x`` is the causal influence ``c``.
Optionally every measure is conditioned on the present state of the parents
of the pair. All values are in nats.
"""

import math
from dataclasses import dataclass, field, fields

import numpy as np

from . import _numeric
from .exceptions import DeterministicRelation, SingularConditioning
from .gausscov import (
    Var,
    _as_var,
    _present_conditional,
    _transition,
    conditional_covariance,
)
from .network import ordered, parents, validate

__all__ = [
    "DecompositionPoint",
    "DecompositionCurve",
    "gaussian_mi",
    "transfer_entropy",
    "linear_redundancy",
    "wb_redundancy",
    "decompose",
    "decompose_curve",
    "assemble_point",
    "summarize_curve",
    "CURVE_COLUMNS",
]


@dataclass(frozen=True)
class DecompositionPoint:
    tau: float
    i_lag: float
    te: float
    i_tot: float
    i_xy: float
    r_linear: float
    r_wb: float
    u_x: float
    u_y: float
    s: float
    c: float

    @property
    def i_self(self):
        """``I(y(t); y(t+tau))`` (conditioned like the other measures)."""
        return self.r_linear + self.u_y

    @property
    def u_x_wb(self):
        """Unique information of the source under the min-redundancy decomposition."""
        return self.i_lag - self.r_wb

    def as_tuple(self):
        return tuple(getattr(self, f.name) for f in fields(self))


CURVE_COLUMNS = tuple(f.name for f in fields(DecompositionPoint))


@dataclass(frozen=True)
class DecompositionCurve:
    source: str
    target: str
    conditioned_on: frozenset
    points: tuple
    tau_opt: float
    tau_res: float
    peak_c: float
    peak_i: float
    metadata: dict = field(default_factory=dict, compare=False)

    @property
    def taus(self):
        return np.array([p.tau for p in self.points])

    def column(self, name):
        return np.array([getattr(p, name) for p in self.points])

    def __len__(self):
        return len(self.points)


def linear_redundancy(i_xy, i_tot):
    """Redundancy of two sources sharing ``i_xy`` and jointly giving ``i_tot``.

    ``R = 0.5 ln(e^{2(i_xy+i_tot)} / (e^{2 i_xy} + e^{2 i_tot} - 1))``, which
    equals ``-0.5 ln(1 - p q)`` with ``p = 1 - e^{-2 i_xy}`` and
    ``q = 1 - e^{-2 i_tot}``. Symmetric, bounded by ``min(i_xy, i_tot)``, and
    ``R(a, inf) = a`` exactly.
    """
    a, b = float(i_xy), float(i_tot)
    if not (a >= 0.0 and b >= 0.0):
        raise ValueError(f"informations must be >= 0, got {a}, {b}")
    a, b = (a, b) if a <= b else (b, a)
    if a == 0.0:
        return 0.0
    if math.isinf(b):
        return a
    p = -math.expm1(-2.0 * a)
    q = -math.expm1(-2.0 * b)
    pq = p * q
    if pq < 0.5:
        r = -0.5 * math.log1p(-pq)
    else:
        # 1 - pq = e^{-2a} + p e^{-2b}, both terms positive
        r = -0.5 * float(np.logaddexp(-2.0 * a, -2.0 * b + math.log(p)))
    return min(max(r, 0.0), a)


def wb_redundancy(i_x_out, i_y_out):
    """Williams-Beer redundancy for Gaussian sources: the smaller input."""
    return min(i_x_out, i_y_out)


def assemble_point(tau, v_none, v_src, v_dst, v_both, i_xy):
    """Build a decomposition point from four conditional variances of the target.

    ``v_*`` are the variances of ``y(t+tau)`` given, besides any parents,
    nothing / ``x(t)`` / ``y(t)`` / both. Variances that are exactly zero mark
    deterministic relations and produce infinite informations.
    """
    hlr = _numeric.half_log_ratio
    # at zero lag the lagged information is the equal-time one by definition
    i_lag = i_xy if tau == 0 else hlr(v_none, v_src)
    i_self = hlr(v_none, v_dst)
    i_tot = hlr(v_none, v_both)
    te = hlr(v_dst, v_both)
    r = linear_redundancy(i_xy, i_tot)
    u_x = i_lag - r
    return DecompositionPoint(
        tau=float(tau),
        i_lag=i_lag,
        te=te,
        i_tot=i_tot,
        i_xy=i_xy,
        r_linear=r,
        r_wb=wb_redundancy(i_lag, i_self),
        u_x=u_x,
        u_y=i_self - r,
        s=te - u_x,
        c=u_x,
    )


def summarize_curve(source, target, conditioned_on, points, metadata=None):
    """Wrap points into a curve with argmax summaries (ties go to smaller tau)."""
    points = tuple(points)
    if not points:
        raise ValueError("a curve needs at least one point")
    i_lag = np.array([p.i_lag for p in points])
    c = np.array([p.c for p in points])
    j = int(np.nanargmax(np.where(np.isfinite(i_lag), i_lag, -np.inf)))
    k = int(np.nanargmax(np.where(np.isfinite(c), c, -np.inf)))
    return DecompositionCurve(
        source=source,
        target=target,
        conditioned_on=frozenset(conditioned_on),
        points=points,
        tau_opt=points[j].tau,
        tau_res=points[k].tau,
        peak_c=float(c[k]),
        peak_i=float(i_lag[j]),
        metadata=dict(metadata or {}),
    )


def _singular(m, scale):
    if m.size == 0:
        return False
    return np.linalg.eigvalsh(m)[0] <= _numeric.deterministic_rtol() * scale


def gaussian_mi(joint, a, b, given=()):
    """``I(A; B | given)`` in nats from a joint covariance.

    Returns ``math.inf`` when ``A`` and ``B`` determine each other (given the
    conditioning set) and 0 when either side is fully determined by ``given``.
    """
    a, b = _labels(a), _labels(b)
    if not a or not b:
        raise ValueError("A and B must be non-empty")
    if set(a) & set(b):
        raise ValueError("A and B must be disjoint")
    if hasattr(joint, "base"):
        joint = joint.base
    cond = conditional_covariance(joint, a + b, given).values
    na = len(a)
    full = joint.values[np.ix_(joint.indices(a + b), joint.indices(a + b))]
    scale_a = np.trace(full[:na, :na])
    scale_b = np.trace(full[na:, na:])
    ma, mb = cond[:na, :na], cond[na:, na:]
    for m, scale in ((ma, scale_a), (mb, scale_b)):
        if _singular(m, scale):
            if np.max(np.abs(m)) <= _numeric.deterministic_rtol() * scale:
                return 0.0
            raise SingularConditioning("one side of the mutual information is partially determined by the conditioning set")
    if _singular(cond, scale_a + scale_b):
        return math.inf
    value = 0.5 * (np.linalg.slogdet(ma)[1] + np.linalg.slogdet(mb)[1] - np.linalg.slogdet(cond)[1])
    if -_numeric.get_eps() < value < 0.0:
        value = 0.0
    return float(value)


def _labels(x):
    if isinstance(x, (str, Var)):
        return (_as_var(x),)
    return tuple(_as_var(v) for v in x)


def _target_variance(network, dst, given, tau, present=None):
    phi, qt = _transition(network, float(tau))
    c = _present_conditional(network, tuple(given)) if present is None else present
    d = network.index(dst)
    row = phi[d]
    return float(row @ c @ row + qt[d, d])


def transfer_entropy(network, src, dst, tau, extra_conditioning=()):
    """``I(src(t); dst(t+tau) | dst(t), extra(t))`` in nats.

    ``tau = 0`` is excluded (the target's own present determines it). Returns
    ``math.inf`` when the residual variance vanishes.
    """
    if tau == 0:
        raise DeterministicRelation("transfer entropy is undefined at tau = 0")
    if tau < 0:
        raise ValueError(f"tau must be > 0, got {tau}")
    network = validate(network)
    extra = tuple(n for n in extra_conditioning if n not in (src, dst))
    base = ordered(network, set(extra) | {dst})
    both = ordered(network, set(extra) | {dst, src})
    v_dst = _target_variance(network, dst, base, tau)
    v_both = _target_variance(network, dst, both, tau)
    return _numeric.half_log_ratio(v_dst, v_both)


class _Decomposer:
    """Precomputes the tau-independent conditional covariances of a pair."""

    def __init__(self, network, src, dst, condition_on_parents):
        network = validate(network)
        if src == dst:
            raise ValueError("source and target must differ")
        network.index(src)
        network.index(dst)
        self.network = network
        self.src, self.dst = src, dst
        self.parents = parents(network, (src, dst)) if condition_on_parents else frozenset()
        p = set(self.parents)
        self.present = {
            key: _present_conditional(network, ordered(network, p | extra))
            for key, extra in (
                ("none", set()), ("src", {src}), ("dst", {dst}), ("both", {src, dst}),
            )
        }
        d = network.index(dst)
        self.i_xy = _numeric.half_log_ratio(self.present["none"][d, d], self.present["src"][d, d])

    def point(self, tau):
        if tau < 0:
            raise ValueError(f"tau must be >= 0, got {tau}")
        phi, qt = _transition(self.network, float(tau))
        d = self.network.index(self.dst)
        row = phi[d]
        v = {k: float(row @ c @ row + qt[d, d]) for k, c in self.present.items()}
        return assemble_point(tau, v["none"], v["src"], v["dst"], v["both"], self.i_xy)

    @property
    def metadata(self):
        # the min-redundancy comparison is conditioned on parents as an extension
        return {"r_wb_parent_conditioned": bool(self.parents)}


def decompose(network, src, dst, tau, condition_on_parents=False):
    """Full decomposition at one lag.

    With ``condition_on_parents`` every measure is conditioned on the present
    state of all ancestors of ``src`` or ``dst``.
    """
    return _Decomposer(network, src, dst, condition_on_parents).point(tau)


def decompose_curve(network, src, dst, tau_grid, condition_on_parents=False):
    """Decomposition over a strictly increasing grid of lags ``>= 0``."""
    grid = np.asarray(tau_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("tau grid must be a non-empty 1-D sequence")
    if grid[0] < 0 or np.any(np.diff(grid) <= 0):
        raise ValueError("tau grid must be strictly increasing and >= 0")
    dec = _Decomposer(network, src, dst, condition_on_parents)
    points = [dec.point(t) for t in grid]
    return summarize_curve(src, dst, dec.parents, points, dec.metadata)
