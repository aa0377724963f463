"""Exact second moments of stationary linear networks.

The stationary covariance solves ``A S + S A^T + Q = 0``. Over a lag ``tau``
the state evolves as ``v(t+tau) = Phi v(t) + w`` with ``Phi = exp(A tau)`` and
``w ~ N(0, Q_tau)``, ``Q_tau = int_0^tau exp(A s) Q exp(A^T s) ds``.

Conditional variances of future values given present ones are formed as
``Phi C Phi^T + Q_tau`` (``C`` the conditional covariance of the present
state), a sum of positive semidefinite terms. This keeps full relative
accuracy at short lags where ``S - Phi S Phi^T`` would cancel.
"""

import functools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg
from scipy.linalg import lapack

from . import _numeric
from .exceptions import NumericalFailure, SingularConditioning, UnknownNode
from .network import drift_matrix, noise_matrix, validate

__all__ = [
    "Var",
    "CovarianceMatrix",
    "LaggedGaussian",
    "stationary_covariance",
    "lagged_joint",
    "conditional_covariance",
    "matrix_exponential",
    "transition",
    "predictive_covariance",
]


class Var(NamedTuple):
    """A node value at time ``t`` (``later=False``) or ``t + tau``."""

    name: str
    later: bool = False

    def __str__(self):
        return f"{self.name}(t+tau)" if self.later else f"{self.name}(t)"


def _as_var(label):
    return label if isinstance(label, Var) else Var(label)


@dataclass(frozen=True)
class CovarianceMatrix:
    labels: tuple
    values: np.ndarray

    def __post_init__(self):
        labels = tuple(_as_var(v) for v in self.labels)
        values = np.array(self.values, dtype=float)
        if values.shape != (len(labels), len(labels)):
            raise ValueError(f"shape {values.shape} does not match {len(labels)} labels")
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate labels in {labels}")
        if values.size:
            scale = max(np.max(np.abs(values)), np.finfo(float).tiny)
            if np.max(np.abs(values - values.T)) > 1e-12 * scale:
                raise NumericalFailure("covariance matrix is not symmetric")
            values = _numeric.symmetrize(values)
            lam = np.linalg.eigvalsh(values)
            if lam[0] < -1e-10 * max(np.trace(values), np.finfo(float).tiny):
                raise NumericalFailure(f"covariance matrix is not PSD (min eigenvalue {lam[0]:.3g})")
        values.flags.writeable = False
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "values", values)

    def index(self, label):
        try:
            return self.labels.index(_as_var(label))
        except ValueError:
            raise UnknownNode(f"no variable {label!s} in covariance over {[str(v) for v in self.labels]}") from None

    def indices(self, labels):
        return [self.index(v) for v in labels]

    def sub(self, labels):
        labels = tuple(_as_var(v) for v in labels)
        idx = self.indices(labels)
        return CovarianceMatrix(labels, self.values[np.ix_(idx, idx)])

    def var(self, label):
        i = self.index(label)
        return float(self.values[i, i])

    def __len__(self):
        return len(self.labels)


@dataclass(frozen=True)
class LaggedGaussian:
    """Joint law of selected variables at ``t`` and ``t + lag``."""

    base: CovarianceMatrix
    lag: float

    @property
    def now(self):
        return tuple(v for v in self.base.labels if not v.later)

    @property
    def later(self):
        return tuple(v for v in self.base.labels if v.later)


def matrix_exponential(a, tau=1.0):
    """``exp(a * tau)`` by scaling and squaring with a Pade approximant."""
    return scipy.linalg.expm(np.asarray(a, dtype=float) * tau)


def _lyapunov_kron(a, q):
    # (I kron A + A kron I) vec(S) = -vec(Q); O(n^6), fine for desk-scale n
    n = a.shape[0]
    eye = np.eye(n)
    k = np.kron(eye, a) + np.kron(a, eye)
    try:
        s = np.linalg.solve(k, -q.reshape(-1)).reshape(n, n)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"Lyapunov system is singular: {exc}") from None
    return _numeric.symmetrize(s)


@functools.lru_cache(maxsize=64)
def _stationary(network):
    a = drift_matrix(network)
    q = noise_matrix(network)
    s = _lyapunov_kron(a, q)
    resid = np.max(np.abs(a @ s + s @ a.T + q))
    if resid > 1e-10 * np.max(np.abs(q)):
        raise NumericalFailure(f"Lyapunov residual {resid:.3g} exceeds tolerance")
    return s


def stationary_covariance(network):
    """Stationary covariance over all nodes, labelled in topological order."""
    network = validate(network)
    return CovarianceMatrix(tuple(Var(n) for n in network.names), _stationary(network))


@functools.lru_cache(maxsize=1024)
def _transition(network, tau):
    a = drift_matrix(network)
    q = noise_matrix(network)
    n = a.shape[0]
    if tau == 0.0:
        return np.eye(n), np.zeros((n, n))
    # Van Loan block exponential on a short step, then doubling
    #   Q_{2h} = Q_h + Phi_h Q_h Phi_h^T,  Phi_{2h} = Phi_h^2
    rate = np.max(np.sum(np.abs(a), axis=0))
    halvings = max(0, math.ceil(math.log2(tau * rate / 0.5))) if tau * rate > 0.5 else 0
    h = tau / 2.0 ** halvings
    m = np.zeros((2 * n, 2 * n))
    m[:n, :n] = -a
    m[:n, n:] = q
    m[n:, n:] = a.T
    e = matrix_exponential(m, h)
    phi = e[n:, n:].T
    qt = _numeric.symmetrize(phi @ e[:n, n:])
    for _ in range(halvings):
        qt = _numeric.symmetrize(qt + phi @ qt @ phi.T)
        phi = phi @ phi
    return phi, qt


def transition(network, tau):
    """``(Phi, Q_tau)`` for a lag ``tau >= 0``, in topological order."""
    if tau < 0:
        raise ValueError(f"tau must be >= 0, got {tau}")
    network = validate(network)
    phi, qt = _transition(network, float(tau))
    return phi.copy(), qt.copy()


def lagged_joint(network, now, later, tau):
    """Joint covariance of ``now`` nodes at ``t`` and ``later`` nodes at ``t + tau``.

    The cross block is ``Cov(v(t+tau), v(t)) = Phi S``. Negative shifts are
    expressed by swapping the two groups.
    """
    if tau < 0:
        raise ValueError(f"tau must be >= 0, got {tau}; swap the variable groups instead")
    network = validate(network)
    s = _stationary(network)
    phi, _ = _transition(network, float(tau))
    i_now = network.indices(now)
    i_later = network.indices(later)
    cross = (phi @ s)[np.ix_(i_later, i_now)]
    top = np.hstack([s[np.ix_(i_now, i_now)], cross.T])
    bottom = np.hstack([cross, s[np.ix_(i_later, i_later)]])
    labels = tuple(Var(n) for n in now) + tuple(Var(n, True) for n in later)
    return LaggedGaussian(CovarianceMatrix(labels, np.vstack([top, bottom])), float(tau))


def _schur(values, keep, given):
    """Conditional covariance block, plus the given-indices actually used."""
    sub_kk = values[np.ix_(keep, keep)]
    if not given:
        return sub_kk
    g = values[np.ix_(given, given)]
    kg = values[np.ix_(keep, given)]
    scale = max(np.trace(g), np.finfo(float).tiny)
    # pivoted Cholesky: leading pivots span the non-degenerate part of `given`
    chol, piv, rank, info = lapack.dpstrf(np.array(g, order="F"), lower=1,
                                          tol=_numeric.singular_rtol() * scale)
    if info < 0:
        raise NumericalFailure(f"dpstrf failed with info={info}")
    piv = piv[:len(given)] - 1
    lead = piv[:rank]
    lower = np.tril(chol)[:rank, :rank]
    if rank == 0:
        cond = sub_kk.copy()
    else:
        w = scipy.linalg.solve_triangular(lower, kg[:, lead].T, lower=True)
        cond = sub_kk - w.T @ w
    if rank < len(given):
        dropped = piv[rank:]
        rest = [given[i] for i in dropped]
        used = [given[i] for i in lead]
        full = _schur(values, list(keep) + rest, used) if used else values[np.ix_(list(keep) + rest, list(keep) + rest)]
        nk = len(keep)
        cross = full[:nk, nk:]
        bound = math.sqrt(_numeric.singular_rtol()) * math.sqrt(
            max(np.max(np.diag(sub_kk)), 0.0) * scale)
        if np.max(np.abs(cross)) > bound:
            raise SingularConditioning(
                "conditioning covariance is singular and correlated with the kept variables")
    return _numeric.symmetrize(cond)


def conditional_covariance(joint, keep, given=()):
    """Gaussian conditional covariance of ``keep`` given ``given``.

    ``keep`` and ``given`` are disjoint label subsets of ``joint``. Degenerate
    directions of the conditioning block are projected out only when they
    carry no covariance with ``keep``; otherwise :class:`SingularConditioning`.
    """
    keep = tuple(_as_var(v) for v in keep)
    given = tuple(_as_var(v) for v in given)
    if set(keep) & set(given):
        raise ValueError("keep and given must be disjoint")
    if isinstance(joint, LaggedGaussian):
        joint = joint.base
    cond = _schur(joint.values, joint.indices(keep), joint.indices(given))
    # clip rounding-level negative eigen-directions
    lam, vec = np.linalg.eigh(cond)
    floor = -1e-10 * max(np.trace(joint.values[np.ix_(joint.indices(keep), joint.indices(keep))]), np.finfo(float).tiny)
    if lam.size and lam[0] < floor:
        raise NumericalFailure(f"conditional covariance not PSD (min eigenvalue {lam[0]:.3g})")
    if lam.size and lam[0] < 0:
        cond = (vec * np.clip(lam, 0.0, None)) @ vec.T
    return CovarianceMatrix(keep, cond)


def _present_conditional(network, given):
    """Covariance of the full present state given ``given`` (exact zeros on ``given``)."""
    s = _stationary(network)
    n = s.shape[0]
    g = network.indices(given)
    rest = [i for i in range(n) if i not in g]
    c = np.zeros((n, n))
    if rest:
        c[np.ix_(rest, rest)] = _schur(s, rest, g)
    return c


def predictive_covariance(network, later, given_now, tau):
    """``Cov(v_later(t+tau) | v_given(t))`` without subtractive cancellation."""
    if tau < 0:
        raise ValueError(f"tau must be >= 0, got {tau}")
    network = validate(network)
    later = tuple(later)
    phi, qt = _transition(network, float(tau))
    c = _present_conditional(network, tuple(given_now))
    idx = network.indices(later)
    rows = phi[idx, :]
    values = rows @ c @ rows.T + qt[np.ix_(idx, idx)]
    return CovarianceMatrix(tuple(Var(n, True) for n in later), _numeric.symmetrize(values))
