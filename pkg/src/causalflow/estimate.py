"""Gaussian plug-in estimates of the information measures from trajectories.

Sample covariances of present and lagged node values replace the exact
second moments; everything downstream (Schur complements, log ratios, the
redundancy composition) is the same code as the analytic path, so the
closure identities of the decomposition hold exactly for estimates too.
"""

import weakref
from dataclasses import dataclass, field

import numpy as np

from .exceptions import InsufficientData
from .gausscov import CovarianceMatrix, Var, conditional_covariance
from .measures import assemble_point, summarize_curve
from ._numeric import half_log_ratio

__all__ = [
    "LaggedSampleCov",
    "sample_lagged_cov",
    "integrated_autocorrelation_time",
    "effective_sample_size",
    "empirical_decomposition",
    "empirical_curve",
    "MIN_SAMPLES",
]

MIN_SAMPLES = 10


@dataclass(frozen=True)
class LaggedSampleCov:
    cov: CovarianceMatrix
    lag_steps: int
    n_samples: int
    ensemble: object = field(repr=False, compare=False)

    @property
    def labels(self):
        return self.cov.labels

    @property
    def effective_n(self):
        """Sample pairs divided by ``2 tau_int`` of the slowest node (computed on first use)."""
        return self.n_samples / _correlation_factor(self.ensemble)


def _pairs(ensemble, now, later, lag_steps):
    lag_steps = int(lag_steps)
    if lag_steps < 0:
        raise ValueError(f"lag_steps must be >= 0, got {lag_steps}")
    usable = ensemble.steps - lag_steps
    n = max(usable, 0) * ensemble.n_traj
    if n < MIN_SAMPLES:
        raise InsufficientData(f"only {n} sample pairs at lag {lag_steps}; need >= {MIN_SAMPLES}")
    i_now = [ensemble.index(v) for v in now]
    i_later = [ensemble.index(v) for v in later]
    d = ensemble.data
    left = d[:, :usable][:, :, i_now].reshape(n, len(i_now))
    right = d[:, lag_steps:][:, :, i_later].reshape(n, len(i_later))
    return np.hstack([left, right]), n


def sample_lagged_cov(ensemble, vars_now, vars_later, lag_steps):
    """Pooled sample covariance of ``vars_now`` at ``t`` and ``vars_later`` at ``t + lag``.

    All trajectories contribute their ``steps - lag_steps`` pairs; each
    variable is centred on its pooled mean. Labels follow
    :func:`~causalflow.gausscov.lagged_joint`.
    """
    vars_now, vars_later = tuple(vars_now), tuple(vars_later)
    m, n = _pairs(ensemble, vars_now, vars_later, lag_steps)
    m = m - m.mean(axis=0)
    values = m.T @ m / (n - 1)
    values = 0.5 * (values + values.T)
    labels = tuple(Var(v) for v in vars_now) + tuple(Var(v, True) for v in vars_later)
    return LaggedSampleCov(CovarianceMatrix(labels, values), int(lag_steps), n, ensemble)


def integrated_autocorrelation_time(series, window=5.0):
    """Integrated autocorrelation time in steps, ``1/2 + sum_k rho_k``.

    ``series`` is ``(n_traj, steps)``; the autocovariance is averaged over
    trajectories. The sum is cut at the smallest ``M >= window * tau(M)``.
    """
    x = np.atleast_2d(np.asarray(series, dtype=float))
    n_traj, steps = x.shape
    if steps < 2 or n_traj == 0:
        return 0.5
    x = x - x.mean(axis=1, keepdims=True)
    size = 1 << int(2 * steps - 1).bit_length()
    f = np.fft.rfft(x, size, axis=1)
    acov = np.fft.irfft(f * np.conj(f), size, axis=1)[:, :steps].mean(axis=0)
    if acov[0] <= 0:
        return 0.5
    rho = acov / acov[0]
    tau = 0.5
    for m in range(1, steps):
        tau += rho[m]
        if m >= window * tau:
            break
    return max(tau, 0.5)


_FACTORS = weakref.WeakKeyDictionary()


def _correlation_factor(ensemble):
    """``2 tau_int`` of the slowest node, computed once per ensemble."""
    if ensemble not in _FACTORS:
        taus = [integrated_autocorrelation_time(ensemble.series(v)) for v in ensemble.labels]
        _FACTORS[ensemble] = 2.0 * max(taus) if taus else 1.0
    return _FACTORS[ensemble]


def effective_sample_size(ensemble):
    """Total samples divided by ``2 tau_int`` of the slowest node."""
    return ensemble.n_traj * ensemble.steps / _correlation_factor(ensemble)


def _variance(cov, target, given):
    return conditional_covariance(cov, (target,), given).values[0, 0]


def empirical_decomposition(ensemble, src, dst, lag_steps, parents=()):
    """Plug-in decomposition of ``src -> dst`` at ``lag_steps * dt``.

    ``parents`` are node names conditioned on at time ``t``. At lag zero the
    target's own present determines the future exactly, so the conditional
    variances given it are set to zero, as in the analytic path.
    """
    if src == dst:
        raise ValueError("source and target must differ")
    parents = tuple(p for p in parents if p not in (src, dst))
    now = parents + (src, dst)
    sample = sample_lagged_cov(ensemble, now, (dst,), lag_steps)
    cov = sample.cov
    p = tuple(Var(v) for v in parents)
    x, y, y_later = Var(src), Var(dst), Var(dst, True)
    i_xy = half_log_ratio(_variance(cov, y, p), _variance(cov, y, p + (x,)))
    if int(lag_steps) == 0:
        v_none = _variance(cov, y, p)
        v_src = _variance(cov, y, p + (x,))
        v_dst = v_both = 0.0
    else:
        v_none = _variance(cov, y_later, p)
        v_src = _variance(cov, y_later, p + (x,))
        v_dst = _variance(cov, y_later, p + (y,))
        v_both = _variance(cov, y_later, p + (x, y))
    tau = int(lag_steps) * ensemble.dt
    return assemble_point(tau, v_none, v_src, v_dst, v_both, i_xy)


def empirical_curve(ensemble, src, dst, lag_steps_grid, parents=()):
    """Plug-in decomposition over a strictly increasing grid of lags in steps."""
    lags = [int(v) for v in lag_steps_grid]
    if not lags or lags[0] < 0 or any(b <= a for a, b in zip(lags, lags[1:])):
        raise ValueError("lag grid must be non-empty, >= 0 and strictly increasing")
    points = [empirical_decomposition(ensemble, src, dst, k, parents) for k in lags]
    cond = frozenset(p for p in parents if p not in (src, dst))
    return summarize_curve(src, dst, cond, points, {"effective_n": effective_sample_size(ensemble)})
