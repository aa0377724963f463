"""Stationary sample paths of linear networks.

Two one-step kernels ``v -> Phi v + F xi`` (``xi`` standard normal) are
available: the exact Gaussian transition over ``dt`` and explicit
Euler-Maruyama. Paths start from the exact stationary law.

Random numbers: trajectory ``k`` of a run with seed ``s`` draws from its own
PCG64 stream seeded by ``numpy.random.SeedSequence(s, spawn_key=(k,))``. The
stream first yields the ``n`` standard normals of the initial state, then
``(burn_in + steps - 1) * n`` normals for the increments in step-major order.
Output is therefore fixed by ``(seed, trajectory index, step index)`` and
does not depend on how many trajectories are generated alongside.
"""

import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import signal

from ._io import atomic_write_text
from .exceptions import NumericalFailure, StepTooLarge
from .gausscov import _stationary, _transition
from .network import drift_matrix, noise_matrix, validate

__all__ = [
    "TransitionKernel",
    "TrajectoryEnsemble",
    "exact_step_sampler",
    "euler_maruyama_step",
    "generate",
    "write_trajectories",
    "read_trajectories",
    "format_trajectories",
    "parse_trajectories",
]

SCHEMES = ("exact", "em")


@dataclass(frozen=True, eq=False)
class TransitionKernel:
    """``v -> phi @ v + factor @ xi``; ``cov = factor @ factor.T``."""

    labels: tuple
    dt: float
    phi: np.ndarray
    factor: np.ndarray
    scheme: str

    @property
    def noise_cov(self):
        return self.factor @ self.factor.T

    def __call__(self, state, normals):
        return self.phi @ np.asarray(state, dtype=float) + self.factor @ np.asarray(normals, dtype=float)


def _psd_factor(cov, what):
    """Symmetric square root factor with rounding-level negatives clamped to zero."""
    lam, vec = np.linalg.eigh(0.5 * (cov + cov.T))
    floor = -1e-10 * max(np.trace(cov), np.finfo(float).tiny)
    if lam.size and lam[0] < floor:
        raise NumericalFailure(f"{what} has eigenvalue {lam[0]:.3g} below {floor:.3g}")
    return vec * np.sqrt(np.clip(lam, 0.0, None))


def exact_step_sampler(network, dt):
    """Exact Gaussian transition over ``dt``.

    The step covariance ``Sigma - Phi Sigma Phi^T`` is taken from the
    block-exponential integral, which equals it without the cancellation.
    """
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    network = validate(network)
    phi, qt = _transition(network, float(dt))
    return TransitionKernel(network.names, float(dt), np.tril(phi), _psd_factor(qt, "step noise covariance"), "exact")


def euler_maruyama_step(network, dt):
    """Explicit Euler-Maruyama kernel; requires ``dt < 0.1 / max(decay)``."""
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    network = validate(network)
    limit = 0.1 / float(np.max(network.decays))
    if dt >= limit:
        raise StepTooLarge(f"dt={dt} must be < 0.1/max(decay) = {limit:.6g}")
    a = drift_matrix(network)
    phi = np.eye(a.shape[0]) + a * dt
    factor = np.diag(np.sqrt(np.diag(noise_matrix(network)) * dt))
    return TransitionKernel(network.names, float(dt), phi, factor, "em")


@dataclass(frozen=True, eq=False)
class TrajectoryEnsemble:
    """``data[k, i, j]`` is node ``labels[j]`` of trajectory ``k`` at time ``i * dt``."""

    labels: tuple
    dt: float
    steps: int
    n_traj: int
    seed: object
    data: np.ndarray
    scheme: str = "exact"
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.shape != (self.n_traj, self.steps, len(self.labels)):
            raise ValueError(f"data shape {data.shape} != {(self.n_traj, self.steps, len(self.labels))}")
        if not np.all(np.isfinite(data)):
            raise NumericalFailure("trajectory contains non-finite values")
        data.flags.writeable = False
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def times(self):
        return np.arange(self.steps) * self.dt

    def index(self, name):
        try:
            return self.labels.index(name)
        except ValueError:
            raise KeyError(f"no node {name!r} in trajectories over {self.labels}") from None

    def series(self, name):
        """``(n_traj, steps)`` array of one node."""
        return self.data[:, :, self.index(name)]


def _stream(seed, k):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(k,))))


def _propagate(phi, x0, increments):
    """Run ``v[i+1] = phi v[i] + e[i]`` for lower-triangular ``phi``, node by node."""
    n_inc, n = increments.shape
    out = np.empty((n_inc + 1, n))
    out[0] = x0
    for i in range(n):
        drive = increments[:, i].copy()
        for j in range(i):
            if phi[i, j] != 0.0:
                drive += phi[i, j] * out[:-1, j]
        a = phi[i, i]
        # lfilter: w[m] = drive[m] + a w[m-1], with w[-1] = x0
        w, _ = signal.lfilter([1.0], [1.0, -a], drive, zi=[a * x0[i]])
        out[1:, i] = w
    return out


def generate(network, scheme="exact", dt=0.1, steps=1000, n_traj=1, seed=0, burn_in=0):
    """Stationary ensemble of ``n_traj`` paths with ``steps`` recorded points each.

    ``burn_in`` extra steps are simulated and discarded (useful for
    Euler-Maruyama, whose own stationary law differs slightly).
    """
    network = validate(network)
    if scheme not in SCHEMES:
        raise ValueError(f"scheme must be one of {SCHEMES}, got {scheme!r}")
    steps, n_traj, burn_in = int(steps), int(n_traj), int(burn_in)
    if steps < 1 or n_traj < 0 or burn_in < 0:
        raise ValueError("need steps >= 1, n_traj >= 0, burn_in >= 0")
    if seed is None or int(seed) < 0:
        raise ValueError("seed must be a non-negative integer")
    seed = int(seed)
    kernel = exact_step_sampler(network, dt) if scheme == "exact" else euler_maruyama_step(network, dt)
    init = _psd_factor(_stationary(network), "stationary covariance")
    n = len(network.names)
    total = burn_in + steps - 1
    data = np.empty((n_traj, steps, n))
    for k in range(n_traj):
        rng = _stream(seed, k)
        x0 = init @ rng.standard_normal(n)
        increments = rng.standard_normal((total, n)) @ kernel.factor.T
        path = _propagate(kernel.phi, x0, increments)
        data[k] = path[burn_in:]
    return TrajectoryEnsemble(network.names, float(dt), steps, n_traj, seed, data, scheme,
                              {"burn_in": burn_in})


# -- CSV ----------------------------------------------------------------------

def format_trajectories(ensemble):
    buf = io.StringIO()
    buf.write(",".join(("time",) + ensemble.labels) + "\n")
    times = ensemble.times
    for k in range(ensemble.n_traj):
        buf.write(f"# trajectory {k}\n")
        block = np.column_stack([times, ensemble.data[k]])
        np.savetxt(buf, block, fmt="%.17g", delimiter=",")
    return buf.getvalue()


def write_trajectories(ensemble, path):
    """Write the trajectory CSV atomically."""
    atomic_write_text(path, format_trajectories(ensemble))


def parse_trajectories(text, seed=None):
    """Parse trajectory CSV text into an ensemble (``dt`` read from the time column)."""
    lines = text.splitlines()
    if not lines or not lines[0].startswith("time"):
        raise ValueError("trajectory CSV must start with a 'time,...' header")
    header = [h.strip() for h in lines[0].split(",")]
    if header[0] != "time" or len(header) < 2 or len(set(header)) != len(header):
        raise ValueError(f"bad trajectory header {lines[0]!r}")
    labels = tuple(header[1:])
    blocks, current = [], None
    for lineno, line in enumerate(lines[1:], start=2):
        s = line.strip()
        if not s:
            continue
        if s.startswith("#"):
            if s.split()[1:2] == ["trajectory"]:
                current = []
                blocks.append(current)
            continue
        if current is None:
            raise ValueError(f"line {lineno}: data before the first '# trajectory' marker")
        fields_ = s.split(",")
        if len(fields_) != len(header):
            raise ValueError(f"line {lineno}: expected {len(header)} fields, got {len(fields_)}")
        current.append([float(v) for v in fields_])
    if not blocks:
        return TrajectoryEnsemble(labels, math.nan, 0, 0, seed, np.empty((0, 0, len(labels))))
    lengths = {len(b) for b in blocks}
    if len(lengths) != 1 or 0 in lengths:
        raise ValueError("trajectories must be non-empty and of equal length")
    arr = np.array(blocks)
    times = arr[0, :, 0]
    dt = float(times[1] - times[0]) if times.size > 1 else math.nan
    return TrajectoryEnsemble(labels, dt, arr.shape[1], arr.shape[0], seed, arr[:, :, 1:])


def read_trajectories(path):
    return parse_trajectories(Path(path).read_text(encoding="utf-8"))
