"""Self-verification suite behind ``causalflow verify``.

Each check compares two independent routes (closed form against the
covariance engine, or an identity against its parts) and reports the
largest discrepancy found.
"""

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from . import blrm, ffl
from .measures import decompose, decompose_curve, linear_redundancy
from .network import parents, validate

__all__ = ["Check", "run_checks", "format_report", "stock_networks"]

TOL = 1e-9


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    value: float
    tolerance: float

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name:<66s} {self.value:11.3e}  (tol {self.tolerance:.0e})"


def _check(name, value, tol=TOL):
    value = float(value)
    return Check(name, bool(value <= tol), value, tol)


def _rel(a, b):
    if math.isinf(a) or math.isinf(b):
        return 0.0 if a == b else math.inf
    return abs(a - b) / max(1.0, abs(a), abs(b))


REFERENCE_BLRM = blrm.BlrmParams(alpha=0.1, beta=0.2, t_rel=10.0, d=10.0)


def _blrm_checks(p, label, grid):
    out = []
    net = p.network()
    # optimum from the formula vs a numeric search on the engine curve
    fine = np.linspace(0.5 * blrm.tau_opt(p), 1.5 * blrm.tau_opt(p), 2001)
    engine = decompose_curve(net, "x", "y", fine)
    out.append(_check(f"{label}: optimal information, formula vs engine search",
                      abs(blrm.i_opt(p) - engine.peak_i), 1e-9))
    worst = 0.0
    for t in grid:
        a = blrm.closed_form_point(p, t).as_tuple()
        b = decompose(net, "x", "y", t).as_tuple()
        worst = max(worst, max(_rel(u, v) for u, v in zip(a, b)))
    out.append(_check(f"{label}: closed forms vs engine (x->y)", worst))
    c_yx = decompose_curve(net, "y", "x", grid).column("c")
    c_cf = [blrm.closed_form_point(p, t, "y->x").c for t in grid]
    out.append(_check(f"{label}: zero influence y->x", max(np.max(np.abs(c_yx)), np.max(np.abs(c_cf)))))
    return out


def _closure(net, src, dst, grid, condition):
    worst = 0.0
    for pt in decompose_curve(net, src, dst, grid, condition_on_parents=condition).points:
        if not math.isfinite(pt.i_tot):
            continue
        worst = max(worst,
                    abs(pt.i_tot - (pt.r_linear + pt.u_x + pt.u_y + pt.s)),
                    abs(pt.i_lag - (pt.r_linear + pt.u_x)),
                    abs(pt.te - (pt.u_x + pt.s)))
    return worst


def _redundancy_checks(rng, n=20000):
    a = rng.exponential(2.0, n)
    b = rng.exponential(2.0, n)
    worst_bound = worst_sym = 0.0
    for u, v in zip(a, b):
        r = linear_redundancy(u, v)
        worst_bound = max(worst_bound, -r, r - min(u, v))
        worst_sym = max(worst_sym, abs(r - linear_redundancy(v, u)))
    return [_check("redundancy within [0, min]", max(worst_bound, 0.0), 1e-12),
            _check("redundancy symmetric", worst_sym, 1e-12)]


def _ancestors(net, node):
    return parents(net, (node,))


def network_checks(net, grid):
    """Closure on every ordered pair; zero influence where no directed path exists."""
    net = validate(net)
    out = []
    closure = 0.0
    spurious = 0.0
    names = net.names
    for src in names:
        for dst in names:
            if src == dst:
                continue
            closure = max(closure, _closure(net, src, dst, grid, True))
            if src not in _ancestors(net, dst):
                c = decompose_curve(net, src, dst, grid, condition_on_parents=True).column("c")
                spurious = max(spurious, float(np.max(np.abs(c))))
    out.append(_check("network: closure identities, all pairs", closure))
    out.append(_check("network: zero influence without a directed path", spurious))
    try:
        p = blrm.BlrmParams.from_network(net)
    except ValueError:
        pass
    else:
        out.extend(_blrm_checks(p, "network as basic response model", grid))
    return out


def stock_networks():
    """The networks exercised by the stock suite."""
    return {
        "blrm_reference": REFERENCE_BLRM.network(),
        "blrm_unit": blrm.BlrmParams(1.0, 1.0, 1.0, 2.0).network(),
        "ffl_gamma0": dataclasses.replace(ffl.REFERENCE_FFL, gamma=0.0).network(),
        "ffl_reference": ffl.REFERENCE_FFL.network(),
    }


def run_checks(network=None, grid=None, seed=0):
    """Run the stock suite, plus network-specific checks when ``network`` is given."""
    if network is not None:
        network = validate(network)
    g = np.geomspace(1e-3, 300.0, 64) if grid is None else np.asarray(grid, float)
    out = []
    p = REFERENCE_BLRM
    out.append(_check("tau_opt formula vs 10 ln(4/3)", abs(blrm.tau_opt(p) - 10 * math.log(4 / 3)), 1e-12))
    out.append(_check("i_opt formula vs 0.5 ln(32/5)", abs(blrm.i_opt(p) - 0.5 * math.log(6.4)), 1e-12))
    out.extend(_blrm_checks(p, "basic model, beta t_rel = 2", g))
    out.extend(_blrm_checks(blrm.BlrmParams(1.0, 1.0, 1.0, 2.0), "basic model, beta t_rel = 1", g))
    q = dataclasses.replace(ffl.REFERENCE_FFL, gamma=0.0)
    rep = ffl.verify_zero_influence(q, g)
    out.append(_check("feed-forward loop, gamma = 0: zero influence x->y | z", rep.max_abs))
    curve = ffl.fig7_curve(ffl.REFERENCE_FFL, g)
    out.append(_check("feed-forward loop, gamma = 1: spurious pairs zero", max(curve.metadata["spurious"].values())))
    out.append(_check("feed-forward loop, gamma = 1: positive peak x->y", 0.0 if curve.peak_c > 0 else 1.0, 0.0))
    for name, net in stock_networks().items():
        out.append(_check(f"{name}: closure identities", _closure(net, *_pair(net), g, True)))
    out.extend(_redundancy_checks(np.random.default_rng(seed)))
    if network is not None:
        out.extend(network_checks(network, g))
    return out


def _pair(net):
    e = net.edges[-1]
    return e.source, e.target


def format_report(checks):
    lines = [c.line() for c in checks]
    n_fail = sum(not c.passed for c in checks)
    lines.append(f"{len(checks) - n_fail}/{len(checks)} checks passed")
    return "\n".join(lines) + "\n"
