"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 invalid network, 3 numerical
failure, 4 a verification check failed.
"""

import argparse
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import blrm, checks, estimate, simulate
from ._io import atomic_write_text, format_table
from .exceptions import InsufficientData, NetworkError, NumericalFailure, StepTooLarge
from .measures import CURVE_COLUMNS, decompose_curve
from .network import load_network, parents
from .plot import line_chart

EXIT_OK, EXIT_USAGE, EXIT_NETWORK, EXIT_NUMERIC, EXIT_VERIFY = 0, 1, 2, 3, 4

PLOTTED = ("i_lag", "te", "r_linear", "r_wb", "s", "c")
CAPACITY_COLUMNS = ("beta_t_rel", "peak_c", "tau_res", "i_opt")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


@dataclass(frozen=True)
class RunConfig:
    command: str
    network: object = None
    source: str = None
    target: str = None
    tau_min: float = None
    tau_max: float = None
    tau_steps: int = 256
    tau_scale: str = "log"
    condition_parents: bool = False
    out: object = None
    svg: object = None
    seed: int = 0
    dt: float = None
    steps: int = None
    ensemble: int = 1
    scheme: str = "exact"
    trajectories: object = None
    burn_in: int = 0
    grid_min: float = 1e-4
    grid_max: float = 1e6
    grid_steps: int = 11

    def __post_init__(self):
        if self.tau_min is not None and self.tau_min < 0:
            raise UsageError("--tau-min must be >= 0")
        if self.tau_steps < 2:
            raise UsageError("--tau-steps must be >= 2")
        if self.tau_scale == "log" and self.tau_min is not None and self.tau_min <= 0:
            raise UsageError("a log tau grid needs --tau-min > 0")
        if self.tau_min is not None and self.tau_max is not None and self.tau_max <= self.tau_min:
            raise UsageError("--tau-max must exceed --tau-min")

    def tau_grid(self, t_char):
        """Requested grid; unspecified ends default to ``1e-3 t_char`` and ``30 t_char``."""
        lo = 1e-3 * t_char if self.tau_min is None else self.tau_min
        hi = 30.0 * t_char if self.tau_max is None else self.tau_max
        if hi <= lo:
            raise UsageError(f"empty tau range [{lo}, {hi}]")
        if self.tau_scale == "log":
            return np.geomspace(lo, hi, self.tau_steps)
        return np.linspace(lo, hi, self.tau_steps)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--network", type=Path)
    common.add_argument("--out", type=Path)
    common.add_argument("--svg", type=Path)
    common.add_argument("--seed", type=int, default=0)

    pair = argparse.ArgumentParser(add_help=False)
    pair.add_argument("--source")
    pair.add_argument("--target")
    pair.add_argument("--tau-min", type=float)
    pair.add_argument("--tau-max", type=float)
    pair.add_argument("--tau-steps", type=int, default=256)
    pair.add_argument("--tau-scale", choices=("lin", "log"), default="log")
    pair.add_argument("--condition-parents", action="store_true")

    sim = argparse.ArgumentParser(add_help=False)
    sim.add_argument("--dt", type=float)
    sim.add_argument("--steps", type=int)
    sim.add_argument("--ensemble", type=int, default=1)
    sim.add_argument("--scheme", choices=simulate.SCHEMES, default="exact")
    sim.add_argument("--burn-in", type=int, default=0)

    parser = _Parser(prog="causalflow", description="Information flow and causal influence in linear networks.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("analyze", parents=[common, pair], help="exact decomposition curve")
    sub.add_parser("simulate", parents=[common, sim], help="stationary trajectories")
    p = sub.add_parser("estimate", parents=[common, pair, sim], help="plug-in decomposition from trajectories")
    p.add_argument("--trajectories", type=Path, help="trajectory CSV (default: simulate in memory)")
    p = sub.add_parser("capacity", parents=[common], help="peak causal influence against beta*t_rel")
    p.add_argument("--grid-min", type=float, default=1e-4)
    p.add_argument("--grid-max", type=float, default=1e6)
    p.add_argument("--grid-steps", type=int, default=11)
    sub.add_parser("verify", parents=[common], help="run the verification suite")
    return parser


def parse_config(argv):
    args = vars(build_parser().parse_args(argv))
    known = RunConfig.__dataclass_fields__
    return RunConfig(**{k: v for k, v in args.items() if k in known and v is not None or k == "command"})


def _need(cfg, *names):
    missing = [n for n in names if getattr(cfg, n) is None]
    if missing:
        raise UsageError("missing " + ", ".join("--" + n.replace("_", "-") for n in missing))


def _emit(path, text):
    if path is None:
        sys.stdout.write(text)
    else:
        atomic_write_text(path, text)


def _network(cfg):
    _need(cfg, "network")
    try:
        return load_network(cfg.network)
    except OSError as exc:
        raise UsageError(f"cannot read network file: {exc}") from None


def _pair(cfg, net):
    _need(cfg, "source", "target")
    for name in (cfg.source, cfg.target):
        if name not in net.names:
            raise UsageError(f"node {name!r} is not in the network {list(net.names)}")
    if cfg.source == cfg.target:
        raise UsageError("--source and --target must differ")


def curve_table(curve, extra=None):
    """Curve CSV text; ``extra`` maps additional column names to per-row values."""
    extra = extra or {}
    columns = CURVE_COLUMNS + tuple(extra)
    rows = [p.as_tuple() + tuple(extra[k][i] for k in extra) for i, p in enumerate(curve.points)]
    return format_table(columns, rows, (("tau_opt", curve.tau_opt), ("tau_res", curve.tau_res)))


def curve_svg(curve, title):
    series = {name: curve.column(name) for name in PLOTTED}
    finite = np.concatenate([curve.column(n) for n in ("i_lag", "r_linear", "r_wb", "c", "s", "i_xy")])
    finite = finite[np.isfinite(finite)]
    lo, hi = min(0.0, float(finite.min())), float(finite.max())
    pad = 0.05 * (hi - lo or 1.0)
    taus = curve.taus
    log_x = bool(np.all(taus > 0) and taus[-1] / taus[0] > 100)
    return line_chart(taus, series, title=title, log_x=log_x, y_range=(lo - pad, hi + pad))


def cmd_analyze(cfg):
    net = _network(cfg)
    _pair(cfg, net)
    grid = cfg.tau_grid(net.time_constant)
    curve = decompose_curve(net, cfg.source, cfg.target, grid, cfg.condition_parents)
    _emit(cfg.out, curve_table(curve))
    if cfg.svg is not None:
        atomic_write_text(cfg.svg, curve_svg(curve, f"{cfg.source} -> {cfg.target}"))
    return EXIT_OK


def _simulate(cfg, net):
    _need(cfg, "dt", "steps")
    return simulate.generate(net, cfg.scheme, cfg.dt, cfg.steps, cfg.ensemble, cfg.seed, cfg.burn_in)


def cmd_simulate(cfg):
    net = _network(cfg)
    ens = _simulate(cfg, net)
    _emit(cfg.out, simulate.format_trajectories(ens))
    return EXIT_OK


def _lag_steps(cfg, ens, t_char):
    # tau values rounded to whole steps; the default runs from 0 up to 30 t_char
    if cfg.tau_min is None and cfg.tau_max is None:
        top = min(30.0 * t_char, (ens.steps - estimate.MIN_SAMPLES) * ens.dt)
        taus = np.linspace(0.0, max(top, 0.0), cfg.tau_steps)
    else:
        taus = cfg.tau_grid(t_char)
    lags = sorted({int(round(t / ens.dt)) for t in taus})
    return [k for k in lags if k < ens.steps]


def cmd_estimate(cfg):
    net = _network(cfg)
    _pair(cfg, net)
    if cfg.trajectories is not None:
        try:
            ens = simulate.read_trajectories(cfg.trajectories)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read trajectories: {exc}") from None
        if set(ens.labels) != set(net.names):
            raise UsageError(f"trajectory nodes {list(ens.labels)} do not match network nodes {list(net.names)}")
    else:
        ens = _simulate(cfg, net)
    lags = _lag_steps(cfg, ens, net.time_constant)
    if not lags:
        raise UsageError("no lag of the requested grid fits the trajectories")
    cond = parents(net, (cfg.source, cfg.target)) if cfg.condition_parents else ()
    cond = tuple(n for n in net.names if n in cond)
    curve = estimate.empirical_curve(ens, cfg.source, cfg.target, lags, cond)
    factor = ens.n_traj * ens.steps / curve.metadata["effective_n"] if curve.metadata["effective_n"] else math.inf
    n_eff = [(ens.steps - k) * ens.n_traj / factor for k in lags]
    _emit(cfg.out, curve_table(curve, {"effective_n": n_eff}))
    if cfg.svg is not None:
        atomic_write_text(cfg.svg, curve_svg(curve, f"{cfg.source} -> {cfg.target} (estimated)"))
    return EXIT_OK


def capacity_table(result):
    rows = list(zip(result.beta_t_rel, result.peak_c, result.tau_res, result.i_opt))
    footer = () if result.estimate is None else (("capacity_estimate", result.estimate),
                                                 ("capacity_uncertainty", result.uncertainty))
    return format_table(CAPACITY_COLUMNS, rows, footer)


def cmd_capacity(cfg):
    if not (0 < cfg.grid_min <= cfg.grid_max) or cfg.grid_steps < 1:
        raise UsageError("need 0 < --grid-min <= --grid-max and --grid-steps >= 1")
    grid = np.geomspace(cfg.grid_min, cfg.grid_max, cfg.grid_steps) if cfg.grid_steps > 1 else [cfg.grid_min]
    result = blrm.causation_capacity(grid)
    _emit(cfg.out, capacity_table(result))
    if cfg.svg is not None:
        svg = line_chart(result.beta_t_rel, {"peak_c": result.peak_c, "i_opt": result.i_opt},
                         title="peak causal influence", x_label="beta t_rel", log_x=True)
        atomic_write_text(cfg.svg, svg)
    return EXIT_OK


def cmd_verify(cfg):
    net = load_network(cfg.network) if cfg.network is not None else None
    results = checks.run_checks(net, seed=cfg.seed)
    _emit(cfg.out, checks.format_report(results))
    return EXIT_OK if all(c.passed for c in results) else EXIT_VERIFY


COMMANDS = {
    "analyze": cmd_analyze,
    "simulate": cmd_simulate,
    "estimate": cmd_estimate,
    "capacity": cmd_capacity,
    "verify": cmd_verify,
}


def main(argv=None):
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else argv)
        return COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"causalflow: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NetworkError as exc:
        print(f"causalflow: invalid network: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NETWORK
    except (StepTooLarge, InsufficientData) as exc:
        print(f"causalflow: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalFailure as exc:
        print(f"causalflow: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"causalflow: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
