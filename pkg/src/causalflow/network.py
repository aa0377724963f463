"""Linear Langevin networks without feedbacks.

A network is a set of nodes, each relaxing at its own ``decay`` rate and
driven by white noise of intensity ``noise``, plus directed gain edges::

    dv_i/dt = -decay_i v_i + sum_j gain(j -> i) v_j + sqrt(noise_i) Gamma_i(t)

The direct-influence graph (edges only, self-decay excluded) must be acyclic.
Matrices built from a validated network are indexed in topological order, so
the drift matrix is lower triangular.
"""

import dataclasses
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .exceptions import (
    CycleDetected,
    DuplicateEdge,
    DuplicateNode,
    NegativeNoise,
    NetworkParseError,
    NonPositiveDecay,
    RootWithoutNoise,
    SelfLoop,
    UnknownNode,
)

__all__ = [
    "NodeSpec",
    "EdgeSpec",
    "LinearNetwork",
    "validate",
    "drift_matrix",
    "noise_matrix",
    "parents",
    "parse_network",
    "load_network",
    "format_network",
]

_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


@dataclass(frozen=True)
class NodeSpec:
    name: str
    decay: float
    noise: float = 0.0


@dataclass(frozen=True)
class EdgeSpec:
    source: str
    target: str
    gain: float


@dataclass(frozen=True)
class LinearNetwork:
    """Immutable network description.

    ``order`` and ``zero_gain_edges`` are filled in by :func:`validate`; a
    network with ``order is None`` has not been validated yet.
    """

    nodes: tuple
    edges: tuple = ()
    order: tuple = field(default=None, compare=False)
    zero_gain_edges: tuple = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple(self.edges))

    @property
    def validated(self):
        return self.order is not None

    @property
    def names(self):
        """Node names in topological order (declaration order if not validated)."""
        if self.order is not None:
            return self.order
        return tuple(n.name for n in self.nodes)

    def node(self, name):
        for n in self.nodes:
            if n.name == name:
                return n
        raise UnknownNode(f"unknown node {name!r}")

    def index(self, name):
        try:
            return self.names.index(name)
        except ValueError:
            raise UnknownNode(f"unknown node {name!r}") from None

    def indices(self, names):
        return [self.index(n) for n in names]

    def gain(self, source, target):
        for e in self.edges:
            if e.source == source and e.target == target:
                return e.gain
        return 0.0

    @property
    def decays(self):
        """Decay rates in matrix order."""
        return np.array([self.node(n).decay for n in self.names])

    @property
    def time_constant(self):
        """Slowest relaxation time, ``1 / min(decay)``."""
        return 1.0 / min(n.decay for n in self.nodes)


def _topological_order(names, edges):
    incoming = {n: 0 for n in names}
    children = {n: [] for n in names}
    for e in edges:
        incoming[e.target] += 1
        children[e.source].append(e.target)
    # Kahn's algorithm; ties resolved by declaration order
    order = []
    ready = [n for n in names if incoming[n] == 0]
    while ready:
        n = ready.pop(0)
        order.append(n)
        for c in children[n]:
            incoming[c] -= 1
            if incoming[c] == 0:
                ready.append(c)
        ready.sort(key=names.index)
    if len(order) != len(names):
        stuck = [n for n in names if n not in order]
        raise CycleDetected(f"feedback loop among nodes {stuck}")
    return tuple(order)


def validate(network):
    """Check every invariant and return the network with its topological order.

    Raises one of the :class:`~causalflow.exceptions.NetworkError` subclasses
    on failure. Idempotent.
    """
    names = []
    for n in network.nodes:
        if not isinstance(n.name, str) or not _NAME.match(n.name):
            raise NetworkParseError(f"invalid node name {n.name!r}")
        if n.name in names:
            raise DuplicateNode(f"node {n.name!r} declared twice")
        names.append(n.name)
        if not (math.isfinite(n.decay) and n.decay > 0):
            raise NonPositiveDecay(f"node {n.name!r} has decay {n.decay}; must be > 0")
        if not math.isfinite(n.noise) or n.noise < 0:
            raise NegativeNoise(f"node {n.name!r} has noise {n.noise}; must be >= 0")
    if not names:
        raise NetworkParseError("network has no nodes")

    pairs = set()
    for e in network.edges:
        for end in (e.source, e.target):
            if end not in names:
                raise UnknownNode(f"edge {e.source}->{e.target} refers to unknown node {end!r}")
        if e.source == e.target:
            raise SelfLoop(f"self-edge on {e.source!r}; use the decay field instead")
        if (e.source, e.target) in pairs:
            raise DuplicateEdge(f"edge {e.source}->{e.target} declared twice")
        if not math.isfinite(e.gain):
            raise NetworkParseError(f"edge {e.source}->{e.target} has non-finite gain")
        pairs.add((e.source, e.target))

    order = _topological_order(names, network.edges)

    driven = {e.target for e in network.edges if e.gain != 0.0}
    for n in network.nodes:
        if n.name not in driven and n.noise <= 0:
            raise RootWithoutNoise(f"root node {n.name!r} needs noise > 0")

    zero = tuple(e for e in network.edges if e.gain == 0.0)
    return dataclasses.replace(network, order=order, zero_gain_edges=zero)


def _validated(network):
    return network if network.validated else validate(network)


def drift_matrix(network):
    """Drift matrix ``A`` in topological order (lower triangular)."""
    network = _validated(network)
    a = np.diag(-network.decays)
    for e in network.edges:
        a[network.index(e.target), network.index(e.source)] += e.gain
    return a


def noise_matrix(network):
    """Diffusion matrix ``Q = diag(noise)`` in topological order."""
    network = _validated(network)
    return np.diag([network.node(n).noise for n in network.names])


def parents(network, targets):
    """Ancestors of ``targets`` in the direct-influence graph, minus the targets.

    Edges with gain exactly zero are ignored: they do not transmit influence.
    """
    network = _validated(network)
    if isinstance(targets, str):
        targets = (targets,)
    targets = tuple(targets)
    for t in targets:
        network.index(t)
    upstream = {}
    for e in network.edges:
        if e.gain != 0.0:
            upstream.setdefault(e.target, []).append(e.source)
    seen = set()
    stack = list(targets)
    while stack:
        for p in upstream.get(stack.pop(), ()):
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return frozenset(seen - set(targets))


def ordered(network, names):
    """``names`` sorted in the network's topological order."""
    network = _validated(network)
    return tuple(n for n in network.names if n in set(names))


# -- text format --------------------------------------------------------------

def _kv(tokens, keys, lineno):
    out = {}
    for tok in tokens:
        key, sep, value = tok.partition("=")
        if not sep or key not in keys:
            raise NetworkParseError(f"line {lineno}: unexpected token {tok!r}")
        if key in out:
            raise NetworkParseError(f"line {lineno}: {key} given twice")
        try:
            out[key] = float(value)
        except ValueError:
            raise NetworkParseError(f"line {lineno}: {key}={value!r} is not a number") from None
    return out


def parse_network(text):
    """Parse the line-oriented network format.

    ::

        # comment
        node x decay=0.1 noise=10
        node y decay=0.2 noise=0
        edge x y gain=0.1

    ``noise`` defaults to 0. The result is validated.
    """
    nodes, edges = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        kind = tokens[0]
        if kind == "node":
            if len(tokens) < 2:
                raise NetworkParseError(f"line {lineno}: node needs a name")
            kv = _kv(tokens[2:], {"decay", "noise"}, lineno)
            if "decay" not in kv:
                raise NetworkParseError(f"line {lineno}: node {tokens[1]} needs decay=")
            nodes.append(NodeSpec(tokens[1], kv["decay"], kv.get("noise", 0.0)))
        elif kind == "edge":
            if len(tokens) < 3:
                raise NetworkParseError(f"line {lineno}: edge needs source and target")
            kv = _kv(tokens[3:], {"gain"}, lineno)
            if "gain" not in kv:
                raise NetworkParseError(f"line {lineno}: edge needs gain=")
            edges.append(EdgeSpec(tokens[1], tokens[2], kv["gain"]))
        else:
            raise NetworkParseError(f"line {lineno}: unknown directive {kind!r}")
    return validate(LinearNetwork(tuple(nodes), tuple(edges)))


def load_network(path):
    return parse_network(Path(path).read_text(encoding="utf-8"))


def format_network(network):
    lines = [f"node {n.name} decay={n.decay!r} noise={n.noise!r}" for n in network.nodes]
    lines += [f"edge {e.source} {e.target} gain={e.gain!r}" for e in network.edges]
    return "\n".join(lines) + "\n"
