"""Undirected graphs with per-edge orientation biases, random orientations,
and directed reachability.

Vertices are the integers 0..n-1. Every edge is stored canonically as
(low, high, bias) with low < high; an orientation assigns one bit per edge,
bit 1 meaning low -> high. The bias is always the probability of the
low -> high direction, regardless of how an input line ordered the
endpoints.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple

import numpy as np
from numpy.random import Generator, Philox

from .errors import InputError

_MASK64 = (1 << 64) - 1


class Edge(NamedTuple):
    low: int
    high: int
    bias: float


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph with an ordered, canonically oriented edge list.

    The edge list order is the bit order for orientations.
    """

    vertex_count: int
    edges: tuple[Edge, ...]

    def __post_init__(self) -> None:
        n = self.vertex_count
        if n < 0:
            raise InputError("vertex_count must be nonnegative")
        seen: set[tuple[int, int]] = set()
        for e in self.edges:
            if e.low == e.high:
                raise InputError(f"self-loop at vertex {e.low}")
            if not (0 <= e.low < e.high < n):
                raise InputError(f"edge ({e.low},{e.high}) out of range for vertex_count={n}")
            if (e.low, e.high) in seen:
                raise InputError(f"duplicate edge ({e.low},{e.high})")
            seen.add((e.low, e.high))
            if not (0.0 <= e.bias <= 1.0):
                raise InputError(f"bias {e.bias} outside [0,1] on edge ({e.low},{e.high})")

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @cached_property
    def bias_array(self) -> np.ndarray:
        arr = np.array([e.bias for e in self.edges], dtype=np.float64)
        arr.setflags(write=False)
        return arr

    @cached_property
    def neighbor_masks(self) -> tuple[int, ...]:
        """Per-vertex bitmask of adjacent vertices (undirected)."""
        masks = [0] * self.vertex_count
        for u, v, _ in self.edges:
            masks[u] |= 1 << v
            masks[v] |= 1 << u
        return tuple(masks)

    @cached_property
    def incident_edges(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """Per-vertex tuple of (edge_index, other_endpoint) pairs."""
        inc: list[list[tuple[int, int]]] = [[] for _ in range(self.vertex_count)]
        for i, (u, v, _) in enumerate(self.edges):
            inc[u].append((i, v))
            inc[v].append((i, u))
        return tuple(tuple(x) for x in inc)


@dataclass(frozen=True)
class Orientation:
    """One direction bit per edge, aligned with Graph.edges; 1 = low -> high."""

    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(b not in (0, 1) for b in self.bits):
            raise InputError("orientation bits must be 0 or 1")

    def with_flipped(self, edge_index: int) -> "Orientation":
        bits = list(self.bits)
        bits[edge_index] ^= 1
        return Orientation(tuple(bits))


@dataclass(frozen=True)
class EventExpr:
    """Conjunction of connection atoms; each atom (A, b) reads "some vertex of
    A reaches b by a directed path"."""

    atoms: tuple[tuple[frozenset[int], int], ...]

    def __post_init__(self) -> None:
        if not self.atoms:
            raise InputError("event must have at least one atom")
        for sources, _ in self.atoms:
            if not sources:
                raise InputError("atom source set must be nonempty")

    @staticmethod
    def connection(sources: Iterable[int] | int, target: int) -> "EventExpr":
        return EventExpr(atoms=((_as_source_set(sources), int(target)),))

    def __and__(self, other: "EventExpr") -> "EventExpr":
        return EventExpr(atoms=self.atoms + other.atoms)

    def validate_for(self, graph: Graph) -> None:
        n = graph.vertex_count
        for sources, target in self.atoms:
            if not (0 <= target < n):
                raise InputError(f"target {target} out of range for vertex_count={n}")
            for s in sources:
                if not (0 <= s < n):
                    raise InputError(f"source {s} out of range for vertex_count={n}")


def _as_source_set(sources: Iterable[int] | int) -> frozenset[int]:
    if isinstance(sources, int):
        return frozenset((sources,))
    return frozenset(int(s) for s in sources)


def make_graph(vertex_count: int, edges: Iterable[tuple[int, int, float]]) -> Graph:
    """Build a Graph, canonicalizing each endpoint pair to (low, high).

    The bias refers to the low -> high direction even when the raw pair was
    given high-first.
    """
    canon = []
    for u, v, p in edges:
        u, v = int(u), int(v)
        lo, hi = (u, v) if u <= v else (v, u)
        canon.append(Edge(lo, hi, float(p)))
    return Graph(vertex_count=int(vertex_count), edges=tuple(canon))


def parse_graph(text: str) -> Graph:
    """Parse the edge-list format: '#' comments, optional leading header
    "n <vertex_count>", then one edge per line "u v p". Without a header,
    vertex_count is 1 + the largest id seen."""
    header_n: int | None = None
    saw_edge = False
    seen: dict[tuple[int, int], int] = {}
    edges: list[tuple[int, int, float]] = []
    max_id = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "n":
            if saw_edge or header_n is not None:
                raise InputError(f"line {lineno}: header must be the first non-comment line")
            if len(parts) != 2:
                raise InputError(f"line {lineno}: header must read 'n <vertex_count>'")
            try:
                header_n = int(parts[1])
            except ValueError:
                raise InputError(f"line {lineno}: vertex count {parts[1]!r} is not an integer") from None
            if header_n < 0:
                raise InputError(f"line {lineno}: vertex count must be nonnegative")
            continue
        if len(parts) != 3:
            raise InputError(f"line {lineno}: expected 'u v p', got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise InputError(f"line {lineno}: endpoints must be integers") from None
        try:
            p = float(parts[2])
        except ValueError:
            raise InputError(f"line {lineno}: bias {parts[2]!r} is not a number") from None
        if not (0.0 <= p <= 1.0):
            raise InputError(f"line {lineno}: bias {p} outside [0,1]")
        if u == v:
            raise InputError(f"line {lineno}: self-loop at vertex {u}")
        if u < 0 or v < 0:
            raise InputError(f"line {lineno}: negative vertex id")
        lo, hi = (u, v) if u < v else (v, u)
        if (lo, hi) in seen:
            raise InputError(f"line {lineno}: duplicate edge ({lo},{hi}), first seen at line {seen[(lo, hi)]}")
        if header_n is not None and hi >= header_n:
            raise InputError(f"line {lineno}: vertex id {hi} out of range for n={header_n}")
        seen[(lo, hi)] = lineno
        saw_edge = True
        max_id = max(max_id, hi)
        edges.append((u, v, p))
    n = header_n if header_n is not None else max_id + 1
    return make_graph(n, edges)


class RandomStream:
    """Counter-based random stream; (seed, index) fully determine the draw
    sequence, so independent streams are obtained by varying the index.
    No global state is involved."""

    def __init__(self, seed: int, index: int = 0):
        if seed < 0 or index < 0:
            raise InputError("seed and stream index must be nonnegative")
        self.seed = seed
        self.index = index
        key = np.array([seed & _MASK64, index & _MASK64], dtype=np.uint64)
        self._gen = Generator(Philox(key=key))

    def uniforms(self, shape: int | tuple[int, ...]) -> np.ndarray:
        """Next uniforms in [0,1), consumed in C order."""
        return self._gen.random(shape)


def sample_orientation(graph: Graph, stream: RandomStream) -> Orientation:
    """Draw one orientation: bit e is 1 with probability bias_e, independently."""
    u = stream.uniforms(graph.edge_count)
    return Orientation(tuple(int(b) for b in (u < graph.bias_array)))


def _check_vertex(graph: Graph, v: int) -> int:
    if not (0 <= v < graph.vertex_count):
        raise InputError(f"vertex {v} out of range for vertex_count={graph.vertex_count}")
    return v


def _check_sources(graph: Graph, sources: Iterable[int] | int) -> frozenset[int]:
    src = _as_source_set(sources)
    if not src:
        raise InputError("source set must be nonempty")
    for s in src:
        _check_vertex(graph, s)
    return src


def _check_orientation(graph: Graph, orientation: Orientation) -> None:
    if len(orientation.bits) != graph.edge_count:
        raise InputError(
            f"orientation has {len(orientation.bits)} bits, graph has {graph.edge_count} edges"
        )


def reachable_set(graph: Graph, orientation: Orientation, sources: Iterable[int] | int) -> set[int]:
    """Vertices reachable by directed paths (length >= 0) from any source."""
    src = _check_sources(graph, sources)
    _check_orientation(graph, orientation)
    adj: list[list[int]] = [[] for _ in range(graph.vertex_count)]
    for bit, (u, v, _) in zip(orientation.bits, graph.edges):
        if bit:
            adj[u].append(v)
        else:
            adj[v].append(u)
    seen = set(src)
    stack = list(src)
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return seen


def holds(graph: Graph, orientation: Orientation, event: EventExpr) -> bool:
    """Whether every atom's target is reachable from its source set."""
    event.validate_for(graph)
    _check_orientation(graph, orientation)
    cache: dict[frozenset[int], set[int]] = {}
    for sources, target in event.atoms:
        if sources not in cache:
            cache[sources] = reachable_set(graph, orientation, sources)
        if target not in cache[sources]:
            return False
    return True


def reach_many(graph: Graph, bits: np.ndarray, sources: Iterable[int] | int) -> np.ndarray:
    """Reachable-set indicators for many orientations at once.

    bits has shape (k, m) with bits[i, e] the direction of edge e in sample i.
    Returns a (k, n) boolean matrix; row i is the reachable set from sources.
    Fixed-point sweep over the edge list; cost O(sweeps * m) vector ops.
    """
    src = _check_sources(graph, sources)
    k = bits.shape[0]
    if bits.shape[1] != graph.edge_count:
        raise InputError("bits matrix width must equal the edge count")
    reach = np.zeros((k, graph.vertex_count), dtype=bool)
    for s in src:
        reach[:, s] = True
    if k == 0 or graph.edge_count == 0:
        return reach
    prev = -1
    total = int(reach.sum())
    while total != prev:
        prev = total
        for e, (u, v, _) in enumerate(graph.edges):
            fwd = bits[:, e]
            np.logical_or(reach[:, v], reach[:, u] & fwd, out=reach[:, v])
            np.logical_or(reach[:, u], reach[:, v] & ~fwd, out=reach[:, u])
        total = int(reach.sum())
    return reach


def event_indicator_many(graph: Graph, bits: np.ndarray, event: EventExpr) -> np.ndarray:
    """Boolean indicator of the event for each orientation row of bits."""
    event.validate_for(graph)
    cache: dict[frozenset[int], np.ndarray] = {}
    ind: np.ndarray | None = None
    for sources, target in event.atoms:
        if sources not in cache:
            cache[sources] = reach_many(graph, bits, sources)
        col = cache[sources][:, target]
        ind = col.copy() if ind is None else (ind & col)
    assert ind is not None
    return ind
