"""Exact probabilities of connection events.

Two routes are provided: full enumeration over all 2^m orientations (the
oracle), and a recursion that conditions on the random set of vertices that
receive an edge oriented out of the current source set, then recurses on the
graph with the sources deleted. The two must agree to 1e-9 on any instance
small enough for both.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .errors import InputError, ResourceLimitError
from .graphs import (
    EventExpr,
    Graph,
    _check_sources,
    _check_vertex,
    event_indicator_many,
    reach_many,
)

DEFAULT_ENUM_CAP = 24
DEFAULT_MEMO_CAP = 1 << 22
_CHUNK_BITS = 18

PROBABILITY_BAND = 1e-12  # pre-clamp tolerance on accumulated sums


@dataclass(frozen=True)
class ExactResult:
    probability: float
    method: str  # "enumeration" | "recursion"
    states_visited: int

    def as_dict(self) -> dict:
        return {
            "prob": self.probability,
            "method": self.method,
            "states_visited": self.states_visited,
        }


@dataclass(frozen=True)
class SubsetDistribution:
    """Probability mass over subsets of an ordered ground set.

    Keys are bit patterns over the ground order: bit j set means ground[j]
    is in the subset.
    """

    ground: tuple[int, ...]
    mass: dict[int, float]

    def __post_init__(self) -> None:
        full = (1 << len(self.ground)) - 1
        total = 0.0
        for key, m in self.mass.items():
            if key & ~full:
                raise InputError(f"mass key {key:#x} is not a subset of the ground set")
            if m < 0.0:
                raise InputError(f"negative mass {m} at key {key:#x}")
            total += m
        if abs(total - 1.0) > 1e-12:
            raise InputError(f"masses sum to {total!r}, expected 1 within 1e-12")

    def mask_of(self, vertices: Iterable[int]) -> int:
        pos = {v: j for j, v in enumerate(self.ground)}
        mask = 0
        for v in vertices:
            mask |= 1 << pos[v]
        return mask

    def vertices_of(self, mask: int) -> frozenset[int]:
        return frozenset(self.ground[j] for j in range(len(self.ground)) if (mask >> j) & 1)

    def prob_of(self, vertices: Iterable[int]) -> float:
        return self.mass.get(self.mask_of(vertices), 0.0)


def _clamp01(p: float) -> float:
    if p < -PROBABILITY_BAND or p > 1.0 + PROBABILITY_BAND:
        raise RuntimeError(f"probability {p!r} outside the accumulation tolerance band")
    return min(1.0, max(0.0, p))


def _orientation_bits(start: int, count: int, m: int) -> np.ndarray:
    """Rows start..start+count-1 of the full orientation enumeration."""
    idx = np.arange(start, start + count, dtype=np.uint64)
    bits = np.empty((count, m), dtype=bool)
    for e in range(m):
        bits[:, e] = (idx >> np.uint64(e)) & np.uint64(1) != 0
    return bits


def _orientation_weights(bits: np.ndarray, biases: np.ndarray) -> np.ndarray:
    w = np.ones(bits.shape[0], dtype=np.float64)
    for e in range(bits.shape[1]):
        np.multiply(w, np.where(bits[:, e], biases[e], 1.0 - biases[e]), out=w)
    return w


def _enumeration_chunks(graph: Graph) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    m = graph.edge_count
    total = 1 << m
    step = min(total, 1 << _CHUNK_BITS)
    biases = graph.bias_array
    for start in range(0, total, step):
        count = min(step, total - start)
        bits = _orientation_bits(start, count, m)
        yield bits, _orientation_weights(bits, biases)


def brute_force_prob(graph: Graph, event: EventExpr, enum_cap: int = DEFAULT_ENUM_CAP) -> ExactResult:
    """Exact event probability by summing over all 2^m orientations."""
    m = graph.edge_count
    if m > enum_cap:
        raise ResourceLimitError(f"enumeration over m={m} edges exceeds cap {enum_cap}")
    event.validate_for(graph)
    total = 0.0
    for bits, weights in _enumeration_chunks(graph):
        ind = event_indicator_many(graph, bits, event)
        total += float(weights[ind].sum())
    return ExactResult(_clamp01(total), "enumeration", 1 << m)


def reachable_set_distribution(
    graph: Graph, sources: Iterable[int] | int, enum_cap: int = DEFAULT_ENUM_CAP
) -> SubsetDistribution:
    """Exact law of the reachable set from the sources, over all vertices."""
    src = _check_sources(graph, sources)
    m = graph.edge_count
    if m > enum_cap:
        raise ResourceLimitError(f"enumeration over m={m} edges exceeds cap {enum_cap}")
    acc: dict[int, float] = {}
    for bits, weights in _enumeration_chunks(graph):
        reach = reach_many(graph, bits, src)
        _accumulate_row_masses(reach, weights, acc)
    return SubsetDistribution(tuple(range(graph.vertex_count)), acc)


def _accumulate_row_masses(rows: np.ndarray, weights: np.ndarray, acc: dict[int, float]) -> None:
    uniq, inv = np.unique(rows, axis=0, return_inverse=True)
    sums = np.bincount(inv.ravel(), weights=weights, minlength=len(uniq))
    for row, s in zip(uniq, sums):
        mask = 0
        for j in np.nonzero(row)[0]:
            mask |= 1 << int(j)
        acc[mask] = acc.get(mask, 0.0) + float(s)


class ExactEngine:
    """Memoized recursive evaluator for connection probabilities.

    At each step the current source set S is conditioned on the random set
    of outside vertices receiving an edge oriented out of S; the recursion
    continues on the graph with S deleted. The memo is keyed on (remaining
    vertex set, source set, targets), with the remaining set normalized to
    the undirected component of the sources; queries on one engine share it.
    """

    def __init__(self, graph: Graph, memo_cap: int = DEFAULT_MEMO_CAP):
        self.graph = graph
        self.memo_cap = memo_cap
        self.states_visited = 0
        self._full_mask = (1 << graph.vertex_count) - 1
        self._memo: dict[tuple, float] = {}

    def connection(
        self, sources: Iterable[int] | int, target: int, within: Iterable[int] | None = None
    ) -> float:
        src = _check_sources(self.graph, sources)
        _check_vertex(self.graph, target)
        remaining = self._within_mask(within, src)
        return self._conn(remaining, _to_mask(src), target)

    def joint(
        self,
        sources: Iterable[int] | int,
        target_a: int,
        target_b: int,
        within: Iterable[int] | None = None,
    ) -> float:
        src = _check_sources(self.graph, sources)
        _check_vertex(self.graph, target_a)
        _check_vertex(self.graph, target_b)
        remaining = self._within_mask(within, src)
        return self._joint(remaining, _to_mask(src), target_a, target_b)

    def _within_mask(self, within: Iterable[int] | None, src: frozenset[int]) -> int:
        if within is None:
            return self._full_mask
        mask = 0
        for v in within:
            _check_vertex(self.graph, v)
            mask |= 1 << v
        if _to_mask(src) & ~mask:
            raise InputError("sources must lie inside the restricted vertex set")
        return mask

    def _component(self, remaining: int, seed_mask: int) -> int:
        """Undirected component of the seed vertices inside `remaining`."""
        nbr = self.graph.neighbor_masks
        comp = seed_mask & remaining
        frontier = comp
        while frontier:
            grow = 0
            f = frontier
            while f:
                v = (f & -f).bit_length() - 1
                f &= f - 1
                grow |= nbr[v]
            frontier = grow & remaining & ~comp
            comp |= frontier
        return comp

    def _frontier(self, remaining: int, src_mask: int) -> tuple[list[int], list[float]]:
        """Outside neighbors of the sources and their inclusion probabilities.

        For each neighbor v, 1 minus the product over S-v edges of the
        probability that the edge points into S. Edges inside S are ignored.
        """
        stay_in = {}
        inc = self.graph.incident_edges
        edges = self.graph.edges
        s = src_mask
        while s:
            u = (s & -s).bit_length() - 1
            s &= s - 1
            for e_idx, other in inc[u]:
                if not (remaining >> other) & 1 or (src_mask >> other) & 1:
                    continue
                edge = edges[e_idx]
                out_prob = edge.bias if edge.low == u else 1.0 - edge.bias
                stay_in[other] = stay_in.get(other, 1.0) * (1.0 - out_prob)
        t = sorted(stay_in)
        return t, [1.0 - stay_in[v] for v in t]

    def _check_memo_budget(self) -> None:
        if len(self._memo) >= self.memo_cap:
            raise ResourceLimitError(
                f"memo table reached {len(self._memo)} entries, cap {self.memo_cap}"
            )

    def _conn(self, remaining: int, src_mask: int, target: int) -> float:
        if (src_mask >> target) & 1:
            return 1.0
        if src_mask == 0:
            return 0.0
        comp = self._component(remaining, src_mask)
        if not (comp >> target) & 1:
            return 0.0
        key = (comp, src_mask, target)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        self._check_memo_budget()
        self.states_visited += 1
        t, pv = self._frontier(comp, src_mask)
        rem2 = comp & ~src_mask
        total = 0.0
        for xbits in range(1 << len(t)):
            mass = 1.0
            xmask = 0
            for j, v in enumerate(t):
                if (xbits >> j) & 1:
                    mass *= pv[j]
                    xmask |= 1 << v
                else:
                    mass *= 1.0 - pv[j]
            if mass == 0.0:
                continue
            total += mass * self._conn(rem2, xmask, target)
        self._memo[key] = total
        return total

    def _joint(self, remaining: int, src_mask: int, a: int, b: int) -> float:
        in_a = (src_mask >> a) & 1
        in_b = (src_mask >> b) & 1
        if in_a and in_b:
            return 1.0
        if in_a:
            return self._conn(remaining, src_mask, b)
        if in_b:
            return self._conn(remaining, src_mask, a)
        if src_mask == 0:
            return 0.0
        comp = self._component(remaining, src_mask)
        if not (comp >> a) & 1 or not (comp >> b) & 1:
            return 0.0
        lo, hi = (a, b) if a <= b else (b, a)
        key = (comp, src_mask, lo, hi, "j")
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        self._check_memo_budget()
        self.states_visited += 1
        t, pv = self._frontier(comp, src_mask)
        rem2 = comp & ~src_mask
        total = 0.0
        for xbits in range(1 << len(t)):
            mass = 1.0
            xmask = 0
            for j, v in enumerate(t):
                if (xbits >> j) & 1:
                    mass *= pv[j]
                    xmask |= 1 << v
                else:
                    mass *= 1.0 - pv[j]
            if mass == 0.0:
                continue
            total += mass * self._joint(rem2, xmask, a, b)
        self._memo[key] = total
        return total


def _to_mask(vertices: Iterable[int]) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


def out_neighborhood_distribution(graph: Graph, sources: Iterable[int] | int) -> SubsetDistribution:
    """Law of the set of outside vertices receiving an edge oriented out of
    the sources. Each outside neighbor v is included independently with its
    own probability, so the mass is a product over the ground set."""
    src = _check_sources(graph, sources)
    engine = ExactEngine(graph)
    t, pv = engine._frontier(engine._full_mask, _to_mask(src))
    mass: dict[int, float] = {}
    for xbits in range(1 << len(t)):
        m = 1.0
        for j in range(len(t)):
            m *= pv[j] if (xbits >> j) & 1 else 1.0 - pv[j]
        mass[xbits] = m
    return SubsetDistribution(tuple(t), mass)


def exact_connection_prob(
    graph: Graph,
    sources: Iterable[int] | int,
    target: int,
    memo_cap: int = DEFAULT_MEMO_CAP,
) -> ExactResult:
    """P(sources -> target) via the out-neighborhood recursion."""
    engine = ExactEngine(graph, memo_cap)
    p = engine.connection(sources, target)
    return ExactResult(_clamp01(p), "recursion", engine.states_visited)


def exact_joint_prob(
    graph: Graph,
    sources: Iterable[int] | int,
    target_a: int,
    target_b: int,
    memo_cap: int = DEFAULT_MEMO_CAP,
) -> ExactResult:
    """P(sources -> a and sources -> b) via the same recursion with two targets."""
    engine = ExactEngine(graph, memo_cap)
    p = engine.joint(sources, target_a, target_b)
    return ExactResult(_clamp01(p), "recursion", engine.states_visited)
