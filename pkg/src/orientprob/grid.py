"""Finite boxes of the square lattice with a single right/up bias, reach
statistics under sampling, and a randomized search for orientations where
flipping one edge in a fixed direction destroys a connection."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InputError
from .graphs import (
    Graph,
    Orientation,
    RandomStream,
    make_graph,
    reach_many,
    reachable_set,
)
from .montecarlo import stream_sample_counts

TOWARD_HIGH = "toward-high"
TOWARD_LOW = "toward-low"

_CHUNK_ROWS = 1 << 14
_SEARCH_BLOCK = 256


@dataclass(frozen=True)
class GridSpec:
    """width x height box; vertex (x, y) has id y*width + x, so rightward and
    upward are always the low -> high direction and one bias covers both."""

    width: int
    height: int
    bias: float

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise InputError("grid dimensions must be >= 1")
        if not (0.0 <= self.bias <= 1.0):
            raise InputError(f"bias {self.bias} outside [0,1]")


@dataclass(frozen=True)
class Grid:
    spec: GridSpec
    graph: Graph

    def id_of(self, x: int, y: int) -> int:
        if not (0 <= x < self.spec.width and 0 <= y < self.spec.height):
            raise InputError(f"coordinate ({x},{y}) outside {self.spec.width}x{self.spec.height}")
        return y * self.spec.width + x

    def xy_of(self, vertex: int) -> tuple[int, int]:
        return vertex % self.spec.width, vertex // self.spec.width

    @cached_property
    def far_boundary(self) -> tuple[int, ...]:
        """Vertices on the right or top edge of the box."""
        w, h = self.spec.width, self.spec.height
        return tuple(
            self.id_of(x, y)
            for y in range(h)
            for x in range(w)
            if x == w - 1 or y == h - 1
        )

    def chebyshev_distances(self, origin: int) -> np.ndarray:
        ox, oy = self.xy_of(origin)
        n = self.spec.width * self.spec.height
        return np.array(
            [max(abs(v % self.spec.width - ox), abs(v // self.spec.width - oy)) for v in range(n)],
            dtype=np.int64,
        )


def build_grid(spec: GridSpec) -> Grid:
    """Box graph with rightward and upward edges at the spec bias."""
    w, h = spec.width, spec.height
    edges = []
    for y in range(h):
        for x in range(w):
            v = y * w + x
            if x + 1 < w:
                edges.append((v, v + 1, spec.bias))
            if y + 1 < h:
                edges.append((v, v + w, spec.bias))
    return Grid(spec, make_graph(w * h, edges))


@dataclass(frozen=True)
class GridReachStats:
    p: float
    width: int
    height: int
    samples: int
    seed: int
    streams: int
    mean_reach: float
    max_reach: int
    mean_radius: float
    max_radius: int
    boundary_frac: float

    CSV_HEADER = "p,width,height,samples,seed,mean_reach,max_reach,mean_radius,max_radius,boundary_frac"

    def csv_row(self) -> str:
        return (
            f"{self.p},{self.width},{self.height},{self.samples},{self.seed},"
            f"{self.mean_reach},{self.max_reach},{self.mean_radius},{self.max_radius},"
            f"{self.boundary_frac}"
        )

    def as_dict(self) -> dict:
        return {
            "p": self.p,
            "width": self.width,
            "height": self.height,
            "samples": self.samples,
            "seed": self.seed,
            "streams": self.streams,
            "mean_reach": self.mean_reach,
            "max_reach": self.max_reach,
            "mean_radius": self.mean_radius,
            "max_radius": self.max_radius,
            "boundary_frac": self.boundary_frac,
        }


def grid_reach_stats(
    spec: GridSpec,
    origin: int,
    samples: int,
    seed: int,
    streams: int = 1,
) -> GridReachStats:
    """Sampled statistics of the set reachable from the origin: size, escape
    radius (Chebyshev), and how often the right/top boundary is touched."""
    if samples < 1:
        raise InputError("samples must be >= 1")
    if streams < 1:
        raise InputError("streams must be >= 1")
    grid = build_grid(spec)
    graph = grid.graph
    if not (0 <= origin < graph.vertex_count):
        raise InputError(f"origin {origin} outside the grid")
    dist = grid.chebyshev_distances(origin)
    boundary = list(grid.far_boundary)
    biases = graph.bias_array
    m = graph.edge_count

    tot_size = 0
    max_size = 0
    tot_radius = 0
    max_radius = 0
    boundary_hits = 0
    for t, n_t in enumerate(stream_sample_counts(samples, streams)):
        if n_t == 0:
            continue
        stream = RandomStream(seed, t)
        done = 0
        while done < n_t:
            c = min(_CHUNK_ROWS, n_t - done)
            bits = stream.uniforms((c, m)) < biases
            reach = reach_many(graph, bits, origin)
            sizes = reach.sum(axis=1)
            radii = (reach * dist).max(axis=1)
            tot_size += int(sizes.sum())
            max_size = max(max_size, int(sizes.max()))
            tot_radius += int(radii.sum())
            max_radius = max(max_radius, int(radii.max()))
            boundary_hits += int(reach[:, boundary].any(axis=1).sum())
            done += c
    return GridReachStats(
        p=spec.bias,
        width=spec.width,
        height=spec.height,
        samples=samples,
        seed=seed,
        streams=streams,
        mean_reach=tot_size / samples,
        max_reach=max_size,
        mean_radius=tot_radius / samples,
        max_radius=max_radius,
        boundary_frac=boundary_hits / samples,
    )


@dataclass(frozen=True)
class Witness:
    """An orientation where a -> b holds but fails after flipping one edge in
    the stated direction. Self-certifying via verify()."""

    orientation: Orientation
    edge_index: int
    flip_direction: str
    a: int
    b: int

    def flipped(self) -> Orientation:
        return self.orientation.with_flipped(self.edge_index)

    def verify(self, graph: Graph) -> bool:
        before = self.b in reachable_set(graph, self.orientation, self.a)
        after = self.b in reachable_set(graph, self.flipped(), self.a)
        return before and not after


@dataclass(frozen=True)
class WitnessSearchResult:
    witness: Witness | None
    attempts: int
    budget: int
    seed: int

    @property
    def found(self) -> bool:
        return self.witness is not None


def find_nonmonotonicity_witness(
    spec: GridSpec,
    a: int,
    b: int,
    flip_direction: str,
    budget: int,
    seed: int,
) -> WitnessSearchResult:
    """Randomized search: sample orientations where a -> b holds, then scan
    the horizontal edges in index order for one whose flip in the given
    direction destroys the connection (toward-high is rightward, toward-low
    is leftward). Returns the first witness, re-verified, or a not-found
    report once the budget is exhausted."""
    if budget < 1:
        raise InputError("budget must be >= 1")
    if flip_direction not in (TOWARD_HIGH, TOWARD_LOW):
        raise InputError(f"flip_direction must be {TOWARD_HIGH!r} or {TOWARD_LOW!r}")
    grid = build_grid(spec)
    graph = grid.graph
    for v in (a, b):
        if not (0 <= v < graph.vertex_count):
            raise InputError(f"vertex {v} outside the grid")
    desired = 1 if flip_direction == TOWARD_HIGH else 0
    horizontal = [
        e for e, (u, v, _) in enumerate(graph.edges) if u // spec.width == v // spec.width
    ]
    biases = graph.bias_array
    m = graph.edge_count
    stream = RandomStream(seed, 0)
    attempts = 0
    while attempts < budget:
        block = min(_SEARCH_BLOCK, budget - attempts)
        bits = stream.uniforms((block, m)) < biases
        connected = reach_many(graph, bits, a)[:, b]
        for r in np.nonzero(connected)[0]:
            orientation = Orientation(tuple(int(x) for x in bits[r]))
            for e in horizontal:
                if orientation.bits[e] == desired:
                    continue
                flipped = orientation.with_flipped(e)
                if b not in reachable_set(graph, flipped, a):
                    witness = Witness(orientation, e, flip_direction, a, b)
                    if not witness.verify(graph):
                        raise RuntimeError("witness failed re-verification")
                    return WitnessSearchResult(witness, attempts + int(r) + 1, budget, seed)
        attempts += block
    return WitnessSearchResult(None, attempts, budget, seed)
