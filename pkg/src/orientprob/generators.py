"""Built-in graph generators so experiments need no external files."""

from __future__ import annotations

import itertools

import numpy as np

from .errors import InputError
from .graphs import Graph, RandomStream, make_graph

# keeps generator draws disjoint from Monte Carlo stream indices under one seed
GENERATOR_STREAM_BASE = 1 << 32


def complete_graph(n: int, bias: float = 0.5) -> Graph:
    return make_graph(n, [(u, v, bias) for u, v in itertools.combinations(range(n), 2)])


def path_graph(n: int, bias: float = 0.5) -> Graph:
    return make_graph(n, [(i, i + 1, bias) for i in range(n - 1)])


def triangle_graph(bias: float = 0.5) -> Graph:
    return complete_graph(3, bias)


def random_graph(
    n: int,
    edge_count: int | None = None,
    edge_prob: float | None = None,
    biases: float | str = "uniform",
    seed: int = 0,
    index: int = 0,
) -> Graph:
    """Seeded Erdos-Renyi sample: fixed edge count or per-pair inclusion
    probability. Biases are a constant, or independent uniforms in [0,1]."""
    if n < 0:
        raise InputError("n must be nonnegative")
    if (edge_count is None) == (edge_prob is None):
        raise InputError("give exactly one of edge_count and edge_prob")
    pairs = list(itertools.combinations(range(n), 2))
    stream = RandomStream(seed, GENERATOR_STREAM_BASE + index)
    if edge_count is not None:
        if not (0 <= edge_count <= len(pairs)):
            raise InputError(f"edge_count {edge_count} outside [0, {len(pairs)}]")
        order = np.argsort(stream.uniforms(len(pairs)), kind="stable")
        chosen = [pairs[i] for i in sorted(order[:edge_count])]
    else:
        if not (0.0 <= edge_prob <= 1.0):
            raise InputError(f"edge_prob {edge_prob} outside [0,1]")
        keep = stream.uniforms(len(pairs)) < edge_prob
        chosen = [p for p, k in zip(pairs, keep) if k]
    if biases == "uniform":
        bias_values = stream.uniforms(len(chosen))
    elif isinstance(biases, float | int):
        bias_values = np.full(len(chosen), float(biases))
    else:
        raise InputError(f"unknown bias policy {biases!r}")
    return make_graph(n, [(u, v, float(p)) for (u, v), p in zip(chosen, bias_values)])
