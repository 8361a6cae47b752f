"""Shared fixtures and an independent enumeration oracle.

The oracle below deliberately avoids the package's vectorized reachability
and enumeration code: plain itertools over orientations and a dict-based BFS.
It is the reference the fast paths are checked against.
"""

from __future__ import annotations

import itertools

import pytest

from orientprob import Graph, make_graph, triangle_graph, path_graph


@pytest.fixture
def triangle() -> Graph:
    return triangle_graph(0.5)


@pytest.fixture
def path3() -> Graph:
    return path_graph(3, 0.5)


def oracle_reaches(graph: Graph, bits: tuple[int, ...], sources, target: int) -> bool:
    adj: dict[int, list[int]] = {v: [] for v in range(graph.vertex_count)}
    for bit, (u, v, _) in zip(bits, graph.edges):
        if bit:
            adj[u].append(v)
        else:
            adj[v].append(u)
    seen = set(sources)
    stack = list(sources)
    while stack:
        x = stack.pop()
        if x == target:
            return True
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return target in seen


def oracle_event_prob(graph: Graph, atoms: list[tuple[set[int], int]]) -> float:
    """Probability of a conjunction of connection atoms by full enumeration."""
    total = 0.0
    for bits in itertools.product((0, 1), repeat=graph.edge_count):
        w = 1.0
        for bit, (_, _, bias) in zip(bits, graph.edges):
            w *= bias if bit else 1.0 - bias
        if all(oracle_reaches(graph, bits, src, tgt) for src, tgt in atoms):
            total += w
    return total
