"""Seeded Monte Carlo estimation of event probabilities and correlation slacks.

Sample i is drawn from stream (i mod streams) at counter (i div streams), so
results are bit-identical for a fixed (seed, samples, streams) no matter how
the streams are scheduled physically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import InputError
from .graphs import EventExpr, Graph, RandomStream, reach_many

_CHUNK_ROWS = 1 << 16


@dataclass(frozen=True)
class EstimateReport:
    estimate: float
    samples: int
    std_error: float
    ci95: tuple[float, float]
    seed: int
    streams: int

    def as_dict(self) -> dict:
        return {
            "estimate": self.estimate,
            "samples": self.samples,
            "std_error": self.std_error,
            "ci95": [self.ci95[0], self.ci95[1]],
            "seed": self.seed,
            "streams": self.streams,
        }


def stream_sample_counts(samples: int, streams: int) -> list[int]:
    """How many of the `samples` global indices land on each stream."""
    return [(samples - t + streams - 1) // streams for t in range(streams)]


def sampled_event_columns(
    graph: Graph,
    events: Iterable[EventExpr],
    samples: int,
    seed: int,
    streams: int = 1,
) -> np.ndarray:
    """Indicator matrix of shape (samples, len(events)), rows in global
    sample order. All events are evaluated on the same orientations."""
    events = list(events)
    if samples < 1:
        raise InputError("samples must be >= 1")
    if streams < 1:
        raise InputError("streams must be >= 1")
    for ev in events:
        ev.validate_for(graph)
    m = graph.edge_count
    biases = graph.bias_array
    out = np.zeros((samples, len(events)), dtype=bool)
    counts = stream_sample_counts(samples, streams)
    for t in range(streams):
        n_t = counts[t]
        if n_t == 0:
            continue
        stream = RandomStream(seed, t)
        done = 0
        while done < n_t:
            c = min(_CHUNK_ROWS, n_t - done)
            bits = stream.uniforms((c, m)) < biases
            reach_cache: dict[frozenset[int], np.ndarray] = {}
            rows = t + np.arange(done, done + c) * streams
            for j, ev in enumerate(events):
                ind: np.ndarray | None = None
                for sources, target in ev.atoms:
                    if sources not in reach_cache:
                        reach_cache[sources] = reach_many(graph, bits, sources)
                    col = reach_cache[sources][:, target]
                    ind = col.copy() if ind is None else (ind & col)
                out[rows, j] = ind
            done += c
    return out


def estimate_event(
    graph: Graph, event: EventExpr, samples: int, seed: int, streams: int = 1
) -> EstimateReport:
    """Mean of the event indicator over seeded sampled orientations."""
    cols = sampled_event_columns(graph, [event], samples, seed, streams)
    hits = int(cols[:, 0].sum())
    est = hits / samples
    se = math.sqrt(est * (1.0 - est) / samples)
    ci = (est - 1.96 * se, est + 1.96 * se)
    return EstimateReport(est, samples, se, ci, seed, streams)


def batch_means_std_error(batch_values: np.ndarray) -> float:
    """Standard error of the mean from nonoverlapping batch means."""
    b = len(batch_values)
    if b < 2:
        return 0.0
    return float(np.std(batch_values, ddof=1) / math.sqrt(b))


def estimate_slack(
    graph: Graph,
    sources: Iterable[int] | int,
    target_a: int,
    target_b: int,
    samples: int,
    seed: int,
    streams: int = 1,
    batches: int = 100,
) -> tuple[float, float]:
    """Paired estimate of P(S->a and S->b) - P(S->a)P(S->b).

    All three indicators come from the same sampled orientations. The
    standard error is computed from nonoverlapping batch means.
    """
    if samples < 2:
        raise InputError("slack estimation needs samples >= 2")
    ev_a = EventExpr.connection(sources, target_a)
    ev_b = EventExpr.connection(sources, target_b)
    cols = sampled_event_columns(graph, [ev_a, ev_b], samples, seed, streams)
    ca = cols[:, 0]
    cb = cols[:, 1]
    cab = ca & cb
    est = int(cab.sum()) / samples - (int(ca.sum()) / samples) * (int(cb.sum()) / samples)
    b = min(batches, samples)
    bounds = [i * samples // b for i in range(b + 1)]
    batch_slacks = np.empty(b, dtype=np.float64)
    for k in range(b):
        lo, hi = bounds[k], bounds[k + 1]
        nk = hi - lo
        pa = int(ca[lo:hi].sum()) / nk
        pb = int(cb[lo:hi].sum()) / nk
        pab = int(cab[lo:hi].sum()) / nk
        batch_slacks[k] = pab - pa * pb
    return est, batch_means_std_error(batch_slacks)
