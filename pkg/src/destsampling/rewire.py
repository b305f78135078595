"""Destination sampling: after each greedy walk, every vertex the walk left
from repoints one of its shortcuts at the walk's destination with probability p.

A vertex with an unfilled slot takes part too: the slot to replace is drawn
uniformly from all ``capacity`` slots, and drawing an unfilled one fills it.
This is what lets a graph that starts without shortcuts grow them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .graph import EMPTY, ShortcutGraph
from .rng import RandomStream
from .routing import WalkRecord, greedy_walk


@dataclass(frozen=True)
class RewireParams:
    p: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.p < 1:
            raise ValueError(f"replacement probability must lie in (0, 1), got {self.p}")


@dataclass
class EvolveSummary:
    walks: int
    hops: np.ndarray = field(repr=False)
    hits: np.ndarray | None = field(default=None, repr=False)

    @property
    def mean_hops(self) -> float | None:
        return float(self.hops.mean()) if self.walks else None


def _stream(params: RewireParams, rng) -> RandomStream:
    if rng is None:
        return RandomStream(params.seed)
    if not isinstance(rng, RandomStream):
        raise TypeError("rng must be a RandomStream")
    return rng


def _replace_slot(graph: ShortcutGraph, x: int, z: int, slot: int) -> None:
    row = graph.targets[x]
    filled = int(np.count_nonzero(row != EMPTY))
    row[slot if slot < filled else filled] = z


def destination_sample_step(graph: ShortcutGraph, params: RewireParams, rng: RandomStream) -> WalkRecord:
    """One rewiring step. Returns the walk as routed on the graph before it was changed."""
    n = graph.topo.n
    y, z = rng.integer(n), rng.integer(n)
    while y == z:
        y, z = rng.integer(n), rng.integer(n)
    record = greedy_walk(graph, y, z)
    for x in record.path[:-1]:
        if rng.uniform() < params.p:
            _replace_slot(graph, x, z, rng.integer(graph.capacity))
    return record


def run_walks(
    graph: ShortcutGraph,
    steps: int,
    rng: RandomStream,
    p: float,
    mutate: bool = True,
    hits: np.ndarray | None = None,
) -> np.ndarray:
    """Run ``steps`` walks through the compiled kernel; returns per-walk hop counts.

    With ``mutate`` the walks rewire the graph exactly as repeated
    ``destination_sample_step`` calls would. ``hits``, if given, is
    incremented at the destination distance of every non-terminal walk vertex.
    """
    if steps < 0:
        raise ValueError("steps must be non-negative")
    topo = graph.topo
    hops = np.empty(steps, dtype=np.int64)
    path = np.empty(topo.n + 1, dtype=np.int64)
    hit_buf = hits if hits is not None else np.zeros(1, dtype=np.int64)
    need = 2 * topo.n + 64
    done = 0
    while done < steps:
        rng.ensure(need)
        did, pos = _kernels.run_steps(
            topo.code, topo.n, topo.side, graph.targets, p, mutate,
            rng.buffer, rng.pos, steps - done, hops[done:], path, hit_buf,
        )
        rng.pos = pos
        done += did
        if did == 0:
            # a single step wanted more values than were buffered
            need *= 2
    return hops


def evolve(
    graph: ShortcutGraph,
    steps: int,
    params: RewireParams,
    rng: RandomStream | None = None,
    record_hits: bool = False,
) -> EvolveSummary:
    """Apply ``steps`` destination-sampling steps in sequence.

    Without an explicit ``rng`` the stream is seeded from ``params.seed``.
    """
    rng = _stream(params, rng)
    hits = np.zeros(graph.topo.max_distance + 1, dtype=np.int64) if record_hits else None
    hops = run_walks(graph, steps, rng, params.p, mutate=True, hits=hits)
    return EvolveSummary(steps, hops, hits)
