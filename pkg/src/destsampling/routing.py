"""Strict greedy routing over the base lattice plus shortcuts."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .graph import ShortcutGraph
from .lattice import base_neighbors, distance


class RoutingError(ValueError):
    pass


@dataclass(frozen=True)
class WalkRecord:
    source: int
    destination: int
    path: tuple

    @property
    def hops(self) -> int:
        return len(self.path) - 1


def greedy_step(graph: ShortcutGraph, current: int, dest: int) -> int:
    """Neighbor of ``current`` (base or shortcut) closest to ``dest``; ties go to the smallest id."""
    topo = graph.topo
    if current == dest:
        raise RoutingError("greedy step requested at the destination")
    candidates = base_neighbors(topo, current) + graph.shortcuts(current)
    best = min(candidates, key=lambda v: (distance(topo, v, dest), v))
    if __debug__:
        assert distance(topo, best, dest) < distance(topo, current, dest), "greedy step made no progress"
    return best


def greedy_walk(graph: ShortcutGraph, y: int, z: int) -> WalkRecord:
    if y == z:
        raise RoutingError("greedy walk needs distinct endpoints")
    path = [y]
    x = y
    while x != z:
        x = greedy_step(graph, x, z)
        path.append(x)
    return WalkRecord(y, z, tuple(path))


def walk_hops(graph: ShortcutGraph, y: int, z: int) -> int:
    """Hop count of the greedy walk, computed by the compiled router."""
    topo = graph.topo
    path = np.empty(topo.n + 1, dtype=np.int64)
    return int(_kernels.walk(topo.code, topo.n, topo.side, graph.targets, y, z, path))


def mean_hops_all_pairs(graph: ShortcutGraph) -> float:
    topo = graph.topo
    path = np.empty(topo.n + 1, dtype=np.int64)
    total = _kernels.all_pairs_hops(topo.code, topo.n, topo.side, graph.targets, path)
    return total / (topo.n * (topo.n - 1))
