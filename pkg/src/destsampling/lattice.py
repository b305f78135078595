"""Base-lattice geometry: the directed ring, the undirected ring and the 2D torus.

Vertices are dense integer ids ``0..n-1``. The torus uses row-major encoding,
vertex ``(r, c)`` has id ``r * side + c``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np


class Kind(str, Enum):
    DIRECTED_RING = "ring"
    RING = "bidir-ring"
    TORUS = "torus"


# integer codes handed to the compiled kernels
KIND_CODES = {Kind.DIRECTED_RING: 0, Kind.RING: 1, Kind.TORUS: 2}


@dataclass(frozen=True)
class Topology:
    kind: Kind
    n: int
    side: int = 0

    def __post_init__(self):
        kind = Kind(self.kind)
        object.__setattr__(self, "kind", kind)
        if self.n < 2:
            raise ValueError(f"lattice needs at least 2 vertices, got n={self.n}")
        if kind is Kind.TORUS:
            if self.side < 2 or self.side * self.side != self.n:
                raise ValueError(f"torus needs n = side**2 with side >= 2 (n={self.n}, side={self.side})")
        elif self.side not in (0, self.n):
            raise ValueError("side is only meaningful for the torus")

    @classmethod
    def ring(cls, n: int) -> "Topology":
        return cls(Kind.DIRECTED_RING, n)

    @classmethod
    def bidirectional_ring(cls, n: int) -> "Topology":
        return cls(Kind.RING, n)

    @classmethod
    def torus(cls, side: int) -> "Topology":
        return cls(Kind.TORUS, side * side, side)

    @property
    def code(self) -> int:
        return KIND_CODES[self.kind]

    @property
    def max_distance(self) -> int:
        """Largest lattice distance between two vertices."""
        if self.kind is Kind.DIRECTED_RING:
            return self.n - 1
        if self.kind is Kind.RING:
            return self.n // 2
        return 2 * (self.side // 2)

    def coords(self, x: int) -> tuple[int, int]:
        return divmod(self._check(x), self.side)

    def vertex(self, row: int, col: int) -> int:
        return (row % self.side) * self.side + col % self.side

    def describe(self) -> dict:
        out = {"topology": self.kind.value, "n": self.n}
        if self.kind is Kind.TORUS:
            out["side"] = self.side
        return out

    def _check(self, x) -> int:
        if isinstance(x, (bool, np.bool_)) or not isinstance(x, (int, np.integer)):
            raise TypeError(f"vertex id must be an integer, got {x!r}")
        if not 0 <= x < self.n:
            raise ValueError(f"vertex id {x} out of range for n={self.n}")
        return int(x)


def distance(topo: Topology, x: int, z: int) -> int:
    """Lattice distance from ``x`` to ``z``.

    On the directed ring base edges go ``x -> x-1``, so the distance counts
    steps along that orientation and is not symmetric.
    """
    x = topo._check(x)
    z = topo._check(z)
    if topo.kind is Kind.DIRECTED_RING:
        return (x - z) % topo.n
    if topo.kind is Kind.RING:
        d = (x - z) % topo.n
        return min(d, topo.n - d)
    m = topo.side
    dr = abs(x // m - z // m)
    dc = abs(x % m - z % m)
    return min(dr, m - dr) + min(dc, m - dc)


def base_neighbors(topo: Topology, x: int) -> list[int]:
    x = topo._check(x)
    n = topo.n
    if topo.kind is Kind.DIRECTED_RING:
        return [(x - 1) % n]
    if topo.kind is Kind.RING:
        return sorted({(x - 1) % n, (x + 1) % n})
    r, c = divmod(x, topo.side)
    nbrs = {topo.vertex(r - 1, c), topo.vertex(r + 1, c), topo.vertex(r, c - 1), topo.vertex(r, c + 1)}
    return sorted(nbrs)


def distances_from(topo: Topology, z: int) -> np.ndarray:
    """Vector of ``distance(x, z)`` for every vertex ``x``."""
    z = topo._check(z)
    x = np.arange(topo.n, dtype=np.int64)
    if topo.kind is Kind.DIRECTED_RING:
        return (x - z) % topo.n
    if topo.kind is Kind.RING:
        d = (x - z) % topo.n
        return np.minimum(d, topo.n - d)
    m = topo.side
    dr = np.abs(x // m - z // m)
    dc = np.abs(x % m - z % m)
    return np.minimum(dr, m - dr) + np.minimum(dc, m - dc)


def translate(topo: Topology, x, offset):
    """Shift vertex ``x`` by the position of vertex ``offset`` relative to 0.

    Translation preserves distance: ``distance(translate(x, o), translate(z, o)) == distance(x, z)``.
    Works elementwise on integer arrays.
    """
    if topo.kind is Kind.TORUS:
        m = topo.side
        return ((x // m + offset // m) % m) * m + (x % m + offset % m) % m
    return (x + offset) % topo.n


def class_sizes(topo: Topology) -> np.ndarray:
    """Number of vertices at each distance ``1..max_distance`` from a fixed vertex."""
    d = distances_from(topo, 0)
    return np.bincount(d, minlength=topo.max_distance + 1)[1:]


def harmonic_number(n: int) -> float:
    return math.fsum(1.0 / d for d in range(1, n + 1))
