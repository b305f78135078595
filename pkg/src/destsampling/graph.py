"""Shortcut digraphs over a base lattice, and the static generators."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .lattice import Kind, Topology, class_sizes, translate

EMPTY = -1


@dataclass(frozen=True, eq=False)
class DistanceDistribution:
    """Probability of a shortcut having lattice distance ``d = 1..len(weights)``.

    ``weights[d - 1]`` is the probability of distance class ``d``.
    """

    n: int
    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("weights must be a non-empty vector")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValueError("weights must be finite and non-negative")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {w.sum()!r}, not 1")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_weights(cls, n: int, weights) -> "DistanceDistribution":
        """Normalize arbitrary non-negative weights into a distribution."""
        w = np.asarray(weights, dtype=np.float64)
        total = w.sum()
        if not total > 0:
            raise ValueError("weights must have positive mass")
        return cls(n, w / total)

    @classmethod
    def uniform(cls, n: int, classes: int | None = None) -> "DistanceDistribution":
        k = n - 1 if classes is None else classes
        return cls(n, np.full(k, 1.0 / k))

    def __len__(self):
        return self.weights.size

    def __getitem__(self, d: int) -> float:
        if not 1 <= d <= self.weights.size:
            raise IndexError(d)
        return float(self.weights[d - 1])

    def __eq__(self, other):
        if not isinstance(other, DistanceDistribution):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.weights, other.weights)

    def check_topology(self, topo: Topology) -> None:
        if self.n != topo.n or self.weights.size != topo.max_distance:
            raise ValueError(
                f"distribution over {self.weights.size} classes (n={self.n}) does not fit "
                f"{topo.kind.value} with n={topo.n} ({topo.max_distance} classes)"
            )


@dataclass(eq=False)
class ShortcutGraph:
    """Per-vertex shortcut slots.

    ``targets`` has shape ``(n, capacity)``. Filled slots come first in each
    row and unfilled ones hold ``EMPTY``, so a row reads as the vertex's
    shortcut list.
    """

    topo: Topology
    capacity: int = 1
    targets: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.capacity < 1:
            raise ValueError("capacity must be at least 1")
        if self.targets is None:
            self.targets = np.full((self.topo.n, self.capacity), EMPTY, dtype=np.int64)
        else:
            self.targets = np.ascontiguousarray(self.targets, dtype=np.int64)
        self.validate()

    def validate(self) -> None:
        t = self.targets
        n = self.topo.n
        if t.shape != (n, self.capacity):
            raise ValueError(f"targets shape {t.shape} != {(n, self.capacity)}")
        if np.any((t < EMPTY) | (t >= n)):
            raise ValueError("shortcut target out of range")
        if np.any(t == np.arange(n)[:, None]):
            raise ValueError("self-shortcut present")
        filled = t != EMPTY
        # filled slots must form a prefix of each row
        if np.any(filled[:, 1:] & ~filled[:, :-1]):
            raise ValueError("empty slot precedes a filled slot")

    def shortcuts(self, x: int) -> list[int]:
        row = self.targets[self.topo._check(x)]
        return [int(v) for v in row if v != EMPTY]

    def shortcut_count(self) -> int:
        return int(np.count_nonzero(self.targets != EMPTY))

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Source and target arrays of all shortcuts."""
        src, slot = np.nonzero(self.targets != EMPTY)
        return src, self.targets[src, slot]

    def copy(self) -> "ShortcutGraph":
        return ShortcutGraph(self.topo, self.capacity, self.targets.copy())

    def __eq__(self, other):
        if not isinstance(other, ShortcutGraph):
            return NotImplemented
        return (
            self.topo == other.topo
            and self.capacity == other.capacity
            and np.array_equal(self.targets, other.targets)
        )


def empty_graph(topo: Topology, capacity: int = 1) -> ShortcutGraph:
    return ShortcutGraph(topo, capacity)


@lru_cache(maxsize=16)
def _offset_table(topo: Topology):
    # offsets o != 0 sorted by distance(0, o); class d occupies order[start[d-1]:start[d]]
    o = np.arange(1, topo.n, dtype=np.int64)
    if topo.kind is Kind.DIRECTED_RING:
        d = (-o) % topo.n
    elif topo.kind is Kind.RING:
        d = np.minimum(o, topo.n - o)
    else:
        m = topo.side
        r, c = o // m, o % m
        d = np.minimum(r, m - r) + np.minimum(c, m - c)
    order = np.argsort(d, kind="stable")
    offsets = o[order]
    sizes = class_sizes(topo)
    start = np.concatenate(([0], np.cumsum(sizes)))
    offsets.flags.writeable = False
    return offsets, start, sizes


def _draw_classes(probs: np.ndarray, count: int, rng: np.random.Generator) -> np.ndarray:
    cdf = np.cumsum(probs)
    cdf /= cdf[-1]
    u = rng.random(count)
    idx = np.searchsorted(cdf, u, side="right")
    # rounding at the top of the table must not land on a trailing zero-mass class
    idx = np.minimum(idx, np.flatnonzero(probs > 0)[-1])
    return idx + 1


def _targets_for_classes(topo: Topology, sources: np.ndarray, classes: np.ndarray, rng) -> np.ndarray:
    offsets, start, sizes = _offset_table(topo)
    member = np.floor(rng.random(classes.size) * sizes[classes - 1]).astype(np.int64)
    return translate(topo, sources, offsets[start[classes - 1] + member])


def _fill(topo: Topology, capacity: int, class_probs: np.ndarray, rng) -> ShortcutGraph:
    sources = np.repeat(np.arange(topo.n, dtype=np.int64), capacity)
    classes = _draw_classes(class_probs, sources.size, rng)
    targets = _targets_for_classes(topo, sources, classes, rng)
    return ShortcutGraph(topo, capacity, targets.reshape(topo.n, capacity))


def kleinberg_class_weights(topo: Topology, alpha: float) -> np.ndarray:
    """Probability of each distance class when every vertex is weighted by ``d**alpha``."""
    d = np.arange(1, topo.max_distance + 1, dtype=np.float64)
    w = class_sizes(topo) * d**alpha
    return w / w.sum()


def sample_kleinberg(topo: Topology, alpha: float, capacity: int = 1, rng=None) -> ShortcutGraph:
    """Independent shortcuts with ``P(x -> z)`` proportional to ``distance(x, z) ** alpha``.

    Drawing a distance class with mass ``size(d) * d**alpha`` and then a
    uniform member of it gives exactly the per-vertex weighting.
    """
    rng = np.random.default_rng(rng)
    return _fill(topo, capacity, kleinberg_class_weights(topo, alpha), rng)


def sample_from_distribution(topo: Topology, ell: DistanceDistribution, capacity: int = 1, rng=None) -> ShortcutGraph:
    """Independent shortcuts whose distance class follows ``ell``; uniform member within a class."""
    ell.check_topology(topo)
    rng = np.random.default_rng(rng)
    return _fill(topo, capacity, ell.weights, rng)


def shortcut_distances(graph: ShortcutGraph) -> np.ndarray:
    src, dst = graph.edges()
    topo = graph.topo
    if topo.kind is Kind.DIRECTED_RING:
        return (src - dst) % topo.n
    if topo.kind is Kind.RING:
        d = (src - dst) % topo.n
        return np.minimum(d, topo.n - d)
    m = topo.side
    dr = np.abs(src // m - dst // m)
    dc = np.abs(src % m - dst % m)
    return np.minimum(dr, m - dr) + np.minimum(dc, m - dc)


# -- snapshot format ---------------------------------------------------------

def dump_graph(graph: ShortcutGraph, fh, header: dict | None = None) -> None:
    """Write ``vertex_id,target_1,...,target_k`` rows, preceded by ``#`` metadata lines."""
    meta = dict(graph.topo.describe(), capacity=graph.capacity)
    fh.write("# " + " ".join(f"{k}={v}" for k, v in meta.items()) + "\n")
    for key, value in (header or {}).items():
        fh.write(f"# {key}: {value}\n")
    writer = csv.writer(fh, lineterminator="\n")
    for x, row in enumerate(graph.targets):
        writer.writerow([x, *row[row != EMPTY].tolist()])


def dumps_graph(graph: ShortcutGraph, header: dict | None = None) -> str:
    buf = io.StringIO()
    dump_graph(graph, buf, header)
    return buf.getvalue()


def load_graph(fh) -> ShortcutGraph:
    first = fh.readline()
    if not first.startswith("# "):
        raise ValueError("snapshot is missing its topology line")
    meta = dict(item.split("=", 1) for item in first[2:].split())
    try:
        kind = Kind(meta["topology"])
        n = int(meta["n"])
        capacity = int(meta["capacity"])
        topo = Topology.torus(int(meta["side"])) if kind is Kind.TORUS else Topology(kind, n)
    except (KeyError, ValueError) as exc:
        raise ValueError(f"bad snapshot header {first.strip()!r}") from exc
    if topo.n != n:
        raise ValueError("torus side does not match n")
    targets = np.full((n, capacity), EMPTY, dtype=np.int64)
    seen = np.zeros(n, dtype=bool)
    for line in fh:
        if not line.strip() or line.startswith("#"):
            continue
        fields = [int(v) for v in line.strip().split(",")]
        x, row = fields[0], fields[1:]
        if not 0 <= x < n or seen[x]:
            raise ValueError(f"bad or repeated vertex id {x}")
        if len(row) > capacity:
            raise ValueError(f"vertex {x} has {len(row)} shortcuts, capacity is {capacity}")
        seen[x] = True
        targets[x, : len(row)] = row
    if not seen.all():
        raise ValueError("snapshot does not list every vertex")
    return ShortcutGraph(topo, capacity, targets)


def loads_graph(text: str) -> ShortcutGraph:
    return load_graph(io.StringIO(text))
