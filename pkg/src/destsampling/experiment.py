"""Measurement harness: path-length sweeps, link-length histograms and Monte-Carlo hitting estimates."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__, _kernels
from .analytic import HittingVector, exact_tau
from .graph import DistanceDistribution, ShortcutGraph, empty_graph, kleinberg_class_weights, sample_kleinberg, shortcut_distances
from .lattice import Kind, Topology, harmonic_number
from .rewire import RewireParams, run_walks
from .rng import ALGORITHM, RandomStream, seed_sequence

log = logging.getLogger(__name__)

DEFAULT_MEMORY_CAP = 2 << 30  # bytes


class ResourceLimitError(RuntimeError):
    pass


@dataclass
class ExperimentConfig:
    topology: str = "ring"
    sizes: list = field(default_factory=lambda: [1000])
    capacity: int = 1
    p: float = 0.1
    warmup: int | None = None  # absolute step count
    warmup_factor: float = 10.0  # used when warmup is None: warmup = factor * n
    walks: int = 100_000
    seed: int = 0
    frozen: bool = False
    alpha: float | None = None  # Kleinberg exponent, default -dimension
    graphs: int = 1  # independent static graphs the baseline walks are split over
    batches: int = 100
    windows: int = 10
    memory_cap: int = DEFAULT_MEMORY_CAP
    threads: int = 1

    def __post_init__(self):
        Kind(self.topology)
        self.sizes = [int(s) for s in self.sizes]
        if not self.sizes or any(b <= a for a, b in zip(self.sizes, self.sizes[1:])):
            raise ValueError("sizes must be non-empty and strictly increasing")
        if min(self.sizes) < 2:
            raise ValueError("sizes must be at least 2")
        if self.warmup is not None and self.warmup < 0:
            raise ValueError("warmup must be non-negative")
        if self.warmup_factor < 0:
            raise ValueError("warmup factor must be non-negative")
        if self.walks < 1:
            raise ValueError("need at least one measuring walk")
        if self.capacity < 1 or self.graphs < 1 or self.batches < 1 or self.windows < 1:
            raise ValueError("capacity, graphs, batches and windows must be positive")
        RewireParams(self.p)

    def topology_for(self, n: int) -> Topology:
        kind = Kind(self.topology)
        if kind is Kind.TORUS:
            side = math.isqrt(n)
            if side * side != n:
                side = max(2, round(math.sqrt(n)))
            return Topology.torus(side)
        return Topology(kind, n)

    def warmup_steps(self, n: int) -> int:
        return self.warmup if self.warmup is not None else int(round(self.warmup_factor * n))

    @property
    def kleinberg_alpha(self) -> float:
        if self.alpha is not None:
            return self.alpha
        return -2.0 if Kind(self.topology) is Kind.TORUS else -1.0

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class SizeRecord:
    n: int
    mean_hops: float
    std_error: float
    batch_std_error: float
    walks: int
    seed: int
    window_means: list = field(default_factory=list)
    warmup_window_means: list = field(default_factory=list)
    exact_tau: float | None = None
    wall_time: float = 0.0

    @property
    def sqrt_mean_hops(self) -> float:
        return math.sqrt(self.mean_hops)

    def to_dict(self) -> dict:
        out = asdict(self)
        del out["wall_time"]  # kept out of files so reruns are byte-identical
        out["sqrt_mean_hops"] = self.sqrt_mean_hops
        return out


@dataclass
class ExperimentResult:
    model: str
    config: ExperimentConfig
    records: list

    @property
    def sizes(self) -> np.ndarray:
        return np.array([r.n for r in self.records])

    @property
    def sqrt_mean_hops(self) -> np.ndarray:
        return np.array([r.sqrt_mean_hops for r in self.records])

    def increments(self) -> np.ndarray:
        """Change of sqrt(mean hops) per doubling, between consecutive sizes."""
        return np.diff(self.sqrt_mean_hops) / np.diff(np.log2(self.sizes))

    def slope(self) -> float:
        """Least-squares slope of sqrt(mean hops) against log2(n)."""
        if len(self.records) < 2:
            return float("nan")
        return float(np.polyfit(np.log2(self.sizes), self.sqrt_mean_hops, 1)[0])

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "version": __version__,
            "rng": ALGORITHM,
            "config": self.config.to_dict(),
            "records": [r.to_dict() for r in self.records],
            "slope_per_doubling": self.slope(),
        }


def _check_memory(cfg: ExperimentConfig, topo: Topology) -> None:
    # shortcut table, walk path, hit counters and a uniform buffer of ~2n values
    need = topo.n * cfg.capacity * 8 + 4 * topo.n * 8 + (1 << 23)
    if need > cfg.memory_cap:
        raise ResourceLimitError(f"n={topo.n} needs about {need} bytes, over the cap of {cfg.memory_cap}")


def _summarize(hops: np.ndarray, batches: int, windows: int):
    walks = hops.size
    mean = float(hops.mean())
    std_error = float(hops.std(ddof=1) / math.sqrt(walks)) if walks > 1 else float("nan")
    k = min(batches, walks)
    if k > 1:
        means = np.array([b.mean() for b in np.array_split(hops, k)])
        batch_se = float(means.std(ddof=1) / math.sqrt(k))
    else:
        batch_se = float("nan")
    window_means = [float(w.mean()) for w in np.array_split(hops, min(windows, walks))]
    return mean, std_error, batch_se, window_means


def _window_means(hops: np.ndarray, windows: int) -> list:
    if hops.size == 0:
        return []
    return [float(w.mean()) for w in np.array_split(hops, min(windows, hops.size))]


def _exact_ring_tau(cfg: ExperimentConfig, topo: Topology) -> float | None:
    if topo.kind is not Kind.DIRECTED_RING:
        return None
    ell = DistanceDistribution(topo.n, kleinberg_class_weights(topo, cfg.kleinberg_alpha))
    return exact_tau(ell)


def _destination_sampling_size(cfg: ExperimentConfig, n: int) -> SizeRecord:
    topo = cfg.topology_for(n)
    _check_memory(cfg, topo)
    started = time.perf_counter()
    rng = RandomStream(seed_sequence(cfg.seed, topo.n))
    graph = empty_graph(topo, cfg.capacity)
    warm = run_walks(graph, cfg.warmup_steps(topo.n), rng, cfg.p)
    hops = run_walks(graph, cfg.walks, rng, cfg.p, mutate=not cfg.frozen)
    mean, se, bse, windows = _summarize(hops, cfg.batches, cfg.windows)
    elapsed = time.perf_counter() - started
    log.info("destination sampling n=%d: mean hops %.4f (%.1fs)", topo.n, mean, elapsed)
    return SizeRecord(topo.n, mean, se, bse, cfg.walks, cfg.seed, windows, _window_means(warm, cfg.windows), None, elapsed)


def _kleinberg_size(cfg: ExperimentConfig, n: int) -> SizeRecord:
    topo = cfg.topology_for(n)
    _check_memory(cfg, topo)
    started = time.perf_counter()
    rng = RandomStream(seed_sequence(cfg.seed, topo.n))
    sample_rng = np.random.Generator(np.random.PCG64(seed_sequence(cfg.seed, topo.n, 1)))
    parts = []
    for walks in (len(c) for c in np.array_split(np.arange(cfg.walks), cfg.graphs)):
        graph = sample_kleinberg(topo, cfg.kleinberg_alpha, cfg.capacity, sample_rng)
        parts.append(run_walks(graph, walks, rng, cfg.p, mutate=False))
    hops = np.concatenate(parts)
    mean, se, bse, windows = _summarize(hops, cfg.batches, cfg.windows)
    exact = _exact_ring_tau(cfg, topo)
    elapsed = time.perf_counter() - started
    log.info("kleinberg n=%d: mean hops %.4f exact %s (%.1fs)", topo.n, mean, exact, elapsed)
    return SizeRecord(topo.n, mean, se, bse, cfg.walks, cfg.seed, windows, [], exact, elapsed)


def _run(cfg: ExperimentConfig, worker) -> list:
    if cfg.threads > 1 and len(cfg.sizes) > 1:
        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            return list(pool.map(worker, [cfg] * len(cfg.sizes), cfg.sizes))
    return [worker(cfg, n) for n in cfg.sizes]


def run_destination_sampling_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Empty graph, warmup rewiring, then measuring walks that keep rewiring (unless frozen)."""
    return ExperimentResult("destination-sampling", cfg, _run(cfg, _destination_sampling_size))


def run_kleinberg_baseline(cfg: ExperimentConfig) -> ExperimentResult:
    """Walks on static Kleinberg graphs; on the directed ring each record carries the exact tau."""
    return ExperimentResult("kleinberg", cfg, _run(cfg, _kleinberg_size))


# -- link-length histograms ---------------------------------------------------

@dataclass
class LinkHistogram:
    n: int
    distance: np.ndarray
    count: np.ndarray

    @property
    def total(self) -> int:
        return int(self.count.sum())

    @property
    def inv_freq(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return self.total / self.count.astype(np.float64)

    def harmonic_reference(self) -> np.ndarray:
        """Inverse frequency under the harmonic law on the ring: d * H(n-1)."""
        return self.distance * harmonic_number(self.n - 1)

    def label_reference(self) -> np.ndarray:
        """The literal ``5 log(10) d`` reference line, i.e. d * ln(1e5)."""
        return self.distance * 5 * math.log(10)

    def as_dict(self) -> dict:
        return {int(d): int(c) for d, c in zip(self.distance, self.count)}


def link_distance_histogram(graph: ShortcutGraph) -> LinkHistogram:
    d = shortcut_distances(graph)
    if d.size == 0:
        return LinkHistogram(graph.topo.n, np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64))
    counts = np.bincount(d)
    nz = np.flatnonzero(counts)
    return LinkHistogram(graph.topo.n, nz, counts[nz])


def binned_inverse_frequency(hist: LinkHistogram, lo: int, hi: int, bins: int = 30):
    """Inverse frequency per distance averaged over log-spaced bins in ``[lo, hi]``.

    Returns bin centres (mean distance) and ``1 / f`` where ``f`` is the
    per-distance frequency inside the bin.
    """
    counts = np.zeros(hi + 1)
    keep = hist.distance <= hi
    counts[hist.distance[keep]] = hist.count[keep]
    edges = np.unique(np.round(np.geomspace(lo, hi + 1, bins + 1)).astype(int))
    centres, inv = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        c = counts[a:b].sum()
        if c > 0:
            centres.append((a + b - 1) / 2)
            inv.append(hist.total * (b - a) / c)
    return np.array(centres), np.array(inv)


def r_squared(x: np.ndarray, y: np.ndarray) -> float:
    slope, icept = np.polyfit(x, y, 1)
    resid = y - (slope * x + icept)
    return float(1 - resid.var() / y.var())


# -- hitting estimates ----------------------------------------------------------

@dataclass
class HittingEstimate:
    n: int
    samples: int
    h: np.ndarray
    std_error: np.ndarray

    def as_vector(self) -> HittingVector:
        return HittingVector(self.n, self.h)


def estimate_hitting_mc(ell: DistanceDistribution, n: int, samples: int, rng=None) -> HittingEstimate:
    """Monte-Carlo hitting probabilities on the directed ring for independent shortcuts from ``ell``.

    Each sample is a fresh graph, a uniform start other than 0, and a greedy
    route to 0. Standard errors are binomial: ``sqrt(h(1-h)/samples)``.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    if ell.n != n or len(ell) != n - 1:
        raise ValueError("distribution does not match a directed ring of size n")
    stream = rng if isinstance(rng, RandomStream) else RandomStream(rng)
    cdf = np.cumsum(ell.weights)
    cdf /= cdf[-1]
    last = int(np.flatnonzero(ell.weights > 0)[-1])
    hits = np.zeros(n, dtype=np.int64)
    path = np.empty(n, dtype=np.int64)
    done = 0
    need = 4 * n + 1024
    while done < samples:
        stream.ensure(need)
        did, used = _kernels.ring_hitting_samples(cdf, last, n, stream.buffer[stream.pos :], samples - done, hits, path)
        stream.pos += used
        done += did
        if did == 0:
            need *= 2
    h = hits[1:] / samples
    return HittingEstimate(n, samples, h, np.sqrt(h * (1 - h) / samples))


@dataclass
class BalanceEstimate:
    """Time-averaged link-length law and walk hitting frequency of an evolving ring."""

    n: int
    links: np.ndarray  # links[d], d = 0..n-1, summed over snapshots
    hits: np.ndarray  # hits[d], walk vertices at destination distance d

    @property
    def ell(self) -> np.ndarray:
        return self.links[1:] / self.links[1:].sum()

    @property
    def hitting(self) -> np.ndarray:
        return self.hits[1:] / self.hits[1:].sum()


def estimate_balance(
    topo: Topology,
    steps: int,
    p: float = 0.1,
    seed: int = 0,
    warmup: int | None = None,
    snapshot_every: int | None = None,
    capacity: int = 1,
) -> BalanceEstimate:
    """Evolve from empty for ``steps`` walks; after ``warmup`` (default 10n) accumulate
    walk hit distances and link-length snapshots every ``snapshot_every`` (default n) steps."""
    warmup = 10 * topo.n if warmup is None else warmup
    every = snapshot_every or topo.n
    rng = RandomStream(seed_sequence(seed, topo.n))
    graph = empty_graph(topo, capacity)
    run_walks(graph, min(warmup, steps), rng, p)
    links = np.zeros(topo.max_distance + 1, dtype=np.int64)
    hits = np.zeros(topo.max_distance + 1, dtype=np.int64)
    remaining = steps - min(warmup, steps)
    while remaining > 0:
        chunk = min(every, remaining)
        run_walks(graph, chunk, rng, p, hits=hits)
        remaining -= chunk
        links += np.bincount(shortcut_distances(graph), minlength=links.size)
    return BalanceEstimate(topo.n, links, hits)


# -- output formats -------------------------------------------------------------

def results_csv(result: ExperimentResult) -> str:
    buf = io.StringIO()
    buf.write(f"# model: {result.model}\n# version: {__version__}\n# rng: {ALGORITHM}\n")
    buf.write("# config: " + json.dumps(result.config.to_dict(), sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "mean_hops", "sqrt_mean_hops", "std_error", "walks", "seed"])
    for r in result.records:
        w.writerow([r.n, repr(r.mean_hops), repr(r.sqrt_mean_hops), repr(r.std_error), r.walks, r.seed])
    return buf.getvalue()


def results_json(result: ExperimentResult) -> str:
    return json.dumps(result.to_dict(), indent=2, sort_keys=True) + "\n"


def plot_series(result: ExperimentResult) -> str:
    """Two-column series: log2(n / base) and sqrt(mean hops); base 1000 on rings, 10000 on tori."""
    base = 10000 if result.config.topology == Kind.TORUS.value else 1000
    lines = [f"# log2(N/{base}) sqrt_mean_hops"]
    for r in result.records:
        lines.append(f"{math.log2(r.n / base)!r} {r.sqrt_mean_hops!r}")
    return "\n".join(lines) + "\n"


def histogram_csv(hist: LinkHistogram, header: dict | None = None) -> str:
    buf = io.StringIO()
    for k, v in (header or {}).items():
        buf.write(f"# {k}: {v}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["distance", "count", "inv_freq", "ref_harmonic", "ref_5ln10"])
    for d, c, inv, rh, rl in zip(hist.distance, hist.count, hist.inv_freq, hist.harmonic_reference(), hist.label_reference()):
        w.writerow([int(d), int(c), repr(float(inv)), repr(float(rh)), repr(float(rl))])
    return buf.getvalue()
