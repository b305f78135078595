"""Exact hitting probabilities and balanced shortcut distributions on the directed ring.

Destination is fixed at vertex 0 and vertices are identified with their
distance to it. With shortcuts drawn independently per vertex from ``ell``,
a greedy query is a Markov chain that only moves closer to 0, so the
probability ``h(x)`` of passing through ``x`` obeys a backward recursion
from ``x = n-1`` down to ``x = 1``::

    h(x) = sum_{xi > x} h(xi) ell(xi - x)        # shortcut from xi lands on x
         + h(x+1) * sum_{xi >= x+2} ell(xi)      # base step from x+1, its shortcut overshoots 0
         + 1 / (n-1)                             # the query starts at x

``tau = sum h(x)`` is the expected greedy routing time from a uniform start.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import fftconvolve

from .graph import DistanceDistribution

log = logging.getLogger(__name__)

# above this size the recursion switches to the divide-and-conquer FFT path
DIRECT_LIMIT = 8192
_LEAF = 64


class ConvergenceError(RuntimeError):
    def __init__(self, message, residual, iterations):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


@dataclass(frozen=True, eq=False)
class HittingVector:
    """``h[x - 1]`` is the probability that a query for 0 passes through ``x``."""

    n: int
    h: np.ndarray

    def __getitem__(self, x: int) -> float:
        if not 1 <= x < self.n:
            raise IndexError(x)
        return float(self.h[x - 1])

    @property
    def tau(self) -> float:
        return tau(self)


def harmonic_distribution(n: int) -> DistanceDistribution:
    if n < 2:
        raise ValueError("n must be at least 2")
    w = 1.0 / np.arange(1, n, dtype=np.float64)
    return DistanceDistribution(n, w / math.fsum(w))


def _ring_weights(ell: DistanceDistribution) -> np.ndarray:
    if not isinstance(ell, DistanceDistribution):
        raise TypeError("expected a DistanceDistribution")
    if ell.weights.size != ell.n - 1:
        raise ValueError(f"ring distribution for n={ell.n} needs {ell.n - 1} classes, got {ell.weights.size}")
    return ell.weights


def _tails(w: np.ndarray) -> np.ndarray:
    # tail[k] = sum_{d >= k} ell(d), indexed by distance, padded so tail[n] = tail[n+1] = 0
    n = w.size + 1
    tail = np.zeros(n + 2)
    tail[1:n] = np.cumsum(w[::-1])[::-1]
    return tail


def _hitting_direct(w: np.ndarray) -> np.ndarray:
    n = w.size + 1
    tail = _tails(w)
    start = 1.0 / (n - 1)
    h = np.zeros(n + 1)  # h[x] by distance, h[0] and h[n] unused / zero
    for x in range(n - 1, 0, -1):
        h[x] = np.dot(h[x + 1 : n], w[: n - 1 - x]) + h[x + 1] * tail[x + 2] + start
    return h[1:n]


def _hitting_fft(w: np.ndarray) -> np.ndarray:
    # Work in u = n-1-x so the recursion runs forward: g[u] needs g[0..u-1].
    # The shortcut term is an online convolution of g with ell, split
    # recursively so each half's contribution to the next is one FFT.
    n = w.size + 1
    size = n - 1
    tail = _tails(w)
    ell = np.concatenate(([0.0], w))  # ell[m] for m = 0..n-1
    base = np.zeros(size)
    base[1:] = tail[n + 1 - np.arange(1, size)]  # tail[x+2] with x = n-1-u
    start = 1.0 / (n - 1)
    g = np.zeros(size)
    acc = np.zeros(size)

    def solve(lo, hi):
        if hi - lo <= _LEAF:
            for u in range(lo, hi):
                s = acc[u] + np.dot(g[lo:u][::-1], ell[1 : u - lo + 1]) + start
                if u > 0:
                    s += g[u - 1] * base[u]
                g[u] = s
            return
        mid = (lo + hi) // 2
        solve(lo, mid)
        conv = fftconvolve(g[lo:mid], ell[: hi - lo])
        acc[mid:hi] += conv[mid - lo : hi - lo]
        solve(mid, hi)

    solve(0, size)
    return g[::-1].copy()


def hitting_from_links(ell: DistanceDistribution, method: str = "auto") -> HittingVector:
    """Hitting probabilities of every vertex for independent shortcuts drawn from ``ell``.

    ``method`` is ``"direct"`` (O(n^2)), ``"fft"`` (O(n log^2 n)) or
    ``"auto"``, which picks direct up to ``DIRECT_LIMIT`` vertices.
    """
    w = _ring_weights(ell)
    if method == "auto":
        method = "direct" if ell.n <= DIRECT_LIMIT else "fft"
    if method == "direct":
        h = _hitting_direct(w)
    elif method == "fft":
        h = _hitting_fft(w)
    else:
        raise ValueError(f"unknown method {method!r}")
    h.flags.writeable = False
    return HittingVector(ell.n, h)


def tau(h: HittingVector) -> float:
    return math.fsum(h.h)


def exact_tau(ell: DistanceDistribution, method: str = "auto") -> float:
    return tau(hitting_from_links(ell, method))


def balance_map(ell: DistanceDistribution, method: str = "auto") -> DistanceDistribution:
    """Map ``ell`` to the distribution proportional to the hitting probabilities it induces."""
    h = hitting_from_links(ell, method)
    return DistanceDistribution(ell.n, h.h / tau(h))


@dataclass
class BalancedSolution:
    ell: DistanceDistribution
    iterations: int
    residual: float
    residuals: list = field(default_factory=list, repr=False)
    damping: float = 1.0

    @property
    def hitting(self) -> HittingVector:
        return hitting_from_links(self.ell)

    @property
    def tau(self) -> float:
        return exact_tau(self.ell)


def solve_balanced(
    n: int,
    tol: float = 1e-12,
    max_iter: int = 100_000,
    damping: float = 1.0,
    initial: DistanceDistribution | None = None,
) -> BalancedSolution:
    """Fixed point of ``balance_map`` by (optionally damped) Picard iteration.

    Starts from the uniform distribution unless ``initial`` is given. Stops
    at the first iterate whose residual ``||balance_map(ell) - ell||_1`` is
    below ``tol``, and returns that iterate. If the residual ever grows the
    step is damped to 0.5.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if not tol > 0:
        raise ValueError("tol must be positive")
    ell = initial if initial is not None else DistanceDistribution.uniform(n)
    if ell.n != n:
        raise ValueError("initial distribution has the wrong size")
    lam = damping
    residuals = []
    for it in range(max_iter):
        mapped = balance_map(ell).weights
        residual = float(np.abs(mapped - ell.weights).sum())
        residuals.append(residual)
        if residual < tol:
            return BalancedSolution(ell, it + 1, residual, residuals, lam)
        if len(residuals) > 1 and residual > residuals[-2] and lam > 0.5:
            log.info("residual rose at iteration %d, damping to 0.5", it)
            lam = 0.5
        w = (1.0 - lam) * ell.weights + lam * mapped
        ell = DistanceDistribution(n, w / math.fsum(w))
    raise ConvergenceError(
        f"no balanced fixed point for n={n} within {max_iter} iterations (residual {residuals[-1]:.3e})",
        residuals[-1],
        max_iter,
    )
