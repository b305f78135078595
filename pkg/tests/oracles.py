"""Reference computations that share no code with the package."""

import itertools

import numpy as np


def brute_force_hitting(weights):
    """Exact hitting probabilities on the directed ring by enumerating every
    shortcut assignment of vertices 1..n-1 (vertex 0's shortcut is never used).

    ``weights[d-1]`` is the probability of shortcut length d. Returns h for
    x = 1..n-1 with destination 0 and a uniform start in 1..n-1.
    """
    w = np.asarray(weights, dtype=float)
    n = w.size + 1
    lengths = np.array(list(itertools.product(range(1, n), repeat=n - 1)), dtype=np.int64)
    # lengths[c, v-1] is vertex v's shortcut length in configuration c
    prob = np.prod(w[lengths - 1].astype(np.longdouble), axis=1)
    hits = np.zeros(n, dtype=np.longdouble)
    rows = np.arange(lengths.shape[0])
    for s in range(1, n):
        x = np.full(lengths.shape[0], s)
        while np.any(x != 0):
            live = x != 0
            np.add.at(hits, x[live], prob[live])
            xs = x[live]
            via = (xs - lengths[rows[live], xs - 1]) % n
            # distance to 0 on the directed ring is the vertex id itself
            x[live] = np.where(via < xs - 1, via, xs - 1)
    return (hits[1:] / (n - 1)).astype(float)


def brute_force_tau(weights):
    return float(brute_force_hitting(weights).sum())


def golden_fixed_point():
    """Balanced law for n=3: ell1 = h1/(h1+h2) with h2 = 1/2 and h1 = ell1/2 + 1/2
    gives ell1**2 + ell1 - 1 = 0."""
    return (5**0.5 - 1) / 2


def ring_distance(x, z, n):
    return (x - z) % n


def naive_greedy_hops(targets, y, z, n):
    """Greedy walk on the directed ring with one shortcut per vertex (-1 = none)."""
    hops = 0
    x = y
    while x != z:
        best = (x - 1) % n
        s = targets[x]
        if s >= 0 and ring_distance(s, z, n) < ring_distance(best, z, n):
            best = s
        x = best
        hops += 1
    return hops
