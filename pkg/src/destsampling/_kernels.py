"""Compiled inner loops for routing and rewiring.

Topologies are passed as ``(code, n, side)`` with the codes from
``lattice.KIND_CODES``. Randomness arrives as a buffer of uniforms plus a
read position; a step that would run past the end of the buffer is not
started, so the caller can refill and resume without changing the stream.
"""

import numpy as np
from numba import njit

EMPTY = -1


@njit(cache=True, inline="always")
def dist(code, n, side, x, z):
    if code == 0:
        return (x - z) % n
    if code == 1:
        d = (x - z) % n
        return min(d, n - d)
    dr = abs(x // side - z // side)
    dc = abs(x % side - z % side)
    return min(dr, side - dr) + min(dc, side - dc)


@njit(cache=True)
def greedy_next(code, n, side, targets, x, z):
    best = -1
    best_d = n + 1
    if code == 0:
        best = (x - 1) % n
        best_d = dist(code, n, side, best, z)
    elif code == 1:
        for v in ((x - 1) % n, (x + 1) % n):
            d = dist(code, n, side, v, z)
            if d < best_d or (d == best_d and v < best):
                best, best_d = v, d
    else:
        r = x // side
        c = x % side
        for v in (
            ((r - 1) % side) * side + c,
            ((r + 1) % side) * side + c,
            r * side + (c - 1) % side,
            r * side + (c + 1) % side,
        ):
            d = dist(code, n, side, v, z)
            if d < best_d or (d == best_d and v < best):
                best, best_d = v, d
    for j in range(targets.shape[1]):
        v = targets[x, j]
        if v == EMPTY:
            break
        d = dist(code, n, side, v, z)
        if d < best_d or (d == best_d and v < best):
            best, best_d = v, d
    return best


@njit(cache=True)
def walk(code, n, side, targets, y, z, path):
    """Greedy walk from y to z written into ``path``; returns the hop count."""
    t = 0
    x = y
    path[0] = y
    while x != z:
        x = greedy_next(code, n, side, targets, x, z)
        t += 1
        path[t] = x
    return t


@njit(cache=True)
def run_steps(code, n, side, targets, p, mutate, u, pos, steps, hops, path, hits):
    """Destination-sampling steps; returns ``(steps_done, new_pos)``.

    Draw order per step: y, z (pair redrawn while equal), then for each
    non-terminal walk vertex a coin and, on success, a slot index. With
    ``mutate`` false no coins are drawn and the graph is left alone.
    ``hits[d]`` counts walk vertices at distance d from the destination.
    """
    cap = targets.shape[1]
    end = u.shape[0]
    done = 0
    count_hits = hits.shape[0] > 1
    while done < steps:
        start = pos
        if pos + 2 > end:
            break
        y = int(u[pos] * n)
        z = int(u[pos + 1] * n)
        pos += 2
        stalled = False
        while y == z:
            if pos + 2 > end:
                stalled = True
                break
            y = int(u[pos] * n)
            z = int(u[pos + 1] * n)
            pos += 2
        if stalled:
            pos = start
            break
        t = walk(code, n, side, targets, y, z, path)
        if mutate:
            if pos + 2 * t > end:
                pos = start
                break
            for i in range(t):
                x = path[i]
                coin = u[pos]
                pos += 1
                if coin < p:
                    j = int(u[pos] * cap)
                    pos += 1
                    filled = 0
                    while filled < cap and targets[x, filled] != EMPTY:
                        filled += 1
                    if j < filled:
                        targets[x, j] = z
                    else:
                        targets[x, filled] = z
        if count_hits:
            for i in range(t):
                hits[dist(code, n, side, path[i], z)] += 1
        hops[done] = t
        done += 1
    return done, pos


@njit(cache=True)
def all_pairs_hops(code, n, side, targets, path):
    total = 0
    for y in range(n):
        for z in range(n):
            if y != z:
                total += walk(code, n, side, targets, y, z, path)
    return total


@njit(cache=True)
def ring_hitting_samples(cdf, last, n, u, max_samples, hits, path):
    """Route from a uniform start to 0 on the directed ring, drawing each visited
    vertex's shortcut length from ``cdf`` on arrival (independent shortcuts are
    only ever looked at once). Draw order: start, then one length per visited
    vertex. Only whole samples are counted; returns ``(samples, uniforms_used)``."""
    pos = 0
    samples = 0
    end = u.shape[0]
    while samples < max_samples:
        start = pos
        if pos >= end:
            break
        x = 1 + int(u[pos] * (n - 1))
        pos += 1
        t = 0
        complete = True
        while x != 0:
            if pos >= end:
                complete = False
                break
            path[t] = x
            t += 1
            d = min(np.searchsorted(cdf, u[pos], side="right"), last) + 1
            pos += 1
            via = (x - d) % n
            x = via if via < x - 1 else x - 1
        if not complete:
            pos = start
            break
        for i in range(t):
            hits[path[i]] += 1
        samples += 1
    return samples, pos
