import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from destsampling.analytic import harmonic_distribution
from destsampling.graph import (
    EMPTY,
    DistanceDistribution,
    ShortcutGraph,
    dump_graph,
    dumps_graph,
    empty_graph,
    load_graph,
    loads_graph,
    sample_from_distribution,
    sample_kleinberg,
    shortcut_distances,
)
from destsampling.lattice import Topology, distance


def test_empty_graph_has_no_shortcuts():
    g = empty_graph(Topology.ring(8))
    assert g.targets.shape == (8, 1) and g.shortcut_count() == 0
    g = empty_graph(Topology.torus(3), capacity=2)
    assert g.targets.shape == (9, 2) and g.shortcut_count() == 0
    with pytest.raises(ValueError):
        empty_graph(Topology.ring(8), capacity=0)


def test_invariants_enforced():
    topo = Topology.ring(4)
    with pytest.raises(ValueError, match="self"):
        ShortcutGraph(topo, 1, np.array([[0], [0], [1], [2]]))
    with pytest.raises(ValueError, match="range"):
        ShortcutGraph(topo, 1, np.array([[1], [7], [1], [2]]))
    with pytest.raises(ValueError, match="precedes"):
        ShortcutGraph(topo, 2, np.array([[EMPTY, 1], [0, 2], [1, 3], [2, 0]]))


def test_distance_distribution_validation():
    with pytest.raises(ValueError):
        DistanceDistribution(3, [0.5, 0.6])
    with pytest.raises(ValueError):
        DistanceDistribution(3, [1.5, -0.5])
    d = DistanceDistribution.from_weights(4, [1, 1, 2])
    assert d[3] == 0.5 and len(d) == 3


def test_kleinberg_on_three_ring_matches_normalized_harmonic():
    # from vertex 0: vertex 1 is at directed distance 2, vertex 2 at distance 1
    g = sample_kleinberg(Topology.ring(3), -1.0, capacity=100_000, rng=11)
    counts = np.bincount(g.targets[0], minlength=3)
    assert counts[0] == 0
    res = stats.chisquare(counts[1:], 100_000 * np.array([1 / 3, 2 / 3]))
    assert res.pvalue > 1e-3


def test_alpha_zero_is_uniform():
    topo = Topology.ring(6)
    g = sample_kleinberg(topo, 0.0, capacity=20_000, rng=np.random.default_rng(3))
    counts = np.bincount(g.targets[2], minlength=6)
    assert counts[2] == 0
    assert stats.chisquare(np.delete(counts, 2)).pvalue > 1e-3


def test_two_vertices_point_at_each_other():
    for alpha in (-3.0, -1.0, 0.0, 2.0):
        g = sample_kleinberg(Topology.ring(2), alpha, rng=np.random.default_rng(0))
        assert g.targets[:, 0].tolist() == [1, 0]


def test_sample_from_distribution_point_masses():
    topo = Topology.ring(4)
    g = sample_from_distribution(topo, DistanceDistribution(4, [1, 0, 0]), rng=0)
    assert g.targets[:, 0].tolist() == [3, 0, 1, 2]
    g = sample_from_distribution(topo, DistanceDistribution(4, [0, 0, 1]), rng=0)
    assert g.targets[:, 0].tolist() == [(x - 3) % 4 for x in range(4)]


def test_sample_from_distribution_histogram():
    n = 100_000
    topo = Topology.ring(n)
    ell = DistanceDistribution.from_weights(n, np.r_[np.full(9, 1.0), np.zeros(n - 10)])
    counts = np.bincount(shortcut_distances(sample_from_distribution(topo, ell, rng=5)), minlength=n)
    assert counts[10:].sum() == 0
    assert stats.chisquare(counts[1:10]).pvalue > 1e-3


def test_dimension_mismatch_rejected():
    with pytest.raises(ValueError):
        sample_from_distribution(Topology.ring(5), DistanceDistribution.uniform(4), rng=0)


def test_harmonic_distribution_equals_kleinberg_in_distribution():
    n = 64
    topo = Topology.ring(n)
    a = shortcut_distances(sample_from_distribution(topo, harmonic_distribution(n), 100_000 // n + 1, rng=1))
    b = shortcut_distances(sample_kleinberg(topo, -1.0, 100_000 // n + 1, rng=2))
    ca = np.bincount(a, minlength=n)[1:]
    cb = np.bincount(b, minlength=n)[1:]
    _, pvalue, _, _ = stats.chi2_contingency(np.vstack([ca, cb]))
    assert pvalue > 1e-3


def test_torus_class_sampling_is_uniform_within_class():
    topo = Topology.torus(5)
    # distance class 1 has the four axis neighbours
    ell = DistanceDistribution.from_weights(25, [1, 0, 0, 0])
    g = sample_from_distribution(topo, ell, capacity=40_000, rng=4)
    counts = np.bincount(g.targets[12], minlength=25)
    nbrs = [7, 11, 13, 17]
    assert counts[nbrs].sum() == 40_000
    assert stats.chisquare(counts[nbrs]).pvalue > 1e-3


def test_torus_kleinberg_weights_each_vertex():
    topo = Topology.torus(4)
    g = sample_kleinberg(topo, -2.0, capacity=60_000, rng=9)
    counts = np.bincount(g.targets[0], minlength=16)[1:]
    w = np.array([distance(topo, 0, v) ** -2.0 for v in range(1, 16)])
    assert stats.chisquare(counts, counts.sum() * w / w.sum()).pvalue > 1e-3


@settings(max_examples=40, deadline=None)
@given(
    st.one_of(st.integers(2, 80).map(Topology.ring), st.integers(2, 9).map(Topology.torus), st.integers(2, 40).map(Topology.bidirectional_ring)),
    st.floats(-4, 2),
    st.integers(1, 3),
    st.integers(0, 2**32 - 1),
)
def test_generators_preserve_invariants(topo, alpha, capacity, seed):
    g = sample_kleinberg(topo, alpha, capacity, rng=seed)
    g.validate()
    assert g.shortcut_count() == topo.n * capacity
    ell = DistanceDistribution.from_weights(topo.n, np.random.default_rng(seed).random(topo.max_distance))
    sample_from_distribution(topo, ell, capacity, rng=seed).validate()


def test_snapshot_round_trip():
    topo = Topology.torus(4)
    g = sample_kleinberg(topo, -2.0, capacity=3, rng=1)
    g.targets[5, 1:] = EMPTY
    g.targets[6, :] = EMPTY
    text = dumps_graph(g, {"note": "x"})
    back = loads_graph(text)
    assert back == g
    assert dumps_graph(back, {"note": "x"}) == text
    assert text.splitlines()[8] == "6"


def test_snapshot_file_handles():
    g = sample_kleinberg(Topology.ring(20), -1.0, rng=0)
    buf = io.StringIO()
    dump_graph(g, buf)
    buf.seek(0)
    assert load_graph(buf) == g


@pytest.mark.parametrize(
    "text",
    [
        "0,1\n1,0\n",
        "# topology=ring n=2 capacity=1\n0,1\n",
        "# topology=ring n=2 capacity=1\n0,1,1\n1,0\n",
        "# topology=ring n=2 capacity=1\n0,0\n1,0\n",
        "# topology=blob n=2 capacity=1\n0,1\n1,0\n",
    ],
)
def test_bad_snapshots_rejected(text):
    with pytest.raises(ValueError):
        loads_graph(text)
