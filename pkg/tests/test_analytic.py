import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from destsampling.analytic import (
    ConvergenceError,
    balance_map,
    exact_tau,
    harmonic_distribution,
    hitting_from_links,
    solve_balanced,
    tau,
)
from destsampling.graph import DistanceDistribution

from oracles import brute_force_hitting, brute_force_tau, golden_fixed_point


def test_two_vertices():
    h = hitting_from_links(DistanceDistribution(2, [1.0]))
    assert h.h.tolist() == [1.0] and tau(h) == 1.0


def test_three_vertex_harmonic():
    ell = harmonic_distribution(3)
    assert np.allclose(ell.weights, [2 / 3, 1 / 3], rtol=0, atol=1e-15)
    h = hitting_from_links(ell)
    expected = brute_force_hitting([2 / 3, 1 / 3])
    assert np.allclose(expected, [5 / 6, 1 / 2], atol=1e-15)
    assert np.allclose(h.h, expected, atol=1e-15)
    assert tau(h) == pytest.approx(4 / 3, abs=1e-15)
    assert h[2] == pytest.approx(0.5) and h[1] == pytest.approx(5 / 6)


def test_shortcuts_that_duplicate_base_edges():
    assert exact_tau(DistanceDistribution(4, [1, 0, 0])) == pytest.approx(2.0, abs=1e-15)


def test_balance_map_three_vertices():
    out = balance_map(harmonic_distribution(3))
    assert np.allclose(out.weights, [5 / 8, 3 / 8], atol=1e-15)
    assert balance_map(DistanceDistribution(2, [1.0])).weights.tolist() == [1.0]


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_matches_enumeration_for_small_rings(n):
    rng = np.random.default_rng(n)
    for w in (np.full(n - 1, 1.0), 1 / np.arange(1, n), rng.random(n - 1), np.r_[np.zeros(n - 2), 1.0]):
        w = w / w.sum()
        assert np.max(np.abs(hitting_from_links(DistanceDistribution(n, w)).h - brute_force_hitting(w))) < 1e-12


def test_last_vertex_reached_only_as_start():
    for n in (2, 7, 100):
        assert hitting_from_links(harmonic_distribution(n))[n - 1] == pytest.approx(1 / (n - 1), rel=1e-15)


@pytest.mark.parametrize("n", [100, 3000, 9000])
def test_fft_recursion_matches_direct(n):
    rng = np.random.default_rng(n)
    for ell in (harmonic_distribution(n), DistanceDistribution.from_weights(n, rng.random(n - 1))):
        a = hitting_from_links(ell, "direct").h
        b = hitting_from_links(ell, "fft").h
        assert np.max(np.abs(a - b)) < 1e-12


@pytest.mark.parametrize("n", [4, 16, 64, 256, 1024])
def test_hitting_non_increasing(n):
    for ell in (harmonic_distribution(n), DistanceDistribution.uniform(n), solve_balanced(n).ell):
        h = hitting_from_links(ell).h
        assert np.all(np.diff(h) <= 1e-12)
        assert np.all((h >= 0) & (h <= 1))


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 60), st.integers(0, 2**32 - 1))
def test_balance_map_stays_on_simplex(n, seed):
    w = np.random.default_rng(seed).random(n - 1) ** 3
    out = balance_map(DistanceDistribution.from_weights(n, w)).weights
    assert np.all(out > 0) and abs(out.sum() - 1) < 1e-12
    assert tau(hitting_from_links(DistanceDistribution.from_weights(n, w))) >= 1 - 1e-12


def test_golden_ratio_fixed_point():
    sol = solve_balanced(3)
    assert abs(sol.ell[1] - golden_fixed_point()) < 1e-10
    assert abs(sol.ell[2] - (1 - golden_fixed_point())) < 1e-10


def test_two_vertices_converge_at_once():
    sol = solve_balanced(2)
    assert sol.ell.weights.tolist() == [1.0] and sol.iterations == 1


@pytest.mark.parametrize("n", [8, 64, 512])
def test_solver_residual(n):
    sol = solve_balanced(n, tol=1e-12)
    assert np.abs(balance_map(sol.ell).weights - sol.ell.weights).sum() < 1e-12
    r = np.array(sol.residuals)
    assert np.all(np.diff(r) <= 0) or sol.damping == 0.5


def test_balanced_solution_checked_by_enumeration():
    sol = solve_balanced(6)
    h = brute_force_hitting(sol.ell.weights)
    assert np.allclose(sol.ell.weights, h / h.sum(), atol=1e-11)
    assert sol.tau == pytest.approx(brute_force_tau(sol.ell.weights), abs=1e-12)


def test_other_starts_reach_the_same_fixed_point():
    n = 32
    a = solve_balanced(n).ell.weights
    b = solve_balanced(n, initial=harmonic_distribution(n)).ell.weights
    c = solve_balanced(n, damping=0.5).ell.weights
    assert np.abs(a - b).sum() < 1e-10 and np.abs(a - c).sum() < 1e-10


def test_non_convergence_reports_residual():
    with pytest.raises(ConvergenceError) as exc:
        solve_balanced(64, tol=1e-14, max_iter=3)
    assert exc.value.residual > 1e-14 and exc.value.iterations == 3


def test_input_errors():
    with pytest.raises(ValueError):
        solve_balanced(1)
    with pytest.raises(ValueError):
        solve_balanced(5, tol=0)
    with pytest.raises(ValueError):
        hitting_from_links(DistanceDistribution(5, [0.5, 0.5]))
    with pytest.raises(TypeError):
        hitting_from_links([0.5, 0.5])


def test_harmonic_normalization_large():
    ell = harmonic_distribution(10**6)
    assert abs(math.fsum(ell.weights) - 1) < 1e-12
    assert ell[1] / ell[10] == pytest.approx(10)


def test_harmonic_tau_grows_with_n():
    taus = [exact_tau(harmonic_distribution(n)) for n in (2, 4, 16, 64, 256, 1024, 4096)]
    assert taus == sorted(taus)
