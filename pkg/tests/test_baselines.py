import numpy as np
import pytest
import scipy.linalg
import scipy.optimize
from hypothesis import given
from hypothesis import strategies as st

from serialrank import (
    ComparisonMatrix,
    DegeneracyError,
    InvalidParameterError,
    MultiComparison,
    NoiseSpec,
    Ranking,
    apply_noise,
    btl_log_likelihood,
    btl_mle,
    find_ties,
    flip_pairs,
    full_consistent,
    generate_glm,
    kendall_tau,
    point_score,
    rank_centrality,
    rank_centrality_chain,
)


def stationary_dense(P):
    """Left Perron vector by a direct eigensolve."""
    vals, V = scipy.linalg.eig(P.T)
    k = int(np.argmin(np.abs(vals - 1)))
    v = np.real(V[:, k])
    return v / v.sum()


class TestPointScore:
    def test_row_sums(self):
        s = point_score(full_consistent(5)).scores
        np.testing.assert_array_equal(s, [4, 2, 0, -2, -4])

    def test_single_flip_ties(self):
        sv = point_score(flip_pairs(full_consistent(10), [(2, 7)]))
        assert sv.ties == [(2, 3), (6, 7)]

    def test_find_ties_chains(self):
        assert find_ties([0.0, 0.1, 0.2, 5.0], tol=0.1 + 1e-12) == [(0, 1), (0, 2), (1, 2)]
        assert find_ties([3.0, 1.0, 3.0]) == [(0, 2)]
        assert find_ties([]) == []

    def test_ranking_breaks_ties_by_index(self):
        c = ComparisonMatrix(np.eye(3), np.ones((3, 3), bool))
        np.testing.assert_array_equal(point_score(c).ranking(c).ranks, [1, 2, 3])


class TestRankCentrality:
    def test_chain_is_stochastic(self):
        c = apply_noise(full_consistent(8), NoiseSpec("uniform-corrupt", fraction=0.3, seed=1))
        P, _ = rank_centrality_chain(c)
        np.testing.assert_allclose(P.sum(axis=1), 1.0)
        assert P.min() >= 0

    def test_matches_dense_stationary(self):
        c = apply_noise(full_consistent(10), NoiseSpec("uniform-corrupt", fraction=0.3, seed=4))
        P, used = rank_centrality_chain(c)
        sv = rank_centrality(c)
        np.testing.assert_allclose(sv.scores, stationary_dense(P), atol=1e-8)
        assert ("teleport" in sv.flags) == (used > 0)

    def test_acyclic_input_teleports(self):
        c = full_consistent(6)
        sv = rank_centrality(c)
        assert "teleport" in sv.flags
        np.testing.assert_array_equal(sv.ranking(c).ranks, np.arange(1, 7))

    def test_explicit_damping(self):
        with pytest.raises(InvalidParameterError):
            rank_centrality(full_consistent(3), damping=1.0)
        sv = rank_centrality(full_consistent(4), damping=0.2)
        assert sv.iterations > 0

    def test_btl_data_recovers_order(self):
        skills = np.linspace(2, -2, 8)
        counts = np.full((8, 8), 60)
        mc = generate_glm(skills, counts, seed=3)
        r = rank_centrality(mc).ranking()
        assert kendall_tau(r, Ranking.identity(8)) >= 0.9

    def test_multicomparison_chain(self):
        mc = MultiComparison.from_wins(np.array([[0, 3], [1, 0]]))
        P, used = rank_centrality_chain(mc)
        # from item 0 the walk moves to 1 with the fraction 1 won
        assert P[0, 1] == pytest.approx(0.25)
        assert P[1, 0] == pytest.approx(0.75)
        assert used == 0.0


class TestBTL:
    def test_two_items_closed_form(self):
        # 3 wins vs 1: MLE puts P(0 beats 1) at 3/4
        mc = MultiComparison.from_wins(np.array([[0, 3], [1, 0]]))
        nu = np.exp(btl_mle(mc).scores)
        assert nu[0] / (nu[0] + nu[1]) == pytest.approx(0.75, abs=1e-7)
        assert nu.sum() == pytest.approx(2.0)

    def test_two_items_grid_search(self):
        wins = np.array([[0, 5], [2, 0]], dtype=float)
        grid = np.linspace(-3, 3, 60001)
        ll = [btl_log_likelihood(np.exp(np.array([g, 0.0])), wins) for g in grid]
        best = grid[int(np.argmax(ll))]
        s = btl_mle(MultiComparison.from_wins(wins)).scores
        assert s[0] - s[1] == pytest.approx(best, abs=2e-4)

    def test_matches_generic_optimizer(self, rng):
        n = 6
        skills = rng.normal(size=n)
        mc = generate_glm(skills, np.full((n, n), 30), seed=9)
        W = mc.wins

        def nll(theta):
            return -btl_log_likelihood(np.exp(np.append(theta, 0.0)), W)

        opt = scipy.optimize.minimize(nll, np.zeros(n - 1), method="BFGS", options={"gtol": 1e-10})
        ref = np.append(opt.x, 0.0)
        s = btl_mle(mc, tol=1e-12).scores
        np.testing.assert_allclose(s - s[-1], ref, atol=1e-4)

    def test_degenerate_without_regularization(self):
        with pytest.raises(DegeneracyError):
            btl_mle(full_consistent(4), regularize=False)

    def test_smoothed_flag(self):
        sv = btl_mle(full_consistent(5))
        assert sv.flags == ("smoothed",)
        np.testing.assert_array_equal(sv.ranking().ranks, np.arange(1, 6))

    def test_isolated_item(self):
        e = np.eye(3)
        e[0, 1], e[1, 0] = 1, -1
        with pytest.raises(DegeneracyError):
            btl_mle(ComparisonMatrix(e))

    @given(st.integers(0, 2**32 - 1))
    def test_likelihood_at_mle_beats_uniform(self, seed):
        mc = generate_glm(np.linspace(1, -1, 5), np.full((5, 5), 6), seed=seed)
        try:
            sv = btl_mle(mc)
        except DegeneracyError:
            return
        W = mc.wins
        if "smoothed" in sv.flags:
            W = W + 0.5 * (mc.counts > 0)
        assert btl_log_likelihood(np.exp(sv.scores), W) >= btl_log_likelihood(np.ones(5), W) - 1e-9
