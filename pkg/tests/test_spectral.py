import numpy as np
import pytest
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st

from oracles import random_tournament_order
from serialrank import (
    ComparisonMatrix,
    ConnectivityError,
    DegenerateDegreeError,
    InvalidParameterError,
    MultiComparison,
    NoiseSpec,
    Ranking,
    SimilarityMatrix,
    apply_noise,
    asymptotic_fiedler,
    asymptotic_fiedler_value,
    build_similarity,
    components,
    count_upsets,
    delete_pairs,
    fiedler_vector,
    flip_pairs,
    full_consistent,
    hierarchical_refine,
    kendall_tau,
    laplacian,
    rank_by_fiedler,
    serialrank,
    sim_match,
)
from serialrank._eigen import deflated_eigh_dense, lanczos_smallest, smallest_deflated


def two_blocks():
    S = np.zeros((4, 4))
    S[:2, :2] = 1
    S[2:, 2:] = 1
    return SimilarityMatrix(S, ("a", "b", "c", "d"))


class TestRanking:
    def test_validation(self):
        with pytest.raises(InvalidParameterError):
            Ranking(np.array([1, 1, 2]))
        with pytest.raises(InvalidParameterError):
            Ranking(np.array([1, 2]), orientation="sideways")

    def test_order_roundtrip(self):
        r = Ranking.from_order([2, 0, 1])
        np.testing.assert_array_equal(r.ranks, [2, 3, 1])
        np.testing.assert_array_equal(r.order, [2, 0, 1])
        np.testing.assert_array_equal(r.reversed().ranks, [2, 1, 3])

    def test_count_upsets(self):
        c = flip_pairs(full_consistent(5), [(0, 4), (1, 2)])
        assert count_upsets(Ranking.identity(5), c) == 2
        assert count_upsets(Ranking.identity(5).reversed(), c) == 8

    def test_draws_are_not_upsets(self):
        c = ComparisonMatrix(np.eye(3), np.ones((3, 3), bool))
        assert count_upsets(np.array([3, 2, 1]), c) == 0


class TestEigen:
    @pytest.mark.parametrize("n", [5, 30, 120])
    def test_dense_matches_full_eigh(self, n, rng):
        B = rng.standard_normal((n, n))
        A = B @ B.T
        u = rng.standard_normal(n)
        u /= np.linalg.norm(u)
        # project out u so that it is an exact eigenvector with eigenvalue 0
        P = np.eye(n) - np.outer(u, u)
        A = P @ A @ P
        vals, V = deflated_eigh_dense(A, u, 3)
        ref = np.sort(np.linalg.eigvalsh(A))[1:4]
        np.testing.assert_allclose(vals, ref, atol=1e-9 * np.abs(ref).max())
        np.testing.assert_allclose(V.T @ u, 0, atol=1e-12)
        np.testing.assert_allclose(A @ V, V * vals, atol=1e-8 * np.linalg.norm(A))

    @pytest.mark.parametrize("n", [50, 300])
    def test_lanczos_matches_dense(self, n):
        L = laplacian(sim_match(full_consistent(n)))
        u = np.full(n, 1 / np.sqrt(n))
        dv, dV = deflated_eigh_dense(L, u, 2)
        lv, lV = lanczos_smallest(L, u, 2)
        np.testing.assert_allclose(lv, dv, rtol=1e-9)
        assert abs(abs(lV[:, 0] @ dV[:, 0]) - 1) < 1e-8

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            smallest_deflated(np.eye(3), np.ones(3), method="qr")


class TestFiedler:
    @pytest.mark.parametrize("n", [4, 9, 40])
    def test_unnormalized_against_eigvalsh(self, n):
        s = sim_match(full_consistent(n))
        d = fiedler_vector(s)
        ref = np.linalg.eigvalsh(laplacian(s))
        np.testing.assert_allclose(d.eigenvalues, ref[:3], atol=1e-8 * ref.max())
        assert d.fiedler_simple and d.residual < 1e-8 * n ** 2
        assert np.all(np.diff(d.fiedler) < 0)  # first entry positive, so decreasing

    @pytest.mark.parametrize("n", [4, 9, 40])
    def test_normalized_against_generalized_eigh(self, n):
        s = sim_match(full_consistent(n))
        d = fiedler_vector(s, "normalized")
        S = s.values
        D = np.diag(S.sum(axis=1))
        ref = scipy.linalg.eigh(D - S, D, eigvals_only=True)
        np.testing.assert_allclose(d.eigenvalues, ref[:3], atol=1e-10)
        assert d.eigenvalues[1] == pytest.approx(2 / 3, abs=1e-12)
        Lrw = laplacian(s, "normalized")
        np.testing.assert_allclose(Lrw @ d.fiedler, d.eigenvalues[1] * d.fiedler, atol=1e-10)

    def test_sign_convention(self):
        f = fiedler_vector(sim_match(full_consistent(7))).fiedler
        assert f[0] > 0
        assert np.linalg.norm(f) == pytest.approx(1.0)

    def test_lanczos_path(self):
        s = sim_match(full_consistent(80))
        a = fiedler_vector(s, method="dense")
        b = fiedler_vector(s, method="lanczos")
        np.testing.assert_allclose(a.eigenvalues, b.eigenvalues, rtol=1e-9)
        np.testing.assert_allclose(a.fiedler, b.fiedler, atol=1e-8)

    def test_disconnected(self):
        with pytest.raises(ConnectivityError) as exc:
            fiedler_vector(two_blocks())
        assert exc.value.components == [[0, 1], [2, 3]]
        assert "c" in str(exc.value)

    def test_components(self):
        assert components(two_blocks()) == [[0, 1], [2, 3]]

    def test_zero_degree(self):
        with pytest.raises(DegenerateDegreeError):
            laplacian(SimilarityMatrix(np.zeros((2, 2))), "normalized")

    def test_repeated_eigenvalue_flag(self):
        # complete graph: every nontrivial eigenvalue equal
        d = fiedler_vector(SimilarityMatrix(np.ones((5, 5))))
        assert not d.fiedler_simple

    def test_diagnostics_dict(self):
        d = fiedler_vector(sim_match(full_consistent(4))).to_dict()
        assert set(d) >= {"eigenvalues", "fiedler", "fiedler_simple", "laplacian_kind"}
        assert len(d["eigenvalues"]) == 3


class TestSerialRank:
    @pytest.mark.parametrize("kind", ["unnormalized", "normalized", "unnorm", "norm"])
    def test_recovers_identity(self, kind):
        r = serialrank(full_consistent(25), laplacian_kind=kind)
        np.testing.assert_array_equal(r.ranks, np.arange(1, 26))
        assert r.upsets == 0

    @given(st.integers(2, 30), st.integers(0, 2**32 - 1))
    def test_recovers_shuffled_tournament(self, n, seed):
        e, order = random_tournament_order(n, np.random.default_rng(seed))
        r = serialrank(ComparisonMatrix(e))
        np.testing.assert_array_equal(r.order, order)

    @pytest.mark.parametrize("kind", ["match", "glm"])
    def test_similarity_kinds(self, kind):
        c = full_consistent(12)
        r = serialrank(c, similarity_kind=kind)
        assert kendall_tau(r, Ranking.identity(12)) == 1.0

    def test_cardinal_scores(self):
        # score differences: close items get similarity near 1
        x = np.linspace(1, 0, 12)
        e = np.clip(x[:, None] - x[None, :], -1, 1)
        np.fill_diagonal(e, 1.0)
        r = serialrank(ComparisonMatrix(e, np.ones((12, 12), bool)), similarity_kind="cardinal")
        np.testing.assert_array_equal(r.ranks, np.arange(1, 13))

    def test_cardinal_on_ordinal_data_is_disconnected(self):
        with pytest.raises(ConnectivityError):
            serialrank(full_consistent(5), similarity_kind="cardinal")

    def test_multicomparison_input(self):
        mc = MultiComparison.from_comparison(full_consistent(8))
        assert serialrank(mc, "glm").upsets == 0

    def test_contrast(self):
        c = apply_noise(full_consistent(30), NoiseSpec("uniform-corrupt", fraction=0.05, seed=2))
        r = serialrank(c, contrast_alpha=3.0)
        assert kendall_tau(r, Ranking.identity(30)) > 0.9

    def test_unknown_similarity(self):
        with pytest.raises(InvalidParameterError):
            build_similarity(full_consistent(3), "cosine")

    def test_orientation_picks_fewer_upsets(self):
        c = full_consistent(10).reversed_signs()
        r, _ = rank_by_fiedler(sim_match(c), c)
        np.testing.assert_array_equal(r.ranks, np.arange(10, 0, -1))
        assert r.upsets == 0

    def test_labels_carried(self):
        r = serialrank(full_consistent(3, ["x", "y", "z"]))
        assert r.item_labels == ("x", "y", "z")

    def test_missing_pair_still_recovers(self):
        r = serialrank(delete_pairs(full_consistent(10), [(3, 4)]))
        np.testing.assert_array_equal(r.ranks, np.arange(1, 11))


class TestRefine:
    def test_refine_fixes_top(self):
        c = full_consistent(12)
        base = Ranking(np.array([2, 1, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12]))
        r = hierarchical_refine(c, base, 5)
        np.testing.assert_array_equal(r.ranks, np.arange(1, 13))
        assert r.upsets == 0

    def test_refine_fallback(self):
        # ordinal data under the cardinal similarity has no off-diagonal support
        c = full_consistent(4)
        r = hierarchical_refine(c, Ranking.identity(4), 2, similarity_kind="cardinal")
        np.testing.assert_array_equal(r.ranks, [1, 2, 3, 4])
        assert "refine-fallback" in r.flags

    def test_k_range(self):
        with pytest.raises(InvalidParameterError):
            hierarchical_refine(full_consistent(4), Ranking.identity(4), 1)


class TestAsymptotic:
    def test_limit_value(self):
        lam = asymptotic_fiedler_value()
        assert 0.389 < lam < 0.391
        num = fiedler_vector(sim_match(full_consistent(600))).eigenvalues[1] / 600 ** 2
        assert abs(num - lam) < 1e-3

    @pytest.mark.parametrize("n", [10, 100, 400])
    def test_vector_shape(self, n):
        a = asymptotic_fiedler(n)
        f = fiedler_vector(sim_match(full_consistent(n))).fiedler
        assert np.linalg.norm(a) == pytest.approx(1.0)
        assert np.all(np.diff(a) > 0)
        assert abs(a @ f) > 0.9999

    def test_bad_lambda(self):
        with pytest.raises(InvalidParameterError):
            asymptotic_fiedler(10, 0.5)
