import io

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import loop_sim_match, random_r_matrix
from serialrank import (
    ComparisonMatrix,
    DegenerateNoiseError,
    InvalidParameterError,
    InvalidSizeError,
    MultiComparison,
    NoiseSpec,
    SimilarityMatrix,
    apply_noise,
    check_R,
    delete_pairs,
    flip_pairs,
    full_consistent,
    sim_cardinal,
    sim_contrast,
    sim_glm,
    sim_match,
    sim_match_debiased,
    write_similarity_csv,
)


def comparison_strategy(max_n=9):
    """Random antisymmetric comparison matrices with values in {-1, 0, 1}."""
    @st.composite
    def build(draw):
        n = draw(st.integers(2, max_n))
        vals = draw(st.lists(st.sampled_from([-1.0, 0.0, 1.0]), min_size=n * (n - 1) // 2,
                             max_size=n * (n - 1) // 2))
        e = np.eye(n)
        iu, ju = np.triu_indices(n, 1)
        e[iu, ju] = vals
        e[ju, iu] = -np.array(vals)
        return ComparisonMatrix(e)
    return build()


class TestSimMatch:
    @pytest.mark.parametrize("n", [2, 3, 7, 20])
    def test_closed_form(self, n):
        i, j = np.indices((n, n))
        np.testing.assert_array_equal(sim_match(full_consistent(n)).values, n - np.abs(i - j))

    @given(comparison_strategy())
    def test_matches_loop_oracle(self, c):
        np.testing.assert_allclose(sim_match(c).values, loop_sim_match(c.entries), atol=1e-12)

    @given(comparison_strategy())
    def test_symmetric_nonnegative_bounded(self, c):
        S = sim_match(c).values
        np.testing.assert_array_equal(S, S.T)
        assert S.min() >= 0 and S.max() <= c.n

    def test_permutation_equivariance(self, rng):
        c = apply_noise(full_consistent(12), NoiseSpec("uniform-corrupt", fraction=0.2, seed=3))
        perm = rng.permutation(12)
        np.testing.assert_array_equal(sim_match(c.permuted(perm)).values, sim_match(c).values[np.ix_(perm, perm)])


class TestDebiased:
    def test_noiseless_is_twice_match(self):
        c = full_consistent(9)
        np.testing.assert_allclose(sim_match_debiased(c, 1.0, 1.0).values, 2 * sim_match(c).values)

    def test_unbiased_off_diagonal(self):
        n, q, p = 8, 0.6, 0.85
        c = full_consistent(n)
        target = 2 * sim_match(c).values
        draws = 5000
        acc = np.zeros((n, n))
        for t in range(draws):
            noisy = apply_noise(c, NoiseSpec("erdos-renyi", q=q, p=p, seed=t))
            acc += sim_match_debiased(noisy, q, p).values
        mean = acc / draws
        off = ~np.eye(n, dtype=bool)
        assert np.abs(mean - target)[off].max() < 1.0
        np.testing.assert_array_equal(np.diag(mean), 2 * n)

    def test_degenerate_p(self):
        with pytest.raises(DegenerateNoiseError):
            sim_match_debiased(full_consistent(3), 0.5, 0.5)
        with pytest.raises(InvalidParameterError):
            sim_match_debiased(full_consistent(3), 0.0, 0.9)

    def test_may_be_negative(self):
        c = flip_pairs(delete_pairs(full_consistent(6), [(0, 2), (0, 3)]), [(0, 5), (0, 4)])
        s = sim_match_debiased(c, 0.05, 0.6)
        assert s.values.min() < 0


class TestGlmAndCardinal:
    def test_glm_loop_oracle(self, rng):
        n = 6
        wins = rng.integers(0, 4, size=(n, n))
        np.fill_diagonal(wins, 0)
        wins[0, 3] = wins[3, 0] = 0
        mc = MultiComparison.from_wins(wins)
        S = np.zeros((n, n))
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if mc.counts[i, k] > 0 and mc.counts[j, k] > 0:
                        S[i, j] += 1 - abs(mc.win_fraction[i, k] - mc.win_fraction[j, k])
                    else:
                        S[i, j] += 0.5
        np.testing.assert_allclose(sim_glm(mc).values, S, atol=1e-12)

    def test_glm_full_consistent_is_R(self):
        mc = MultiComparison.from_comparison(full_consistent(10))
        assert check_R(sim_glm(mc)).is_R

    def test_cardinal(self):
        c = apply_noise(full_consistent(5), NoiseSpec("local-range", m_range=4, seed=1))
        S = sim_cardinal(c).values
        off = ~np.eye(5, dtype=bool)
        np.testing.assert_allclose(S[off], 1 - np.abs(c.entries[off]))
        assert np.all(np.diag(S) == 1)

    def test_contrast(self):
        s = sim_match(full_consistent(4))
        np.testing.assert_allclose(sim_contrast(s, 2.0).values, s.values ** 2)
        with pytest.raises(InvalidParameterError):
            sim_contrast(s, 0.0)


class TestSimilarityMatrix:
    def test_validation(self):
        with pytest.raises(InvalidParameterError):
            SimilarityMatrix(np.array([[1.0, 2.0], [0.0, 1.0]]))
        with pytest.raises(InvalidParameterError):
            SimilarityMatrix(np.array([[1.0, -1.0], [-1.0, 1.0]]))
        with pytest.raises(InvalidSizeError):
            SimilarityMatrix(np.ones((2, 3)))

    def test_csv(self):
        buf = io.StringIO()
        write_similarity_csv(sim_match(full_consistent(3, list("abc"))), buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "a,b,c"
        assert lines[1] == "3.0,2.0,1.0"


class TestCheckR:
    def test_full_consistent_is_strict(self):
        for n in (3, 6, 30):
            rep = check_R(sim_match(full_consistent(n)))
            assert rep.is_R and rep.is_strict_R and rep.violations == []

    def test_constant_matrix_is_R_not_strict(self):
        rep = check_R(np.ones((4, 4)))
        assert rep.is_R and not rep.is_strict_R
        assert (0, 1) in rep.blocks

    def test_shuffled_is_not_R(self):
        S = sim_match(full_consistent(5)).values
        rep = check_R(S[np.ix_([1, 0, 2, 3, 4], [1, 0, 2, 3, 4])])
        assert not rep.is_R and rep.violations

    def test_brute_force_size_limit(self):
        with pytest.raises(InvalidSizeError):
            check_R(np.ones((9, 9)), method="brute-force")

    @given(st.integers(2, 6), st.integers(0, 2**32 - 1))
    def test_random_r_matrices_pass_scan(self, n, seed):
        A = random_r_matrix(n, np.random.default_rng(seed))
        assert check_R(A).is_R

    @given(st.integers(2, 6), st.integers(0, 2**32 - 1))
    def test_scan_agrees_with_brute_force(self, n, seed):
        A = random_r_matrix(n, np.random.default_rng(seed), terms=int(np.random.default_rng(seed).integers(0, 4)))
        scan = check_R(A)
        brute = check_R(A, method="brute-force")
        assert scan.is_R == brute.is_R
        assert scan.is_strict_R == brute.is_strict_R

    def test_single_flip_at_boundary_is_not_strict(self):
        # flipping (0, n-2) gives items n-2 and n-1 identical profiles, so the
        # swap of the last two items preserves the R property
        c = flip_pairs(full_consistent(8), [(0, 6)])
        scan = check_R(sim_match(c))
        brute = check_R(sim_match(c), method="brute-force")
        assert scan.is_R and brute.is_R
        assert not scan.is_strict_R and not brute.is_strict_R
        assert scan.blocks == [(6, 7)]

    def test_single_flip_interior_is_strict(self):
        c = flip_pairs(full_consistent(8), [(1, 5)])
        assert check_R(sim_match(c), method="brute-force").is_strict_R
        assert check_R(sim_match(c)).is_strict_R

    def test_report_dict(self):
        d = check_R(np.ones((3, 3))).to_dict()
        assert d["is_R"] is True and d["method"] == "scan"
