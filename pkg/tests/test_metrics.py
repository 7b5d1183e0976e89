import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from serialrank import (
    ComparisonMatrix,
    InvalidParameterError,
    InvalidSizeError,
    Ranking,
    count_inversions,
    delete_pairs,
    fiedler_l2_error,
    flip_pairs,
    full_consistent,
    kendall_tau,
    linf_displacement,
    metric_report,
    upsets_topk,
)


def brute_tau(a, b):
    n = len(a)
    s = 0
    for i, j in itertools.combinations(range(n), 2):
        s += np.sign(a[i] - a[j]) * np.sign(b[i] - b[j])
    return s / (n * (n - 1) / 2)


perms = st.integers(1, 40).flatmap(
    lambda n: st.tuples(st.permutations(range(1, n + 1)), st.permutations(range(1, n + 1)))
)


class TestKendall:
    @given(perms)
    def test_matches_brute_force(self, ab):
        a, b = map(np.array, ab)
        assert kendall_tau(a, b) == pytest.approx(brute_tau(a, b) if len(a) > 1 else 1.0, abs=1e-12)

    @given(st.lists(st.integers(-5, 5), max_size=60))
    def test_inversions_brute(self, seq):
        ref = sum(1 for i, j in itertools.combinations(range(len(seq)), 2) if seq[i] > seq[j])
        assert count_inversions(seq) == ref

    def test_extremes(self):
        r = Ranking.identity(7)
        assert kendall_tau(r, r) == 1.0
        assert kendall_tau(r, r.reversed()) == -1.0

    def test_size_mismatch(self):
        with pytest.raises(InvalidSizeError):
            kendall_tau([1, 2], [1, 2, 3])


class TestTopK:
    def test_consistent_zero(self):
        c = full_consistent(20)
        for k in (2, 10, 20):
            loss = upsets_topk(Ranking.identity(20), c, k)
            assert loss.value == 0 and loss.pairs == k * (k - 1) // 2

    def test_counts(self):
        c = flip_pairs(full_consistent(6), [(0, 1), (2, 5)])
        loss = upsets_topk(Ranking.identity(6), c, 3)
        assert (loss.upsets, loss.pairs) == (1, 3)
        assert float(loss) == pytest.approx(1 / 3)

    def test_draws_excluded(self):
        e = np.eye(3)
        e[0, 1], e[1, 0] = 1, -1
        c = ComparisonMatrix(e, np.ones((3, 3), bool))
        loss = upsets_topk([2, 1, 3], c, 3)
        assert (loss.upsets, loss.pairs) == (1, 1)

    def test_empty(self):
        c = delete_pairs(full_consistent(4), [(0, 1)])
        loss = upsets_topk(Ranking.identity(4), c, 2)
        assert loss.empty and loss.value == 0.0

    def test_k_range(self):
        with pytest.raises(InvalidParameterError):
            upsets_topk(Ranking.identity(4), full_consistent(4), 5)


class TestDisplacementAndL2:
    def test_linf(self):
        assert linf_displacement([1, 2, 3, 4], [4, 2, 3, 1]) == 3
        assert linf_displacement(Ranking.identity(3), Ranking.identity(3)) == 0

    def test_l2_sign_invariant(self):
        f = np.array([0.6, 0.8])
        assert fiedler_l2_error(f, -f) == 0.0
        assert fiedler_l2_error(f, np.array([0.8, 0.6])) == pytest.approx(np.sqrt(0.08))

    def test_l2_requires_unit(self):
        with pytest.raises(InvalidParameterError):
            fiedler_l2_error(np.array([1.0, 1.0]), np.array([1.0, 0.0]))


class TestReport:
    def test_bundle(self):
        c = full_consistent(12)
        truth = Ranking.identity(12)
        rep = metric_report(truth.reversed(), truth, c, ks=[5, 12, 40])
        assert rep.kendall_tau == -1.0
        assert rep.linf_displacement == 11 and not rep.exact_recovery
        assert set(rep.upsets_topk) == {5, 12}
        assert rep.upsets_topk[12] == 1.0

    def test_without_truth(self):
        rep = metric_report(Ranking.identity(4), c=full_consistent(4), ks=[2])
        assert rep.exact_recovery and rep.upsets_topk == {2: 0.0}
