"""Unit tests for the statistical core, checked against naive reference code."""

from __future__ import annotations

import math
import random

import numpy as np
import pytest
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

from riskpatterns import stats
from riskpatterns.errors import StatsError

from .oracles import bh_reference, chi2_stat, enumeration_p, pair_u


class TestMidranks:
    def test_distinct_values(self):
        assert stats.midranks([10.0, 30.0, 20.0]).tolist() == [1.0, 3.0, 2.0]

    def test_ties_share_average_rank(self):
        assert stats.midranks([5.0, 5.0, 1.0]).tolist() == [2.5, 2.5, 1.0]

    @given(st.lists(st.integers(min_value=-5, max_value=5), min_size=1, max_size=40))
    def test_ranks_sum_to_triangular_number(self, values):
        n = len(values)
        assert stats.midranks(values).sum() == pytest.approx(n * (n + 1) / 2)

    @given(st.lists(st.floats(allow_nan=False, allow_infinity=False, width=32), min_size=1, max_size=30))
    def test_matches_scipy_rankdata(self, values):
        expected = scipy.stats.rankdata(values, method="average")
        assert np.allclose(stats.midranks(values), expected)


class TestMannWhitney:
    def test_complete_separation_example(self):
        res = stats.mann_whitney([5.0, 6.0, 7.0], [1.0, 2.0, 3.0])
        assert res.u_inside == 9.0
        assert res.p_one_sided == pytest.approx(0.05, abs=1e-12)

    def test_balanced_example_reports_zero_deviate(self):
        # u = 2 is exactly the null mean, so the deviate is 0; enumeration
        # over the 6 assignments of {1,2,3,4} gives P(U >= 2) = 4/6.
        res = stats.mann_whitney([1.0, 4.0], [2.0, 3.0])
        assert res.u_inside == 2.0
        assert res.z == 0.0
        assert res.p_one_sided == pytest.approx(2.0 / 3.0, abs=1e-12)

    def test_all_values_identical_is_degenerate(self):
        res = stats.mann_whitney([3.0, 3.0], [3.0, 3.0, 3.0])
        assert res.degenerate
        assert res.z == 0.0
        assert res.p_one_sided == 0.5

    def test_empty_sample_rejected(self):
        with pytest.raises(StatsError):
            stats.mann_whitney([], [1.0])

    def test_nan_rejected(self):
        with pytest.raises(StatsError):
            stats.mann_whitney([1.0, float("nan")], [2.0])

    def test_exact_p_with_ties_matches_enumeration(self):
        rng = random.Random(7)
        for _ in range(50):
            n = rng.randint(2, 5)
            m = rng.randint(2, 5)
            inside = [float(rng.randint(0, 3)) for _ in range(n)]
            outside = [float(rng.randint(0, 3)) for _ in range(m)]
            res = stats.mann_whitney(inside, outside)
            if res.degenerate:
                continue
            assert res.u_inside == pair_u(inside, outside)
            assert res.p_one_sided == pytest.approx(
                enumeration_p(inside, outside), abs=1e-12
            )

    @given(
        st.lists(st.floats(min_value=-100, max_value=100, allow_nan=False), min_size=2, max_size=6),
        st.lists(st.floats(min_value=-100, max_value=100, allow_nan=False), min_size=2, max_size=6),
    )
    @settings(max_examples=60, deadline=None)
    def test_u_antisymmetry(self, a, b):
        forward = stats.mann_whitney(a, b)
        backward = stats.mann_whitney(b, a)
        assert forward.u_inside + backward.u_inside == pytest.approx(len(a) * len(b))
        assert forward.p_one_sided <= 1.0 and forward.p_one_sided >= 0.0

    def test_large_sample_uses_normal_branch(self):
        rng = np.random.default_rng(3)
        inside = rng.normal(1.0, 1.0, 40)
        outside = rng.normal(0.0, 1.0, 120)
        res = stats.mann_whitney(inside, outside)
        ref = scipy.stats.mannwhitneyu(
            inside, outside, alternative="greater", method="asymptotic"
        )
        assert res.u_inside == pytest.approx(ref.statistic)
        assert res.p_one_sided == pytest.approx(ref.pvalue, abs=1e-12)

    def test_normal_branch_with_heavy_ties_matches_scipy(self):
        rng = np.random.default_rng(11)
        inside = rng.integers(0, 4, 25).astype(float)
        outside = rng.integers(0, 4, 60).astype(float)
        res = stats.mann_whitney(inside, outside)
        ref = scipy.stats.mannwhitneyu(
            inside, outside, alternative="greater", method="asymptotic"
        )
        assert res.p_one_sided == pytest.approx(ref.pvalue, abs=1e-12)

    def test_normal_approx_close_to_exact_on_moderate_sizes(self):
        rng = random.Random(5)
        for _ in range(30):
            n = rng.randint(3, 7)
            m = rng.randint(3, 7)
            inside = rng.sample(range(1000), n)
            outside = rng.sample(range(1000, 2000), m - 1) + [rng.randint(2000, 3000)]
            approx = stats.normal_approx_p(inside, outside)
            exact = stats.mann_whitney(inside, outside).p_one_sided
            assert abs(approx - exact) < 0.02


class TestChiSquare:
    def test_association_example(self):
        res = stats.chi_square_independence([[20, 10], [10, 20]])
        assert res.statistic == pytest.approx(6.6667, abs=1e-4)
        assert res.df == 1
        assert res.p == pytest.approx(0.0098, abs=5e-4)

    def test_perfect_diagonal_example(self):
        res = stats.chi_square_independence([[5, 0], [0, 5]])
        assert res.statistic == pytest.approx(10.0, abs=1e-9)
        assert res.p == pytest.approx(0.00157, abs=5e-5)

    def test_empty_margin_rejected(self):
        with pytest.raises(StatsError):
            stats.chi_square_independence([[0, 0], [3, 4]])

    def test_negative_count_rejected(self):
        with pytest.raises(StatsError):
            stats.chi_square_independence([[1, -2], [3, 4]])

    def test_random_tables_match_scipy(self):
        rng = np.random.default_rng(19)
        for _ in range(40):
            shape = (rng.integers(2, 4), rng.integers(2, 4))
            table = rng.integers(1, 50, shape)
            res = stats.chi_square_independence(table)
            ref = scipy.stats.chi2_contingency(table, correction=False)
            assert res.statistic == pytest.approx(chi2_stat(table.tolist()))
            assert res.statistic == pytest.approx(ref.statistic)
            assert res.df == ref.dof
            assert res.p == pytest.approx(ref.pvalue, abs=1e-10)

    def test_sf_close_to_scipy_over_grid(self):
        for df in range(1, 11):
            for x in np.linspace(0.01, 50.0, 120):
                ours = stats.chi_square_sf(float(x), df)
                ref = scipy.stats.chi2.sf(x, df)
                assert abs(ours - ref) < 1e-8, (df, x)

    def test_sf_domain_errors(self):
        with pytest.raises(StatsError):
            stats.chi_square_sf(-1.0, 2)
        with pytest.raises(StatsError):
            stats.chi_square_sf(1.0, 0)


class TestNormalTail:
    def test_sf_matches_scipy(self):
        for z in np.linspace(-8, 8, 161):
            assert stats.normal_sf(float(z)) == pytest.approx(
                scipy.stats.norm.sf(z), abs=1e-14
            )

    def test_log_sf_matches_scipy_far_into_tail(self):
        for z in [-5.0, 0.0, 1.0, 5.0, 10.0, 20.0, 33.9, 34.1, 50.0, 120.0]:
            ours = stats.normal_log_sf(z)
            ref = scipy.stats.norm.logsf(z)
            assert ours == pytest.approx(ref, rel=1e-7), z


class TestBHAdjust:
    def test_without_strong_signal_everything_collapses(self):
        assert stats.bh_adjust([0.01, 0.02, 0.03]) == pytest.approx([0.03, 0.03, 0.03])

    def test_strong_signal_survives(self):
        assert stats.bh_adjust([0.001, 0.02, 0.9]) == pytest.approx([0.003, 0.03, 0.9])

    def test_empty_input(self):
        assert stats.bh_adjust([]) == []

    def test_out_of_range_rejected(self):
        with pytest.raises(StatsError):
            stats.bh_adjust([0.1, 1.5])

    @given(st.lists(st.floats(min_value=0.0, max_value=1.0, allow_nan=False), min_size=1, max_size=25))
    @settings(max_examples=120, deadline=None)
    def test_reference_agreement_and_invariants(self, p_values):
        adjusted = stats.bh_adjust(p_values)
        reference = bh_reference(p_values)
        assert adjusted == pytest.approx(reference, abs=1e-12)
        for raw, adj in zip(p_values, adjusted):
            assert adj >= raw - 1e-12
            assert adj <= 1.0
        # monotone: larger raw p never gets a smaller adjusted p
        pairs = sorted(zip(p_values, adjusted))
        for (_, a1), (_, a2) in zip(pairs, pairs[1:]):
            assert a2 >= a1 - 1e-12
        # equal raw p-values share an adjusted value
        by_raw: dict[float, float] = {}
        for raw, adj in zip(p_values, adjusted):
            if raw in by_raw:
                assert adj == pytest.approx(by_raw[raw], abs=1e-12)
            by_raw[raw] = adj
