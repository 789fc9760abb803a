"""Tests for the growth backtest and late-riser detection."""

from __future__ import annotations

from datetime import date

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from riskpatterns.dataset import TargetTimeSeries
from riskpatterns.errors import EvaluationError
from riskpatterns.evaluator import evaluate_growth, newly_affected
from riskpatterns.miner import Constraint, MiningConfig, Pattern, pattern_id
from riskpatterns.patternstore import PatternSet
from riskpatterns.synthetic import growth_series

D = [date(2020, 3, 1), date(2020, 4, 1), date(2020, 5, 1)]


def series(curves: dict[str, list[float]], dates=None) -> TargetTimeSeries:
    return TargetTimeSeries(
        dates=tuple(dates or D),
        series={f: np.asarray(v, dtype=float) for f, v in curves.items()},
    )


def one_pattern_set(members, pid_feature="poverty"):
    constraints = (Constraint(pid_feature, 0.0, 1.0),)
    pattern = Pattern(
        pattern_id=pattern_id(constraints),
        constraints=constraints,
        members=tuple(members),
        mean_target=1.0,
        p_value=1e-4,
        p_adjusted=1e-3,
        direction="high",
        contributions=(1.0,),
    )
    return PatternSet(
        patterns=(pattern,),
        global_target_mean=0.5,
        config=MiningConfig(min_support=2),
        created_at="2020-12-01T00:00:00+00:00",
        dataset_fingerprint="0" * 64,
    )


class TestEvaluateGrowth:
    def test_textbook_ratio(self):
        # members grow 10->30 while the nation means 5->15
        ts = series(
            {
                "00001": [0, 10, 30],
                "00002": [0, 10, 30],
                "00003": [0, 0, 0],
                "00004": [0, 0, 0],
            }
        )
        report = evaluate_growth(one_pattern_set(["00001", "00002"]), ts, D[1], D[2])
        entry = report.per_pattern[0]
        assert entry.member_growth == 20.0
        assert report.national_growth == 10.0
        assert entry.ratio == 2.0

    def test_members_missing_from_series_are_counted(self):
        ts = series({"00001": [0, 5, 9], "00002": [0, 1, 2]})
        report = evaluate_growth(
            one_pattern_set(["00001", "99999"]), ts, D[0], D[2]
        )
        entry = report.per_pattern[0]
        assert entry.members_in_series == 1
        assert entry.excluded_members == 1
        assert entry.member_growth == 9.0

    def test_no_members_in_series_yields_undefined_ratio(self):
        ts = series({"00001": [0, 5, 9]})
        report = evaluate_growth(one_pattern_set(["99999"]), ts, D[0], D[2])
        entry = report.per_pattern[0]
        assert entry.member_growth is None and entry.ratio is None
        assert report.share_exceeding == 0.0

    def test_zero_national_growth_is_an_error(self):
        ts = series({"00001": [3, 3, 3], "00002": [1, 1, 1]})
        with pytest.raises(EvaluationError, match="no national growth"):
            evaluate_growth(one_pattern_set(["00001"]), ts, D[0], D[2])

    def test_t0_after_t1_rejected(self):
        ts = series({"00001": [0, 1, 2]})
        with pytest.raises(EvaluationError, match="precede"):
            evaluate_growth(one_pattern_set(["00001"]), ts, D[2], D[0])

    def test_dates_snap_earlier_with_note(self):
        ts = series({"00001": [0, 1, 2], "00002": [0, 3, 4]})
        report = evaluate_growth(
            one_pattern_set(["00001"]), ts, date(2020, 3, 15), date(2020, 5, 20)
        )
        assert report.t0 == D[0] and report.t1 == D[2]
        assert len(report.notes) == 2
        assert "snapped" in report.notes[0]

    def test_date_before_series_start_rejected(self):
        ts = series({"00001": [0, 1, 2]})
        with pytest.raises(EvaluationError, match="precedes the first series date"):
            evaluate_growth(one_pattern_set(["00001"]), ts, date(2019, 1, 1), D[2])

    def test_window_collapsing_to_one_date_rejected(self):
        ts = series({"00001": [0, 1, 2]})
        with pytest.raises(EvaluationError, match="collapses"):
            evaluate_growth(
                one_pattern_set(["00001"]), ts, date(2020, 3, 2), date(2020, 3, 20)
            )

    def test_empty_pattern_set_gives_empty_report(self):
        ts = series({"00001": [0, 1, 2]})
        empty = PatternSet(
            patterns=(),
            global_target_mean=0.0,
            config=MiningConfig(min_support=2),
            created_at="2020-12-01T00:00:00+00:00",
            dataset_fingerprint="0" * 64,
        )
        report = evaluate_growth(empty, ts, D[0], D[2])
        assert report.per_pattern == ()
        assert report.share_exceeding == 0.0

    def test_planted_multiple_is_exact(self):
        all_fips = [f"{i:05d}" for i in range(60)]
        members = all_fips[:6]
        ts = growth_series(members, all_fips, member_multiple=2.5)
        report = evaluate_growth(
            one_pattern_set(members), ts, ts.dates[0], ts.dates[-1]
        )
        assert report.per_pattern[0].ratio == pytest.approx(2.5, abs=1e-9)
        assert report.share_exceeding == 1.0

    @given(st.floats(min_value=0.01, max_value=1000.0), st.integers(0, 2**31 - 1))
    @settings(max_examples=40, deadline=None)
    def test_scale_invariance(self, scale, seed):
        rng = np.random.default_rng(seed)
        curves = {
            f"{i:05d}": np.sort(rng.uniform(0, 100, size=3)) for i in range(8)
        }
        if sum(c[2] - c[0] for c in curves.values()) == 0:
            return
        ts1 = series({f: list(c) for f, c in curves.items()})
        ts2 = series({f: list(c * scale) for f, c in curves.items()})
        members = list(curves)[:3]
        r1 = evaluate_growth(one_pattern_set(members), ts1, D[0], D[2])
        r2 = evaluate_growth(one_pattern_set(members), ts2, D[0], D[2])
        assert r1.per_pattern[0].ratio == pytest.approx(
            r2.per_pattern[0].ratio, rel=1e-9
        )

    @given(st.integers(0, 2**31 - 1))
    @settings(max_examples=40, deadline=None)
    def test_window_additivity(self, seed):
        rng = np.random.default_rng(seed)
        curves = {
            f"{i:05d}": np.cumsum(rng.uniform(0.1, 5, size=3)) for i in range(6)
        }
        ts = series({f: list(c) for f, c in curves.items()})
        members = list(curves)[:2]
        pattern_set = one_pattern_set(members)
        g_full = evaluate_growth(pattern_set, ts, D[0], D[2]).per_pattern[0]
        g_a = evaluate_growth(pattern_set, ts, D[0], D[1]).per_pattern[0]
        g_b = evaluate_growth(pattern_set, ts, D[1], D[2]).per_pattern[0]
        assert g_full.member_growth == pytest.approx(
            g_a.member_growth + g_b.member_growth, rel=1e-9
        )

    def test_report_serialization(self):
        ts = series({"00001": [0, 10, 30], "00002": [0, 0, 10]})
        report = evaluate_growth(one_pattern_set(["00001"]), ts, D[0], D[2])
        doc = report.to_dict()
        assert doc["t0"] == "2020-03-01"
        assert set(doc["per_pattern"]) == {one_pattern_set(["00001"]).patterns[0].pattern_id}
        text = report.to_text()
        assert "ratio" in text and "growth window" in text


class TestNewlyAffected:
    def test_late_riser_listed_flat_not(self):
        ts = series({"00001": [0, 0, 12], "00002": [0, 0, 0], "00003": [5, 6, 9]})
        pattern_set = one_pattern_set(["00001", "00002", "00003"])
        pid = pattern_set.patterns[0].pattern_id
        out = newly_affected(pattern_set, ts, D[0], D[2], floor=1.0)
        assert out[pid] == ["00001"]

    def test_planted_late_risers_exactly_recovered(self):
        curves = {f"{i:05d}": [0.0, 0.0, 0.0] for i in range(20)}
        risers = [f"{i:05d}" for i in range(5)]
        for f in risers:
            curves[f] = [0.0, 1.0, 30.0]
        for i in range(10, 20):  # established counties, already above floor
            curves[f"{i:05d}"] = [10.0, 12.0, 14.0]
        ts = series(curves)
        pattern_set = one_pattern_set(list(curves))
        pid = pattern_set.patterns[0].pattern_id
        out = newly_affected(pattern_set, ts, D[0], D[2], floor=0.5)
        assert out[pid] == risers
