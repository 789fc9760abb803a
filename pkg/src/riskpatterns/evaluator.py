"""Growth backtest: do pattern members outgrow the national average?

Growth is the difference of cumulative values between two series dates
(absolute, not percentage — percentage growth explodes for the near-zero
baselines that matter most here). A pattern's ratio is its members' mean
growth over the national mean growth.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date

import numpy as np

from .dataset import TargetTimeSeries
from .errors import EvaluationError
from .patternstore import PatternSet


@dataclass(frozen=True)
class PatternGrowth:
    pattern_id: str
    member_growth: float | None  # None when no member is in the series
    national_growth: float
    ratio: float | None
    members_in_series: int
    excluded_members: int


@dataclass(frozen=True)
class GrowthReport:
    t0: date
    t1: date
    threshold: float
    national_growth: float
    per_pattern: tuple[PatternGrowth, ...]
    share_exceeding: float
    notes: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "t0": self.t0.isoformat(),
            "t1": self.t1.isoformat(),
            "threshold": self.threshold,
            "national_growth": self.national_growth,
            "share_exceeding": self.share_exceeding,
            "notes": list(self.notes),
            "per_pattern": {
                g.pattern_id: {
                    "member_growth": g.member_growth,
                    "national_growth": g.national_growth,
                    "ratio": g.ratio,
                    "members_in_series": g.members_in_series,
                    "excluded_members": g.excluded_members,
                }
                for g in self.per_pattern
            },
        }

    def to_text(self) -> str:
        lines = [
            f"growth window {self.t0.isoformat()} .. {self.t1.isoformat()}"
            f"  national growth {self.national_growth:g}",
            f"share of patterns at ratio >= {self.threshold:g}: "
            f"{self.share_exceeding:.3f}",
        ]
        lines.extend(f"note: {n}" for n in self.notes)
        header = f"{'pattern':<18} {'members':>7} {'excluded':>8} {'growth':>10} {'ratio':>7}"
        lines.append(header)
        lines.append("-" * len(header))
        for g in self.per_pattern:
            growth = "-" if g.member_growth is None else f"{g.member_growth:.3f}"
            ratio = "-" if g.ratio is None else f"{g.ratio:.3f}"
            lines.append(
                f"{g.pattern_id:<18} {g.members_in_series:>7} "
                f"{g.excluded_members:>8} {growth:>10} {ratio:>7}"
            )
        return "\n".join(lines)


def _snap(ts: TargetTimeSeries, wanted: date, label: str) -> tuple[int, str | None]:
    """Index of the latest series date at or before `wanted`."""
    index = None
    for i, d in enumerate(ts.dates):
        if d <= wanted:
            index = i
    if index is None:
        raise EvaluationError(
            f"{label}={wanted.isoformat()} precedes the first series date "
            f"{ts.dates[0].isoformat()}"
        )
    note = None
    if ts.dates[index] != wanted:
        note = (
            f"{label}={wanted.isoformat()} snapped to earlier series date "
            f"{ts.dates[index].isoformat()}"
        )
    return index, note


def _window(
    ts: TargetTimeSeries, t0: date, t1: date
) -> tuple[int, int, list[str]]:
    if t0 >= t1:
        raise EvaluationError("t0 must precede t1")
    i0, note0 = _snap(ts, t0, "t0")
    i1, note1 = _snap(ts, t1, "t1")
    notes = [n for n in (note0, note1) if n]
    if i0 == i1:
        raise EvaluationError("window collapses to a single series date")
    return i0, i1, notes


def evaluate_growth(
    pattern_set: PatternSet,
    ts: TargetTimeSeries,
    t0: date,
    t1: date,
    threshold: float = 2.0,
) -> GrowthReport:
    """Per-pattern member growth vs national growth over [t0, t1].

    Members absent from the series are excluded from their pattern's mean
    and counted. share_exceeding is the fraction of all patterns whose
    ratio is defined and at least `threshold`.
    """
    i0, i1, notes = _window(ts, t0, t1)
    growth = {fips: float(curve[i1] - curve[i0]) for fips, curve in ts.series.items()}
    if not growth:
        raise EvaluationError("time series has no counties")
    national = float(np.mean(list(growth.values())))
    if national == 0.0:
        raise EvaluationError("no national growth in window")

    per_pattern = []
    exceeding = 0
    for pattern in pattern_set.patterns:
        present = [growth[f] for f in pattern.members if f in growth]
        excluded = len(pattern.members) - len(present)
        if present:
            member_growth = float(np.mean(present))
            ratio = member_growth / national
            if ratio >= threshold:
                exceeding += 1
        else:
            member_growth = None
            ratio = None
        per_pattern.append(
            PatternGrowth(
                pattern_id=pattern.pattern_id,
                member_growth=member_growth,
                national_growth=national,
                ratio=ratio,
                members_in_series=len(present),
                excluded_members=excluded,
            )
        )
    share = exceeding / len(per_pattern) if per_pattern else 0.0
    return GrowthReport(
        t0=ts.dates[i0],
        t1=ts.dates[i1],
        threshold=threshold,
        national_growth=national,
        per_pattern=tuple(per_pattern),
        share_exceeding=share,
        notes=tuple(notes),
    )


def newly_affected(
    pattern_set: PatternSet,
    ts: TargetTimeSeries,
    t0: date,
    t1: date,
    floor: float,
) -> dict[str, list[str]]:
    """Per pattern: members at or below `floor` at t0 and above it at t1.

    These are the late risers — counties a pattern flagged while their
    target was still low.
    """
    i0, i1, _ = _window(ts, t0, t1)
    out: dict[str, list[str]] = {}
    for pattern in pattern_set.patterns:
        risers = []
        for fips in pattern.members:
            curve = ts.series.get(fips)
            if curve is None:
                continue
            if curve[i0] <= floor < curve[i1]:
                risers.append(fips)
        out[pattern.pattern_id] = risers
    return out
