"""Pattern persistence and the query layer behind serving and inspection.

A mined pattern set round-trips through a single self-describing JSON file.
PatternStore wraps a loaded set together with its matrix to answer the
queries the API and CLI need: which patterns contain a county, what are a
county's dominant risk factors, how should a pattern be displayed.
"""

from __future__ import annotations

import json
import logging
import math
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np

from .dataset import DataMatrix, GlobalStats, TargetTimeSeries, fingerprint, global_stats
from .errors import StoreError

if TYPE_CHECKING:  # pragma: no cover - type names only
    from .miner import MiningConfig, Pattern

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class PatternSet:
    """Everything one mining run produced, in rank order."""

    patterns: tuple["Pattern", ...]
    global_target_mean: float
    config: "MiningConfig"
    created_at: str
    dataset_fingerprint: str


def _pattern_to_dict(pattern: "Pattern") -> dict:
    return {
        "id": pattern.pattern_id,
        "constraints": [
            {"feature": c.feature, "lo": c.lo, "hi": c.hi} for c in pattern.constraints
        ],
        "members": list(pattern.members),
        "mean_target": pattern.mean_target,
        "p_value": pattern.p_value,
        "p_adjusted": pattern.p_adjusted,
        "direction": pattern.direction,
        "contributions": list(pattern.contributions),
    }


def to_dict(pattern_set: PatternSet) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "created_at": pattern_set.created_at,
        "dataset_fingerprint": pattern_set.dataset_fingerprint,
        "global_target_mean": pattern_set.global_target_mean,
        "config": pattern_set.config.to_dict(),
        "patterns": [_pattern_to_dict(p) for p in pattern_set.patterns],
    }


def save(pattern_set: PatternSet, path: str | Path) -> None:
    """Write the store atomically (temp file + rename in the target dir)."""
    path = Path(path)
    payload = json.dumps(to_dict(pattern_set), indent=2, allow_nan=False)
    fd, tmp_name = tempfile.mkstemp(
        dir=path.parent or Path("."), prefix=path.name, suffix=".tmp"
    )
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(payload + "\n")
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def _require(mapping: dict, key: str, context: str):
    if key not in mapping:
        raise StoreError(f"corrupt pattern store: {context} is missing {key!r}")
    return mapping[key]


def load(path: str | Path) -> PatternSet:
    """Read and validate a store file; raises StoreError on any defect."""
    from .miner import Constraint, MiningConfig, Pattern

    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise StoreError(f"corrupt pattern store: {path}: {exc}") from None
    if not isinstance(doc, dict):
        raise StoreError("corrupt pattern store: top level is not an object")
    version = _require(doc, "schema_version", "store")
    if version != SCHEMA_VERSION:
        raise StoreError(
            f"unsupported store schema version {version!r} (expected {SCHEMA_VERSION})"
        )
    try:
        config = MiningConfig(**_require(doc, "config", "store"))
    except TypeError as exc:
        raise StoreError(f"corrupt pattern store: bad config: {exc}") from None

    patterns = []
    seen_ids = set()
    for k, raw in enumerate(_require(doc, "patterns", "store")):
        where = f"pattern {k}"
        pattern_id = _require(raw, "id", where)
        if pattern_id in seen_ids:
            raise StoreError(f"corrupt pattern store: duplicate pattern id {pattern_id}")
        seen_ids.add(pattern_id)
        constraints = tuple(
            Constraint(
                feature=_require(c, "feature", where),
                lo=float(_require(c, "lo", where)),
                hi=float(_require(c, "hi", where)),
            )
            for c in _require(raw, "constraints", where)
        )
        if not constraints:
            raise StoreError(f"corrupt pattern store: {where} has no constraints")
        for c in constraints:
            if c.lo > c.hi:
                raise StoreError(
                    f"corrupt pattern store: {where} has an empty interval on {c.feature!r}"
                )
        direction = _require(raw, "direction", where)
        if direction not in ("high", "low"):
            raise StoreError(f"corrupt pattern store: {where} has direction {direction!r}")
        p_value = float(_require(raw, "p_value", where))
        p_adjusted = float(_require(raw, "p_adjusted", where))
        if not (0.0 <= p_value <= 1.0 and 0.0 <= p_adjusted <= 1.0):
            raise StoreError(f"corrupt pattern store: {where} has a p-value outside [0, 1]")
        contributions = tuple(float(x) for x in _require(raw, "contributions", where))
        if len(contributions) != len(constraints):
            raise StoreError(
                f"corrupt pattern store: {where} has {len(contributions)} contributions "
                f"for {len(constraints)} constraints"
            )
        patterns.append(
            Pattern(
                pattern_id=pattern_id,
                constraints=constraints,
                members=tuple(_require(raw, "members", where)),
                mean_target=float(_require(raw, "mean_target", where)),
                p_value=p_value,
                p_adjusted=p_adjusted,
                direction=direction,
                contributions=contributions,
            )
        )
    return PatternSet(
        patterns=tuple(patterns),
        global_target_mean=float(_require(doc, "global_target_mean", "store")),
        config=config,
        created_at=str(_require(doc, "created_at", "store")),
        dataset_fingerprint=str(_require(doc, "dataset_fingerprint", "store")),
    )


def verify_fingerprint(pattern_set: PatternSet, matrix: DataMatrix) -> bool:
    """True when the matrix is the one the store was mined from."""
    return pattern_set.dataset_fingerprint == fingerprint(matrix)


def _optional(value: float) -> float | None:
    return None if value is None or math.isnan(value) else float(value)


@dataclass(frozen=True)
class RiskFactor:
    feature: str
    county_value: float | None
    state_lo: float | None
    state_hi: float | None
    us_lo: float | None
    us_hi: float | None
    us_average: float | None
    pattern_count: int


@dataclass(frozen=True)
class ConstraintDisplay:
    feature: str
    lo: float
    hi: float
    us_lo: float | None
    us_hi: float | None
    contribution: float


@dataclass(frozen=True)
class PatternDisplay:
    pattern_id: str
    rank: int
    direction: str
    mean_target: float
    p_value: float
    p_adjusted: float
    members: tuple[str, ...]
    constraints: tuple[ConstraintDisplay, ...]


@dataclass(frozen=True)
class CountyProfile:
    fips: str
    name: str
    state: str
    target_value: float | None
    pattern_ids: tuple[str, ...]
    top_risk_factors: tuple[RiskFactor, ...]


class PatternStore:
    """Read-only queries over one pattern set joined with its matrix."""

    def __init__(
        self,
        pattern_set: PatternSet,
        matrix: DataMatrix,
        timeseries: TargetTimeSeries | None = None,
    ):
        self.pattern_set = pattern_set
        self.matrix = matrix
        self.timeseries = timeseries
        self.stats: GlobalStats = global_stats(matrix)
        if not verify_fingerprint(pattern_set, matrix):
            log.warning(
                "matrix fingerprint does not match the pattern store; "
                "patterns may have been mined from different data"
            )
        self._by_id: dict[str, "Pattern"] = {}
        self._rank: dict[str, int] = {}
        self._by_county: dict[str, list[str]] = {c.fips: [] for c in matrix.counties}
        for rank, pattern in enumerate(pattern_set.patterns, start=1):
            self._by_id[pattern.pattern_id] = pattern
            self._rank[pattern.pattern_id] = rank
            for fips in pattern.members:
                if fips in self._by_county:
                    self._by_county[fips].append(pattern.pattern_id)

    @property
    def patterns(self) -> tuple["Pattern", ...]:
        return self.pattern_set.patterns

    def rank_of(self, pattern_id: str) -> int:
        if pattern_id not in self._rank:
            raise KeyError(f"unknown pattern id {pattern_id!r}")
        return self._rank[pattern_id]

    def pattern(self, pattern_id: str) -> "Pattern":
        if pattern_id not in self._by_id:
            raise KeyError(f"unknown pattern id {pattern_id!r}")
        return self._by_id[pattern_id]

    def patterns_for_county(self, fips: str) -> list["Pattern"]:
        """Patterns containing the county, best rank first."""
        if fips not in self._by_county:
            raise KeyError(f"unknown FIPS {fips!r}")
        return [self._by_id[pid] for pid in self._by_county[fips]]

    def top_risk_factors(self, fips: str, k: int = 3) -> list[RiskFactor]:
        """The county's most frequently constrained features.

        Frequency counts containing patterns that constrain the feature;
        ties break toward the smaller best adjusted p, then feature name.
        """
        if fips not in self._by_county:
            raise KeyError(f"unknown FIPS {fips!r}")
        county_row = self.matrix.fips_index[fips]
        state = self.matrix.counties[county_row].state
        counts: dict[str, int] = {}
        best_p: dict[str, float] = {}
        for pid in self._by_county[fips]:
            pattern = self._by_id[pid]
            for constraint in pattern.constraints:
                counts[constraint.feature] = counts.get(constraint.feature, 0) + 1
                previous = best_p.get(constraint.feature, math.inf)
                best_p[constraint.feature] = min(previous, pattern.p_adjusted)
        ordered = sorted(
            counts, key=lambda name: (-counts[name], best_p[name], name)
        )
        out = []
        for name in ordered[:k]:
            j = self.matrix.feature_index[name]
            state_lo, state_hi = (
                self.stats.state_ranges[state][0][j],
                self.stats.state_ranges[state][1][j],
            )
            out.append(
                RiskFactor(
                    feature=name,
                    county_value=_optional(self.matrix.values[county_row, j]),
                    state_lo=_optional(state_lo),
                    state_hi=_optional(state_hi),
                    us_lo=_optional(self.stats.feature_min[j]),
                    us_hi=_optional(self.stats.feature_max[j]),
                    us_average=_optional(self.stats.feature_mean[j]),
                    pattern_count=counts[name],
                )
            )
        return out

    def pattern_display(self, pattern_id: str) -> PatternDisplay:
        pattern = self.pattern(pattern_id)
        rows = []
        for constraint, weight in zip(pattern.constraints, pattern.contributions):
            j = self.matrix.feature_index.get(constraint.feature)
            if j is None:
                us_lo = us_hi = None
            else:
                us_lo = _optional(self.stats.feature_min[j])
                us_hi = _optional(self.stats.feature_max[j])
            rows.append(
                ConstraintDisplay(
                    feature=constraint.feature,
                    lo=constraint.lo,
                    hi=constraint.hi,
                    us_lo=us_lo,
                    us_hi=us_hi,
                    contribution=weight,
                )
            )
        return PatternDisplay(
            pattern_id=pattern.pattern_id,
            rank=self._rank[pattern.pattern_id],
            direction=pattern.direction,
            mean_target=pattern.mean_target,
            p_value=pattern.p_value,
            p_adjusted=pattern.p_adjusted,
            members=pattern.members,
            constraints=tuple(rows),
        )

    def county_profile(self, fips: str) -> CountyProfile:
        if fips not in self._by_county:
            raise KeyError(f"unknown FIPS {fips!r}")
        row = self.matrix.fips_index[fips]
        county = self.matrix.counties[row]
        return CountyProfile(
            fips=county.fips,
            name=county.name,
            state=county.state,
            target_value=_optional(float(self.matrix.target[row])),
            pattern_ids=tuple(self._by_county[fips]),
            top_risk_factors=tuple(self.top_risk_factors(fips)),
        )

    def county_series(self, fips: str) -> tuple[tuple[str, ...], np.ndarray]:
        """ISO dates and the county's cumulative curve."""
        if self.timeseries is None or fips not in self.timeseries.series:
            raise KeyError(f"no time series for FIPS {fips!r}")
        dates = tuple(d.isoformat() for d in self.timeseries.dates)
        return dates, self.timeseries.series[fips]
