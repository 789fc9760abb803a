"""Synthetic datasets with known ground truth.

Used by the validation suite and the demo scripts: a matrix with a target
shift planted inside a feature cell, a null matrix via target shuffling,
and a cumulative series whose planted members grow at a fixed multiple of
the national average.
"""

from __future__ import annotations

from datetime import date, timedelta
from typing import Iterable, Sequence

import numpy as np

from .dataset import CountyKey, DataMatrix, FeatureSpec, TargetTimeSeries

_STATE_POOL = [f"S{k:02d}" for k in range(50)]


def _synthetic_counties(n: int) -> tuple[CountyKey, ...]:
    return tuple(
        CountyKey(f"{i:05d}", f"County {i:04d}", _STATE_POOL[i % len(_STATE_POOL)])
        for i in range(n)
    )


def planted_matrix(
    n_counties: int = 3000,
    n_features: int = 20,
    planted_features: Sequence[int] = (0, 1, 2),
    shift: float = 2.0,
    seed: int = 0,
) -> tuple[DataMatrix, frozenset[str]]:
    """Standard-normal features with the target shifted inside one cell.

    The cell is the intersection of the top terciles of the planted
    features; its counties get `shift` added to a unit-variance target.
    Returns the matrix and the planted member FIPS codes.
    """
    rng = np.random.default_rng(seed)
    values = rng.standard_normal((n_counties, n_features))
    cell = np.ones(n_counties, dtype=bool)
    for j in planted_features:
        cell &= values[:, j] >= np.quantile(values[:, j], 2.0 / 3.0)
    target = rng.standard_normal(n_counties)
    target[cell] += shift
    matrix = DataMatrix(
        counties=_synthetic_counties(n_counties),
        features=tuple(
            FeatureSpec(j, f"factor {j:02d}", "", "numeric") for j in range(n_features)
        ),
        values=values,
        target=target,
        target_name="synthetic_rate",
    )
    members = frozenset(matrix.counties[i].fips for i in np.flatnonzero(cell))
    return matrix, members


def shuffled_target(matrix: DataMatrix, seed: int) -> DataMatrix:
    """The same matrix with the target permuted: any association is gone."""
    rng = np.random.default_rng(seed)
    return DataMatrix(
        counties=matrix.counties,
        features=matrix.features,
        values=matrix.values,
        target=rng.permutation(matrix.target),
        target_name=matrix.target_name,
    )


def growth_series(
    member_fips: Iterable[str],
    all_fips: Iterable[str],
    start: date = date(2020, 3, 1),
    n_dates: int = 6,
    step_days: int = 7,
    national_step: float = 10.0,
    member_multiple: float = 2.5,
) -> TargetTimeSeries:
    """Cumulative series where members grow at a multiple of the nation.

    Per step, members gain member_multiple * national_step while the
    non-member increment is solved so the mean increment over all counties
    equals national_step exactly; every member/national growth ratio is
    therefore exactly member_multiple for any window.
    """
    members = set(member_fips)
    everyone = list(all_fips)
    n_members = sum(1 for f in everyone if f in members)
    n_other = len(everyone) - n_members
    if n_other == 0:
        raise ValueError("growth_series needs at least one non-member county")
    other_step = (
        national_step * (len(everyone) - member_multiple * n_members) / n_other
    )
    if other_step < 0:
        raise ValueError(
            "member_multiple too large for the member share: non-member "
            "series would have to decrease"
        )
    dates = tuple(start + timedelta(days=step_days * k) for k in range(n_dates))
    series = {}
    for fips in everyone:
        step = national_step * member_multiple if fips in members else other_step
        series[fips] = step * np.arange(n_dates, dtype=float)
    return TargetTimeSeries(dates=dates, series=series)
