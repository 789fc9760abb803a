"""A small hand-built dataset with a known 12-pattern store.

Every number here is chosen so that pattern membership, display ranges,
rank order, and the county walkthroughs used by the test suite and the
dashboard demo are fully determined and self-checked at build time. The
builder recomputes members from raw values and refuses to return a store
that drifted from the documented layout.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .dataset import (
    CountyKey,
    DataMatrix,
    FeatureSpec,
    fingerprint,
    load_timeseries,
    write_matrix,
)
from .miner import Constraint, MiningConfig, Pattern, pattern_id
from .patternstore import PatternSet, save

FIXTURE_CREATED_AT = "2020-12-01T00:00:00+00:00"

# fips, name, state, target (deaths per 100k; None = not yet reported)
_COUNTIES = [
    ("04013", "Maricopa", "AZ", None),
    ("04027", "Yuma", "AZ", 180.0),
    ("06037", "Los Angeles", "CA", 95.0),
    ("06073", "San Diego", "CA", 60.0),
    ("09001", "Fairfield", "CT", 150.0),
    ("09003", "Hartford", "CT", 135.0),
    ("09005", "Litchfield", "CT", 80.0),
    ("12011", "Broward", "FL", 120.0),
    ("12086", "Miami-Dade", "FL", 160.0),
    ("34003", "Bergen", "NJ", 190.0),
    ("34031", "Passaic", "NJ", 200.0),
    ("35001", "Bernalillo", "NM", 70.0),
    ("35031", "McKinley", "NM", 210.0),
    ("48061", "Cameron", "TX", 170.0),
    ("48113", "Dallas", "TX", 90.0),
    ("48201", "Harris", "TX", 100.0),
]

_FEATURES = [
    "% minority population",
    "% population without high school degree",
    "% uninsured",
    "% non-Hispanic white population",
    "median household debt to income ratio",
    "PM2.5 pollution",
    "avg. GPA",
    "population density",
]

# One row per county, columns in _FEATURES order.
_VALUES = [
    # minority, no-HS, uninsured, nh-white, debt, pm25, gpa, density
    [41.0, 12.0, 11.0, 54.0, 1.9, 8.0, 3.1, 470.0],  # Maricopa
    [63.8, 28.0, 30.0, 32.5, 1.5, 7.2, 2.2, 66.0],  # Yuma
    [71.0, 16.0, 12.0, 26.0, 1.7, 13.8, 3.0, 10100.0],  # Los Angeles
    [54.0, 9.0, 10.0, 45.5, 1.95, 8.4, 4.0, 750.0],  # San Diego
    [30.0, 10.0, 8.0, 57.0, 2.0, 9.0, 3.7, 2200.0],  # Fairfield
    [35.0, 11.0, 9.0, 44.0, 2.1, 13.0, 2.9, 1200.0],  # Hartford
    [0.0, 8.0, 7.0, 91.0, 1.8, 6.5, 2.4, 190.0],  # Litchfield
    [63.0, 18.5, 20.0, 34.0, 1.65, 8.1, 3.2, 1205.0],  # Broward
    [88.0, 19.0, 14.8, 20.0, 1.55, 12.4, 2.55, 1315.0],  # Miami-Dade
    [44.0, 7.5, 8.5, 51.0, 2.05, 8.8, 2.75, 3990.0],  # Bergen
    [37.6, 21.0, 16.0, 38.0, 1.85, 13.4, 3.05, 2600.0],  # Passaic
    [52.0, 13.0, 13.5, 37.0, 1.4, 5.9, 0.0, 580.0],  # Bernalillo
    [99.2, 30.5, 23.5, 10.5, 2.3, 6.1, 1.8, 13.0],  # McKinley
    [90.0, 34.7, 23.1, 16.0, 2.4, 8.6, 2.0, 455.0],  # Cameron
    [71.5, 17.5, 15.5, 28.5, 1.75, 13.2, 3.3, 5300.0],  # Dallas
    [69.0, 18.0, 15.0, 30.0, 1.6, 13.6, 3.45, 4100.0],  # Harris
]

# Constraints per pattern (feature name, lo, hi) with the member fips the
# values above imply, plus hand-set significance numbers and weights.
_PATTERNS = [
    {
        "constraints": [
            ("% minority population", 37.6, 99.2),
            ("% population without high school degree", 21.0, 34.7),
            ("% uninsured", 16.0, 30.0),
        ],
        "members": ["04027", "34031", "35031", "48061"],
        "p_value": 1e-6,
        "p_adjusted": 3e-6,
        "contributions": [0.45, 0.35, 0.20],
    },
    {
        "constraints": [
            ("population density", 1315.0, 3990.0),
            ("% minority population", 37.6, 88.0),
        ],
        "members": ["12086", "34003", "34031"],
        "p_value": 2e-6,
        "p_adjusted": 5e-6,
        "contributions": [0.6, 0.4],
    },
    {
        "constraints": [
            ("% non-Hispanic white population", 16.0, 44.0),
            ("median household debt to income ratio", 1.85, 2.4),
        ],
        "members": ["09003", "34031", "48061"],
        "p_value": 4e-6,
        "p_adjusted": 9e-6,
        "contributions": [0.55, 0.45],
    },
    {
        "constraints": [
            ("% population without high school degree", 18.5, 34.7),
            ("% uninsured", 20.0, 23.5),
        ],
        "members": ["12011", "35031", "48061"],
        "p_value": 6e-6,
        "p_adjusted": 1.2e-5,
        "contributions": [0.5, 0.5],
    },
    {
        "constraints": [
            ("avg. GPA", 2.75, 2.9),
            ("median household debt to income ratio", 2.05, 2.1),
        ],
        "members": ["09003", "34003"],
        "p_value": 8e-6,
        "p_adjusted": 1.5e-5,
        "contributions": [0.65, 0.35],
    },
    {
        "constraints": [("PM2.5 pollution", 9.0, 12.4)],
        "members": ["09001", "12086"],
        "p_value": 5e-5,
        "p_adjusted": 9e-5,
        "contributions": [1.0],
    },
    {
        # same members and mean as the single PM2.5 pattern: a rank tie,
        # kept plausible against subset pruning by its smaller adjusted p
        "constraints": [
            ("PM2.5 pollution", 9.0, 12.4),
            ("population density", 1315.0, 2200.0),
        ],
        "members": ["09001", "12086"],
        "p_value": 3e-5,
        "p_adjusted": 6e-5,
        "contributions": [0.7, 0.3],
    },
    {
        # Maricopa sits inside this interval but has no reported target,
        # so it is not a member
        "constraints": [("PM2.5 pollution", 7.2, 8.1)],
        "members": ["04027", "12011"],
        "p_value": 6e-5,
        "p_adjusted": 1.1e-4,
        "contributions": [1.0],
    },
    {
        "constraints": [
            ("avg. GPA", 2.55, 2.9),
            ("PM2.5 pollution", 12.4, 13.0),
        ],
        "members": ["09003", "12086"],
        "p_value": 7e-5,
        "p_adjusted": 1.3e-4,
        "contributions": [0.6, 0.4],
    },
    {
        "constraints": [("% uninsured", 20.0, 23.1)],
        "members": ["12011", "48061"],
        "p_value": 9e-5,
        "p_adjusted": 1.6e-4,
        "contributions": [1.0],
    },
    {
        "constraints": [("population density", 1205.0, 1315.0)],
        "members": ["12011", "12086"],
        "p_value": 1.1e-4,
        "p_adjusted": 1.9e-4,
        "contributions": [1.0],
    },
    {
        "constraints": [("avg. GPA", 0.0, 1.8)],
        "members": ["35001", "35031"],
        "p_value": 1.2e-4,
        "p_adjusted": 2.0e-4,
        "contributions": [1.0],
    },
]

_TIMESERIES_DATES = ["2020-03-01", "2020-04-01", "2020-05-01", "2020-06-01"]

# Raw cumulative curves; the 09003 dip (5 -> 4) exercises the monotone
# clamp, which serves that row as 0, 5, 5, 12.
_TIMESERIES_ROWS = {
    "04013": [0, 2, 5, 8],
    "04027": [0, 6, 11, 18],
    "06037": [0, 3, 6, 9.5],
    "06073": [0, 1, 3, 6],
    "09001": [1, 6, 10, 15],
    "09003": [0, 5, 4, 12],
    "09005": [0, 2, 4, 8],
    "12011": [0, 4, 8, 12],
    "12086": [2, 7, 11, 16],
    "34003": [3, 9, 14, 19],
    "34031": [4, 10, 16, 20],
    "35001": [0, 1, 4, 7],
    "35031": [0, 8, 15, 21],
    "48061": [0, 2, 9, 17],
    "48113": [0, 3, 5, 9],
    "48201": [1, 4, 7, 10],
}


def fixture_matrix() -> DataMatrix:
    counties = tuple(CountyKey(f, n, s) for f, n, s, _ in _COUNTIES)
    target = np.array(
        [np.nan if t is None else float(t) for _, _, _, t in _COUNTIES]
    )
    return DataMatrix(
        counties=counties,
        features=tuple(
            FeatureSpec(j, name, "", "numeric") for j, name in enumerate(_FEATURES)
        ),
        values=np.array(_VALUES, dtype=float),
        target=target,
        target_name="covid_death_rate",
    )


def _members_by_containment(matrix: DataMatrix, constraints) -> tuple[str, ...]:
    mask = ~np.isnan(matrix.target)
    for feature, lo, hi in constraints:
        column = matrix.values[:, matrix.feature_index[feature]]
        mask &= (column >= lo) & (column <= hi)
    return tuple(matrix.counties[i].fips for i in np.flatnonzero(mask))


def fixture_pattern_set(matrix: DataMatrix | None = None) -> PatternSet:
    """The 12-pattern store; self-checks membership and rank layout."""
    matrix = matrix or fixture_matrix()
    patterns = []
    for spec in _PATTERNS:
        derived = _members_by_containment(matrix, spec["constraints"])
        if derived != tuple(spec["members"]):
            raise ValueError(
                f"fixture drift: constraints {spec['constraints']} select "
                f"{derived}, expected {tuple(spec['members'])}"
            )
        rows = [matrix.fips_index[f] for f in derived]
        mean_target = float(matrix.target[rows].mean())
        # keep each constraint interval tight: bounds are member extremes
        for feature, lo, hi in spec["constraints"]:
            column = matrix.values[rows, matrix.feature_index[feature]]
            if float(column.min()) != lo or float(column.max()) != hi:
                raise ValueError(
                    f"fixture drift: {feature} members span "
                    f"[{column.min()}, {column.max()}], interval says [{lo}, {hi}]"
                )
        constraints = tuple(Constraint(f, lo, hi) for f, lo, hi in spec["constraints"])
        patterns.append(
            Pattern(
                pattern_id=pattern_id(constraints),
                constraints=constraints,
                members=derived,
                mean_target=mean_target,
                p_value=spec["p_value"],
                p_adjusted=spec["p_adjusted"],
                direction="high",
                contributions=tuple(spec["contributions"]),
            )
        )
    patterns.sort(key=lambda p: (-p.mean_target, p.pattern_id))

    global_mean = matrix.global_target_mean
    if not all(p.mean_target > global_mean for p in patterns):
        raise ValueError("fixture drift: every pattern mean must exceed the global mean")
    hartford_ranks = [
        r for r, p in enumerate(patterns, start=1) if "09003" in p.members
    ]
    if hartford_ranks[0] != 3:
        raise ValueError(
            f"fixture drift: 09003's first pattern sits at rank {hartford_ranks[0]}, not 3"
        )
    minority = [
        c
        for c in patterns[0].constraints
        if c.feature == "% minority population"
    ]
    if not minority or (minority[0].lo, minority[0].hi) != (37.6, 99.2):
        raise ValueError("fixture drift: rank-1 minority interval moved")
    if len(patterns) != 12:
        raise ValueError("fixture drift: expected 12 patterns")

    return PatternSet(
        patterns=tuple(patterns),
        global_target_mean=global_mean,
        config=MiningConfig(min_support=2, alpha=0.01),
        created_at=FIXTURE_CREATED_AT,
        dataset_fingerprint=fingerprint(matrix),
    )


def fixture_timeseries_csv() -> str:
    lines = ["fips," + ",".join(_TIMESERIES_DATES)]
    for fips, values in _TIMESERIES_ROWS.items():
        lines.append(fips + "," + ",".join(repr(float(v)) for v in values))
    return "\n".join(lines) + "\n"


def _county_square(lon: float, lat: float, size: float = 0.8) -> list:
    return [
        [
            [lon, lat],
            [lon + size, lat],
            [lon + size, lat + size],
            [lon, lat + size],
            [lon, lat],
        ]
    ]


def fixture_geojson() -> dict:
    """One square polygon per county on a simple grid."""
    features = []
    for i, (fips, name, state, _) in enumerate(_COUNTIES):
        lon = -110.0 + (i % 4) * 1.0
        lat = 30.0 + (i // 4) * 1.0
        features.append(
            {
                "type": "Feature",
                "properties": {"GEOID": fips, "name": name, "state": state},
                "geometry": {
                    "type": "Polygon",
                    "coordinates": _county_square(lon, lat),
                },
            }
        )
    return {"type": "FeatureCollection", "features": features}


def write_fixture(directory: str | Path) -> dict[str, Path]:
    """Write matrix, time series, geometry, and store files to a directory."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    matrix = fixture_matrix()
    paths = {
        "matrix": directory / "matrix.csv",
        "timeseries": directory / "timeseries.csv",
        "geojson": directory / "counties.geojson",
        "store": directory / "patterns.json",
    }
    write_matrix(matrix, paths["matrix"])
    paths["timeseries"].write_text(fixture_timeseries_csv(), encoding="utf-8")
    paths["geojson"].write_text(
        json.dumps(fixture_geojson(), indent=2) + "\n", encoding="utf-8"
    )
    save(fixture_pattern_set(matrix), paths["store"])
    return paths


def fixture_timeseries():
    """The parsed (clamped) series, matching what the server would load."""
    import tempfile

    with tempfile.NamedTemporaryFile("w", suffix=".csv", delete=False) as handle:
        handle.write(fixture_timeseries_csv())
        name = handle.name
    try:
        return load_timeseries(name)
    finally:
        Path(name).unlink()
