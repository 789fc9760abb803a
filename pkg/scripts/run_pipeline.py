#!/usr/bin/env python3
"""End-to-end demo: generate planted data, mine it, and backtest growth.

Everything goes through the same entry points as the installed CLI, so
this doubles as a smoke test of the full pipeline.
"""

import argparse
import sys
from pathlib import Path

from riskpatterns.cli import main as cli_main
from riskpatterns.dataset import write_matrix, write_timeseries
from riskpatterns.synthetic import growth_series, planted_matrix


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("work_dir", type=Path)
    parser.add_argument("--counties", type=int, default=1000)
    parser.add_argument("--features", type=int, default=12)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    args.work_dir.mkdir(parents=True, exist_ok=True)
    matrix, members = planted_matrix(
        n_counties=args.counties, n_features=args.features, seed=args.seed
    )
    matrix_path = args.work_dir / "matrix.csv"
    series_path = args.work_dir / "timeseries.csv"
    store_path = args.work_dir / "patterns.json"
    write_matrix(matrix, matrix_path)
    ts = growth_series(members, [c.fips for c in matrix.counties])
    write_timeseries(ts, series_path)
    print(f"planted {len(members)} member counties of {args.counties}")

    code = cli_main(
        [
            "mine",
            "--matrix", str(matrix_path),
            "--store", str(store_path),
            "--target", "synthetic_rate",
        ]
    )
    if code != 0:
        return code
    return cli_main(
        [
            "evaluate",
            "--store", str(store_path),
            "--timeseries", str(series_path),
            "--t0", str(ts.dates[0]),
            "--t1", str(ts.dates[-1]),
        ]
    )


if __name__ == "__main__":
    sys.exit(main())
