#!/usr/bin/env python3
"""Write the 16-county demo fixture (matrix, store, series, geometry).

The output directory is directly servable:

    riskpatterns serve --matrix <dir>/matrix.csv --store <dir>/patterns.json \
        --timeseries <dir>/timeseries.csv --geo <dir>/counties.geojson \
        --target covid_death_rate
"""

import argparse
from pathlib import Path

from riskpatterns.fixture import write_fixture


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("out_dir", type=Path)
    args = parser.parse_args()
    paths = write_fixture(args.out_dir)
    for kind, path in paths.items():
        print(f"{kind}: {path}")


if __name__ == "__main__":
    main()
