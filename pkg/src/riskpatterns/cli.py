"""Operator entry points: mine, serve, evaluate, inspect.

Settings resolve in three layers: built-in defaults, then a `key = value`
config file, then command-line flags. Exit codes: 0 success, 1 domain
error (bad data, unknown ids), 2 usage error (bad flags, missing paths).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from collections import Counter
from datetime import date
from pathlib import Path

from .dataset import (
    DataMatrix,
    SchemaConfig,
    TargetTimeSeries,
    load_matrix,
    load_timeseries,
    read_kv_config,
)
from .errors import RiskPatternsError
from .evaluator import evaluate_growth
from .miner import MiningConfig, mine
from .patternstore import PatternStore, load, save

USAGE_EXIT = 2
DOMAIN_EXIT = 1


class UsageError(Exception):
    """Bad invocation: missing/invalid flags or nonexistent input paths."""


@dataclasses.dataclass
class RunConfig:
    """Effective settings after merging defaults, config file, and flags."""

    matrix_path: str | None = None
    timeseries_path: str | None = None
    geo_path: str | None = None
    store_path: str | None = None
    target_column: str | None = None
    fips_column: str = "fips"
    name_column: str = "name"
    state_column: str = "state"
    exclude_columns: tuple[str, ...] = ()
    min_support: int = 20
    alpha: float = 0.01
    max_depth: int = 3
    bins_per_feature: int = 3
    max_merge_run: int = 2
    direction: str = "high"
    host: str = "127.0.0.1"
    port: int = 8000
    cors: bool = True

    def schema(self) -> SchemaConfig:
        if not self.target_column:
            raise UsageError("a target column is required (--target or config file)")
        return SchemaConfig(
            target_column=self.target_column,
            fips_column=self.fips_column,
            name_column=self.name_column,
            state_column=self.state_column,
            exclude_columns=self.exclude_columns,
        )

    def mining(self) -> MiningConfig:
        return MiningConfig(
            min_support=self.min_support,
            alpha=self.alpha,
            max_depth=self.max_depth,
            bins_per_feature=self.bins_per_feature,
            max_merge_run=self.max_merge_run,
            direction=self.direction,
        )


def _coerce(name: str, raw: str):
    kind = RunConfig.__dataclass_fields__[name].type
    try:
        if name == "exclude_columns":
            return tuple(part.strip() for part in raw.split(",") if part.strip())
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind == "bool":
            if raw.lower() in ("true", "yes", "1"):
                return True
            if raw.lower() in ("false", "no", "0"):
                return False
            raise ValueError(raw)
    except ValueError:
        raise UsageError(f"config key {name}: cannot parse {raw!r}") from None
    return raw


def build_config(args: argparse.Namespace) -> RunConfig:
    config = RunConfig()
    if getattr(args, "config", None):
        path = Path(args.config)
        if not path.is_file():
            raise UsageError(f"config file not found: {path}")
        for key, raw in read_kv_config(path).items():
            if key not in RunConfig.__dataclass_fields__:
                raise UsageError(f"unknown config key {key!r}")
            setattr(config, key, _coerce(key, raw))
    flag_map = {
        "matrix": "matrix_path",
        "timeseries": "timeseries_path",
        "geo": "geo_path",
        "store": "store_path",
        "target": "target_column",
        "min_support": "min_support",
        "alpha": "alpha",
        "max_depth": "max_depth",
        "bins_per_feature": "bins_per_feature",
        "max_merge_run": "max_merge_run",
        "direction": "direction",
        "host": "host",
        "port": "port",
    }
    for flag, field in flag_map.items():
        value = getattr(args, flag, None)
        if value is not None:
            setattr(config, field, value)
    if getattr(args, "no_cors", False):
        config.cors = False
    return config


def _require_file(path: str | None, what: str) -> Path:
    if not path:
        raise UsageError(f"{what} path is required")
    resolved = Path(path)
    if not resolved.is_file():
        raise UsageError(f"{what} file not found: {resolved}")
    return resolved


def _load_inputs(config: RunConfig) -> tuple[PatternStore, DataMatrix]:
    store_path = _require_file(config.store_path, "store")
    matrix_path = _require_file(config.matrix_path, "matrix")
    matrix = load_matrix(matrix_path, config.schema())
    timeseries: TargetTimeSeries | None = None
    if config.timeseries_path:
        series_path = _require_file(config.timeseries_path, "timeseries")
        timeseries = load_timeseries(
            series_path, known_fips=frozenset(matrix.fips_index)
        )
    pattern_set = load(store_path)
    return PatternStore(pattern_set, matrix=matrix, timeseries=timeseries), matrix


def _fmt(value: float | None) -> str:
    return "?" if value is None else format(value, "g")


def cmd_mine(args: argparse.Namespace) -> int:
    config = build_config(args)
    matrix_path = _require_file(config.matrix_path, "matrix")
    if not config.store_path:
        raise UsageError("store path is required")
    matrix = load_matrix(matrix_path, config.schema())
    started = time.monotonic()
    pattern_set = mine(matrix, config.mining())
    runtime = time.monotonic() - started
    save(pattern_set, config.store_path)
    print(
        f"mined {len(pattern_set.patterns)} patterns in {runtime:.1f}s "
        f"-> {config.store_path}"
    )
    if pattern_set.patterns:
        by_depth = Counter(len(p.constraints) for p in pattern_set.patterns)
        depth_text = "  ".join(
            f"depth {d}: {by_depth[d]}" for d in sorted(by_depth)
        )
        means = [p.mean_target for p in pattern_set.patterns]
        print(f"  {depth_text}")
        print(f"  mean_target range: [{_fmt(min(means))}, {_fmt(max(means))}]")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import socket

    import uvicorn

    from .server import create_app

    config = build_config(args)
    store, _ = _load_inputs(config)
    geo_path = None
    if config.geo_path:
        geo_path = _require_file(config.geo_path, "geojson")
    app = create_app(store, geo_path=geo_path, cors=config.cors)
    sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        sock.bind((config.host, config.port))
    except OSError as exc:
        sock.close()
        print(
            f"error: cannot bind {config.host}:{config.port}: {exc}", file=sys.stderr
        )
        return DOMAIN_EXIT
    host, port = sock.getsockname()[:2]
    print(f"serving on http://{host}:{port}", flush=True)
    server_config = uvicorn.Config(
        app, host=config.host, port=config.port, log_level="warning"
    )
    uvicorn.Server(server_config).run(sockets=[sock])
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    config = build_config(args)
    store_path = _require_file(config.store_path, "store")
    series_path = _require_file(config.timeseries_path, "timeseries")
    if args.t0 >= args.t1:
        raise UsageError("t0 must precede t1")
    pattern_set = load(store_path)
    timeseries = load_timeseries(series_path)
    report = evaluate_growth(
        pattern_set, timeseries, args.t0, args.t1, threshold=args.threshold
    )
    if args.json:
        print(json.dumps(report.to_dict(), indent=2))
    else:
        print(report.to_text())
    if args.out:
        Path(args.out).write_text(
            json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8"
        )
    return 0


def _print_pattern(store: PatternStore, pattern_id: str) -> None:
    display = store.pattern_display(pattern_id)
    print(f"pattern {display.pattern_id} (rank {display.rank} of {len(store.patterns)})")
    print(f"  direction: {display.direction}")
    print(
        f"  mean {store.matrix.target_name}: {_fmt(display.mean_target)} "
        f"(US average {_fmt(store.pattern_set.global_target_mean)})"
    )
    print(f"  p-value: {_fmt(display.p_value)}  adjusted: {_fmt(display.p_adjusted)}")
    print(f"  members ({len(display.members)}): {', '.join(display.members)}")
    print("  constraints:")
    for row in display.constraints:
        print(
            f"    {row.feature}: [{_fmt(row.lo)}, {_fmt(row.hi)}] "
            f"of US [{_fmt(row.us_lo)}, {_fmt(row.us_hi)}] "
            f"(weight {row.contribution:.2f})"
        )


def _print_county(store: PatternStore, fips: str) -> None:
    profile = store.county_profile(fips)
    print(f"{profile.name}, {profile.state} ({profile.fips})")
    value = "not reported" if profile.target_value is None else _fmt(profile.target_value)
    print(
        f"  {store.matrix.target_name}: {value} "
        f"(US average {_fmt(store.pattern_set.global_target_mean)})"
    )
    try:
        dates, values = store.county_series(fips)
        curve = ", ".join(_fmt(float(v)) for v in values)
        print(f"  over time {dates[0]}..{dates[-1]}: {curve}")
    except KeyError:
        pass
    if not profile.pattern_ids:
        print("  no risk patterns")
        return
    print(f"  risk patterns ({len(profile.pattern_ids)}):")
    for pid in profile.pattern_ids:
        pattern = store.pattern(pid)
        print(
            f"    rank {store.rank_of(pid)}: {pid} "
            f"mean {_fmt(pattern.mean_target)} "
            f"({len(pattern.constraints)} constraints)"
        )
    print("  top risk factors:")
    for factor in profile.top_risk_factors:
        print(
            f"    {factor.feature}: {_fmt(factor.county_value)} "
            f"in state [{_fmt(factor.state_lo)}, {_fmt(factor.state_hi)}], "
            f"US [{_fmt(factor.us_lo)}, {_fmt(factor.us_hi)}] "
            f"(US average {_fmt(factor.us_average)}, in {factor.pattern_count} patterns)"
        )


def cmd_inspect(args: argparse.Namespace) -> int:
    config = build_config(args)
    store, _ = _load_inputs(config)
    if args.pattern:
        _print_pattern(store, args.pattern)
    else:
        _print_county(store, args.county)
    return 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key = value settings file")
    parser.add_argument("--matrix", help="county/feature CSV path")
    parser.add_argument("--store", help="pattern store JSON path")
    parser.add_argument("--target", help="target column name")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="riskpatterns",
        description="Mine, serve, and inspect county risk patterns.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    mine_p = sub.add_parser("mine", help="mine patterns from a matrix CSV")
    _add_common(mine_p)
    mine_p.add_argument("--min-support", dest="min_support", type=int)
    mine_p.add_argument("--alpha", type=float)
    mine_p.add_argument("--max-depth", dest="max_depth", type=int)
    mine_p.add_argument(
        "--bins-per-feature", dest="bins_per_feature", type=int
    )
    mine_p.add_argument("--max-merge-run", dest="max_merge_run", type=int)
    mine_p.add_argument("--direction", choices=("high", "low", "both"))
    mine_p.set_defaults(handler=cmd_mine)

    serve_p = sub.add_parser("serve", help="serve a mined store over HTTP")
    _add_common(serve_p)
    serve_p.add_argument("--timeseries", help="cumulative series CSV path")
    serve_p.add_argument("--geo", help="county geometry GeoJSON path")
    serve_p.add_argument("--host")
    serve_p.add_argument("--port", type=int)
    serve_p.add_argument("--no-cors", action="store_true")
    serve_p.set_defaults(handler=cmd_serve)

    eval_p = sub.add_parser("evaluate", help="compare member vs national growth")
    _add_common(eval_p)
    eval_p.add_argument("--timeseries", help="cumulative series CSV path")
    eval_p.add_argument("--t0", type=date.fromisoformat, required=True)
    eval_p.add_argument("--t1", type=date.fromisoformat, required=True)
    eval_p.add_argument("--threshold", type=float, default=2.0)
    eval_p.add_argument("--json", action="store_true", help="print JSON, not text")
    eval_p.add_argument("--out", help="also write the JSON report here")
    eval_p.set_defaults(handler=cmd_evaluate)

    inspect_p = sub.add_parser("inspect", help="dump a pattern or county as text")
    _add_common(inspect_p)
    inspect_p.add_argument("--timeseries", help="cumulative series CSV path")
    group = inspect_p.add_mutually_exclusive_group(required=True)
    group.add_argument("--pattern", help="pattern id to dump")
    group.add_argument("--county", help="county FIPS to dump")
    inspect_p.set_defaults(handler=cmd_inspect)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except (RiskPatternsError, KeyError) as exc:
        message = exc.args[0] if exc.args else exc
        print(f"error: {message}", file=sys.stderr)
        return DOMAIN_EXIT
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DOMAIN_EXIT


if __name__ == "__main__":
    sys.exit(main())
