"""Read-only HTTP API over a pattern store, dataset, and county geometry.

All /api responses share one envelope::

    {"status": "ok", "data": ...}
    {"status": "error", "error": {"code": ..., "message": ...}}

The service holds no mutable state: everything is derived from the
PatternStore handed to create_app, so any sequence of GETs returns
identical responses for identical requests.
"""

from __future__ import annotations

import dataclasses
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.middleware.gzip import GZipMiddleware
from fastapi.responses import FileResponse, JSONResponse
from starlette.exceptions import HTTPException as StarletteHTTPException

from .patternstore import PatternStore

GEOJSON_MEDIA_TYPE = "application/geo+json"
GEOJSON_CACHE_CONTROL = "public, max-age=86400"


def _ok(data) -> dict:
    return {"status": "ok", "data": data}


def _error(status_code: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(
        status_code=status_code,
        content={"status": "error", "error": {"code": code, "message": message}},
    )


def create_app(
    store: PatternStore,
    geo_path: str | Path | None = None,
    cors: bool = True,
) -> FastAPI:
    """Build the application. A configured-but-missing geometry file is a
    startup error; an unconfigured one turns /geo/counties.geojson into 404.
    """
    if geo_path is not None:
        geo_path = Path(geo_path)
        if not geo_path.is_file():
            raise FileNotFoundError(f"county geometry file not found: {geo_path}")

    app = FastAPI(title="riskpatterns", docs_url=None, redoc_url=None)
    app.add_middleware(GZipMiddleware, minimum_size=512)
    if cors:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=["*"],
            allow_methods=["GET"],
            allow_headers=["*"],
        )

    matrix = store.matrix
    date_axis = (
        [d.isoformat() for d in store.timeseries.dates] if store.timeseries else []
    )

    @app.exception_handler(KeyError)
    async def _unknown_key(request: Request, exc: KeyError) -> JSONResponse:
        return _error(404, "not_found", str(exc.args[0]) if exc.args else "not found")

    @app.exception_handler(StarletteHTTPException)
    async def _http_error(request: Request, exc: StarletteHTTPException) -> JSONResponse:
        code = "not_found" if exc.status_code == 404 else "http_error"
        return _error(exc.status_code, code, str(exc.detail))

    @app.exception_handler(RequestValidationError)
    async def _bad_request(request: Request, exc: RequestValidationError) -> JSONResponse:
        return _error(422, "invalid_request", str(exc))

    @app.get("/api/meta")
    async def meta() -> dict:
        return _ok(
            {
                "target_name": matrix.target_name,
                "global_target_mean": store.pattern_set.global_target_mean,
                "pattern_count": len(store.patterns),
                "dataset_fingerprint": store.pattern_set.dataset_fingerprint,
                "date_axis": date_axis,
            }
        )

    @app.get("/api/counties")
    async def counties() -> dict:
        rows = []
        for i, county in enumerate(matrix.counties):
            value = float(matrix.target[i])
            rows.append(
                {
                    "fips": county.fips,
                    "name": county.name,
                    "state": county.state,
                    "target_value": None if value != value else value,
                }
            )
        return _ok(rows)

    @app.get("/api/counties/{fips}")
    async def county(fips: str) -> dict:
        return _ok(dataclasses.asdict(store.county_profile(fips)))

    @app.get("/api/patterns")
    async def patterns() -> dict:
        return _ok(
            [
                {
                    "pattern_id": p.pattern_id,
                    "rank": rank,
                    "mean_target": p.mean_target,
                    "constraint_count": len(p.constraints),
                }
                for rank, p in enumerate(store.patterns, start=1)
            ]
        )

    @app.get("/api/patterns/{pattern_id}")
    async def pattern(pattern_id: str) -> dict:
        return _ok(dataclasses.asdict(store.pattern_display(pattern_id)))

    @app.get("/api/timeseries/{fips}")
    async def timeseries(fips: str) -> dict:
        dates, values = store.county_series(fips)
        return _ok({"dates": list(dates), "values": [float(v) for v in values]})

    @app.get("/geo/counties.geojson")
    async def geojson() -> FileResponse:
        if geo_path is None:
            raise KeyError("no county geometry configured")
        return FileResponse(
            geo_path,
            media_type=GEOJSON_MEDIA_TYPE,
            headers={"Cache-Control": GEOJSON_CACHE_CONTROL},
        )

    return app
