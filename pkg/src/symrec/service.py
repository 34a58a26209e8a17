"""HTTP classification service.

One worker process serves ``POST /classify``: the body carries a
recording in the wire format plus an optional ``k``, the response is a
JSON list of at most 10 single-entry objects mapping the symbol id (as
a string key) to its probability, ordered descending by probability::

    [{"31":0.88842893496419},
     {"1":0.10999419040225}]

``GET /health`` reports the loaded classifier's identity and uptime,
``GET /symbols`` the id-to-command table, and ``POST /reload`` re-reads
the bundle file so a retrained model can be swapped in without a
restart.  Requests never mutate the loaded bundle: handlers read one
shared immutable snapshot and reload swaps it atomically, so identical
requests against the same bundle yield identical responses.

A static frontend directory, when present, is served under ``/ui``.
"""

from __future__ import annotations

import json
import time
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .errors import SymrecError
from .pipeline import ClassifierBundle, load_bundle
from .recording import parse_recording

__all__ = ["create_app", "DEFAULT_MAX_BODY_BYTES"]

DEFAULT_MAX_BODY_BYTES = 1_000_000
DEFAULT_STATIC_DIR = Path(__file__).resolve().parents[2] / "frontend" / "dist"


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse({"error": message}, status_code=status)


def create_app(
    bundle_path=None,
    bundle: ClassifierBundle | None = None,
    max_body_bytes: int = DEFAULT_MAX_BODY_BYTES,
    cors_origins: list[str] | None = None,
    static_dir=None,
) -> FastAPI:
    """Build the service app around one classifier bundle.

    Pass ``bundle_path`` for a reloadable file-backed classifier or a
    ready ``bundle`` object (tests); with neither, the service starts
    degraded and answers classification requests with 503.
    """
    app = FastAPI(title="symrec classification service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=cors_origins or ["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    state = {
        "bundle": bundle,
        "path": Path(bundle_path) if bundle_path else None,
        "started": time.monotonic(),
        "hash": bundle.content_hash() if bundle is not None else None,
    }
    if state["bundle"] is None and state["path"] is not None:
        loaded = load_bundle(state["path"])
        state["bundle"] = loaded
        state["hash"] = loaded.content_hash()

    @app.get("/health")
    def health():
        current = state["bundle"]
        if current is None:
            return {"status": "degraded", "model": None, "uptime_s": _uptime()}
        info = current.describe()
        info["hash"] = state["hash"]
        return {"status": "ok", "model": info, "uptime_s": _uptime()}

    def _uptime() -> float:
        return round(time.monotonic() - state["started"], 3)

    @app.get("/symbols")
    def symbols():
        current = state["bundle"]
        if current is None or current.symbols is None:
            return _error(503, "no model loaded")
        return {str(i): c for i, c in sorted(current.symbols.to_dict().items())}

    @app.post("/reload")
    def reload_bundle():
        if state["path"] is None:
            return _error(409, "service was not started from a bundle file")
        try:
            fresh = load_bundle(state["path"])
        except (SymrecError, OSError) as exc:
            return _error(500, f"reload failed: {exc}")
        state["bundle"] = fresh
        state["hash"] = fresh.content_hash()
        return {"status": "reloaded", "hash": state["hash"]}

    @app.post("/classify")
    async def classify(request: Request):
        current = state["bundle"]
        if current is None:
            return _error(503, "no model loaded")
        body = await request.body()
        if len(body) > max_body_bytes:
            return _error(413, f"request body exceeds {max_body_bytes} bytes")
        try:
            payload = json.loads(body)
        except (json.JSONDecodeError, UnicodeDecodeError):
            return _error(400, "request body is not valid JSON")
        if not isinstance(payload, dict) or "recording" not in payload:
            return _error(400, "expected an object with a 'recording' field")
        k = payload.get("k", 10)
        if not isinstance(k, int) or isinstance(k, bool) or k < 1:
            return _error(400, "'k' must be a positive integer")
        try:
            rec = parse_recording(json.dumps(payload["recording"]))
        except SymrecError as exc:
            return _error(400, f"bad recording: {exc}")
        try:
            ranked = current.classify(rec, k=min(k, 10))
        except SymrecError as exc:
            return _error(500, f"classification failed: {exc}")
        return [{str(symbol_id): probability} for symbol_id, probability in ranked]

    static = Path(static_dir) if static_dir is not None else DEFAULT_STATIC_DIR
    if static.is_dir():
        app.mount("/ui", StaticFiles(directory=static, html=True), name="ui")

    return app
