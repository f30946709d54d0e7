"""Read-only VOD HTTP API over a frame store.

Serves shot listings, per-frame BMP images (by index, by time, sampled) and
the synthesized AVI with byte-range support. Only complete shots are
visible; the catalog journal is re-read on each request so shots finished
by a concurrently running daemon appear without a restart.
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from shotvod import frame_store
from shotvod.errors import IndexOutOfRange, InvalidStride, UnknownShot
from shotvod.imaging import encode_bmp
from shotvod.types import CameraId, ShotRecord

SCHEMA_VERSION = "1"
DEFAULT_LIMIT = 50


def _json(payload: dict, status_code: int = 200) -> JSONResponse:
    return JSONResponse({"schema_version": SCHEMA_VERSION, **payload}, status_code=status_code)


def _error(status_code: int, detail: str, **extra) -> JSONResponse:
    return _json({"detail": detail, **extra}, status_code=status_code)


def _summary(store: frame_store.FrameStore, rec: ShotRecord) -> dict:
    return {
        "shot_id": rec.shot_id,
        "camera_id": rec.camera_id.value,
        "length_s": rec.length_s,
        "frame_count": rec.frame_count,
        "size_bytes": rec.size_bytes,
        "has_video": store.has_video(rec.shot_id, rec.camera_id),
    }


def _parse_range(header: str, size: int) -> Optional[tuple[int, int]]:
    if not header.startswith("bytes="):
        return None
    spec = header[len("bytes="):].strip()
    if "," in spec or "-" not in spec:
        return None
    first, _, last = spec.partition("-")
    try:
        if first == "":
            n = int(last)
            if n < 1:
                return None
            start, end = max(0, size - n), size - 1
        else:
            start = int(first)
            end = int(last) if last else size - 1
    except ValueError:
        return None
    if start > end or start >= size:
        return None
    return start, min(end, size - 1)


def create_app(store_root, cors_origin: Optional[str] = None) -> FastAPI:
    store_root = Path(store_root)
    store = frame_store.open_store(store_root, create_if_missing=True)
    app = FastAPI(title="shotvod", version="0.1.0")
    app.state.store = store

    if cors_origin:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=[cors_origin],
            allow_methods=["GET"],
            allow_headers=["*"],
        )

    def fresh_store() -> frame_store.FrameStore:
        store.refresh()
        return store

    def resolve(shot_id: int, camera: str):
        """Returns (record, camera) for a complete shot, or an error response."""
        try:
            cam = CameraId(camera)
        except ValueError:
            return None, _error(404, f"unknown camera {camera!r}")
        s = fresh_store()
        try:
            rec = s.get_record(shot_id, cam)
        except UnknownShot:
            return None, _error(404, f"unknown shot {shot_id}/{camera}")
        if rec.status != "complete":
            return None, _error(404, f"shot {shot_id}/{camera} not available", status=rec.status)
        return (rec, cam), None

    def frame_response(shot_id: int, cam: CameraId, index: int) -> Response:
        frame, t = store.get_frame(shot_id, cam, index)
        return Response(
            content=encode_bmp(frame),
            media_type="image/bmp",
            headers={"X-Frame-Index": str(index), "X-Frame-Time": repr(t)},
        )

    @app.get("/api/health")
    def health():
        if not store_root.is_dir() or not os.access(store_root, os.R_OK):
            return _error(503, f"store {store_root} unavailable")
        s = fresh_store()
        return _json({
            "status": "ok",
            "store_path": str(store_root),
            "shots": len(s.list_shots(status="complete")),
        })

    @app.get("/api/shots")
    def list_shots(
        request: Request,
        camera: Optional[str] = None,
        limit: Optional[str] = None,
    ):
        params = request.query_params

        def int_param(name: str) -> Optional[int]:
            raw = params.get(name)
            if raw is None or raw == "":
                return None
            return int(raw)

        try:
            shot_from = int_param("from")
            shot_to = int_param("to")
            n_limit = int_param("limit")
        except ValueError:
            return _error(400, "from/to/limit must be integers")
        cam = None
        if camera:
            try:
                cam = CameraId(camera)
            except ValueError:
                return _error(400, f"unknown camera {camera!r}")
        s = fresh_store()
        records = s.list_shots(shot_from, shot_to, cam, status="complete")
        records = records[: n_limit if n_limit is not None else DEFAULT_LIMIT]
        return _json({"shots": [_summary(s, r) for r in records]})

    @app.get("/api/shots/{shot_id}/{camera}")
    def shot_summary(shot_id: int, camera: str):
        resolved, err = resolve(shot_id, camera)
        if err is not None:
            return err
        rec, _ = resolved
        return _json(_summary(store, rec))

    @app.get("/api/shots/{shot_id}/{camera}/frames")
    def sampled_frames(shot_id: int, camera: str, stride: str = "1"):
        resolved, err = resolve(shot_id, camera)
        if err is not None:
            return err
        _, cam = resolved
        try:
            k = int(stride)
        except ValueError:
            return _error(400, f"stride must be an integer, got {stride!r}")
        if k < 1:
            return _error(400, f"stride must be >= 1, got {k}")
        try:
            indices = store.sampled_indices(shot_id, cam, k)
        except InvalidStride:
            return _error(400, f"stride must be >= 1, got {k}")
        times = store.times(shot_id, cam)
        return _json({"frames": [{"index": i, "time_s": times[i]} for i in indices]})

    @app.get("/api/shots/{shot_id}/{camera}/frames/{index}")
    def frame_by_index(shot_id: int, camera: str, index: int):
        resolved, err = resolve(shot_id, camera)
        if err is not None:
            return err
        _, cam = resolved
        try:
            return frame_response(shot_id, cam, index)
        except IndexOutOfRange:
            return _error(416, f"frame index {index} out of range")

    @app.get("/api/shots/{shot_id}/{camera}/frame_at")
    def frame_by_time(shot_id: int, camera: str, t: str = ""):
        resolved, err = resolve(shot_id, camera)
        if err is not None:
            return err
        _, cam = resolved
        try:
            seconds = float(t)
        except ValueError:
            return _error(400, f"t must be decimal seconds, got {t!r}")
        index, _ = store.frame_at_time(shot_id, cam, seconds)
        return frame_response(shot_id, cam, index)

    @app.get("/api/shots/{shot_id}/{camera}/video")
    def video(shot_id: int, camera: str, request: Request):
        resolved, err = resolve(shot_id, camera)
        if err is not None:
            return err
        _, cam = resolved
        path = store.video_path(shot_id, cam)
        if not path.exists():
            return _error(404, f"no video for shot {shot_id}/{camera}")
        size = path.stat().st_size
        headers = {"Accept-Ranges": "bytes"}
        range_header = request.headers.get("range")
        rng = _parse_range(range_header, size) if range_header else None
        with open(path, "rb") as fh:
            if rng is None:
                data = fh.read()
                return Response(data, media_type="video/x-msvideo", headers=headers)
            start, end = rng
            fh.seek(start)
            data = fh.read(end - start + 1)
        headers["Content-Range"] = f"bytes {start}-{end}/{size}"
        return Response(data, status_code=206, media_type="video/x-msvideo", headers=headers)

    return app
