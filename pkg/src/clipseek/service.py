"""HTTP transport for registration, clip search, sketch search and browsing.

Every endpoint body is the corresponding library call's output serialized;
the service adds no retrieval logic of its own. Errors always carry a
machine code from the closed enum plus a human message, never a traceback.
"""

from __future__ import annotations

import shutil
import tarfile
import tempfile
import zipfile
from pathlib import Path

from fastapi import FastAPI, Form, Request, UploadFile
from fastapi.responses import JSONResponse, Response

from .catalog import Catalog, PipelineConfig
from .errors import BadCoordinates, ClipseekError, EmptyDirectory, NameTooLong
from .keyframe import ingest_frames
from .motion import motion_rank, sketch_from_points
from .retrieval import SearchConfig, search_by_clip

DEFAULT_FRAME_CAP = 2000

_STATUS_BY_CODE = {
    "EmptyArchive": 400,
    "ArchiveTooLarge": 400,
    "NameTooLong": 400,
    "BadCoordinates": 400,
    "DegeneratePolyline": 400,
    "MalformedImage": 400,
    "UnsupportedFormat": 400,
    "EmptySequence": 400,
    "NoDecodableFrames": 422,
    "NotFound": 404,
}


class EmptyArchive(ClipseekError):
    code = "EmptyArchive"


class ArchiveTooLarge(ClipseekError):
    code = "ArchiveTooLarge"


class NoDecodableFrames(ClipseekError):
    code = "NoDecodableFrames"


def _error_response(code: str, message: str) -> JSONResponse:
    status = _STATUS_BY_CODE.get(code, 500)
    return JSONResponse(status_code=status, content={"code": code, "message": message})


def _safe_members(names: list[str]) -> list[str]:
    out = []
    for name in names:
        p = Path(name)
        if name.endswith("/") or p.is_absolute() or ".." in p.parts:
            continue
        out.append(name)
    return out


def _unpack_archive(data: bytes, staging: Path, frame_cap: int) -> int:
    """Extract a zip or tar archive of frames into `staging`; returns the
    number of file entries written."""
    blob = staging / "_upload.bin"
    blob.write_bytes(data)
    frames_dir = staging / "frames"
    frames_dir.mkdir()
    written = 0
    if zipfile.is_zipfile(blob):
        with zipfile.ZipFile(blob) as zf:
            names = _safe_members([i.filename for i in zf.infolist() if not i.is_dir()])
            if len(names) > frame_cap:
                raise ArchiveTooLarge(f"{len(names)} entries exceed cap {frame_cap}")
            for name in names:
                dest = frames_dir / name
                dest.parent.mkdir(parents=True, exist_ok=True)
                dest.write_bytes(zf.read(name))
                written += 1
    else:
        try:
            with tarfile.open(blob, mode="r:*") as tf:
                members = [m for m in tf.getmembers() if m.isfile()]
                names = set(_safe_members([m.name for m in members]))
                if len(names) > frame_cap:
                    raise ArchiveTooLarge(f"{len(names)} entries exceed cap {frame_cap}")
                for m in members:
                    if m.name not in names:
                        continue
                    dest = frames_dir / m.name
                    dest.parent.mkdir(parents=True, exist_ok=True)
                    fh = tf.extractfile(m)
                    if fh is None:
                        continue
                    dest.write_bytes(fh.read())
                    written += 1
        except tarfile.TarError:
            raise EmptyArchive("upload is neither a zip nor a tar archive") from None
    if written == 0:
        raise EmptyArchive("archive contains no files")
    return written


def _ingest_upload(data: bytes, frame_cap: int):
    staging = Path(tempfile.mkdtemp(prefix="clipseek-upload-"))
    try:
        _unpack_archive(data, staging, frame_cap)
        try:
            return ingest_frames(staging / "frames"), staging
        except EmptyDirectory:
            raise NoDecodableFrames("no decodable frames in archive") from None
    except Exception:
        shutil.rmtree(staging, ignore_errors=True)
        raise


def create_app(
    catalog_root: str | Path,
    cors_origin: str | None = None,
    frame_cap: int = DEFAULT_FRAME_CAP,
    search_defaults: SearchConfig | None = None,
    pipeline: PipelineConfig | None = None,
) -> FastAPI:
    app = FastAPI(title="clipseek", version="0.1.0")
    cat = Catalog(catalog_root)
    defaults = search_defaults or SearchConfig()
    pipe = pipeline or defaults.pipeline

    if cors_origin:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=[cors_origin],
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(ClipseekError)
    async def _clipseek_error(_req: Request, exc: ClipseekError):
        return _error_response(exc.code, str(exc))

    @app.exception_handler(Exception)
    async def _unexpected_error(_req: Request, exc: Exception):
        return _error_response("Internal", "internal error")

    @app.post("/videos", status_code=201)
    async def register(archive: UploadFile, name: str = Form(...)):
        if not name:
            raise NameTooLong("name must be non-empty")
        if len(name) > 60:
            raise NameTooLong("name exceeds 60 characters")
        frames, staging = _ingest_upload(await archive.read(), frame_cap)
        try:
            record = cat.register_video(name, frames, pipe)
        finally:
            shutil.rmtree(staging, ignore_errors=True)
        return {
            "v_id": record.v_id,
            "name": record.v_name,
            "keyframe_count": len(record.keyframe_ids),
        }

    @app.post("/search")
    async def search(
        archive: UploadFile,
        k: int = Form(defaults.k),
        max_distance: float | None = Form(None),
    ):
        frames, staging = _ingest_upload(await archive.read(), frame_cap)
        try:
            config = SearchConfig(
                k=k,
                min_candidates=defaults.min_candidates,
                max_distance=max_distance,
                aggregator=defaults.aggregator,
                weights=defaults.weights,
                pipeline=pipe,
            )
            result = search_by_clip(cat, frames, config)
        finally:
            shutil.rmtree(staging, ignore_errors=True)
        return {
            "results": [
                {
                    "v_id": e.v_id,
                    "v_name": cat.get_video(e.v_id).v_name,
                    "distance": e.distance,
                    "thumbnail_url": f"/keyframes/{e.best_catalog_kf}/image",
                }
                for e in result.entries
            ],
            "timings": {
                "retrieval_ms": result.retrieval_s * 1000.0,
                "matching_ms": result.matching_s * 1000.0,
            },
        }

    @app.post("/search/motion")
    async def search_motion(payload: dict):
        points = payload.get("points")
        if not isinstance(points, list) or len(points) < 2:
            raise BadCoordinates("need at least 2 sketch points")
        sketch = sketch_from_points(points)
        ranked = motion_rank(
            sketch, [(v.v_id, v.trajectory) for v in cat.videos()]
        )
        return {
            "results": [
                {"v_id": v_id, "v_name": cat.get_video(v_id).v_name, "score": score}
                for v_id, score in ranked
            ]
        }

    @app.get("/videos")
    async def list_videos(limit: int = 50, offset: int = 0):
        videos = cat.videos()
        page = videos[offset : offset + limit]
        return {
            "videos": [
                {
                    "v_id": v.v_id,
                    "v_name": v.v_name,
                    "keyframe_count": len(v.keyframe_ids),
                    "dostore": v.dostore,
                }
                for v in page
            ],
            "total": len(videos),
        }

    @app.get("/videos/{v_id}")
    async def video_detail(v_id: int):
        v = cat.get_video(v_id)
        return {
            "v_id": v.v_id,
            "v_name": v.v_name,
            "dostore": v.dostore,
            "has_trajectory": v.trajectory is not None,
            "keyframes": [
                {
                    "i_id": kf.i_id,
                    "i_name": kf.i_name,
                    "bucket": [kf.min, kf.max],
                    "majorregions": kf.majorregions,
                    "thumbnail_url": f"/keyframes/{kf.i_id}/image",
                }
                for kf in (cat.get_keyframe(i) for i in v.keyframe_ids)
            ],
        }

    @app.get("/keyframes/{i_id}/image")
    async def keyframe_image(i_id: int):
        blob = cat.keyframe_blob(i_id)
        return Response(content=blob, media_type="image/x-portable-graymap")

    app.state.catalog = cat
    return app
