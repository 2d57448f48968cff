"""File-backed catalog of videos, keyframes, features and trajectories.

Layout under the catalog root:

    meta             format version string ("clipseek-catalog/1")
    journal.ndjson   one JSON record per line, append-only
    blobs/<i_id>.pgm stored keyframe images (30x30 gray)
    stats.json       retrieval scaling stats (owned by the retrieval module)

A registration appends its keyframe lines first and its video line last;
the video line is the commit marker. Replay stages keyframes until their
owning video line arrives, so a crash mid-append leaves only uncommitted
lines, which load quarantines instead of surfacing. Blob and meta writes
go through temp-file + rename.

Single writer, many readers: registration builds fresh record maps and
swaps them in atomically, so a reader holding a snapshot never observes a
half-registered video.
"""

from __future__ import annotations

import errno
import json
import logging
import os
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import features, motion, range_index, raster
from .errors import (
    CorruptJournal,
    EmptySequence,
    NameTooLong,
    NoMotion,
    NotFound,
    StorageFull,
    TooFewKeyframes,
)
from .keyframe import DEFAULT_THRESHOLD, FrameSeq, extract_keyframes

log = logging.getLogger(__name__)

FORMAT_VERSION = "clipseek-catalog/1"
V_NAME_MAX = 60
I_NAME_MAX = 40


@dataclass(frozen=True)
class PipelineConfig:
    """Knobs shared by registration and query featurization."""

    keyframe_threshold: float = DEFAULT_THRESHOLD
    glcm_step: int = 1
    correlation_mode: str = "paper"
    motion_diff_threshold: int = motion.DIFF_THRESHOLD
    region_min_area_frac: float = 0.05


@dataclass(frozen=True)
class KeyframeRecord:
    i_id: int
    i_name: str
    image_path: str             # catalog-root relative, e.g. "blobs/7.pgm"
    min: int
    max: int
    sch: str
    glcm: str
    edgedensity: str
    majorregions: int
    v_id: int


@dataclass(frozen=True)
class VideoRecord:
    v_id: int
    v_name: str
    frame_dir: str
    keyframe_ids: tuple[int, ...]
    trajectory: motion.Trajectory | None
    dostore: str                # ISO-8601 UTC


@dataclass(frozen=True)
class KeyframeFeatures:
    """Featurization output for one keyframe raster pair."""

    sch: str
    glcm: str
    edgedensity: str
    majorregions: int
    bucket: range_index.RangeBucket


@dataclass(frozen=True)
class CatalogState:
    """One immutable snapshot of the record maps and the bucket table.

    Registration builds a fresh state and swaps it in with a single
    assignment, so a reader holding a snapshot never sees a video without
    its keyframes or a bucket entry without its record.
    """

    videos: dict[int, VideoRecord]
    keyframes: dict[int, KeyframeRecord]
    bucket_table: range_index.BucketTable

    @property
    def revision(self) -> tuple[int, int]:
        return (len(self.videos), len(self.keyframes))


def featurize_keyframe(
    rgb: np.ndarray, gray: np.ndarray, config: PipelineConfig
) -> KeyframeFeatures:
    """Compute and serialize every descriptor for one 30x30 keyframe."""
    sch = features.serialize_histogram(features.color_histogram(rgb))
    glcm = features.serialize_glcm(
        features.glcm_features(gray, step=config.glcm_step,
                               correlation_mode=config.correlation_mode)
    )
    edge = features.serialize_edge(features.edge_density(gray))
    regions = features.major_regions(rgb, min_area_frac=config.region_min_area_frac)
    bucket = range_index.assign_bucket(raster.gray_histogram(gray))
    return KeyframeFeatures(
        sch=sch, glcm=glcm, edgedensity=edge, majorregions=regions, bucket=bucket
    )


def _storage_guard(exc: OSError) -> Exception:
    if exc.errno in (errno.ENOSPC, errno.EDQUOT):
        return StorageFull(str(exc))
    return exc


def _atomic_write(path: Path, data: bytes) -> None:
    tmp = path.with_name(path.name + ".tmp")
    try:
        tmp.write_bytes(data)
        os.replace(tmp, path)
    except OSError as exc:
        raise _storage_guard(exc) from exc


class Catalog:
    """Open catalog handle: in-memory record maps plus the on-disk journal."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.journal_path = self.root / "journal.ndjson"
        self.blobs_dir = self.root / "blobs"
        self.meta_path = self.root / "meta"
        self.stats_path = self.root / "stats.json"
        self._state = CatalogState(
            videos={}, keyframes={}, bucket_table=range_index.BucketTable()
        )
        self.quarantined: list[tuple[int, str]] = []
        self._write_lock = threading.Lock()
        self._load()

    # -- loading -----------------------------------------------------------

    def _load(self) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        self.blobs_dir.mkdir(exist_ok=True)
        if self.meta_path.exists():
            version = self.meta_path.read_text(encoding="utf-8").strip()
            if version != FORMAT_VERSION:
                raise CorruptJournal(f"unknown catalog format {version!r}")
        elif self.journal_path.exists() and self.journal_path.stat().st_size > 0:
            raise CorruptJournal("journal present but meta header missing")
        else:
            _atomic_write(self.meta_path, (FORMAT_VERSION + "\n").encode("utf-8"))
        if self.journal_path.exists():
            self._replay()

    def _replay(self) -> None:
        pending: dict[int, list[KeyframeRecord]] = {}
        with self.journal_path.open("r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                    kind = rec.get("kind")
                    if kind == "keyframe":
                        kf = self._validate_keyframe(rec)
                        pending.setdefault(kf.v_id, []).append(kf)
                    elif kind == "video":
                        video = self._validate_video(rec, pending)
                        self._commit(video, pending.pop(video.v_id, []))
                    else:
                        raise ValueError(f"unknown record kind {kind!r}")
                except Exception as exc:
                    self.quarantined.append((lineno, str(exc)))
                    log.warning("quarantined journal line %d: %s", lineno, exc)
        for v_id, kfs in pending.items():
            self.quarantined.append(
                (0, f"uncommitted registration for v_id {v_id} ({len(kfs)} keyframes)")
            )

    def _validate_keyframe(self, rec: dict) -> KeyframeRecord:
        kf = KeyframeRecord(
            i_id=int(rec["i_id"]),
            i_name=str(rec["i_name"]),
            image_path=str(rec["image"]),
            min=int(rec["min"]),
            max=int(rec["max"]),
            sch=str(rec["sch"]),
            glcm=str(rec["glcm"]),
            edgedensity=str(rec["edgedensity"]),
            majorregions=int(rec["majorregions"]),
            v_id=int(rec["v_id"]),
        )
        if kf.i_id in self._state.keyframes:
            raise ValueError(f"duplicate i_id {kf.i_id}")
        if not kf.i_name or len(kf.i_name) > I_NAME_MAX:
            raise ValueError(f"bad i_name {kf.i_name!r}")
        if not range_index.is_tree_node((kf.min, kf.max)):
            raise ValueError(f"({kf.min},{kf.max}) is not an index bucket")
        if kf.majorregions < 0:
            raise ValueError("negative majorregions")
        features.parse_histogram(kf.sch)
        features.parse_glcm(kf.glcm)
        features.parse_edge(kf.edgedensity)
        if not (self.root / kf.image_path).is_file():
            raise ValueError(f"missing blob {kf.image_path}")
        return kf

    def _validate_video(
        self, rec: dict, pending: dict[int, list[KeyframeRecord]]
    ) -> VideoRecord:
        traj = rec.get("trajectory")
        trajectory = (
            motion.Trajectory(
                points=tuple((float(x), float(y)) for x, y in traj), source="derived"
            )
            if traj
            else None
        )
        video = VideoRecord(
            v_id=int(rec["v_id"]),
            v_name=str(rec["v_name"]),
            frame_dir=str(rec.get("frame_dir", "")),
            keyframe_ids=tuple(int(i) for i in rec["keyframe_ids"]),
            trajectory=trajectory,
            dostore=str(rec["dostore"]),
        )
        if video.v_id in self._state.videos:
            raise ValueError(f"duplicate v_id {video.v_id}")
        if not video.v_name or len(video.v_name) > V_NAME_MAX:
            raise ValueError(f"bad v_name {video.v_name!r}")
        staged = {kf.i_id for kf in pending.get(video.v_id, [])}
        missing = set(video.keyframe_ids) - staged
        if missing:
            raise ValueError(f"video {video.v_id} references unstaged keyframes {sorted(missing)}")
        return video

    def _commit(self, video: VideoRecord, kfs: list[KeyframeRecord]) -> None:
        state = self._state
        videos = dict(state.videos)
        keyframes = dict(state.keyframes)
        table = state.bucket_table.copy()
        videos[video.v_id] = video
        for kf in kfs:
            keyframes[kf.i_id] = kf
            table.insert(kf.i_id, (kf.min, kf.max))
        self._state = CatalogState(
            videos=videos, keyframes=keyframes, bucket_table=table
        )

    # -- queries -----------------------------------------------------------

    def snapshot(self) -> CatalogState:
        """Consistent point-in-time view; safe to use across a whole query."""
        return self._state

    @property
    def bucket_table(self) -> range_index.BucketTable:
        return self._state.bucket_table

    @property
    def revision(self) -> tuple[int, int]:
        """Changes whenever records change; keys the scaling-stats cache."""
        return self._state.revision

    def videos(self) -> list[VideoRecord]:
        state = self._state
        return [state.videos[v] for v in sorted(state.videos)]

    def keyframes(self) -> list[KeyframeRecord]:
        state = self._state
        return [state.keyframes[i] for i in sorted(state.keyframes)]

    def get_video(self, v_id: int) -> VideoRecord:
        try:
            return self._state.videos[v_id]
        except KeyError:
            raise NotFound(f"video {v_id} not found") from None

    def get_keyframe(self, i_id: int) -> KeyframeRecord:
        try:
            return self._state.keyframes[i_id]
        except KeyError:
            raise NotFound(f"keyframe {i_id} not found") from None

    def keyframe_blob(self, i_id: int) -> bytes:
        return (self.root / self.get_keyframe(i_id).image_path).read_bytes()

    def __len__(self) -> int:
        return len(self._state.videos)

    # -- registration ------------------------------------------------------

    def register_video(
        self,
        name: str,
        frames: FrameSeq,
        config: PipelineConfig | None = None,
    ) -> VideoRecord:
        """Run the full pipeline and atomically append one video's records."""
        config = config or PipelineConfig()
        if not name:
            raise NameTooLong("video name must be non-empty")
        if len(name) > V_NAME_MAX:
            raise NameTooLong(f"video name exceeds {V_NAME_MAX} chars")
        if not frames.frames:
            raise EmptySequence("no frames to register")

        selection = extract_keyframes(frames, threshold=config.keyframe_threshold)
        selected = [frames.frames[i] for i in selection.indices]
        trajectory = derive_trajectory_or_none(
            [f.gray for f in selected], config.motion_diff_threshold
        )

        with self._write_lock:
            v_id = max(self._state.videos, default=0) + 1
            next_i = max(self._state.keyframes, default=0) + 1
            kf_records = []
            for offset, frame in enumerate(selected):
                i_id = next_i + offset
                feat = featurize_keyframe(frame.rgb, frame.gray, config)
                kf_records.append(
                    KeyframeRecord(
                        i_id=i_id,
                        i_name=_clip_name(frame.name),
                        image_path=f"blobs/{i_id}.pgm",
                        min=feat.bucket[0],
                        max=feat.bucket[1],
                        sch=feat.sch,
                        glcm=feat.glcm,
                        edgedensity=feat.edgedensity,
                        majorregions=feat.majorregions,
                        v_id=v_id,
                    )
                )
            video = VideoRecord(
                v_id=v_id,
                v_name=name,
                frame_dir=frames.source_dir,
                keyframe_ids=tuple(kf.i_id for kf in kf_records),
                trajectory=trajectory,
                dostore=datetime.now(timezone.utc).isoformat(),
            )
            written: list[Path] = []
            try:
                for kf, frame in zip(kf_records, selected):
                    blob = self.root / kf.image_path
                    _atomic_write(blob, raster.encode_pgm(frame.gray))
                    written.append(blob)
                self._append_block(
                    [_keyframe_line(kf) for kf in kf_records] + [_video_line(video)]
                )
            except Exception:
                for blob in written:
                    blob.unlink(missing_ok=True)
                raise
            self._commit(video, kf_records)
        return video

    def _append_block(self, lines: list[str]) -> None:
        data = "".join(line + "\n" for line in lines).encode("utf-8")
        try:
            with self.journal_path.open("ab") as fh:
                fh.write(data)
                fh.flush()
                os.fsync(fh.fileno())
        except OSError as exc:
            raise _storage_guard(exc) from exc


def derive_trajectory_or_none(
    grays: list[np.ndarray], diff_threshold: int
) -> motion.Trajectory | None:
    """Trajectory for the keyframe list, or None when it cannot exist."""
    try:
        return motion.derive_video_trajectory(grays, diff_threshold=diff_threshold)
    except (TooFewKeyframes, NoMotion):
        return None


def _clip_name(name: str) -> str:
    base = name.rsplit("/", 1)[-1] or "frame"
    return base[-I_NAME_MAX:]


def _keyframe_line(kf: KeyframeRecord) -> str:
    return json.dumps(
        {
            "kind": "keyframe",
            "i_id": kf.i_id,
            "i_name": kf.i_name,
            "image": kf.image_path,
            "min": kf.min,
            "max": kf.max,
            "sch": kf.sch,
            "glcm": kf.glcm,
            "edgedensity": kf.edgedensity,
            "majorregions": kf.majorregions,
            "v_id": kf.v_id,
        },
        separators=(",", ":"),
    )


def _video_line(video: VideoRecord) -> str:
    return json.dumps(
        {
            "kind": "video",
            "v_id": video.v_id,
            "v_name": video.v_name,
            "frame_dir": video.frame_dir,
            "keyframe_ids": list(video.keyframe_ids),
            "trajectory": [[x, y] for x, y in video.trajectory.points]
            if video.trajectory
            else None,
            "dostore": video.dostore,
        },
        separators=(",", ":"),
    )


def load_catalog(root: str | Path) -> Catalog:
    """Open (or create) the catalog at `root`, replaying its journal."""
    return Catalog(root)
