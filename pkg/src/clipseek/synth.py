"""Synthetic fixture corpora: solid-color classes and moving-square clips.

Keeps CI free of binary assets. Every video in a color class shares the
class base color but carries a distinct count of marker pixels, so no two
registered videos produce identical feature vectors and self-queries have
a unique zero-distance match.
"""

from __future__ import annotations

import itertools
import json
from pathlib import Path

import numpy as np

from . import raster
from .catalog import Catalog, PipelineConfig
from .keyframe import Frame, FrameSeq, ingest_frames

MARKER_COLOR = (224, 224, 224)  # joint bin 63; never used as a base color

# Channel levels sit mid-bin so small shade tweaks cannot cross bin borders.
_LEVELS = (32, 96, 160, 224)


def class_colors(n: int) -> list[tuple[int, int, int]]:
    """First `n` base colors, each in a distinct joint bin."""
    combos = [c for c in itertools.product(_LEVELS, repeat=3) if c != MARKER_COLOR]
    # Lead with the most saturated primaries, then fill in.
    preferred = [
        (160, 32, 32), (32, 160, 32), (32, 32, 160), (160, 160, 32),
        (160, 32, 160), (32, 160, 160), (224, 96, 32), (96, 32, 224),
        (32, 224, 96), (224, 32, 96), (96, 224, 32), (32, 96, 224),
    ]
    rest = [c for c in combos if c not in preferred]
    ordered = preferred + rest
    if n > len(ordered):
        raise ValueError(f"at most {len(ordered)} classes supported")
    return ordered[:n]


def solid_frame(color: tuple[int, int, int], size: int = 30,
                marker_pixels: int = 0) -> np.ndarray:
    """Solid-color RGB raster with the first `marker_pixels` pixels
    (row-major) set to the marker color."""
    rgb = np.zeros((size, size, 3), dtype=np.uint8)
    rgb[:, :] = color
    if marker_pixels:
        flat = rgb.reshape(-1, 3)
        flat[:marker_pixels] = MARKER_COLOR
    return rgb


def moving_square_frames(
    n_frames: int = 10,
    size: int = 30,
    square: int = 6,
    step: int = 2,
    direction: str = "right",
) -> list[np.ndarray]:
    """White square on black sliding `step` pixels per frame."""
    frames = []
    lane = (size - square) // 2
    for i in range(n_frames):
        offset = min(i * step, size - square)
        rgb = np.zeros((size, size, 3), dtype=np.uint8)
        if direction == "right":
            rgb[lane : lane + square, offset : offset + square] = 255
        elif direction == "left":
            rgb[lane : lane + square, size - square - offset : size - offset] = 255
        elif direction == "down":
            rgb[offset : offset + square, lane : lane + square] = 255
        elif direction == "up":
            rgb[size - square - offset : size - offset, lane : lane + square] = 255
        else:
            raise ValueError(f"unknown direction {direction!r}")
        frames.append(rgb)
    return frames


def write_frames(frame_dir: str | Path, frames: list[np.ndarray]) -> Path:
    out = Path(frame_dir)
    out.mkdir(parents=True, exist_ok=True)
    for i, rgb in enumerate(frames):
        (out / f"f{i:03d}.ppm").write_bytes(raster.encode_ppm(rgb))
    return out


def frames_to_seq(frames: list[np.ndarray], prefix: str = "f") -> FrameSeq:
    """In-memory FrameSeq for raster lists (skips the encode/decode round)."""
    entries = []
    for i, rgb in enumerate(frames):
        small = raster.rescale(rgb, raster.CANONICAL_SIZE, raster.CANONICAL_SIZE)
        entries.append(
            Frame(name=f"{prefix}{i:03d}.ppm", gray=raster.to_gray(small), rgb=small)
        )
    return FrameSeq(frames=entries, source_dir="<memory>")


def class_video_frames(
    color: tuple[int, int, int],
    video_index: int,
    n_frames: int = 3,
    size: int = 30,
) -> list[np.ndarray]:
    """Frames for one class member; marker count is unique within the class."""
    marker = 1 + 3 * video_index
    return [solid_frame(color, size=size, marker_pixels=marker)] * n_frames


def seed_corpus(
    out_dir: str | Path,
    classes: int = 4,
    per_class: int = 10,
    frames_per_video: int = 3,
    motion_videos: bool = True,
) -> dict:
    """Write the synthetic corpus tree plus its eval manifest.

    Layout: videos/<name>/fNNN.ppm for registration, queries/<class>/ for
    one held-out clip per class, sketches/*.json motion strokes, and
    manifest.json tying queries to the v_ids that in-order registration
    will assign.
    """
    root = Path(out_dir)
    colors = class_colors(classes)
    videos = []
    for c, color in enumerate(colors):
        for v in range(per_class):
            name = f"class{c}_vid{v}"
            write_frames(
                root / "videos" / name,
                class_video_frames(color, v, n_frames=frames_per_video),
            )
            videos.append({"name": name, "frames_dir": f"videos/{name}", "class": c})
    if motion_videos:
        for direction in ("right", "down"):
            name = f"motion_{direction}"
            write_frames(root / "videos" / name, moving_square_frames(direction=direction))
            videos.append({"name": name, "frames_dir": f"videos/{name}", "class": None})

    queries = []
    for c, color in enumerate(colors):
        qdir = root / "queries" / f"class{c}"
        # held-out clip: marker count 2 is never registered (members use 1+3v)
        write_frames(qdir, [solid_frame(color, marker_pixels=2)] * frames_per_video)
        relevant = [
            i + 1 for i, v in enumerate(videos) if v["class"] == c
        ]  # v_ids under in-order registration into a fresh catalog
        queries.append({"frames_dir": f"queries/class{c}", "relevant": relevant})

    sketches_dir = root / "sketches"
    sketches_dir.mkdir(parents=True, exist_ok=True)
    strokes = {
        "right": [[0.05 + 0.9 * t / 19, 0.5] for t in range(20)],
        "down": [[0.5, 0.05 + 0.9 * t / 19] for t in range(20)],
    }
    for name, points in strokes.items():
        (sketches_dir / f"{name}.json").write_text(
            json.dumps({"points": points}), encoding="utf-8"
        )

    manifest = {"videos": videos, "queries": queries}
    (root / "manifest.json").write_text(json.dumps(manifest, indent=2), encoding="utf-8")
    return manifest


def register_corpus(
    cat: Catalog, corpus_root: str | Path, config: PipelineConfig | None = None
) -> list[int]:
    """Register every corpus video in manifest order; returns assigned v_ids."""
    root = Path(corpus_root)
    manifest = json.loads((root / "manifest.json").read_text(encoding="utf-8"))
    ids = []
    for entry in manifest["videos"]:
        frames = ingest_frames(root / entry["frames_dir"])
        record = cat.register_video(entry["name"], frames, config)
        ids.append(record.v_id)
    return ids
