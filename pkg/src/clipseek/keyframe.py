"""Keyframe selection over an ordered frame sequence.

Frames are ingested from a directory (sorted lexicographically by name),
decoded, grayscaled and rescaled to the canonical 30x30 comparison size.
The selection scan keeps a frame as keyframe, then discards following frames
while their L1 distance to that run-opening keyframe stays at or below the
threshold; the first frame whose distance exceeds it opens the next run.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import raster
from .errors import EmptyDirectory, EmptySequence, MalformedImage, UnsupportedFormat

log = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 800.0


@dataclass(frozen=True)
class Frame:
    """One ingested frame: source name plus its canonical rasters."""

    name: str
    gray: np.ndarray  # 30x30 uint8
    rgb: np.ndarray   # 30x30x3 uint8


@dataclass
class FrameSeq:
    """Ordered frame sequence plus the ingest skip report."""

    frames: list[Frame]
    skipped: list[tuple[str, str]] = field(default_factory=list)
    source_dir: str = ""

    def __len__(self) -> int:
        return len(self.frames)

    def grays(self) -> list[np.ndarray]:
        return [f.gray for f in self.frames]


@dataclass(frozen=True)
class KeyframeSelection:
    """Selected frame positions (strictly increasing, first is 0)."""

    indices: tuple[int, ...]
    threshold_used: float


def frame_distance(a: np.ndarray, b: np.ndarray) -> int:
    """L1 distance: sum over pixels of |a - b|. Zero iff rasters are equal."""
    raster.require_same_shape(a, b)
    return int(np.abs(a.astype(np.int64) - b.astype(np.int64)).sum())


def extract_keyframes(seq: FrameSeq, threshold: float = DEFAULT_THRESHOLD) -> KeyframeSelection:
    """Collapse runs of near-identical frames; keep each run's opener.

    The comparison is always against the run-opening keyframe, not the
    immediately previous frame. A singleton sequence yields exactly its frame.
    """
    if not seq.frames:
        raise EmptySequence("no frames to extract from")
    if threshold < 0:
        raise ValueError("threshold must be >= 0 (0 collapses exact duplicates only)")
    grays = seq.grays()
    n = len(grays)
    indices: list[int] = []
    i = 0
    while i < n:
        indices.append(i)
        j = i + 1
        while j < n and frame_distance(grays[i], grays[j]) <= threshold:
            j += 1
        i = j
    return KeyframeSelection(indices=tuple(indices), threshold_used=float(threshold))


def ingest_frames(frame_dir: str | Path, size: int = raster.CANONICAL_SIZE) -> FrameSeq:
    """Load every decodable image under `frame_dir` in lexicographic name order.

    Undecodable files are skipped with a warning and listed in the returned
    sequence's skip report; an ingest that yields no frames raises
    EmptyDirectory.
    """
    root = Path(frame_dir)
    if not root.is_dir():
        raise EmptyDirectory(f"not a directory: {root}")
    paths = sorted(
        (p for p in root.rglob("*") if p.is_file()),
        key=lambda p: p.relative_to(root).as_posix(),
    )
    frames: list[Frame] = []
    skipped: list[tuple[str, str]] = []
    for path in paths:
        name = path.relative_to(root).as_posix()
        try:
            rgb = raster.decode_frame(path.read_bytes())
        except (MalformedImage, UnsupportedFormat) as exc:
            log.warning("skipping %s: %s", name, exc)
            skipped.append((name, str(exc)))
            continue
        rgb_small = raster.rescale(rgb, size, size)
        frames.append(Frame(name=name, gray=raster.to_gray(rgb_small), rgb=rgb_small))
    if not frames:
        raise EmptyDirectory(f"no decodable frames in {root}")
    return FrameSeq(frames=frames, skipped=skipped, source_dir=str(root))
