"""Motion trajectories: derivation from keyframes, direction coding, ranking.

A video's trajectory approximates object motion by the centroid of changed
pixels between consecutive keyframes. Sketch and derived trajectories are
both resampled to a fixed number of points by arc length, and each segment
is quantized into one of eight 45-degree direction sectors. Two code
sequences compare by the mean cosine of their angular differences, which
handles the wrap-around at sector 7 -> 0 correctly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BadCoordinates,
    DegeneratePolyline,
    LengthMismatch,
    NoMotion,
    TooFewKeyframes,
)

RESAMPLE_POINTS = 32
SECTOR = math.pi / 4
DIFF_THRESHOLD = 30  # gray levels; |frame difference| at or above counts as changed


@dataclass(frozen=True)
class Trajectory:
    """Ordered 2-D points in [0,1] x [0,1]; source is "sketch" or "derived"."""

    points: tuple[tuple[float, float], ...]
    source: str = "sketch"

    def __post_init__(self):
        if len(self.points) < 2:
            raise BadCoordinates("trajectory needs at least 2 points")
        for x, y in self.points:
            if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
                raise BadCoordinates(f"point ({x}, {y}) outside [0,1]x[0,1]")


@dataclass(frozen=True)
class GradientCodeSeq:
    codes: tuple[int, ...]  # each in 0..7


def derive_video_trajectory(
    keyframes: Sequence[np.ndarray], diff_threshold: int = DIFF_THRESHOLD
) -> Trajectory:
    """Change-centroid trajectory over consecutive keyframe pairs.

    Each pair contributes the centroid of pixels whose absolute gray
    difference reaches `diff_threshold`, normalized by the raster
    dimensions. Motionless pairs hold the previous point; leading
    motionless pairs back-fill from the first moving one.
    """
    if len(keyframes) < 3:
        raise TooFewKeyframes(f"need >= 3 keyframes, got {len(keyframes)}")
    raw: list[tuple[float, float] | None] = []
    for a, b in zip(keyframes, keyframes[1:]):
        diff = np.abs(a.astype(np.int64) - b.astype(np.int64))
        ys, xs = np.nonzero(diff >= diff_threshold)
        if xs.size == 0:
            raw.append(None)
        else:
            h, w = a.shape
            raw.append((float(xs.mean()) / w, float(ys.mean()) / h))
    if all(p is None for p in raw):
        raise NoMotion("no keyframe pair shows any changed pixels")
    first = next(p for p in raw if p is not None)
    points: list[tuple[float, float]] = []
    prev = first
    for p in raw:
        prev = p if p is not None else prev
        points.append(prev)
    return Trajectory(points=tuple(points), source="derived")


def _resample(points: Sequence[tuple[float, float]], n: int) -> list[tuple[float, float]]:
    """N points equally spaced along the polyline's arc length."""
    seg_lengths = [
        math.hypot(x2 - x1, y2 - y1)
        for (x1, y1), (x2, y2) in zip(points, points[1:])
    ]
    total = sum(seg_lengths)
    if total == 0.0:
        raise DegeneratePolyline("polyline has zero arc length")
    out = [points[0]]
    interval = total / (n - 1)
    acc = 0.0
    i = 0
    for k in range(1, n - 1):
        target = k * interval
        while i < len(seg_lengths) and acc + seg_lengths[i] < target:
            acc += seg_lengths[i]
            i += 1
        (x1, y1), (x2, y2) = points[i], points[i + 1]
        t = (target - acc) / seg_lengths[i]
        out.append((x1 + t * (x2 - x1), y1 + t * (y2 - y1)))
    out.append(points[-1])
    return out


def trajectory_gradients(t: Trajectory, n_points: int = RESAMPLE_POINTS) -> GradientCodeSeq:
    """Resample to `n_points` and code each segment's direction into 0..7.

    Code k covers angles [k*45, (k+1)*45) degrees measured from +x toward
    +y; with image coordinates (y down) code 2 is a downward stroke.
    """
    pts = _resample(t.points, n_points)
    codes = []
    for (x1, y1), (x2, y2) in zip(pts, pts[1:]):
        ang = math.atan2(y2 - y1, x2 - x1)
        if ang < 0.0:  # normalize into [0, 2*pi) without disturbing exact axes
            ang += 2 * math.pi
        codes.append(min(int(ang / SECTOR), 7))
    return GradientCodeSeq(codes=tuple(codes))


def gradient_correlation(q: GradientCodeSeq, v: GradientCodeSeq) -> float:
    """Mean cosine of the angular difference between aligned codes, in [-1,1]."""
    if len(q.codes) != len(v.codes):
        raise LengthMismatch(f"{len(q.codes)} vs {len(v.codes)} codes")
    total = 0.0
    for a, b in zip(q.codes, v.codes):
        d = (a - b) % 8
        total += math.cos(SECTOR * min(d, 8 - d))  # circular difference
    return total / len(q.codes)


def motion_rank(
    query: Trajectory,
    catalog: Iterable[tuple[int, Trajectory | None]],
) -> list[tuple[int, float]]:
    """Rank (video id, trajectory) pairs by descending gradient correlation.

    Videos without a stored trajectory are excluded; ties break by
    ascending video id.
    """
    q_codes = trajectory_gradients(query)
    scored = []
    for v_id, traj in catalog:
        if traj is None:
            continue
        scored.append((v_id, gradient_correlation(q_codes, trajectory_gradients(traj))))
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored


def sketch_from_points(points: Sequence[Sequence[float]]) -> Trajectory:
    """Validate a JSON-style [[x, y], ...] payload into a sketch Trajectory."""
    clean = []
    for p in points:
        if len(p) != 2:
            raise BadCoordinates(f"point {p!r} is not an [x, y] pair")
        clean.append((float(p[0]), float(p[1])))
    return Trajectory(points=tuple(clean), source="sketch")
