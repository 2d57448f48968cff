"""Per-keyframe visual descriptors and their catalog string forms.

Four descriptors are computed per keyframe:

* simple color histogram (SCH): 64 joint bins from 4x4x4 RGB quantization,
  plus full-resolution per-channel marginals;
* GLCM texture: horizontal co-occurrence at a fixed pixel offset, normalized
  to probabilities, reduced to asm / contrast / correlation / idm / entropy;
* edge density: Sobel magnitude thresholded at 128, reported as per-block
  edge fractions over a 4x4 grid;
* major regions: count of 4-connected same-color-bin components covering at
  least 5% of the image.

Counts accumulate as integers and divide last, so every value is bit-exact
across platforms, and the serialized strings round-trip exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import Overflow, ParseFailure, TooNarrow, TooSmall

GRAY_LEVELS = 256
JOINT_BINS = 64
EDGE_THRESHOLD = 128
EDGE_GRID = 4
SCH_MAX_CHARS = 1500
EDGE_MAX_CHARS = 250

_SOBEL_X = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=np.int64)
_SOBEL_Y = np.array([[-1, -2, -1], [0, 0, 0], [1, 2, 1]], dtype=np.int64)

_FOUR_CONN = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=np.int64)


@dataclass(frozen=True)
class ColorHistogram:
    joint: np.ndarray  # (64,) int64
    h_r: np.ndarray    # (256,) int64
    h_g: np.ndarray
    h_b: np.ndarray

    @property
    def pixel_count(self) -> int:
        return int(self.joint.sum())

    def __eq__(self, other) -> bool:
        if not isinstance(other, ColorHistogram):
            return NotImplemented
        return (
            np.array_equal(self.joint, other.joint)
            and np.array_equal(self.h_r, other.h_r)
            and np.array_equal(self.h_g, other.h_g)
            and np.array_equal(self.h_b, other.h_b)
        )


@dataclass(frozen=True)
class GlcmFeatures:
    pixel_counter: int
    asm: float
    contrast: float
    correlation: float
    idm: float
    entropy: float
    step: int = 1


@dataclass(frozen=True)
class EdgeRegionFeatures:
    """Per-block edge pixel counts and block sizes (16 blocks, row-major).

    Stored as integer pairs so the catalog string stays exact and short;
    `densities` derives the 16 real-valued fractions.
    """

    edge_counts: tuple[int, ...]
    block_sizes: tuple[int, ...]

    @property
    def densities(self) -> tuple[float, ...]:
        return tuple(
            (e / n) if n else 0.0 for e, n in zip(self.edge_counts, self.block_sizes)
        )


def quantize_joint(rgb: np.ndarray) -> np.ndarray:
    """Joint 64-level bin index per pixel: 16*(r//64) + 4*(g//64) + b//64."""
    px = rgb.astype(np.int64)
    return 16 * (px[:, :, 0] >> 6) + 4 * (px[:, :, 1] >> 6) + (px[:, :, 2] >> 6)


def color_histogram(rgb: np.ndarray) -> ColorHistogram:
    """Count the joint 64-bin histogram and the three 256-bin marginals."""
    joint = np.bincount(quantize_joint(rgb).ravel(), minlength=JOINT_BINS)
    return ColorHistogram(
        joint=joint.astype(np.int64),
        h_r=np.bincount(rgb[:, :, 0].ravel(), minlength=256).astype(np.int64),
        h_g=np.bincount(rgb[:, :, 1].ravel(), minlength=256).astype(np.int64),
        h_b=np.bincount(rgb[:, :, 2].ravel(), minlength=256).astype(np.int64),
    )


def glcm_matrix(gray: np.ndarray, step: int = 1) -> tuple[np.ndarray, int]:
    """Symmetric co-occurrence counts at horizontal offset `step`.

    Every admissible pixel pair increments both (a, b) and (b, a), so the
    counter ends at twice the pair count and the counts matrix is symmetric
    by construction.
    """
    h, w = gray.shape
    if w <= step:
        raise TooNarrow(f"width {w} <= step {step}")
    a = gray[:, : w - step].astype(np.int64).ravel()
    b = gray[:, step:].astype(np.int64).ravel()
    counts = np.zeros((GRAY_LEVELS, GRAY_LEVELS), dtype=np.int64)
    np.add.at(counts, (a, b), 1)
    np.add.at(counts, (b, a), 1)
    return counts, int(2 * a.size)


def glcm_features(gray: np.ndarray, step: int = 1, correlation_mode: str = "paper") -> GlcmFeatures:
    """Reduce the normalized co-occurrence matrix to five texture features.

    correlation_mode "paper" divides the cross-moment by the raw product of
    the two variance accumulators (no square root); "haralick" divides by
    sqrt(variance_x * variance_y). Zero-variance images get correlation 0.
    """
    counts, pixel_counter = glcm_matrix(gray, step)
    p = counts / pixel_counter
    levels = np.arange(GRAY_LEVELS, dtype=np.float64)
    a_grid = levels[:, None]
    b_grid = levels[None, :]
    diff2 = (a_grid - b_grid) ** 2

    asm = float((p * p).sum())
    contrast = float((diff2 * p).sum())
    px = float((a_grid * p).sum())
    py = float((b_grid * p).sum())
    stdevx = float(((a_grid - px) ** 2 * p).sum())
    stdevy = float(((b_grid - py) ** 2 * p).sum())
    denom = stdevx * stdevy
    if denom == 0.0:
        correlation = 0.0
    else:
        cross = float(((a_grid - px) * (b_grid - py) * p).sum())
        if correlation_mode == "haralick":
            correlation = cross / math.sqrt(denom)
        else:
            correlation = cross / denom
    idm = float((p / (1.0 + diff2)).sum())
    nz = p[p > 0]
    entropy = float(-(nz * np.log(nz)).sum()) + 0.0  # flush -0.0 on pure textures
    return GlcmFeatures(
        pixel_counter=pixel_counter,
        asm=asm,
        contrast=contrast,
        correlation=correlation,
        idm=idm,
        entropy=entropy,
        step=step,
    )


def _block_bounds(extent: int, blocks: int) -> list[tuple[int, int]]:
    # Equal blocks of extent // blocks, remainder absorbed by the last one.
    size = extent // blocks
    bounds = [(i * size, (i + 1) * size) for i in range(blocks - 1)]
    bounds.append(((blocks - 1) * size, extent))
    return bounds


def edge_density(gray: np.ndarray) -> EdgeRegionFeatures:
    """Per-block fraction of Sobel edge pixels over a 4x4 grid.

    A pixel is an edge pixel iff |Gx| + |Gy| >= 128, evaluated on interior
    pixels only; block denominators count all pixels in the block.
    """
    h, w = gray.shape
    if h < 3 or w < 3:
        raise TooSmall(f"need at least 3x3, got {h}x{w}")
    px = gray.astype(np.int64)
    gx = np.zeros((h, w), dtype=np.int64)
    gy = np.zeros((h, w), dtype=np.int64)
    for dy in range(3):
        for dx in range(3):
            window = px[dy : h - 2 + dy, dx : w - 2 + dx]
            gx[1 : h - 1, 1 : w - 1] += _SOBEL_X[dy, dx] * window
            gy[1 : h - 1, 1 : w - 1] += _SOBEL_Y[dy, dx] * window
    edge = (np.abs(gx) + np.abs(gy)) >= EDGE_THRESHOLD
    edge[0, :] = edge[-1, :] = False
    edge[:, 0] = edge[:, -1] = False

    edge_counts = []
    block_sizes = []
    for r_lo, r_hi in _block_bounds(h, EDGE_GRID):
        for c_lo, c_hi in _block_bounds(w, EDGE_GRID):
            edge_counts.append(int(edge[r_lo:r_hi, c_lo:c_hi].sum()))
            block_sizes.append((r_hi - r_lo) * (c_hi - c_lo))
    return EdgeRegionFeatures(edge_counts=tuple(edge_counts), block_sizes=tuple(block_sizes))


def major_regions(rgb: np.ndarray, min_area_frac: float = 0.05) -> int:
    """Count 4-connected components of the joint-bin label map covering at
    least `min_area_frac` of the image."""
    labels = quantize_joint(rgb)
    total = labels.size
    threshold = min_area_frac * total
    count = 0
    for value in np.unique(labels):
        components, n = ndimage.label(labels == value, structure=_FOUR_CONN)
        if n:
            sizes = np.bincount(components.ravel())[1:]
            count += int((sizes >= threshold).sum())
    return count


# --- catalog string forms -------------------------------------------------
#
# SCH  : "SCH 64 <b0> ... <b63>"                    (joint bins, counts)
# GLCM : "GLCM <pc> <asm> <contrast> <corr> <idm> <entropy>"
# EDGE : "EDGE 16 <e0>/<n0> ... <e15>/<n15>"        (edge count / block size)
#
# Reals render in shortest round-trip decimal form (repr, minus a trailing
# ".0" on integral values) so parsing returns the identical float. Edge
# densities serialize as integer rationals: 16 shortest-repr floats would
# not reliably fit the 250-char column, and the rational form is exact.


def _fmt_real(x: float) -> str:
    s = repr(float(x))
    return s[:-2] if s.endswith(".0") else s


def serialize_histogram(h: ColorHistogram) -> str:
    s = "SCH " + str(JOINT_BINS) + " " + " ".join(str(int(v)) for v in h.joint)
    if len(s) > SCH_MAX_CHARS:
        raise Overflow(f"SCH string {len(s)} chars exceeds {SCH_MAX_CHARS}")
    return s


def parse_histogram(s: str) -> np.ndarray:
    """Parse an SCH string back to its 64 joint bin counts.

    Channel marginals are not persisted (the retrieval vector uses joint bins
    only), so the parse returns the joint array.
    """
    parts = s.split()
    if len(parts) < 2 or parts[0] != "SCH":
        raise ParseFailure(f"not an SCH string: {s[:32]!r}")
    try:
        n = int(parts[1])
        bins = [int(v) for v in parts[2:]]
    except ValueError as exc:
        raise ParseFailure(str(exc)) from None
    if n != JOINT_BINS or len(bins) != n:
        raise ParseFailure(f"expected {JOINT_BINS} bins, got {len(bins)}")
    if any(v < 0 for v in bins):
        raise ParseFailure("negative bin count")
    return np.array(bins, dtype=np.int64)


def serialize_glcm(g: GlcmFeatures) -> str:
    return "GLCM {} {} {} {} {} {}".format(
        g.pixel_counter, _fmt_real(g.asm), _fmt_real(g.contrast),
        _fmt_real(g.correlation), _fmt_real(g.idm), _fmt_real(g.entropy),
    )


def parse_glcm(s: str) -> GlcmFeatures:
    parts = s.split()
    if len(parts) != 7 or parts[0] != "GLCM":
        raise ParseFailure(f"not a GLCM string: {s[:32]!r}")
    try:
        return GlcmFeatures(
            pixel_counter=int(parts[1]),
            asm=float(parts[2]),
            contrast=float(parts[3]),
            correlation=float(parts[4]),
            idm=float(parts[5]),
            entropy=float(parts[6]),
        )
    except ValueError as exc:
        raise ParseFailure(str(exc)) from None


def serialize_edge(e: EdgeRegionFeatures) -> str:
    s = "EDGE 16 " + " ".join(
        f"{c}/{n}" for c, n in zip(e.edge_counts, e.block_sizes)
    )
    if len(s) > EDGE_MAX_CHARS:
        raise Overflow(f"EDGE string {len(s)} chars exceeds {EDGE_MAX_CHARS}")
    return s


def parse_edge(s: str) -> EdgeRegionFeatures:
    parts = s.split()
    if len(parts) != 18 or parts[0] != "EDGE" or parts[1] != "16":
        raise ParseFailure(f"not an EDGE string: {s[:32]!r}")
    counts = []
    sizes = []
    try:
        for token in parts[2:]:
            c, n = token.split("/")
            counts.append(int(c))
            sizes.append(int(n))
    except ValueError as exc:
        raise ParseFailure(str(exc)) from None
    if any(c < 0 or n < 0 or c > n for c, n in zip(counts, sizes)):
        raise ParseFailure("edge count exceeds block size")
    return EdgeRegionFeatures(edge_counts=tuple(counts), block_sizes=tuple(sizes))
