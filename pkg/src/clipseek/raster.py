"""Frame decoding and pixel-level primitives.

Rasters are plain numpy arrays: a gray raster is an (H, W) uint8 array, an
RGB raster an (H, W, 3) uint8 array. Binary PGM (P5) and PPM (P6) with
maxval 255 are the native formats; PNG/JPEG decode through Pillow when it is
installed. All arithmetic is integer-exact so results are identical across
platforms.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, MalformedImage, UnsupportedFormat

# Luminance weights in r, g, b order. The source band-combine matrix lists
# them blue-to-green-to-red; channel assignment is fixed here once.
_LUMA_R, _LUMA_G, _LUMA_B = 299, 587, 114  # per-mille, sum exactly 1000

#: Canonical edge for fixed-size comparisons (900 px total).
CANONICAL_SIZE = 30


def _read_pnm_tokens(data: bytes, count: int, start: int) -> tuple[list[int], int]:
    """Read `count` whitespace/comment-separated ASCII integers from `data`."""
    tokens: list[int] = []
    i = start
    n = len(data)
    while len(tokens) < count:
        while i < n and data[i:i + 1].isspace():
            i += 1
        if i < n and data[i] == ord("#"):
            while i < n and data[i] not in (10, 13):
                i += 1
            continue
        j = i
        while j < n and not data[j:j + 1].isspace():
            j += 1
        if j == i:
            raise MalformedImage("truncated header")
        try:
            tokens.append(int(data[i:j]))
        except ValueError:
            raise MalformedImage(f"bad header token {data[i:j]!r}") from None
        i = j
    return tokens, i


def _decode_pnm(data: bytes) -> np.ndarray:
    magic = data[:2]
    channels = 1 if magic == b"P5" else 3
    try:
        (width, height, maxval), pos = _read_pnm_tokens(data, 3, 2)
    except MalformedImage:
        raise
    if width < 1 or height < 1:
        raise MalformedImage(f"bad dimensions {width}x{height}")
    if maxval != 255:
        raise UnsupportedFormat(f"maxval {maxval} unsupported (need 255)")
    pos += 1  # single whitespace byte after maxval
    need = width * height * channels
    payload = data[pos:pos + need]
    if len(payload) != need:
        raise MalformedImage(f"payload {len(payload)} bytes, expected {need}")
    arr = np.frombuffer(payload, dtype=np.uint8)
    if channels == 1:
        gray = arr.reshape(height, width)
        return np.repeat(gray[:, :, None], 3, axis=2)
    return arr.reshape(height, width, 3).copy()


def _decode_via_pillow(data: bytes) -> np.ndarray:
    try:
        from PIL import Image
    except ImportError:
        raise UnsupportedFormat("PNG/JPEG support requires Pillow") from None
    import io

    try:
        with Image.open(io.BytesIO(data)) as im:
            # Palette-indexed inputs resolve to RGB here.
            rgb = im.convert("RGB")
            return np.asarray(rgb, dtype=np.uint8).copy()
    except Exception as exc:
        raise MalformedImage(f"undecodable image: {exc}") from None


def decode_frame(data: bytes) -> np.ndarray:
    """Decode an encoded frame into an (H, W, 3) uint8 RGB raster.

    P5 input comes back with r=g=b. Raises MalformedImage for truncated or
    corrupt payloads, UnsupportedFormat for unknown magic bytes.
    """
    if len(data) < 2:
        raise MalformedImage("empty or near-empty input")
    magic = data[:2]
    if magic in (b"P5", b"P6"):
        return _decode_pnm(data)
    if data[:8] == b"\x89PNG\r\n\x1a\n" or magic == b"\xff\xd8":
        return _decode_via_pillow(data)
    raise UnsupportedFormat(f"unknown magic {magic!r}")


def encode_pgm(gray: np.ndarray) -> bytes:
    """Serialize an (H, W) uint8 gray raster as binary PGM (P5, maxval 255)."""
    h, w = gray.shape
    return f"P5\n{w} {h}\n255\n".encode("ascii") + gray.astype(np.uint8).tobytes()


def encode_ppm(rgb: np.ndarray) -> bytes:
    """Serialize an (H, W, 3) uint8 RGB raster as binary PPM (P6, maxval 255)."""
    h, w = rgb.shape[:2]
    return f"P6\n{w} {h}\n255\n".encode("ascii") + rgb.astype(np.uint8).tobytes()


def to_gray(rgb: np.ndarray) -> np.ndarray:
    """Luminance conversion: round-half-up of 0.299 r + 0.587 g + 0.114 b.

    Integer arithmetic throughout; r=g=b inputs map to themselves.
    """
    px = rgb.astype(np.int64)
    milli = _LUMA_R * px[:, :, 0] + _LUMA_G * px[:, :, 1] + _LUMA_B * px[:, :, 2]
    return ((milli + 500) // 1000).astype(np.uint8)


def rescale(img: np.ndarray, w: int, h: int) -> np.ndarray:
    """Nearest-neighbor rescale: output (x, y) samples input (x*W//w, y*H//h).

    Works for both gray (H, W) and RGB (H, W, 3) rasters; same-size input is
    returned as an identical copy.
    """
    if w < 1 or h < 1:
        raise ValueError("target dimensions must be >= 1")
    src_h, src_w = img.shape[:2]
    ys = (np.arange(h) * src_h) // h
    xs = (np.arange(w) * src_w) // w
    return img[np.ix_(ys, xs)].copy() if img.ndim == 2 else img[ys][:, xs].copy()


def gray_histogram(gray: np.ndarray) -> np.ndarray:
    """256-bin histogram of an (H, W) uint8 raster; bins sum to H*W."""
    return np.bincount(gray.ravel(), minlength=256).astype(np.int64)


def require_same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes differ: {a.shape} vs {b.shape}")
