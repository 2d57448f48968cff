import numpy as np
import pytest

from clipseek import raster
from clipseek.catalog import Catalog
from clipseek.keyframe import Frame, FrameSeq


def gray_raster(values) -> np.ndarray:
    return np.array(values, dtype=np.uint8)


def rgb_from_gray(gray: np.ndarray) -> np.ndarray:
    return np.repeat(gray[:, :, None], 3, axis=2)


def make_frame(name: str, gray: np.ndarray) -> Frame:
    return Frame(name=name, gray=gray, rgb=rgb_from_gray(gray))


def seq_of_grays(grays, prefix="f") -> FrameSeq:
    frames = [make_frame(f"{prefix}{i:03d}.pgm", g) for i, g in enumerate(grays)]
    return FrameSeq(frames=frames, source_dir="<test>")


def write_ppm_dir(path, rgbs):
    path.mkdir(parents=True, exist_ok=True)
    for i, rgb in enumerate(rgbs):
        (path / f"f{i:03d}.ppm").write_bytes(raster.encode_ppm(rgb))
    return path


@pytest.fixture
def tmp_catalog(tmp_path) -> Catalog:
    return Catalog(tmp_path / "catalog")
