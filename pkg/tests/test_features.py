import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from clipseek import features
from clipseek.errors import Overflow, ParseFailure, TooNarrow, TooSmall


def rgb_of(*pixels):
    """Build a 1xN RGB raster from pixel tuples."""
    arr = np.array([list(pixels)], dtype=np.uint8)
    return arr


class TestColorHistogram:
    def test_all_black(self):
        h = features.color_histogram(np.zeros((2, 2, 3), dtype=np.uint8))
        assert h.joint[0] == 4
        assert h.joint.sum() == 4
        assert h.h_r[0] == h.h_g[0] == h.h_b[0] == 4

    def test_white_pixel_lands_in_last_bin(self):
        h = features.color_histogram(rgb_of((255, 255, 255)))
        assert h.joint[63] == 1

    def test_red_channel_quantization(self):
        # floor(70/64)=1 -> index 16; floor(200/64)=3 -> index 48
        h = features.color_histogram(rgb_of((70, 10, 10), (200, 10, 10)))
        assert h.joint[16] == 1
        assert h.joint[48] == 1
        assert h.joint.sum() == 2

    @settings(max_examples=20)
    @given(st.integers(0, 2**32 - 1))
    def test_sums_match_pixel_count(self, seed):
        rng = np.random.default_rng(seed)
        rgb = rng.integers(0, 256, (7, 5, 3), dtype=np.uint8)
        h = features.color_histogram(rgb)
        for arr in (h.joint, h.h_r, h.h_g, h.h_b):
            assert arr.sum() == 35
        # brute-force quantizer
        expected = [0] * 64
        for row in rgb.reshape(-1, 3).tolist():
            expected[16 * (row[0] // 64) + 4 * (row[1] // 64) + row[2] // 64] += 1
        assert h.joint.tolist() == expected


class TestGlcm:
    def test_constant_image(self):
        g = features.glcm_features(np.full((4, 4), 7, dtype=np.uint8))
        assert g.asm == 1.0
        assert g.contrast == 0.0
        assert g.idm == 1.0
        assert g.entropy == 0.0
        assert g.correlation == 0.0  # zero-variance rule
        assert g.pixel_counter == 24  # 4 rows * 3 pairs * 2

    def test_two_pixel_swing(self):
        g = features.glcm_features(np.array([[0, 255]], dtype=np.uint8))
        assert g.pixel_counter == 2
        assert g.asm == 0.5
        assert g.contrast == 65025.0
        assert g.idm == pytest.approx(2 * 0.5 / (1 + 255**2), rel=1e-12)
        assert g.entropy == pytest.approx(math.log(2), rel=1e-12)

    def test_alternating_equals_single_pair(self):
        # 3 pairs, all cross: same normalized matrix as the 2-pixel image
        a = features.glcm_features(np.array([[0, 255]], dtype=np.uint8))
        b = features.glcm_features(np.array([[0, 255, 0, 255]], dtype=np.uint8))
        assert b.pixel_counter == 6
        for name in ("asm", "contrast", "correlation", "idm", "entropy"):
            assert getattr(a, name) == pytest.approx(getattr(b, name), rel=1e-12)

    def test_matrix_normalized_and_symmetric(self):
        rng = np.random.default_rng(5)
        img = rng.integers(0, 256, (16, 16), dtype=np.uint8)
        counts, pc = features.glcm_matrix(img)
        assert counts.sum() == pc
        assert np.array_equal(counts, counts.T)
        norm = counts / pc
        assert abs(norm.sum() - 1.0) < 1e-9

    def test_too_narrow(self):
        with pytest.raises(TooNarrow):
            features.glcm_features(np.zeros((4, 1), dtype=np.uint8))
        with pytest.raises(TooNarrow):
            features.glcm_features(np.zeros((4, 2), dtype=np.uint8), step=2)

    def test_matches_oracle_on_random_rasters(self):
        rng = np.random.default_rng(42)
        for _ in range(20):
            img = rng.integers(0, 256, (16, 16), dtype=np.uint8)
            got = features.glcm_features(img)
            want = oracles.glcm_features(img)
            assert got.pixel_counter == want["pixel_counter"]
            for name in ("asm", "contrast", "correlation", "idm", "entropy"):
                assert getattr(got, name) == pytest.approx(want[name], rel=1e-9)

    def test_sparse_oracle_agrees_with_dense(self):
        rng = np.random.default_rng(1)
        img = rng.integers(0, 8, (8, 8), dtype=np.uint8)
        sparse = oracles.glcm_features(img)
        dense = oracles.glcm_features_dense(img)
        for name in sparse:
            assert sparse[name] == pytest.approx(dense[name], rel=1e-9)

    def test_step_two_skips_boundary(self):
        img = np.array([[0, 128, 255]], dtype=np.uint8)
        g = features.glcm_features(img, step=2)
        assert g.pixel_counter == 2  # only the (0,255) pair
        assert g.contrast == 65025.0

    def test_haralick_mode_uses_sqrt_denominator(self):
        rng = np.random.default_rng(9)
        img = rng.integers(0, 256, (12, 12), dtype=np.uint8)
        paper = features.glcm_features(img, correlation_mode="paper")
        haralick = features.glcm_features(img, correlation_mode="haralick")
        counts, pc = features.glcm_matrix(img)
        p = counts / pc
        lv = np.arange(256.0)
        mean = float((lv[:, None] * p).sum())
        var = float((((lv - mean) ** 2)[:, None] * p).sum())
        assert haralick.correlation == pytest.approx(
            paper.correlation * math.sqrt(var * var), rel=1e-9
        )


class TestEdgeDensity:
    def test_constant_image_no_edges(self):
        e = features.edge_density(np.full((30, 30), 50, dtype=np.uint8))
        assert all(d == 0.0 for d in e.densities)

    def test_vertical_step_hits_straddling_blocks(self):
        # 32 wide: blocks are 8 columns each; edge columns 15,16 straddle
        # blocks 1 and 2, so exactly those 8 blocks are nonzero.
        img = np.zeros((32, 32), dtype=np.uint8)
        img[:, 16:] = 255
        e = features.edge_density(img)
        nonzero = [i for i, d in enumerate(e.densities) if d > 0]
        assert nonzero == [1, 2, 5, 6, 9, 10, 13, 14]
        counts, sizes = oracles.edge_blocks(img)
        assert list(e.edge_counts) == counts
        assert list(e.block_sizes) == sizes

    def test_three_by_three_center_dot(self):
        img = np.zeros((3, 3), dtype=np.uint8)
        img[1, 1] = 255
        e = features.edge_density(img)
        counts, sizes = oracles.edge_blocks(img)
        assert list(e.edge_counts) == counts
        assert list(e.block_sizes) == sizes
        # kernels are zero at the center tap, so the lone interior pixel
        # sees zero gradient
        assert sum(e.edge_counts) == 0

    def test_too_small(self):
        with pytest.raises(TooSmall):
            features.edge_density(np.zeros((2, 5), dtype=np.uint8))

    def test_matches_oracle_on_random_rasters(self):
        rng = np.random.default_rng(13)
        for _ in range(5):
            img = rng.integers(0, 256, (17, 23), dtype=np.uint8)
            e = features.edge_density(img)
            counts, sizes = oracles.edge_blocks(img)
            assert list(e.edge_counts) == counts
            assert list(e.block_sizes) == sizes
            assert all(0.0 <= d <= 1.0 for d in e.densities)


class TestMajorRegions:
    def test_constant_single_region(self):
        assert features.major_regions(np.zeros((10, 10, 3), dtype=np.uint8)) == 1

    def test_two_solid_halves(self):
        rgb = np.zeros((10, 10, 3), dtype=np.uint8)
        rgb[:, 5:] = (200, 0, 0)
        assert features.major_regions(rgb) == 2

    def test_matches_flood_fill_oracle(self):
        rng = np.random.default_rng(77)
        for _ in range(5):
            rgb = rng.integers(0, 256, (12, 12, 3), dtype=np.uint8)
            got = features.major_regions(rgb)
            want = oracles.count_major_regions(rgb.tolist())
            assert got == want

    def test_small_components_excluded(self):
        rgb = np.zeros((10, 10, 3), dtype=np.uint8)
        rgb[0, 0] = (200, 0, 0)  # 1 px = 1% < 5%
        assert features.major_regions(rgb) == 1


class TestSerialization:
    def test_histogram_string_one_bin(self):
        h = features.color_histogram(np.zeros((2, 2, 3), dtype=np.uint8))
        s = features.serialize_histogram(h)
        assert s == "SCH 64 4" + " 0" * 63
        assert features.parse_histogram(s).tolist() == h.joint.tolist()

    def test_constant_glcm_string(self):
        g = features.glcm_features(np.full((5, 5), 9, dtype=np.uint8))
        s = features.serialize_glcm(g)
        assert s == f"GLCM {g.pixel_counter} 1 0 0 1 0"

    def test_round_trips(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            img = rng.integers(0, 256, (16, 16), dtype=np.uint8)
            rgb = rng.integers(0, 256, (16, 16, 3), dtype=np.uint8)
            g = features.glcm_features(img)
            assert features.parse_glcm(features.serialize_glcm(g)) == g
            h = features.color_histogram(rgb)
            assert (
                features.parse_histogram(features.serialize_histogram(h)).tolist()
                == h.joint.tolist()
            )
            e = features.edge_density(img)
            assert features.parse_edge(features.serialize_edge(e)) == e

    def test_edge_string_fits_column_for_canonical_rasters(self):
        img = np.random.default_rng(0).integers(0, 256, (30, 30), dtype=np.uint8)
        s = features.serialize_edge(features.edge_density(img))
        assert len(s) <= 250

    def test_edge_overflow_raises(self):
        e = features.EdgeRegionFeatures(
            edge_counts=(10**15,) * 16, block_sizes=(10**15,) * 16
        )
        with pytest.raises(Overflow):
            features.serialize_edge(e)

    def test_parse_rejects_garbage(self):
        for bad in ("SCH 64 1 2", "GLCM 1 2", "EDGE 16 nope", "HMM 3 4"):
            with pytest.raises(ParseFailure):
                if bad.startswith("SCH"):
                    features.parse_histogram(bad)
                elif bad.startswith("GLCM"):
                    features.parse_glcm(bad)
                else:
                    features.parse_edge(bad)
        with pytest.raises(ParseFailure):
            features.parse_histogram("GLCM 1 2 3 4 5 6")
