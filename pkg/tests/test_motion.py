import math

import numpy as np
import pytest

import oracles
from clipseek import raster
from clipseek.errors import (
    BadCoordinates,
    DegeneratePolyline,
    LengthMismatch,
    NoMotion,
    TooFewKeyframes,
)
from clipseek.motion import (
    GradientCodeSeq,
    Trajectory,
    derive_video_trajectory,
    gradient_correlation,
    motion_rank,
    sketch_from_points,
    trajectory_gradients,
)
from clipseek.synth import moving_square_frames


def square_grays(direction="right", n=10):
    return [raster.to_gray(f) for f in moving_square_frames(n_frames=n, direction=direction)]


def horizontal_stroke(n=20):
    return Trajectory(points=tuple((0.05 + 0.9 * i / (n - 1), 0.5) for i in range(n)))


class TestTrajectoryType:
    def test_needs_two_points(self):
        with pytest.raises(BadCoordinates):
            Trajectory(points=((0.5, 0.5),))

    def test_rejects_out_of_range(self):
        with pytest.raises(BadCoordinates):
            Trajectory(points=((0.0, 0.0), (1.2, 0.5)))

    def test_sketch_from_points_validates_pairs(self):
        with pytest.raises(BadCoordinates):
            sketch_from_points([[0.1, 0.2, 0.3], [0.4, 0.5]])


class TestDeriveTrajectory:
    def test_rightward_square_x_non_decreasing(self):
        t = derive_video_trajectory(square_grays("right"))
        xs = [p[0] for p in t.points]
        assert xs == sorted(xs)
        assert t.source == "derived"
        assert len(t.points) == 9  # one point per consecutive pair

    def test_static_video_raises_no_motion(self):
        frame = np.zeros((30, 30), dtype=np.uint8)
        with pytest.raises(NoMotion):
            derive_video_trajectory([frame] * 5)

    def test_too_few_keyframes(self):
        frame = np.zeros((30, 30), dtype=np.uint8)
        with pytest.raises(TooFewKeyframes):
            derive_video_trajectory([frame, frame])

    def test_matches_centroid_oracle(self):
        grays = square_grays("down", n=6)
        t = derive_video_trajectory(grays)
        expected = oracles.pair_change_centroids(grays)
        assert all(p is not None for p in expected)
        for got, want in zip(t.points, expected):
            assert got == pytest.approx(want, abs=1e-12)

    def test_motionless_pairs_hold_previous_point(self):
        frames = square_grays("right", n=4)
        # duplicate a frame mid-sequence: pair (f1, f1) has zero change,
        # so its point repeats the (f0, f1) centroid
        frames = [frames[0], frames[1], frames[1], frames[2], frames[3]]
        t = derive_video_trajectory(frames)
        assert t.points[0] == t.points[1]
        assert t.points[1] != t.points[2]


class TestGradients:
    def test_horizontal_stroke_all_code_zero(self):
        codes = trajectory_gradients(horizontal_stroke()).codes
        assert len(codes) == 31
        assert set(codes) == {0}

    def test_downward_stroke_all_code_two(self):
        t = Trajectory(points=tuple((0.5, 0.05 + 0.9 * i / 19) for i in range(20)))
        assert set(trajectory_gradients(t).codes) == {2}

    def test_degenerate_polyline(self):
        t = Trajectory(points=((0.5, 0.5), (0.5, 0.5)))
        with pytest.raises(DegeneratePolyline):
            trajectory_gradients(t)

    def test_matches_resample_and_angle_oracle(self):
        rng = np.random.default_rng(17)
        for _ in range(20):
            pts = [tuple(p) for p in rng.uniform(0.1, 0.9, (6, 2))]
            t = Trajectory(points=tuple(pts))
            got = trajectory_gradients(t).codes
            want = oracles.direction_codes(oracles.resample_polyline(pts, 32))
            assert list(got) == want

    def test_translation_invariance(self):
        rng = np.random.default_rng(23)
        pts = [tuple(p) for p in rng.uniform(0.3, 0.7, (8, 2))]
        moved = [(x + 0.13, y - 0.11) for x, y in pts]
        a = trajectory_gradients(Trajectory(points=tuple(pts)))
        b = trajectory_gradients(Trajectory(points=tuple(moved)))
        assert a.codes == b.codes

    def test_uniform_scale_invariance(self):
        rng = np.random.default_rng(29)
        pts = [tuple(p) for p in rng.uniform(0.3, 0.7, (8, 2))]
        scaled = [
            (0.5 + 1.4 * (x - 0.5), 0.5 + 1.4 * (y - 0.5)) for x, y in pts
        ]
        a = trajectory_gradients(Trajectory(points=tuple(pts)))
        b = trajectory_gradients(Trajectory(points=tuple(scaled)))
        assert a.codes == b.codes


class TestCorrelation:
    def test_self_is_exactly_one(self):
        q = GradientCodeSeq(codes=tuple([0, 1, 2, 3] * 8)[:31])
        assert gradient_correlation(q, q) == 1.0

    def test_opposite_is_minus_one(self):
        q = GradientCodeSeq(codes=(0, 1, 2) * 10)
        flipped = GradientCodeSeq(codes=tuple((c + 4) % 8 for c in q.codes))
        assert gradient_correlation(q, flipped) == -1.0

    def test_adjacent_sector(self):
        a = GradientCodeSeq(codes=(0,) * 31)
        b = GradientCodeSeq(codes=(1,) * 31)
        assert gradient_correlation(a, b) == pytest.approx(math.cos(math.pi / 4), rel=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            gradient_correlation(
                GradientCodeSeq(codes=(0,) * 31), GradientCodeSeq(codes=(0,) * 30)
            )

    def test_symmetric_and_bounded(self):
        rng = np.random.default_rng(41)
        for _ in range(25):
            a = GradientCodeSeq(codes=tuple(rng.integers(0, 8, 31)))
            b = GradientCodeSeq(codes=tuple(rng.integers(0, 8, 31)))
            s = gradient_correlation(a, b)
            assert s == gradient_correlation(b, a)
            assert -1.0 <= s <= 1.0


class TestMotionRank:
    def test_self_match_ranks_first(self):
        t_right = derive_video_trajectory(square_grays("right"))
        t_down = derive_video_trajectory(square_grays("down"))
        ranked = motion_rank(t_right, [(1, t_right), (2, t_down)])
        assert ranked[0][0] == 1
        assert ranked[0][1] == pytest.approx(1.0, abs=1e-9)

    def test_empty_catalog(self):
        assert motion_rank(horizontal_stroke(), []) == []

    def test_excludes_missing_trajectories(self):
        ranked = motion_rank(horizontal_stroke(), [(1, None), (2, None)])
        assert ranked == []

    def test_known_order_and_ties(self):
        q = horizontal_stroke()
        right = derive_video_trajectory(square_grays("right"))
        down = derive_video_trajectory(square_grays("down"))
        ranked = motion_rank(q, [(3, down), (2, right), (1, down)])
        assert [v for v, _ in ranked] == [2, 1, 3]  # tie between 1 and 3 by id
        assert ranked[1][1] == ranked[2][1]

    def test_order_invariant_under_monotone_transform(self):
        rng = np.random.default_rng(59)
        trajs = []
        for i in range(6):
            pts = [tuple(p) for p in rng.uniform(0.2, 0.8, (5, 2))]
            trajs.append((i + 1, Trajectory(points=tuple(pts))))
        q = horizontal_stroke()
        ranked = motion_rank(q, trajs)
        scores = [s for _, s in ranked]
        transformed = sorted(
            ((v, math.exp(3 * s)) for v, s in ranked), key=lambda p: (-p[1], p[0])
        )
        assert [v for v, _ in transformed] == [v for v, _ in ranked]
        assert scores == sorted(scores, reverse=True)
