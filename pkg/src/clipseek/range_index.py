"""Histogram range-finder tree: bucket assignment and candidate pruning.

The tree has 15 nodes: the full gray range, its two halves, four quarters
and eight 32-wide blocks. Assignment descends from the root; the first
level routes on whether the lower half holds more than 55% of the pixels,
deeper levels descend only when a sub-range holds more than 60%, testing
the lower sub-range before the upper. Comparisons run on exact integer
pixel sums, never on floating-point percentages.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BadPixelCount, DuplicateKeyframe

RangeBucket = tuple[int, int]

ROOT: RangeBucket = (0, 255)
EXPECTED_PIXELS = 900  # canonical 30x30 raster

# 55% of 900 = 495 exactly; 60% of 900 = 540 exactly. Strict comparisons.
_HALF_THRESHOLD_NUM = 55
_DEEP_THRESHOLD_NUM = 60


def children(bucket: RangeBucket) -> tuple[RangeBucket, RangeBucket]:
    lo, hi = bucket
    mid = (lo + hi) // 2
    return (lo, mid), (mid + 1, hi)


def parent(bucket: RangeBucket) -> RangeBucket:
    lo, hi = bucket
    width = hi - lo + 1
    plo = (lo // (2 * width)) * (2 * width)
    return (plo, plo + 2 * width - 1)


def _build_nodes() -> tuple[RangeBucket, ...]:
    nodes = [ROOT]
    level = [ROOT]
    for _ in range(3):
        level = [c for b in level for c in children(b)]
        nodes.extend(level)
    return tuple(nodes)


TREE_NODES: tuple[RangeBucket, ...] = _build_nodes()


def is_tree_node(bucket: RangeBucket) -> bool:
    return bucket in TREE_NODES


def assign_bucket(hist: np.ndarray) -> RangeBucket:
    """Descend the tree for a 900-pixel gray histogram; return the deepest
    bucket whose threshold chain holds."""
    total = int(hist.sum())
    if total != EXPECTED_PIXELS:
        raise BadPixelCount(f"histogram sums to {total}, expected {EXPECTED_PIXELS}")

    def share_exceeds(lo: int, hi: int, threshold_num: int) -> bool:
        # 100 * sum / 900 > t  <=>  100 * sum > t * 900, all integers
        return 100 * int(hist[lo : hi + 1].sum()) > threshold_num * EXPECTED_PIXELS

    lower, upper = children(ROOT)
    bucket = lower if share_exceeds(*lower, _HALF_THRESHOLD_NUM) else upper
    for _ in range(2):
        lo_child, hi_child = children(bucket)
        if share_exceeds(*lo_child, _DEEP_THRESHOLD_NUM):
            bucket = lo_child
        elif share_exceeds(*hi_child, _DEEP_THRESHOLD_NUM):
            bucket = hi_child
        else:
            break
    return bucket


@dataclass
class BucketTable:
    """Bucket -> keyframe id sets; each keyframe lives in exactly one bucket."""

    buckets: dict[RangeBucket, set[int]] = field(default_factory=dict)
    _owner: dict[int, RangeBucket] = field(default_factory=dict)

    def insert(self, keyframe_id: int, bucket: RangeBucket) -> None:
        if not is_tree_node(bucket):
            raise ValueError(f"{bucket} is not a tree node")
        if keyframe_id in self._owner:
            raise DuplicateKeyframe(f"keyframe {keyframe_id} already indexed")
        self.buckets.setdefault(bucket, set()).add(keyframe_id)
        self._owner[keyframe_id] = bucket

    def remove(self, keyframe_id: int) -> None:
        bucket = self._owner.pop(keyframe_id, None)
        if bucket is not None:
            self.buckets[bucket].discard(keyframe_id)

    def members(self, bucket: RangeBucket) -> set[int]:
        """All keyframes under `bucket`, descendants included."""
        lo, hi = bucket
        out: set[int] = set()
        for node, ids in self.buckets.items():
            if lo <= node[0] and node[1] <= hi:
                out |= ids
        return out

    def copy(self) -> "BucketTable":
        return BucketTable(
            buckets={b: set(ids) for b, ids in self.buckets.items()},
            _owner=dict(self._owner),
        )

    def __len__(self) -> int:
        return len(self._owner)

    def bucket_of(self, keyframe_id: int) -> RangeBucket | None:
        return self._owner.get(keyframe_id)


def bucket_insert(table: BucketTable, keyframe_id: int, bucket: RangeBucket) -> BucketTable:
    table.insert(keyframe_id, bucket)
    return table


def candidate_set(table: BucketTable, bucket: RangeBucket, min_candidates: int) -> set[int]:
    """Members of `bucket`, widened to ancestors until the pool reaches
    `min_candidates` or the root returns the whole catalog."""
    if not is_tree_node(bucket):
        raise ValueError(f"{bucket} is not a tree node")
    node = bucket
    while True:
        pool = table.members(node)
        if len(pool) >= min_candidates or node == ROOT:
            return pool
        node = parent(node)
