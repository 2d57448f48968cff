"""Feature vectors, Euclidean ranking, and the clip-query search pipeline.

Every keyframe record becomes an 86-component vector: 64 normalized joint
histogram bins, 5 min-max scaled texture features, 16 edge-block densities
and one scaled region count. Catalog and query keyframes both build their
vectors from the serialized string forms, so a self-query reproduces the
stored vector bit-exactly and ranks its own video at distance zero.

Scaling stats are corpus-wide (per-texture-feature min/max, region-count
max), recomputed lazily when the catalog revision changes, and persisted
next to the journal so repeated queries see identical scaling.
"""

from __future__ import annotations

import json
import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import features, range_index
from .catalog import (
    Catalog,
    CatalogState,
    KeyframeRecord,
    PipelineConfig,
    featurize_keyframe,
)
from .errors import DimensionMismatch
from .keyframe import FrameSeq, extract_keyframes

log = logging.getLogger(__name__)

VECTOR_DIM = 86
GLCM_COMPONENTS = ("asm", "contrast", "correlation", "idm", "entropy")


@dataclass(frozen=True)
class ScalingStats:
    glcm_min: tuple[float, float, float, float, float]
    glcm_max: tuple[float, float, float, float, float]
    majorregions_max: int

    @classmethod
    def empty(cls) -> "ScalingStats":
        zeros = (0.0,) * 5
        return cls(glcm_min=zeros, glcm_max=zeros, majorregions_max=0)


def compute_scaling_stats(records: list[KeyframeRecord]) -> ScalingStats:
    if not records:
        return ScalingStats.empty()
    rows = []
    regions_max = 0
    for kf in records:
        g = features.parse_glcm(kf.glcm)
        rows.append((g.asm, g.contrast, g.correlation, g.idm, g.entropy))
        regions_max = max(regions_max, kf.majorregions)
    arr = np.array(rows, dtype=np.float64)
    return ScalingStats(
        glcm_min=tuple(float(v) for v in arr.min(axis=0)),
        glcm_max=tuple(float(v) for v in arr.max(axis=0)),
        majorregions_max=regions_max,
    )


def scaling_stats(cat: Catalog, snap: CatalogState | None = None) -> ScalingStats:
    """Scaling stats for a catalog snapshot, served from stats.json when its
    revision matches (so repeated queries scale identically)."""
    snap = snap or cat.snapshot()
    revision = list(snap.revision)
    if cat.stats_path.exists():
        try:
            payload = json.loads(cat.stats_path.read_text(encoding="utf-8"))
            if payload.get("revision") == revision:
                return ScalingStats(
                    glcm_min=tuple(payload["glcm_min"]),
                    glcm_max=tuple(payload["glcm_max"]),
                    majorregions_max=int(payload["majorregions_max"]),
                )
        except (ValueError, KeyError) as exc:
            log.warning("ignoring unreadable stats.json: %s", exc)
    stats = compute_scaling_stats([snap.keyframes[i] for i in sorted(snap.keyframes)])
    try:
        cat.stats_path.write_text(
            json.dumps(
                {
                    "revision": revision,
                    "glcm_min": list(stats.glcm_min),
                    "glcm_max": list(stats.glcm_max),
                    "majorregions_max": stats.majorregions_max,
                }
            ),
            encoding="utf-8",
        )
    except OSError as exc:
        log.warning("could not persist stats.json: %s", exc)
    return stats


@dataclass(frozen=True)
class BlockWeights:
    histogram: float = 1.0
    glcm: float = 1.0
    edge: float = 1.0
    regions: float = 1.0


def build_vector(
    kf: KeyframeRecord, scale: ScalingStats, weights: BlockWeights = BlockWeights()
) -> np.ndarray:
    """86-component comparison vector for one keyframe record."""
    joint = features.parse_histogram(kf.sch).astype(np.float64)
    pixel_count = joint.sum()
    hist = joint / pixel_count if pixel_count else joint

    glcm = features.parse_glcm(kf.glcm)
    raw = (glcm.asm, glcm.contrast, glcm.correlation, glcm.idm, glcm.entropy)
    scaled = []
    for value, lo, hi in zip(raw, scale.glcm_min, scale.glcm_max):
        span = hi - lo
        # Catalog keyframes always land in [0,1]; the clamp only guards
        # query keyframes whose raw feature falls outside the corpus range,
        # where a near-degenerate span would otherwise blow the axis up.
        scaled.append(min(1.0, max(0.0, (value - lo) / span)) if span != 0.0 else 0.0)

    edge = np.array(features.parse_edge(kf.edgedensity).densities, dtype=np.float64)
    regions = (
        min(1.0, kf.majorregions / scale.majorregions_max)
        if scale.majorregions_max
        else 0.0
    )

    vec = np.empty(VECTOR_DIM, dtype=np.float64)
    vec[:64] = weights.histogram * hist
    vec[64:69] = weights.glcm * np.array(scaled)
    vec[69:85] = weights.edge * edge
    vec[85] = weights.regions * regions
    return vec


def euclidean_distance(a: np.ndarray, b: np.ndarray) -> float:
    if a.shape != b.shape:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    return math.sqrt(float(((a - b) ** 2).sum()))


@dataclass(frozen=True)
class ResultEntry:
    v_id: int
    distance: float
    best_query_kf: int    # position within the query's keyframe selection
    best_catalog_kf: int  # i_id of the closest stored keyframe


@dataclass(frozen=True)
class RankedResult:
    entries: tuple[ResultEntry, ...]
    retrieval_s: float
    matching_s: float


@dataclass(frozen=True)
class SearchConfig:
    k: int = 10
    min_candidates: int = 20
    max_distance: float | None = None
    aggregator: str = "min"  # or "mean_best"
    weights: BlockWeights = field(default_factory=BlockWeights)
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)


@dataclass(frozen=True)
class QueryKeyframe:
    position: int
    vector: np.ndarray
    bucket: range_index.RangeBucket


def featurize_query(
    frames: FrameSeq, scale: ScalingStats, config: SearchConfig
) -> list[QueryKeyframe]:
    """Extract and featurize the query clip's keyframes into vectors."""
    selection = extract_keyframes(frames, threshold=config.pipeline.keyframe_threshold)
    out = []
    for pos, idx in enumerate(selection.indices):
        frame = frames.frames[idx]
        feat = featurize_keyframe(frame.rgb, frame.gray, config.pipeline)
        record = KeyframeRecord(
            i_id=-1,
            i_name=frame.name[-40:] or "query",
            image_path="",
            min=feat.bucket[0],
            max=feat.bucket[1],
            sch=feat.sch,
            glcm=feat.glcm,
            edgedensity=feat.edgedensity,
            majorregions=feat.majorregions,
            v_id=-1,
        )
        out.append(
            QueryKeyframe(
                position=pos,
                vector=build_vector(record, scale, config.weights),
                bucket=feat.bucket,
            )
        )
    return out


def candidate_pool(
    cat: Catalog, bucket: range_index.RangeBucket, min_candidates: int
) -> set[int]:
    return range_index.candidate_set(cat.bucket_table, bucket, min_candidates)


def search_by_clip(
    cat: Catalog,
    query_frames: FrameSeq,
    config: SearchConfig | None = None,
    exhaustive: bool = False,
) -> RankedResult:
    """Ranked video list for a query clip.

    Per query keyframe the range index supplies a candidate pool (or, in
    exhaustive mode, every stored keyframe); a video's score aggregates the
    Euclidean distances of every evaluated (query, candidate) pair.
    """
    config = config or SearchConfig()
    t_start = time.perf_counter()
    snap = cat.snapshot()  # one consistent view for the whole query
    scale = scaling_stats(cat, snap)
    query_kfs = featurize_query(query_frames, scale, config)

    ids_in_order = sorted(snap.keyframes)
    owner = {i: snap.keyframes[i].v_id for i in ids_in_order}
    if exhaustive:
        pools = [ids_in_order for _ in query_kfs]
    else:
        pools = [
            sorted(
                range_index.candidate_set(
                    snap.bucket_table, q.bucket, config.min_candidates
                )
            )
            for q in query_kfs
        ]
    vectors = {
        i_id: build_vector(snap.keyframes[i_id], scale, config.weights)
        for pool in pools
        for i_id in pool
    }

    t_match = time.perf_counter()
    # per (video, query kf): best candidate distance
    best_per_pair: dict[tuple[int, int], tuple[float, int]] = {}
    for q, ids in zip(query_kfs, pools):
        for i_id in ids:
            d = euclidean_distance(q.vector, vectors[i_id])
            key = (owner[i_id], q.position)
            if key not in best_per_pair or (d, i_id) < best_per_pair[key]:
                best_per_pair[key] = (d, i_id)

    per_video: dict[int, list[tuple[int, float, int]]] = {}
    for (v_id, q_pos), (d, i_id) in best_per_pair.items():
        per_video.setdefault(v_id, []).append((q_pos, d, i_id))

    entries = []
    for v_id, hits in per_video.items():
        q_pos, d, i_id = min(hits, key=lambda h: (h[1], h[2], h[0]))
        if config.aggregator == "mean_best":
            score = sum(h[1] for h in hits) / len(hits)
        else:
            score = d
        entries.append(ResultEntry(
            v_id=v_id, distance=score, best_query_kf=q_pos, best_catalog_kf=i_id,
        ))
    entries.sort(key=lambda e: (e.distance, e.v_id))
    if config.max_distance is not None:
        entries = [e for e in entries if e.distance <= config.max_distance]
    entries = entries[: config.k]
    t_end = time.perf_counter()
    return RankedResult(
        entries=tuple(entries),
        retrieval_s=t_end - t_start,
        matching_s=t_end - t_match,
    )


def search_exhaustive(
    cat: Catalog, query_frames: FrameSeq, config: SearchConfig | None = None
) -> RankedResult:
    """Index-bypassing scan over every stored keyframe (pruning oracle)."""
    return search_by_clip(cat, query_frames, config, exhaustive=True)
