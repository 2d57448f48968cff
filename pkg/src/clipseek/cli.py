"""Command-line surface for every pipeline stage.

stdout carries machine-parsable results only; progress and timing go to
stderr so golden-file tests stay byte-stable. Exit codes: 0 success,
2 validation error, 1 internal error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .catalog import Catalog, PipelineConfig
from .errors import (
    BadCoordinates,
    BadPixelCount,
    ClipseekError,
    CorruptJournal,
    DegeneratePolyline,
    DimensionMismatch,
    EmptyDirectory,
    EmptySequence,
    LengthMismatch,
    MalformedImage,
    NameTooLong,
    NoRelevantVideos,
    NoRetrievals,
    NotFound,
    ParseFailure,
    UnsupportedFormat,
)
from .keyframe import extract_keyframes, ingest_frames

_VALIDATION_ERRORS = (
    BadCoordinates,
    BadPixelCount,
    CorruptJournal,
    DegeneratePolyline,
    DimensionMismatch,
    EmptyDirectory,
    EmptySequence,
    LengthMismatch,
    MalformedImage,
    NameTooLong,
    NoRelevantVideos,
    NoRetrievals,
    NotFound,
    ParseFailure,
    UnsupportedFormat,
    ValueError,
    json.JSONDecodeError,
)

DEFAULT_ADDR = "127.0.0.1:8080"


def _catalog_root(args) -> Path:
    return Path(args.catalog or os.environ.get("CLIPSEEK_CATALOG", "catalog"))


def _pipeline(args) -> PipelineConfig:
    return PipelineConfig(keyframe_threshold=args.threshold)


def cmd_register(args) -> int:
    cat = Catalog(_catalog_root(args))
    frames = ingest_frames(args.frames)
    for name, reason in frames.skipped:
        print(f"skipped {name}: {reason}", file=sys.stderr)
    record = cat.register_video(args.name, frames, _pipeline(args))
    print(f"v_id={record.v_id} keyframes={len(record.keyframe_ids)}")
    return 0


def cmd_ingest(args) -> int:
    frames = ingest_frames(args.frames)
    for name, reason in frames.skipped:
        print(f"skipped {name}: {reason}", file=sys.stderr)
    selection = extract_keyframes(frames, threshold=args.threshold)
    for idx in selection.indices:
        print(f"{idx}\t{frames.frames[idx].name}")
    print(
        f"keyframes={len(selection.indices)} of {len(frames)} "
        f"threshold={selection.threshold_used}",
        file=sys.stderr,
    )
    return 0


def cmd_search(args) -> int:
    from .retrieval import SearchConfig, search_by_clip

    cat = Catalog(_catalog_root(args))
    frames = ingest_frames(args.frames)
    config = SearchConfig(
        k=args.k,
        min_candidates=args.min_candidates,
        max_distance=args.max_distance,
        pipeline=_pipeline(args),
    )
    result = search_by_clip(cat, frames, config, exhaustive=args.exhaustive)
    if not result.entries:
        print("no results")
    for e in result.entries:
        print(f"{e.v_id}\t{cat.get_video(e.v_id).v_name}\t{e.distance:.6f}")
    print(
        f"retrieval_s={result.retrieval_s:.4f} matching_s={result.matching_s:.4f}",
        file=sys.stderr,
    )
    return 0


def _load_manifest(path: Path) -> dict:
    return json.loads(path.read_text(encoding="utf-8"))


def cmd_eval(args) -> int:
    from . import evalkit
    from .retrieval import SearchConfig

    manifest_path = Path(args.queries)
    manifest = _load_manifest(manifest_path)
    if "judgments" in manifest:
        judgments = [
            evalkit.QueryJudgment(
                query_name=str(j["query"]),
                relevant_retrieved=int(j["matched"]),
                total_retrieved=int(j["retrieved"]),
                total_relevant_available=int(j["available"]),
            )
            for j in manifest["judgments"]
        ]
        report = evalkit.BenchmarkReport(
            rows=tuple(evalkit.rows_from_judgments(judgments)), k=args.k
        )
    elif "queries" in manifest:
        cat = Catalog(_catalog_root(args))
        root = manifest_path.parent
        queries = []
        for q in manifest["queries"]:
            frames = ingest_frames(root / q["frames_dir"])
            queries.append((q["frames_dir"], frames, set(int(v) for v in q["relevant"])))
        config = SearchConfig(k=args.k, pipeline=_pipeline(args))
        report = evalkit.run_benchmark(cat, queries, config, parallel=args.parallel)
    else:
        raise ParseFailure("manifest needs a 'queries' or 'judgments' key")

    sys.stdout.write(evalkit.report_text(report, recall_mode=args.recall_mode))
    if args.report_dir:
        paths = evalkit.write_report(report, args.report_dir)
        print(
            "wrote " + " ".join(str(p) for p in paths.values()),
            file=sys.stderr,
        )
    return 0


def cmd_motion(args) -> int:
    from .motion import motion_rank, sketch_from_points

    cat = Catalog(_catalog_root(args))
    payload = _load_manifest(Path(args.sketch))
    points = payload["points"] if isinstance(payload, dict) else payload
    sketch = sketch_from_points(points)
    ranked = motion_rank(sketch, [(v.v_id, v.trajectory) for v in cat.videos()])
    if not ranked:
        print("no results")
    for v_id, score in ranked:
        print(f"{v_id}\t{cat.get_video(v_id).v_name}\t{score:.6f}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    host, _, port = args.addr.rpartition(":")
    app = create_app(
        _catalog_root(args),
        cors_origin=args.cors_origin or os.environ.get("CLIPSEEK_CORS_ORIGIN"),
    )
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))
    return 0


def cmd_seed_corpus(args) -> int:
    from .synth import register_corpus, seed_corpus

    manifest = seed_corpus(
        args.out,
        classes=args.classes,
        per_class=args.per_class,
        frames_per_video=args.frames_per_video,
    )
    print(f"videos={len(manifest['videos'])} queries={len(manifest['queries'])}")
    if args.register:
        cat = Catalog(_catalog_root(args))
        ids = register_corpus(cat, args.out)
        print(f"registered={len(ids)}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clipseek",
        description="Content-based video retrieval over frame directories.",
    )
    parser.add_argument(
        "--catalog", help="catalog root (default: $CLIPSEEK_CATALOG or ./catalog)"
    )
    sub = parser.add_subparsers(
        dest="command",
        metavar="{register,ingest,search,eval,motion,serve}",
        required=True,
    )

    p = sub.add_parser("register", help="register a frame directory as a video")
    p.add_argument("--name", required=True)
    p.add_argument("--frames", required=True)
    p.add_argument("--threshold", type=float, default=800.0)
    p.set_defaults(func=cmd_register)

    p = sub.add_parser("ingest", help="preview keyframe selection for a directory")
    p.add_argument("--frames", required=True)
    p.add_argument("--threshold", type=float, default=800.0)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("search", help="ranked clip search against the catalog")
    p.add_argument("--frames", required=True)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--max-distance", type=float, default=None)
    p.add_argument("--min-candidates", type=int, default=20)
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--threshold", type=float, default=800.0)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("eval", help="run the precision/recall benchmark")
    p.add_argument("--queries", required=True, help="manifest JSON")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--report-dir", default="eval_report")
    p.add_argument("--threshold", type=float, default=800.0)
    p.add_argument(
        "--parallel", action="store_true",
        help="run queries concurrently (timing columns become unreliable)",
    )
    p.add_argument(
        "--recall-mode", choices=["both", "paper", "standard"], default="both",
        help="recall columns shown in the printed table (files always carry both)",
    )
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("motion", help="rank videos against a sketch trajectory")
    p.add_argument("--sketch", required=True, help="JSON {points: [[x,y],...]}")
    p.set_defaults(func=cmd_motion)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--addr", default=os.environ.get("CLIPSEEK_ADDR", DEFAULT_ADDR))
    p.add_argument("--cors-origin", default=None)
    p.set_defaults(func=cmd_serve)

    # hidden fixture generator; kept out of the subcommand metavar above
    p = sub.add_parser("seed-corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--classes", type=int, default=4)
    p.add_argument("--per-class", type=int, default=10)
    p.add_argument("--frames-per-video", type=int, default=3)
    p.add_argument("--register", action="store_true")
    p.set_defaults(func=cmd_seed_corpus)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ClipseekError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
