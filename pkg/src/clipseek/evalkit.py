"""Precision/recall evaluation harness and benchmark reporting.

Two recall modes ship side by side. "paper" mode divides the retrieved
count by the number of relevant videos available (clamped at 1), which is
how the published result tables compute the metric; "standard" mode is the
conventional relevant-retrieved over relevant-available. Reports print
both, explicitly labeled.

The benchmark report is emitted four ways: a plain-text rendering shaped
like the published result tables, a machine-readable JSON twin, a CSV of
per-query rows, and a precision/recall scatter figure rendered to a file.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path

from .catalog import Catalog
from .errors import NoRelevantVideos, NoRetrievals, NotFound
from .keyframe import FrameSeq
from .retrieval import RankedResult, SearchConfig, search_by_clip

CSV_HEADER = "query,precision,recall_paper,recall_standard,retrieval_s,matching_s"


@dataclass(frozen=True)
class QueryJudgment:
    """Counts behind one benchmark row: matched / retrieved / available."""

    query_name: str
    relevant_retrieved: int
    total_retrieved: int
    total_relevant_available: int

    def __post_init__(self):
        ok = (
            0 <= self.relevant_retrieved <= self.total_retrieved
            and self.relevant_retrieved <= self.total_relevant_available
            and self.total_relevant_available >= 0
        )
        if not ok:
            raise ValueError(f"inconsistent judgment counts: {self}")


def precision(j: QueryJudgment) -> float:
    if j.total_retrieved == 0:
        raise NoRetrievals(f"{j.query_name}: nothing retrieved")
    return j.relevant_retrieved / j.total_retrieved


def recall(j: QueryJudgment, mode: str = "paper") -> float:
    if j.total_relevant_available == 0:
        raise NoRelevantVideos(f"{j.query_name}: no relevant videos available")
    if mode == "paper":
        return min(1.0, j.total_retrieved / j.total_relevant_available)
    if mode == "standard":
        return j.relevant_retrieved / j.total_relevant_available
    raise ValueError(f"unknown recall mode {mode!r}")


def round2(x: float) -> float:
    """Half-up rounding to 2 decimals, matching the published tables."""
    return float(Decimal(repr(x)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class BenchmarkRow:
    judgment: QueryJudgment
    precision: float
    recall_paper: float
    recall_standard: float
    retrieval_s: float
    matching_s: float
    retrieved_ids: tuple[int, ...] = ()


@dataclass(frozen=True)
class BenchmarkReport:
    rows: tuple[BenchmarkRow, ...]
    k: int
    timings_reliable: bool = True

    @property
    def mean_precision(self) -> float:
        return sum(r.precision for r in self.rows) / len(self.rows) if self.rows else 0.0

    @property
    def mean_recall_paper(self) -> float:
        return sum(r.recall_paper for r in self.rows) / len(self.rows) if self.rows else 0.0

    @property
    def mean_recall_standard(self) -> float:
        return (
            sum(r.recall_standard for r in self.rows) / len(self.rows)
            if self.rows
            else 0.0
        )


def judge_result(
    query_name: str, result: RankedResult, relevant: set[int]
) -> QueryJudgment:
    retrieved = [e.v_id for e in result.entries]
    return QueryJudgment(
        query_name=query_name,
        relevant_retrieved=len([v for v in retrieved if v in relevant]),
        total_retrieved=len(retrieved),
        total_relevant_available=len(relevant),
    )


def rows_from_judgments(judgments: list[QueryJudgment]) -> list[BenchmarkRow]:
    """Metric rows for precomputed counts (no searches run, timings zero)."""
    return [
        BenchmarkRow(
            judgment=j,
            precision=precision(j),
            recall_paper=recall(j, "paper"),
            recall_standard=recall(j, "standard"),
            retrieval_s=0.0,
            matching_s=0.0,
        )
        for j in judgments
    ]


def run_benchmark(
    cat: Catalog,
    queries: list[tuple[str, FrameSeq, set[int]]],
    config: SearchConfig | None = None,
    parallel: bool = False,
) -> BenchmarkReport:
    """Execute each (name, frames, relevant ids) query and score the results.

    Queries run sequentially by default so the timing columns are stable;
    `parallel` trades that for throughput and marks timings unreliable.
    """
    config = config or SearchConfig()
    known = {v.v_id for v in cat.videos()}
    for name, _, relevant in queries:
        missing = relevant - known
        if missing:
            raise NotFound(
                f"query {name!r} lists unknown relevant video id(s) {sorted(missing)}"
            )

    def run_one(entry):
        name, frames, relevant = entry
        t0 = time.perf_counter()
        result = search_by_clip(cat, frames, config)
        elapsed = time.perf_counter() - t0
        j = judge_result(name, result, relevant)
        return BenchmarkRow(
            judgment=j,
            precision=precision(j),
            recall_paper=recall(j, "paper"),
            recall_standard=recall(j, "standard"),
            retrieval_s=elapsed,
            matching_s=result.matching_s,
            retrieved_ids=tuple(e.v_id for e in result.entries),
        )

    if parallel:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor() as pool:
            rows = list(pool.map(run_one, queries))
    else:
        rows = [run_one(q) for q in queries]
    return BenchmarkReport(rows=tuple(rows), k=config.k, timings_reliable=not parallel)


# --- report writers ---------------------------------------------------------


def report_text(report: BenchmarkReport, recall_mode: str = "both") -> str:
    """Plain-text tables. `recall_mode` picks the recall columns of the
    metric table: "paper", "standard", or "both"; the CSV and JSON twins
    always carry both."""
    if recall_mode not in ("both", "paper", "standard"):
        raise ValueError(f"unknown recall mode {recall_mode!r}")
    show_paper = recall_mode in ("both", "paper")
    show_std = recall_mode in ("both", "standard")
    lines = []
    lines.append("Retrieval counts")
    lines.append(f"{'Query':24s} {'Matched':>8s} {'Retrieved':>10s} {'Available':>10s}")
    for r in report.rows:
        j = r.judgment
        lines.append(
            f"{j.query_name:24s} {j.relevant_retrieved:8d} "
            f"{j.total_retrieved:10d} {j.total_relevant_available:10d}"
        )
    lines.append("")
    header = "Timings (seconds)"
    if not report.timings_reliable:
        header += " [parallel run: timings unreliable]"
    lines.append(header)
    lines.append(f"{'Query':24s} {'Retrieval':>10s} {'Matching':>10s}")
    for r in report.rows:
        lines.append(
            f"{r.judgment.query_name:24s} {r.retrieval_s:10.3f} {r.matching_s:10.3f}"
        )
    lines.append("")
    lines.append("Precision / recall")
    head = f"{'Query':24s} {'Precision':>10s}"
    if show_paper:
        head += f" {'Recall(paper)':>14s}"
    if show_std:
        head += f" {'Recall(std)':>12s}"
    lines.append(head)

    def metric_row(name: str, p: float, rp: float, rs: float) -> str:
        row = f"{name:24s} {round2(p):10.2f}"
        if show_paper:
            row += f" {round2(rp):14.2f}"
        if show_std:
            row += f" {round2(rs):12.2f}"
        return row

    for r in report.rows:
        lines.append(
            metric_row(r.judgment.query_name, r.precision, r.recall_paper, r.recall_standard)
        )
    if report.rows:
        lines.append(
            metric_row(
                "mean",
                report.mean_precision,
                report.mean_recall_paper,
                report.mean_recall_standard,
            )
        )
    return "\n".join(lines) + "\n"


def report_json(report: BenchmarkReport) -> str:
    payload = {
        "k": report.k,
        "timings_reliable": report.timings_reliable,
        "queries": [
            {
                "query": r.judgment.query_name,
                "relevant_retrieved": r.judgment.relevant_retrieved,
                "total_retrieved": r.judgment.total_retrieved,
                "total_relevant_available": r.judgment.total_relevant_available,
                "precision": r.precision,
                "recall_paper": r.recall_paper,
                "recall_standard": r.recall_standard,
                "retrieval_s": r.retrieval_s,
                "matching_s": r.matching_s,
                "retrieved_ids": list(r.retrieved_ids),
            }
            for r in report.rows
        ],
        "mean_precision": report.mean_precision,
        "mean_recall_paper": report.mean_recall_paper,
        "mean_recall_standard": report.mean_recall_standard,
    }
    return json.dumps(payload, indent=2) + "\n"


def report_csv(report: BenchmarkReport) -> str:
    lines = [CSV_HEADER]
    for r in report.rows:
        lines.append(
            f"{r.judgment.query_name},{r.precision:.6f},{r.recall_paper:.6f},"
            f"{r.recall_standard:.6f},{r.retrieval_s:.6f},{r.matching_s:.6f}"
        )
    return "\n".join(lines) + "\n"


def save_figure(report: BenchmarkReport, path: str | Path) -> Path:
    """Precision/recall scatter of every query plus the mean, saved to `path`."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4.5))
    xs = [r.recall_paper for r in report.rows]
    ys = [r.precision for r in report.rows]
    ax.scatter(xs, ys, marker="o", label="query")
    if report.rows:
        ax.scatter(
            [report.mean_recall_paper],
            [report.mean_precision],
            marker="*",
            s=160,
            color="tab:red",
            label="mean",
        )
    ax.set_xlabel("Recall (paper mode)")
    ax.set_ylabel("Precision")
    ax.set_xlim(0, 1.05)
    ax.set_ylim(0, 1.05)
    ax.grid(True, alpha=0.4)
    ax.legend(loc="lower left")
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return out


def write_report(report: BenchmarkReport, out_dir: str | Path) -> dict[str, Path]:
    """Write the text/JSON/CSV renderings and the figure into `out_dir`."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "text": out / "report.txt",
        "json": out / "report.json",
        "csv": out / "report.csv",
        "figure": out / "precision_recall.png",
    }
    paths["text"].write_text(report_text(report), encoding="utf-8")
    paths["json"].write_text(report_json(report), encoding="utf-8")
    paths["csv"].write_text(report_csv(report), encoding="utf-8")
    save_figure(report, paths["figure"])
    return paths
