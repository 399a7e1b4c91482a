"""Before/after reduction report and the end-to-end pipeline."""

from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

from . import codec
from .correlator import PathSet, correlate, write_paths
from .eliminator import EliminationConfig, transform
from .errors import InvalidComparisonError, StageError, TraceError
from .simgen import WorkloadConfig, existing_logs, generate_workload
from .thresholder import DEFAULT_MAX_ITERS, compute_threshold, extract_first_sizes


@dataclass
class RunStats:
    """Totals for one branch (with or without elimination) of a run."""

    raw_bytes: int
    tuple_count: int
    tuple_bytes: int
    path_count: int
    class_counts: dict[str, int]
    degenerate_dropped: int = 0
    tuple_count_by_host: dict[str, int] = field(default_factory=dict)

    @classmethod
    def from_summary(cls, summary: dict) -> "RunStats":
        return cls(
            raw_bytes=int(summary.get("raw_bytes", 0)),
            tuple_count=int(summary.get("tuple_count", summary.get("records_in", 0))),
            tuple_bytes=int(summary.get("tuple_bytes", 0)),
            path_count=int(summary["paths"]),
            class_counts=dict(summary["by_class"]),
            degenerate_dropped=int(summary.get("degenerate_dropped", 0)),
            tuple_count_by_host=dict(summary.get("tuple_count_by_host", {})),
        )


def reduction_pct(before: int, after: int) -> float:
    if before == 0:
        return 0.0
    return 100.0 * (before - after) / before


def whole_percent(pct: float) -> str:
    return f"{int(math.floor(pct + 0.5))}%"


@dataclass
class ReductionReport:
    raw_bytes: int
    tuple_bytes_before: int
    tuple_bytes_after: int
    tuple_count_before: int
    tuple_count_after: int
    path_count_before: int
    path_count_after: int
    path_class_counts_before: dict[str, int]
    path_class_counts_after: dict[str, int]
    degenerate_dropped: int
    tuple_reduction_pct: float
    tuple_count_reduction_pct: float
    path_reduction_pct: float
    threshold: Optional[float] = None
    tuple_count_by_host_before: dict[str, int] = field(default_factory=dict)
    tuple_count_by_host_after: dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def render(self) -> str:
        rows = [
            ("", "Original logs", "Tuple Records", "Causal Paths"),
            (
                "No elimination",
                f"{self.raw_bytes} B",
                f"{self.tuple_count_before} ({self.tuple_bytes_before} B)",
                str(self.path_count_before),
            ),
            (
                "Elimination",
                f"{self.raw_bytes} B",
                f"{self.tuple_count_after} ({self.tuple_bytes_after} B)",
                str(self.path_count_after),
            ),
        ]
        widths = [max(len(r[i]) for r in rows) for i in range(4)]
        lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in rows]
        lines.append(
            f"tuple records reduce by {whole_percent(self.tuple_reduction_pct)} "
            f"(count {whole_percent(self.tuple_count_reduction_pct)}), "
            f"causal paths reduce by {whole_percent(self.path_reduction_pct)}"
        )
        after = self.path_class_counts_after
        lines.append(
            f"paths after elimination: {after.get('COMPLEX', 0)} complex, {after.get('SIMPLE', 0)} simple; "
            f"degenerate dropped: {self.degenerate_dropped}"
        )
        if self.threshold is not None:
            lines.append(f"threshold={self.threshold:g}")
        return "\n".join(lines)


def summarize(before: RunStats, after: RunStats, threshold: Optional[float] = None) -> ReductionReport:
    if before.raw_bytes != after.raw_bytes:
        raise InvalidComparisonError(
            f"runs consumed different raw logs ({before.raw_bytes} vs {after.raw_bytes} bytes)"
        )
    if after.tuple_count > before.tuple_count or after.tuple_bytes > before.tuple_bytes:
        raise InvalidComparisonError("the eliminated run has more tuple records than the full run")
    if after.path_count > before.path_count:
        raise InvalidComparisonError("the eliminated run has more paths than the full run")
    return ReductionReport(
        raw_bytes=before.raw_bytes,
        tuple_bytes_before=before.tuple_bytes,
        tuple_bytes_after=after.tuple_bytes,
        tuple_count_before=before.tuple_count,
        tuple_count_after=after.tuple_count,
        path_count_before=before.path_count,
        path_count_after=after.path_count,
        path_class_counts_before=dict(before.class_counts),
        path_class_counts_after=dict(after.class_counts),
        degenerate_dropped=after.degenerate_dropped,
        tuple_reduction_pct=round(reduction_pct(before.tuple_bytes, after.tuple_bytes), 2),
        tuple_count_reduction_pct=round(reduction_pct(before.tuple_count, after.tuple_count), 2),
        path_reduction_pct=round(reduction_pct(before.path_count, after.path_count), 2),
        threshold=threshold,
        tuple_count_by_host_before=dict(before.tuple_count_by_host),
        tuple_count_by_host_after=dict(after.tuple_count_by_host),
    )


def write_report(path, report: ReductionReport) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


@dataclass
class PipelineConfig:
    out_dir: Path
    workload: Optional[WorkloadConfig] = None
    in_dir: Optional[Path] = None
    threshold: Optional[float] = None
    first_tier_host: str = "web1"
    first_tier_port: int = 80
    max_iters: int = DEFAULT_MAX_ITERS


@dataclass
class PipelineResult:
    report: ReductionReport
    threshold: Optional[float]
    before: PathSet
    after: PathSet
    files: dict[str, Path]
    truth: object = None


class _Stage:
    def __init__(self, name):
        self.name = name

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc is not None and not isinstance(exc, StageError) and isinstance(exc, (TraceError, OSError, ValueError)):
            raise StageError(self.name, exc) from exc
        return False


def _branch(records_by_host, out_dir: Path, configs: dict[str, EliminationConfig], drop_degenerate: bool,
            paths_file: Path, raw_bytes: int, threshold):
    out_dir.mkdir(parents=True, exist_ok=True)
    with _Stage("transform"):
        tuples, by_host, bytes_by_host, unmapped = [], {}, {}, 0
        for host, records in records_by_host.items():
            result = transform(records, configs[host])
            path = out_dir / f"{host}.tup"
            codec.write_tuple_file(path, result.tuples)
            bytes_by_host[host] = os.path.getsize(path)
            by_host[host] = result.tuples_out
            unmapped += result.unmapped_emitted
            tuples.extend(result.tuples)
    with _Stage("correlate"):
        paths = correlate(tuples, drop_degenerate=drop_degenerate)
        summary = write_paths(
            paths_file,
            paths,
            {
                "raw_bytes": raw_bytes,
                "tuple_count": len(tuples),
                "tuple_bytes": sum(bytes_by_host.values()),
                "tuple_count_by_host": by_host,
                "tuple_bytes_by_host": bytes_by_host,
                "unmapped_emitted": unmapped,
                "threshold": threshold,
            },
        )
    return paths, RunStats.from_summary(summary)


def pipeline(config: PipelineConfig) -> PipelineResult:
    """gen -> threshold -> transform (both branches) -> correlate (both) -> summarize."""
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    truth = None
    with _Stage("gen"):
        if config.in_dir is not None:
            logs = existing_logs(config.in_dir)
            records = {h: codec.read_raw_log(p) for h, p in logs.items()}
        else:
            files = generate_workload(config.workload or WorkloadConfig(n_requests=0), out)
            logs, records, truth = files.logs, files.records, files.truth
        raw_bytes = sum(os.path.getsize(p) for p in logs.values())

    with _Stage("threshold"):
        threshold = config.threshold
        if threshold is None:
            sizes = extract_first_sizes(records.get(config.first_tier_host, []), config.first_tier_port)
            if sizes:
                threshold = compute_threshold(sizes, config.max_iters).value

    port = config.first_tier_port
    full = {h: EliminationConfig(False, None, port) for h in records}
    elim = dict(full)
    if threshold is not None and config.first_tier_host in records:
        elim[config.first_tier_host] = EliminationConfig(True, threshold, port)

    before, stats_before = _branch(records, out / "noelim", full, False, out / "paths_noelim.jsonl",
                                   raw_bytes, None)
    after, stats_after = _branch(records, out / "elim", elim, True, out / "paths_elim.jsonl",
                                 raw_bytes, threshold)
    with _Stage("summarize"):
        report = summarize(stats_before, stats_after, threshold)
        write_report(out / "report.json", report)
    files = {
        **{f"{h}.log": Path(p) for h, p in logs.items()},
        "paths_noelim": out / "paths_noelim.jsonl",
        "paths_elim": out / "paths_elim.jsonl",
        "report": out / "report.json",
    }
    return PipelineResult(report, threshold, before, after, files, truth)
