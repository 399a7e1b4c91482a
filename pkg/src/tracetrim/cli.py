"""Command line: gen, threshold, transform, correlate, report, pipeline.

Exit codes: 0 success, 1 stage failure, 2 empty or invalid input.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import codec
from .correlator import correlate, read_summary, write_paths
from .eliminator import EliminationConfig, transform
from .errors import InvalidInputError, StageError, TraceError
from .report import PipelineConfig, RunStats, pipeline, summarize, whole_percent, write_report
from .simgen import WorkloadConfig, generate_workload
from .thresholder import DEFAULT_MAX_ITERS, compute_threshold, extract_first_sizes

EXIT_OK, EXIT_STAGE, EXIT_INPUT = 0, 1, 2


def _dist(text: str) -> tuple[float, float]:
    try:
        mean, sd = (float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected MEAN,STDDEV, got {text!r}") from None
    return mean, sd


def _dump(path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _table(rows) -> str:
    widths = [max(len(str(r[i])) for r in rows) for i in range(len(rows[0]))]
    return "\n".join("  ".join(str(c).ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows)


def _workload_args(p, require_requests=True):
    p.add_argument("--requests", type=int, required=require_requests, default=0)
    p.add_argument("--simple-frac", type=float, default=0.8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--simple-size", type=_dist, default=(200.0, 20.0), metavar="M,SD")
    p.add_argument("--complex-size", type=_dist, default=(800.0, 50.0), metavar="M,SD")
    p.add_argument("--threads", type=int, default=8, help="worker threads per tier")


def _workload(args) -> WorkloadConfig:
    return WorkloadConfig(
        n_requests=args.requests,
        simple_frac=args.simple_frac,
        seed=args.seed,
        first_tier_port=args.first_tier_port,
        simple_size_dist=args.simple_size,
        complex_size_dist=args.complex_size,
        threads_per_tier=args.threads,
    )


def cmd_gen(args) -> int:
    files = generate_workload(_workload(args), args.out)
    truth = files.truth
    rows = [("host", "records", "bytes")]
    rows += [(h, len(files.records[h]), files.raw_bytes[h]) for h in files.logs]
    print(_table(rows))
    n_simple, n_complex = truth.count_simple(), truth.count_complex()
    print(f"requests={len(truth)} simple={n_simple} complex={n_complex} separated={truth.separated}")
    if not truth.separated:
        print("warning: simple and complex first-message sizes overlap", file=sys.stderr)
    _dump(
        Path(args.out) / "gen_report.json",
        {
            "requests": len(truth),
            "simple": n_simple,
            "complex": n_complex,
            "separated": truth.separated,
            "records": {h: len(r) for h, r in files.records.items()},
            "bytes": files.raw_bytes,
        },
    )
    return EXIT_OK


def cmd_threshold(args) -> int:
    sizes = extract_first_sizes(codec.read_raw_log(args.input), args.port)
    if not sizes:
        print(f"no first-tier messages on port {args.port} in {args.input}", file=sys.stderr)
        return EXIT_INPUT
    t = compute_threshold(sizes, args.max_iters)
    c = t.clusters
    print(f"threshold={t.value:g}")
    print(_table([
        ("cluster", "centroid", "samples"),
        ("low", f"{c.c_low:.3f}", c.n_low),
        ("high", f"{c.c_high:.3f}", c.n_high),
    ]))
    print(f"samples={len(sizes)} iterations={c.iterations} converged={c.converged} sse={c.sse:.6g}")
    if args.report:
        _dump(args.report, {
            "threshold": t.value, "c_low": c.c_low, "c_high": c.c_high, "n_low": c.n_low,
            "n_high": c.n_high, "iterations": c.iterations, "converged": c.converged, "sse": c.sse,
            "samples": len(sizes),
        })
    return EXIT_OK


def cmd_transform(args) -> int:
    records = codec.read_raw_log(args.input)
    threshold = args.threshold
    if args.eliminate and threshold is None:
        sizes = extract_first_sizes(records, args.first_tier_port)
        if not sizes:
            print("cannot learn a threshold: no first-tier messages", file=sys.stderr)
            return EXIT_INPUT
        threshold = compute_threshold(sizes).value
    result = transform(records, EliminationConfig(args.eliminate, threshold, args.first_tier_port))
    out_bytes = codec.write_tuple_file(args.out, result.tuples)
    in_bytes = os.path.getsize(args.input)
    print(_table([
        ("records in", "tuples out", "dropped", "raw bytes", "tuple bytes"),
        (result.records_in, result.tuples_out, result.dropped, in_bytes, out_bytes),
    ]))
    if args.eliminate:
        print(f"threshold={threshold:g}")
    if result.unmapped_emitted:
        print(f"kept {result.unmapped_emitted} records of threads first seen mid-request", file=sys.stderr)
    _dump(f"{args.out}.json", {
        "records_in": result.records_in, "tuples_out": result.tuples_out, "dropped": result.dropped,
        "raw_bytes": in_bytes, "tuple_bytes": out_bytes, "eliminate": args.eliminate,
        "threshold": threshold, "unmapped_emitted": result.unmapped_emitted,
    })
    return EXIT_OK


def cmd_correlate(args) -> int:
    tuples, by_host = [], {}
    for path in args.inputs:
        recs = codec.read_tuple_file(path)
        by_host[Path(path).stem] = len(recs)
        tuples.extend(recs)
    extra = {
        "tuple_count": len(tuples),
        "tuple_bytes": sum(os.path.getsize(p) for p in args.inputs),
        "tuple_count_by_host": by_host,
    }
    if args.raw:
        extra["raw_bytes"] = sum(os.path.getsize(p) for p in args.raw)
    result = correlate(tuples, drop_degenerate=args.drop_degenerate)
    summary = write_paths(args.out, result, extra)
    counts = summary["by_class"]
    print(_table([
        ("paths", "simple", "complex", "degenerate dropped", "orphans"),
        (summary["paths"], counts["SIMPLE"], counts["COMPLEX"], summary["degenerate_dropped"], summary["orphans"]),
    ]))
    for o in result.orphans[:10]:
        print(f"orphan ({o.reason}): {codec.serialize_tuple(o.record)}", file=sys.stderr)
    return EXIT_OK


def cmd_report(args) -> int:
    before = RunStats.from_summary(read_summary(args.before))
    after_summary = read_summary(args.after)
    after = RunStats.from_summary(after_summary)
    report = summarize(before, after, after_summary.get("threshold"))
    print(report.render())
    out = args.out or Path(args.after).with_name("report.json")
    write_report(out, report)
    return EXIT_OK


def cmd_pipeline(args) -> int:
    cfg = PipelineConfig(
        out_dir=Path(args.out),
        workload=None if args.in_dir else _workload(args),
        in_dir=Path(args.in_dir) if args.in_dir else None,
        threshold=args.threshold,
        first_tier_port=args.first_tier_port,
        max_iters=args.max_iters,
    )
    result = pipeline(cfg)
    print(result.report.render())
    print(f"path reduction {whole_percent(result.report.path_reduction_pct)}; report written to {result.files['report']}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tracetrim", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="simulate a three-tier workload")
    _workload_args(p)
    p.add_argument("--first-tier-port", type=int, default=80)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("threshold", help="learn the first-message size threshold")
    p.add_argument("--input", required=True)
    p.add_argument("--port", type=int, default=80)
    p.add_argument("--max-iters", type=int, default=DEFAULT_MAX_ITERS)
    p.add_argument("--report", help="also write the cluster summary as JSON")
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("transform", help="raw log -> tuple records")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--eliminate", action="store_true")
    p.add_argument("--threshold", type=float)
    p.add_argument("--first-tier-port", type=int, default=80)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("correlate", help="tuple records -> causal paths")
    p.add_argument("--inputs", nargs="+", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--drop-degenerate", action="store_true")
    p.add_argument("--raw", nargs="*", default=[], help="raw logs, for byte accounting")
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("report", help="compare runs with and without elimination")
    p.add_argument("--before", required=True)
    p.add_argument("--after", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("pipeline", help="gen, threshold, transform, correlate and report in one go")
    _workload_args(p, require_requests=False)
    p.add_argument("--first-tier-port", type=int, default=80)
    p.add_argument("--out", default="pipeline_out")
    p.add_argument("--in", dest="in_dir", help="reuse <host>.log files from this directory")
    p.add_argument("--threshold", type=float)
    p.add_argument("--max-iters", type=int, default=DEFAULT_MAX_ITERS)
    p.set_defaults(func=cmd_pipeline)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT if isinstance(exc.__cause__, InvalidInputError) else EXIT_STAGE
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (TraceError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STAGE


if __name__ == "__main__":
    sys.exit(main())
