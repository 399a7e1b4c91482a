"""Shrink request-tracing logs by dropping records of single-tier (simple) requests.

The first-tier node learns a size threshold for the first client message
with two-cluster k-means, then a per-thread state machine keeps only the
records of requests whose first message exceeds it. Surviving tuple records
from all nodes are correlated into causal paths.
"""

from .codec import parse_raw_line, parse_tuple_line, serialize_raw, serialize_tuple
from .correlator import PathSet, build_episodes, build_paths, correlate, match_messages
from .eliminator import Decision, EliminationConfig, ThreadState, step, transform, transform_stream
from .errors import (
    ConsistencyError,
    InvalidComparisonError,
    InvalidInputError,
    ParseError,
    StageError,
    TraceError,
)
from .kernels import BACKEND
from .model import (
    ActivityType,
    CausalPath,
    ContextId,
    Episode,
    MessageId,
    PathClass,
    RawActivityRecord,
    TupleRecord,
    classify_path,
    thread_key,
)
from .report import PipelineConfig, ReductionReport, RunStats, pipeline, summarize
from .simgen import GroundTruth, WorkloadConfig, generate_workload, request_mix, simulate
from .thresholder import SizeClusters, Threshold, compute_threshold, extract_first_sizes, kmeans2

__version__ = "0.1.0"

__all__ = [
    "ActivityType",
    "BACKEND",
    "CausalPath",
    "ConsistencyError",
    "ContextId",
    "Decision",
    "EliminationConfig",
    "Episode",
    "GroundTruth",
    "InvalidComparisonError",
    "InvalidInputError",
    "MessageId",
    "ParseError",
    "PathClass",
    "PathSet",
    "PipelineConfig",
    "RawActivityRecord",
    "ReductionReport",
    "RunStats",
    "SizeClusters",
    "StageError",
    "ThreadState",
    "Threshold",
    "TraceError",
    "TupleRecord",
    "WorkloadConfig",
    "build_episodes",
    "build_paths",
    "classify_path",
    "compute_threshold",
    "correlate",
    "extract_first_sizes",
    "generate_workload",
    "kmeans2",
    "match_messages",
    "parse_raw_line",
    "parse_tuple_line",
    "pipeline",
    "request_mix",
    "serialize_raw",
    "serialize_tuple",
    "simulate",
    "step",
    "summarize",
    "thread_key",
    "transform",
    "transform_stream",
    "__version__",
]
