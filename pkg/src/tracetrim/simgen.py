"""Deterministic three-tier workload simulator.

Each request enters on web1 (port 80). Simple requests are served there
alone; complex ones fan out web1 -> app1 -> db1 and back. Every tier has a
fixed pool of worker threads, each handling one request at a time, and all
tiers share one logical nanosecond clock.
"""

from __future__ import annotations

import csv
import heapq
import logging
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .codec import write_raw_log
from .errors import InvalidInputError
from .model import ActivityType, ContextId, MessageId, PathClass, RawActivityRecord

log = logging.getLogger(__name__)

HOSTS = ("web1", "app1", "db1")


@dataclass(frozen=True)
class Tier:
    hostname: str
    ip: str
    program: str
    pid: int
    port: int


APP = Tier("app1", "10.0.0.2", "jboss", 200, 8080)
DB = Tier("db1", "10.0.0.3", "mysqld", 300, 3306)
WEB_IP = "10.0.0.1"
N_CLIENTS = 50

EPHEMERAL_LO = 40000
EPHEMERAL_HI = 65000


@dataclass
class WorkloadConfig:
    n_requests: int
    simple_frac: float = 0.8
    seed: int = 0
    first_tier_port: int = 80
    simple_size_dist: tuple[float, float] = (200.0, 20.0)
    complex_size_dist: tuple[float, float] = (800.0, 50.0)
    threads_per_tier: int = 8
    mean_interarrival_ns: int = 1_000_000
    service_time_ns: int = 100_000

    def __post_init__(self):
        if self.n_requests < 0:
            raise InvalidInputError("n_requests must be >= 0")
        if not 0.0 <= self.simple_frac <= 1.0:
            raise InvalidInputError("simple_frac must lie in [0, 1]")
        if self.threads_per_tier < 1:
            raise InvalidInputError("threads_per_tier must be positive")
        if self.mean_interarrival_ns < 1 or self.service_time_ns < 1:
            raise InvalidInputError("interarrival and service times must be positive")
        if not 0 <= self.first_tier_port <= 65535:
            raise InvalidInputError("first_tier_port must lie in 0..65535")
        for name in ("simple_size_dist", "complex_size_dist"):
            mean, sd = getattr(self, name)
            if sd < 0:
                raise InvalidInputError(f"{name}: stddev must be >= 0")
            setattr(self, name, (float(mean), float(sd)))


@dataclass(frozen=True)
class RequestTruth:
    request_id: int
    kind: PathClass
    first_size: int
    contexts: dict  # hostname -> ContextId


@dataclass
class GroundTruth:
    requests: list[RequestTruth] = field(default_factory=list)

    def __len__(self):
        return len(self.requests)

    def count(self, kind: PathClass) -> int:
        return sum(1 for r in self.requests if r.kind is kind)

    def count_simple(self) -> int:
        return self.count(PathClass.SIMPLE)

    def count_complex(self) -> int:
        return self.count(PathClass.COMPLEX)

    def first_sizes(self, kind: PathClass | None = None) -> list[int]:
        return [r.first_size for r in self.requests if kind is None or r.kind is kind]

    @property
    def separated(self) -> bool:
        """True when every complex first message is larger than every simple one."""
        simple = self.first_sizes(PathClass.SIMPLE)
        complex_ = self.first_sizes(PathClass.COMPLEX)
        if not simple or not complex_:
            return True
        return min(complex_) > max(simple)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["request_id", "kind", "first_size"])
            for r in self.requests:
                w.writerow([r.request_id, r.kind.value, r.first_size])


def read_ground_truth(path) -> list[tuple[int, PathClass, int]]:
    with open(path, newline="") as fh:
        return [
            (int(row["request_id"]), PathClass(row["kind"]), int(row["first_size"]))
            for row in csv.DictReader(fh)
        ]


def _quota(n_requests: int, simple_frac: float) -> int:
    # round half up
    return min(n_requests, int(math.floor(simple_frac * n_requests + 0.5)))


def request_mix(n_requests: int, simple_frac: float, seed: int) -> list[PathClass]:
    """Exactly ``round(simple_frac * n)`` SIMPLE kinds, the rest COMPLEX, shuffled by ``seed``."""
    n_simple = _quota(n_requests, simple_frac)
    kinds = np.array([0] * n_simple + [1] * (n_requests - n_simple), dtype=np.int8)
    rng = np.random.default_rng([seed & 0xFFFFFFFFFFFFFFFF, 0])
    rng.shuffle(kinds)
    return [PathClass.COMPLEX if k else PathClass.SIMPLE for k in kinds.tolist()]


class _PortAllocator:
    """Monotone ephemeral port counter that skips ports still in use."""

    def __init__(self):
        self.next = EPHEMERAL_LO
        self.busy_until: dict[int, int] = {}

    def take(self, start: int, end: int) -> int:
        for _ in range(EPHEMERAL_HI - EPHEMERAL_LO + 1):
            port = self.next
            self.next = EPHEMERAL_LO if port == EPHEMERAL_HI else port + 1
            if self.busy_until.get(port, -1) < start:
                self.busy_until[port] = end
                return port
        raise RuntimeError("ephemeral port range exhausted")


class _ThreadPool:
    def __init__(self, tier_pid: int, size: int):
        self.heap = [(-1, tier_pid + 1 + i) for i in range(size)]
        heapq.heapify(self.heap)

    def acquire(self, ready_at: int) -> tuple[int, int]:
        """Least-recently-freed thread; returns (tid, start time)."""
        busy_until, tid = heapq.heappop(self.heap)
        return tid, max(ready_at, busy_until + 1)

    def release(self, tid: int, at: int) -> None:
        heapq.heappush(self.heap, (at, tid))


def _draw_sizes(rng, dist, n) -> list[int]:
    mean, sd = dist
    vals = np.rint(rng.normal(mean, sd, size=n)) if n else np.empty(0)
    return np.maximum(vals, 1).astype(np.int64).tolist()


def simulate(config: WorkloadConfig) -> tuple[dict[str, list[RawActivityRecord]], GroundTruth]:
    """Run the workload in memory; returns per-host records (timestamp order) and ground truth."""
    n = config.n_requests
    kinds = request_mix(n, config.simple_frac, config.seed)
    rng = np.random.default_rng([config.seed & 0xFFFFFFFFFFFFFFFF, 1])
    gaps = np.maximum(np.rint(rng.exponential(config.mean_interarrival_ns, size=n)), 1).astype(np.int64)
    arrivals = np.cumsum(gaps).tolist()
    simple_first = _draw_sizes(rng, config.simple_size_dist, n)
    complex_first = _draw_sizes(rng, config.complex_size_dist, n)
    clients = rng.integers(1, N_CLIENTS + 1, size=n).tolist()
    static_reply = rng.integers(1_000, 20_000, size=n).tolist()
    query = rng.integers(100, 400, size=n).tolist()
    result = rng.integers(200, 4_000, size=n).tolist()
    page = rng.integers(2_000, 30_000, size=n).tolist()

    web = Tier("web1", WEB_IP, "httpd", 100, config.first_tier_port)
    pools = {t.hostname: _ThreadPool(t.pid, config.threads_per_tier) for t in (web, APP, DB)}
    ports = _PortAllocator()
    s = config.service_time_ns
    out: dict[str, list] = {h: [] for h in HOSTS}
    truth = GroundTruth()

    def emit(tier, tid, atype, ts, msg=None, size=0):
        ctx = ContextId(tier.hostname, tier.program, tier.pid, tid)
        out[tier.hostname].append(RawActivityRecord(atype, ts, ctx, msg, size))
        return ctx

    B, E, S, R = ActivityType.BEGIN, ActivityType.END, ActivityType.SEND, ActivityType.RECEIVE
    for rid in range(n):
        kind = kinds[rid]
        client_ip = f"10.0.1.{clients[rid]}"
        w_tid, t = pools["web1"].acquire(arrivals[rid])
        if kind is PathClass.SIMPLE:
            first = simple_first[rid]
            w_end = t + 2 + s
            cport = ports.take(t, w_end)
            ctx_w = emit(web, w_tid, B, t)
            emit(web, w_tid, R, t + 1, MessageId(client_ip, cport, web.ip, web.port), first)
            emit(web, w_tid, S, t + 1 + s, MessageId(web.ip, web.port, client_ip, cport), static_reply[rid])
            emit(web, w_tid, E, w_end)
            pools["web1"].release(w_tid, w_end)
            truth.requests.append(RequestTruth(rid, kind, first, {"web1": ctx_w}))
            continue

        first = complex_first[rid]
        w_send = t + 1 + s
        a_tid, a = pools["app1"].acquire(w_send + 1)
        a_send = a + 1 + s
        d_tid, d = pools["db1"].acquire(a_send + 1)
        d_send = d + 1 + s
        d_end = d + 2 + s
        a_recv2 = d_end
        a_reply = a_recv2 + s
        a_end = a_reply + 1
        w_recv2 = a_end
        w_reply = w_recv2 + s
        w_end = w_reply + 1

        cport = ports.take(t, w_end)
        wport = ports.take(w_send, w_end)
        aport = ports.take(a_send, a_end)
        to_app = MessageId(web.ip, wport, APP.ip, APP.port)
        to_db = MessageId(APP.ip, aport, DB.ip, DB.port)

        ctx_w = emit(web, w_tid, B, t)
        emit(web, w_tid, R, t + 1, MessageId(client_ip, cport, web.ip, web.port), first)
        emit(web, w_tid, S, w_send, to_app, first + 100)
        ctx_a = emit(APP, a_tid, B, a)
        emit(APP, a_tid, R, a + 1, to_app, first + 100)
        emit(APP, a_tid, S, a_send, to_db, query[rid])
        ctx_d = emit(DB, d_tid, B, d)
        emit(DB, d_tid, R, d + 1, to_db, query[rid])
        emit(DB, d_tid, S, d_send, MessageId(DB.ip, DB.port, APP.ip, aport), result[rid])
        emit(DB, d_tid, E, d_end)
        emit(APP, a_tid, R, a_recv2, MessageId(DB.ip, DB.port, APP.ip, aport), result[rid])
        emit(APP, a_tid, S, a_reply, MessageId(APP.ip, APP.port, web.ip, wport), page[rid])
        emit(APP, a_tid, E, a_end)
        emit(web, w_tid, R, w_recv2, MessageId(APP.ip, APP.port, web.ip, wport), page[rid])
        emit(web, w_tid, S, w_reply, MessageId(web.ip, web.port, client_ip, cport), page[rid] + 200)
        emit(web, w_tid, E, w_end)
        pools["db1"].release(d_tid, d_end)
        pools["app1"].release(a_tid, a_end)
        pools["web1"].release(w_tid, w_end)
        truth.requests.append(RequestTruth(rid, kind, first, {"web1": ctx_w, "app1": ctx_a, "db1": ctx_d}))

    for records in out.values():
        records.sort(key=lambda r: (r.timestamp_ns, r.ctx.pid, r.ctx.tid))
    if not truth.separated:
        log.warning(
            "first-message sizes overlap for seed %d: max simple %d >= min complex %d",
            config.seed,
            max(truth.first_sizes(PathClass.SIMPLE)),
            min(truth.first_sizes(PathClass.COMPLEX)),
        )
    return out, truth


@dataclass
class WorkloadFiles:
    logs: dict[str, Path]
    ground_truth: Path
    raw_bytes: dict[str, int]
    truth: GroundTruth
    records: dict[str, list[RawActivityRecord]]


def generate_workload(config: WorkloadConfig, out_dir) -> WorkloadFiles:
    """Simulate and write ``<host>.log`` for every host plus ``ground_truth.csv``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    records, truth = simulate(config)
    logs, sizes = {}, {}
    for host in HOSTS:
        path = out_dir / f"{host}.log"
        sizes[host] = write_raw_log(path, records[host])
        logs[host] = path
    gt_path = out_dir / "ground_truth.csv"
    truth.write_csv(gt_path)
    return WorkloadFiles(logs, gt_path, sizes, truth, records)


def existing_logs(in_dir) -> dict[str, Path]:
    """``<host>.log`` files already present in ``in_dir``, keyed by host."""
    in_dir = Path(in_dir)
    found = {p.stem: p for p in sorted(in_dir.glob("*.log"))}
    if not found:
        raise InvalidInputError(f"no .log files in {os.fspath(in_dir)}")
    return found
