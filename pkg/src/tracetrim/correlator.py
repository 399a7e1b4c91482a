"""Correlation stage: merge tuple records from every node into causal paths.

Records are grouped into per-thread episodes (BEGIN..END). SEND and RECEIVE
records with equal message ids are paired first-in first-out. An episode's
parent is the episode holding the SEND matched to its first RECEIVE, provided
that episode started earlier. Episodes without such a parent (the client is
not instrumented) are roots, and every root yields one path.
"""

from __future__ import annotations

import json
from collections import Counter, defaultdict, deque
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import ConsistencyError, InvalidInputError
from .model import ActivityType, CausalPath, Episode, PathClass, TupleRecord

NO_EPISODE = "no enclosing episode"
UNMATCHED = "unmatched message"


@dataclass(frozen=True)
class MessageEdge:
    send: TupleRecord
    receive: TupleRecord


@dataclass(frozen=True)
class Orphan:
    record: TupleRecord
    reason: str


@dataclass
class PathSet:
    paths: list[CausalPath] = field(default_factory=list)
    orphans: list[Orphan] = field(default_factory=list)
    degenerate_dropped: int = 0
    degenerate_records: int = 0
    unmatched_messages: int = 0
    n_input: int = 0

    def class_counts(self) -> dict[str, int]:
        counts = Counter(p.path_class.value for p in self.paths)
        return {c.value: counts.get(c.value, 0) for c in PathClass}

    @property
    def records_in_paths(self) -> int:
        return sum(len(p.flat) for p in self.paths)


def _record_key(r: TupleRecord):
    return (r.timestamp_ns, r.seq)


def build_episodes(tuples: Iterable[TupleRecord]) -> tuple[list[Episode], list[Orphan]]:
    """Split each thread's records at BEGIN boundaries.

    A span cut short by the next BEGIN or by the end of the trace is still an
    episode (it lacks its END); records outside every span are orphans.
    """
    by_ctx = defaultdict(list)
    for r in tuples:
        by_ctx[r.ctx].append(r)
    episodes, orphans = [], []
    for ctx, recs in by_ctx.items():
        recs.sort(key=_record_key)
        current = None
        for r in recs:
            if r.atype is ActivityType.BEGIN:
                if current:
                    episodes.append(Episode(ctx, tuple(current)))
                current = [r]
            elif current is None:
                orphans.append(Orphan(r, NO_EPISODE))
            else:
                current.append(r)
                if r.atype is ActivityType.END:
                    episodes.append(Episode(ctx, tuple(current)))
                    current = None
        if current:
            episodes.append(Episode(ctx, tuple(current)))
    episodes.sort(key=lambda e: e.start_key)
    orphans.sort(key=lambda o: (o.record.ctx.hostname, o.record.timestamp_ns, o.record.ctx, o.record.seq))
    return episodes, orphans


def match_messages(tuples: Iterable[TupleRecord]) -> tuple[list[MessageEdge], list[TupleRecord]]:
    """FIFO pairing of SENDs and RECEIVEs per message id.

    Returns the edges and the message records left unpaired. A RECEIVE only
    pairs with a SEND at the same or an earlier timestamp.
    """
    by_msg = defaultdict(list)
    for r in tuples:
        if r.atype.is_message:
            by_msg[r.msg].append(r)
    edges, unmatched = [], []
    for recs in by_msg.values():
        recs.sort(key=lambda r: (r.timestamp_ns, r.atype is ActivityType.RECEIVE, r.ctx, r.seq))
        pending = deque()
        for r in recs:
            if r.atype is ActivityType.SEND:
                pending.append(r)
            elif pending:
                edges.append(MessageEdge(pending.popleft(), r))
            else:
                unmatched.append(r)
        unmatched.extend(pending)
    edges.sort(key=lambda e: (e.send.timestamp_ns, e.send.ctx, e.send.seq))
    return edges, unmatched


def build_paths(episodes: list[Episode], edges: list[MessageEdge], drop_degenerate: bool = False) -> PathSet:
    owner = {}
    for i, ep in enumerate(episodes):
        for r in ep.records:
            owner[id(r)] = i
    sender_of = {id(e.receive): e.send for e in edges}

    parent = [None] * len(episodes)
    children = defaultdict(list)
    for i, ep in enumerate(episodes):
        first_recv = next((r for r in ep.records if r.atype is ActivityType.RECEIVE), None)
        if first_recv is None:
            continue
        send = sender_of.get(id(first_recv))
        if send is None:
            continue
        j = owner.get(id(send))
        # a parent starts strictly earlier; this rejects reply edges seen first in truncated traces
        if j is None or not episodes[j].start_key < ep.start_key:
            continue
        parent[i] = j
        children[j].append((send, i))
    for kids in children.values():
        kids.sort(key=lambda sk: (sk[0].timestamp_ns, sk[0].seq, episodes[sk[1]].start_key))

    roots = sorted((i for i in range(len(episodes)) if parent[i] is None), key=lambda i: episodes[i].start_key)
    built: dict[int, CausalPath] = {}
    # iterative post-order so deep chains do not hit the recursion limit
    for root in roots:
        stack = [(root, False)]
        while stack:
            i, expanded = stack.pop()
            if expanded:
                built[i] = CausalPath.assemble(episodes[i], [(s, built[k]) for s, k in children[i]])
                continue
            stack.append((i, True))
            stack.extend((k, False) for _, k in children[i])
    if len(built) != len(episodes):
        raise ConsistencyError(f"{len(episodes) - len(built)} episodes form a parent cycle")

    result = PathSet()
    for i in roots:
        path = built[i]
        if drop_degenerate and not path.has_messages:
            result.degenerate_dropped += 1
            result.degenerate_records += len(path.flat)
            continue
        result.paths.append(path)
    return result


def correlate(tuples: Iterable[TupleRecord], drop_degenerate: bool = False) -> PathSet:
    tuples = list(tuples)
    episodes, orphans = build_episodes(tuples)
    placed = [r for ep in episodes for r in ep.records]
    edges, unmatched = match_messages(placed)
    result = build_paths(episodes, edges, drop_degenerate)
    result.orphans = orphans
    result.unmatched_messages = len(unmatched)
    result.n_input = len(tuples)
    return result


def _record_fields(r: TupleRecord) -> list:
    m = r.msg
    ep = [None] * 4 if m is None else [m.src_ip, m.src_port, m.dst_ip, m.dst_port]
    c = r.ctx
    return [r.seq, r.atype.value, r.timestamp_ns, c.hostname, c.program, c.pid, c.tid, *ep, r.size_bytes]


def path_to_json(path_id: int, path: CausalPath) -> dict:
    return {
        "path_id": path_id,
        "class": path.path_class.value,
        "tiers": list(path.tiers),
        "n_records": len(path.flat),
        "records": [_record_fields(r) for r in path.flat],
    }


def summary_of(result: PathSet, extra: Optional[dict] = None) -> dict:
    summary = {
        "paths": len(result.paths),
        "by_class": result.class_counts(),
        "degenerate_dropped": result.degenerate_dropped,
        "degenerate_records": result.degenerate_records,
        "orphans": len(result.orphans),
        "orphan_records": [
            {"reason": o.reason, "record": _record_fields(o.record)} for o in result.orphans
        ],
        "unmatched_messages": result.unmatched_messages,
        "records_in": result.n_input,
        "records_in_paths": result.records_in_paths,
    }
    if extra:
        summary.update(extra)
    return summary


def write_paths(path, result: PathSet, extra: Optional[dict] = None) -> dict:
    """Write one JSON object per path plus a final ``{"summary": ...}`` line; returns the summary."""
    summary = summary_of(result, extra)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for i, p in enumerate(result.paths):
            fh.write(json.dumps(path_to_json(i, p), separators=(",", ":")))
            fh.write("\n")
        fh.write(json.dumps({"summary": summary}, separators=(",", ":"), sort_keys=True))
        fh.write("\n")
    return summary


def read_summary(path) -> dict:
    """The summary object from the last line of a paths file."""
    last = None
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                last = line
    if last is None:
        raise InvalidInputError(f"{path}: empty paths file")
    obj = json.loads(last)
    if "summary" not in obj:
        raise InvalidInputError(f"{path}: missing summary line")
    return obj["summary"]
