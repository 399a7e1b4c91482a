"""Domain types for instrumented activities, thread episodes and causal paths."""

from __future__ import annotations

import enum
import ipaddress
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional

from .errors import InvalidInputError


class ActivityType(str, enum.Enum):
    BEGIN = "BEGIN"
    END = "END"
    SEND = "SEND"
    RECEIVE = "RECEIVE"

    @property
    def is_message(self) -> bool:
        return self is ActivityType.SEND or self is ActivityType.RECEIVE


# Integer codes used by the array kernels.
ACTIVITY_CODES = {
    ActivityType.BEGIN: 0,
    ActivityType.END: 1,
    ActivityType.SEND: 2,
    ActivityType.RECEIVE: 3,
}


class PathClass(str, enum.Enum):
    SIMPLE = "SIMPLE"
    COMPLEX = "COMPLEX"


@lru_cache(maxsize=4096)
def is_ipv4(text: str) -> bool:
    """True if ``text`` is a dotted-quad IPv4 address in canonical form."""
    try:
        return str(ipaddress.IPv4Address(text)) == text
    except ValueError:
        return False


@dataclass(frozen=True, order=True, slots=True)
class ContextId:
    """A worker thread: (hostname, program, pid, tid)."""

    hostname: str
    program: str
    pid: int
    tid: int

    def __post_init__(self):
        if not self.hostname or not self.program:
            raise InvalidInputError("hostname and program must be non-empty")
        if any(c.isspace() or c == "," for c in self.hostname + self.program):
            raise InvalidInputError("hostname and program must not contain whitespace or commas")
        if self.pid < 0 or self.tid < 0:
            raise InvalidInputError("pid and tid must be non-negative")


@dataclass(frozen=True, order=True, slots=True)
class MessageId:
    src_ip: str
    src_port: int
    dst_ip: str
    dst_port: int

    def __post_init__(self):
        if not (is_ipv4(self.src_ip) and is_ipv4(self.dst_ip)):
            raise InvalidInputError(f"not an IPv4 address: {self.src_ip!r} / {self.dst_ip!r}")
        if not (0 <= self.src_port <= 65535 and 0 <= self.dst_port <= 65535):
            raise InvalidInputError("ports must lie in 0..65535")


def _check_activity(atype: ActivityType, timestamp_ns: int, msg: Optional[MessageId], size_bytes: int) -> None:
    if timestamp_ns < 0:
        raise InvalidInputError("timestamp_ns must be non-negative")
    if size_bytes < 0:
        raise InvalidInputError("size_bytes must be non-negative")
    if atype.is_message:
        if msg is None:
            raise InvalidInputError(f"{atype.value} requires a message id")
    else:
        if msg is not None:
            raise InvalidInputError(f"{atype.value} must not carry a message id")
        if size_bytes != 0:
            raise InvalidInputError(f"{atype.value} must have size 0")


@dataclass(frozen=True, slots=True)
class RawActivityRecord:
    atype: ActivityType
    timestamp_ns: int
    ctx: ContextId
    msg: Optional[MessageId] = None
    size_bytes: int = 0

    def __post_init__(self):
        _check_activity(self.atype, self.timestamp_ns, self.msg, self.size_bytes)


@dataclass(frozen=True, slots=True)
class TupleRecord:
    """A record after transformation; ``seq`` is the node-local emission number."""

    seq: int
    atype: ActivityType
    timestamp_ns: int
    ctx: ContextId
    msg: Optional[MessageId] = None
    size_bytes: int = 0

    def __post_init__(self):
        if self.seq < 0:
            raise InvalidInputError("seq must be non-negative")
        _check_activity(self.atype, self.timestamp_ns, self.msg, self.size_bytes)

    @classmethod
    def from_raw(cls, raw: RawActivityRecord, seq: int) -> "TupleRecord":
        return cls(seq, raw.atype, raw.timestamp_ns, raw.ctx, raw.msg, raw.size_bytes)

    def to_raw(self) -> RawActivityRecord:
        return RawActivityRecord(self.atype, self.timestamp_ns, self.ctx, self.msg, self.size_bytes)

    @property
    def signature(self) -> tuple:
        """Everything but the timestamp and sequence number."""
        return (self.atype.value, self.ctx, self.msg, self.size_bytes)


def thread_key(record: RawActivityRecord | TupleRecord) -> ContextId:
    return record.ctx


@dataclass(frozen=True, slots=True)
class Episode:
    """One thread's handling of one request: records from BEGIN through END."""

    ctx: ContextId
    records: tuple[TupleRecord, ...]

    def __post_init__(self):
        if not self.records:
            raise InvalidInputError("an episode holds at least one record")
        if any(r.ctx != self.ctx for r in self.records):
            raise InvalidInputError("all records of an episode share its context")

    @property
    def complete(self) -> bool:
        return self.records[0].atype is ActivityType.BEGIN and self.records[-1].atype is ActivityType.END

    @property
    def start_key(self) -> tuple:
        first = self.records[0]
        return (first.timestamp_ns, self.ctx, first.seq)


@dataclass(frozen=True)
class CausalPath:
    """A tree of episodes linked by the SEND that triggered each child.

    Build instances with :meth:`assemble`, which derives ``flat``, ``tiers`` and
    ``path_class`` from the tree.
    """

    root_episode: Episode
    children: tuple[tuple[TupleRecord, "CausalPath"], ...]
    flat: tuple[TupleRecord, ...]
    tiers: tuple[str, ...]
    path_class: PathClass

    @classmethod
    def assemble(cls, root: Episode, children=()) -> "CausalPath":
        children = tuple(children)
        flat = list(root.records)
        for _, child in children:
            flat.extend(child.flat)
        tiers = tuple(dict.fromkeys(r.ctx.hostname for r in flat))
        return cls(root, children, tuple(flat), tiers, _class_of(tiers))

    def episodes(self) -> Iterator[Episode]:
        yield self.root_episode
        for _, child in self.children:
            yield from child.episodes()

    @property
    def signature(self) -> tuple:
        return tuple(r.signature for r in self.flat)

    @property
    def has_messages(self) -> bool:
        return any(r.atype.is_message for r in self.flat)


def _class_of(hostnames) -> PathClass:
    n = len(set(hostnames))
    if n == 0:
        raise InvalidInputError("cannot classify an empty path")
    return PathClass.SIMPLE if n == 1 else PathClass.COMPLEX


def classify_path(path: CausalPath) -> PathClass:
    """SIMPLE when the path touches a single tier (hostname), COMPLEX otherwise."""
    return _class_of(r.ctx.hostname for r in path.flat)
