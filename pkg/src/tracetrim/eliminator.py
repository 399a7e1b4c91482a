"""Transformation stage: raw records to tuple records, with optional elimination.

On the first-tier node, each thread context carries a state

    start   -- a BEGIN was seen, the first client message not yet
    simple  -- first client message at or below the threshold
    complex -- first client message above the threshold
    end     -- END was seen

and records are kept or dropped as follows:

1. BEGIN: state := start, keep.
2. RECEIVE on the first-tier port while in start: complex and keep when the
   size exceeds the threshold, otherwise simple and drop.
3. END: state := end, keep.
4. anything else: keep in complex (or for a context never seen), drop otherwise.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from . import kernels
from .errors import InvalidInputError
from .model import ACTIVITY_CODES, ActivityType, ContextId, RawActivityRecord, TupleRecord


class ThreadState(str, enum.Enum):
    START = "start"
    SIMPLE = "simple"
    COMPLEX = "complex"
    END = "end"


class Decision(str, enum.Enum):
    EMIT = "EMIT"
    DROP = "DROP"


StateMap = dict  # ContextId -> ThreadState

_STATE_FROM_CODE = {1: ThreadState.START, 2: ThreadState.SIMPLE, 3: ThreadState.COMPLEX, 4: ThreadState.END}


@dataclass(frozen=True)
class EliminationConfig:
    eliminate: bool = False
    threshold: Optional[float] = None
    first_tier_port: int = 80

    def __post_init__(self):
        if self.eliminate and self.threshold is None:
            raise InvalidInputError("a threshold is required when eliminating")


def step(state_map: StateMap, record: RawActivityRecord, config: EliminationConfig) -> tuple[Decision, StateMap]:
    """Advance ``state_map`` (in place) by one record and decide its fate.

    With ``config.eliminate`` off the state still advances but the record is
    always emitted.
    """
    atype = record.atype
    ctx = record.ctx
    state = state_map.get(ctx)
    if atype is ActivityType.BEGIN:
        state_map[ctx] = ThreadState.START
        decision = Decision.EMIT
    elif (
        atype is ActivityType.RECEIVE
        and record.msg.dst_port == config.first_tier_port
        and state is ThreadState.START
    ):
        threshold = config.threshold if config.threshold is not None else float("inf")
        if record.size_bytes > threshold:
            state_map[ctx] = ThreadState.COMPLEX
            decision = Decision.EMIT
        else:
            state_map[ctx] = ThreadState.SIMPLE
            decision = Decision.DROP
    elif atype is ActivityType.END:
        state_map[ctx] = ThreadState.END
        decision = Decision.EMIT
    elif state is ThreadState.COMPLEX or state is None:
        decision = Decision.EMIT
    else:
        decision = Decision.DROP
    if not config.eliminate:
        decision = Decision.EMIT
    return decision, state_map


@dataclass
class Transformed:
    tuples: list[TupleRecord]
    records_in: int
    dropped: int
    unmapped_emitted: int = 0
    states: StateMap = field(default_factory=dict)

    @property
    def tuples_out(self) -> int:
        return len(self.tuples)


def transform(records: Iterable[RawActivityRecord], config: EliminationConfig) -> Transformed:
    records = list(records)
    if not config.eliminate:
        tuples = [TupleRecord.from_raw(r, i) for i, r in enumerate(records)]
        return Transformed(tuples, len(records), 0)

    index: dict[ContextId, int] = {}
    n = len(records)
    atype = np.empty(n, dtype=np.int8)
    ctx = np.empty(n, dtype=np.int64)
    dst_port = np.full(n, -1, dtype=np.int64)
    size = np.empty(n, dtype=np.int64)
    for i, r in enumerate(records):
        atype[i] = ACTIVITY_CODES[r.atype]
        ctx[i] = index.setdefault(r.ctx, len(index))
        if r.msg is not None:
            dst_port[i] = r.msg.dst_port
        size[i] = r.size_bytes
    emit, codes, unmapped = kernels.elimination_mask(
        atype, ctx, dst_port, size, len(index), float(config.threshold), int(config.first_tier_port)
    )
    keep = np.flatnonzero(emit).tolist()
    tuples = [TupleRecord.from_raw(records[i], seq) for seq, i in enumerate(keep)]
    codes = codes.tolist()
    states = {c: _STATE_FROM_CODE[codes[j]] for c, j in index.items() if codes[j]}
    return Transformed(tuples, n, n - len(tuples), int(unmapped), states)


def transform_stream(records: Iterable[RawActivityRecord], config: EliminationConfig) -> list[TupleRecord]:
    return transform(records, config).tuples
