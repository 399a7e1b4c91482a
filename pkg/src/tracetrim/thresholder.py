"""First-message size threshold learned with two-cluster k-means."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import InvalidInputError
from .model import ActivityType, RawActivityRecord

DEFAULT_MAX_ITERS = 100


@dataclass
class SizeClusters:
    c_low: float
    c_high: float
    assignments: np.ndarray  # 0 = low cluster, 1 = high cluster, per input sample
    iterations: int
    sse: float
    converged: bool = True
    sse_history: list[float] = field(default_factory=list)
    transfers: int = 0  # boundary points moved by the refinement pass

    @property
    def n_low(self) -> int:
        return int(len(self.assignments) - self.assignments.sum())

    @property
    def n_high(self) -> int:
        return int(self.assignments.sum())


@dataclass(frozen=True)
class Threshold:
    value: float
    clusters: SizeClusters | None = None


def extract_first_sizes(records: Iterable[RawActivityRecord], first_tier_port: int = 80) -> list[int]:
    """Size of the first client message (RECEIVE on the first-tier port) of every episode.

    Episodes whose first-tier RECEIVE is missing contribute nothing.
    """
    waiting = {}
    sizes = []
    for rec in records:
        if rec.atype is ActivityType.BEGIN:
            waiting[rec.ctx] = True
        elif rec.atype is ActivityType.END:
            waiting[rec.ctx] = False
        elif (
            rec.atype is ActivityType.RECEIVE
            and rec.msg.dst_port == first_tier_port
            and waiting.get(rec.ctx, False)
        ):
            sizes.append(rec.size_bytes)
            waiting[rec.ctx] = False
    return sizes


def _refine(values: np.ndarray, labels: np.ndarray, c_low: float, c_high: float, sse: float):
    """Hartigan single-point transfers across the cluster boundary.

    Lloyd can stop one or two points short of the minimum-SSE split: a point
    just past the centroid midpoint may still lower the SSE when moved,
    because moving it also shifts both means. Moving x from a cluster of size
    n_from to one of size n_to changes the SSE by
    n_to/(n_to+1)*(x-c_to)**2 - n_from/(n_from-1)*(x-c_from)**2,
    and a point moves only when that is negative. Stable partitions of this
    rule are also stable under nearest-centroid assignment.
    """
    order = np.argsort(values, kind="stable")
    xs = values[order]
    k = int(len(values) - labels.sum())  # low cluster = xs[:k]
    n = len(xs)
    history, moves = [], 0
    if k == 0 or k == n:
        return c_low, c_high, labels, history, moves
    while moves < n:
        n_low, n_high = k, n - k
        best = 0.0
        step = 0
        if n_low > 1:
            x = xs[k - 1]
            delta = n_high / (n_high + 1) * (x - c_high) ** 2 - n_low / (n_low - 1) * (x - c_low) ** 2
            if delta < best:
                best, step = delta, -1
        if n_high > 1:
            x = xs[k]
            delta = n_low / (n_low + 1) * (x - c_low) ** 2 - n_high / (n_high - 1) * (x - c_high) ** 2
            if delta < best:
                best, step = delta, 1
        if step == 0:
            break
        k += step
        moves += 1
        c_low = math.fsum(xs[:k].tolist()) / k
        c_high = math.fsum(xs[k:].tolist()) / (n - k)
        sse += float(best)
        history.append(sse)
    if moves:
        labels = labels.copy()
        labels[order[:k]] = 0
        labels[order[k:]] = 1
    return c_low, c_high, labels, history, moves


def kmeans2(sizes: Sequence[float], max_iters: int = DEFAULT_MAX_ITERS) -> SizeClusters:
    """Two-cluster k-means: Lloyd's algorithm from (min, max), then boundary transfers.

    Points equidistant from both centroids go to the low cluster. Lloyd stops
    once an assignment pass changes nothing or ``max_iters`` passes ran; a
    converged result is then polished with single-point transfers (see
    :func:`_refine`) so the split reaches the minimum-SSE one.
    """
    values = np.asarray(sizes, dtype=np.float64).ravel()
    if values.size == 0:
        raise InvalidInputError("kmeans2 needs at least one sample")
    if max_iters < 1:
        raise InvalidInputError("max_iters must be >= 1")
    if not np.all(np.isfinite(values)):
        raise InvalidInputError("sizes must be finite")
    c_low, c_high, labels, iterations, converged, history = kernels.lloyd_two_means(values, int(max_iters))
    history = [float(h) for h in history]
    transfers = 0
    if converged:
        c_low, c_high, labels, extra, transfers = _refine(values, labels, float(c_low), float(c_high), history[-1])
        history.extend(extra)
    return SizeClusters(
        c_low=float(c_low),
        c_high=float(c_high),
        assignments=labels,
        iterations=int(iterations),
        sse=history[-1],
        converged=bool(converged),
        sse_history=history,
        transfers=transfers,
    )


def compute_threshold(sizes: Sequence[float], max_iters: int = DEFAULT_MAX_ITERS) -> Threshold:
    clusters = kmeans2(sizes, max_iters)
    return Threshold((clusters.c_low + clusters.c_high) / 2.0, clusters)
