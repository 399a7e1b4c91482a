"""Pure-Python kernels. ``_kernels.pyx`` mirrors these operation for operation."""

from __future__ import annotations

import numpy as np

# activity codes
BEGIN, END, SEND, RECEIVE = 0, 1, 2, 3
# thread state codes; 0 means the context has not been seen yet
UNMAPPED, START, SIMPLE, COMPLEX, FINISHED = 0, 1, 2, 3, 4


def lloyd_two_means(values, max_iters):
    """Two-centroid Lloyd iteration started from (min, max).

    Returns ``(c_low, c_high, labels, iterations, converged, sse_history)``;
    ``sse_history`` holds the within-cluster SSE after every centroid update.
    """
    xs = np.asarray(values, dtype=np.float64).tolist()
    n = len(xs)
    if n == 0:
        raise ValueError("empty input")
    lo = hi = xs[0]
    for x in xs:
        if x < lo:
            lo = x
        if x > hi:
            hi = x
    c_low, c_high = lo, hi
    labels = [0] * n
    history = []
    iterations = 0
    converged = False
    for it in range(1, max_iters + 1):
        iterations = it
        changed = it == 1
        s_low = s_high = 0.0
        n_low = n_high = 0
        for i in range(n):
            x = xs[i]
            if abs(x - c_low) <= abs(x - c_high):
                lab = 0
                s_low += x
                n_low += 1
            else:
                lab = 1
                s_high += x
                n_high += 1
            if lab != labels[i]:
                labels[i] = lab
                changed = True
        if not changed:
            converged = True
            break
        if n_low:
            c_low = s_low / n_low
        if n_high:
            c_high = s_high / n_high
        sse = 0.0
        for i in range(n):
            d = xs[i] - (c_high if labels[i] else c_low)
            sse += d * d
        history.append(sse)
    return c_low, c_high, np.array(labels, dtype=np.uint8), iterations, converged, history


def elimination_mask(atype, ctx, dst_port, size, n_ctx, threshold, first_tier_port):
    """Run the per-thread elimination state machine over one node's stream.

    Returns ``(emit, states, unmapped_emits)``: a 0/1 mask per record, the final
    state code per context index, and how many records were kept only because
    their context had never been seen.
    """
    atype = np.asarray(atype).tolist()
    ctx = np.asarray(ctx).tolist()
    dst_port = np.asarray(dst_port).tolist()
    size = np.asarray(size).tolist()
    n = len(atype)
    states = [UNMAPPED] * n_ctx
    emit = [0] * n
    unmapped = 0
    for i in range(n):
        a = atype[i]
        c = ctx[i]
        s = states[c]
        if a == BEGIN:
            states[c] = START
            emit[i] = 1
        elif a == RECEIVE and dst_port[i] == first_tier_port and s == START:
            if size[i] > threshold:
                states[c] = COMPLEX
                emit[i] = 1
            else:
                states[c] = SIMPLE
        elif a == END:
            states[c] = FINISHED
            emit[i] = 1
        elif s == COMPLEX:
            emit[i] = 1
        elif s == UNMAPPED:
            emit[i] = 1
            unmapped += 1
    return np.array(emit, dtype=np.uint8), np.array(states, dtype=np.int8), unmapped
