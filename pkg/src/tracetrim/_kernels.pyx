# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels; semantics identical to ``_pykernels``."""

import numpy as np
from libc.math cimport fabs

cdef enum:
    BEGIN = 0
    END = 1
    RECEIVE = 3

cdef enum:
    UNMAPPED = 0
    START = 1
    SIMPLE = 2
    COMPLEX = 3
    FINISHED = 4


def lloyd_two_means(values, int max_iters):
    cdef const double[::1] xs = np.ascontiguousarray(values, dtype=np.float64)
    cdef Py_ssize_t n = xs.shape[0]
    cdef Py_ssize_t i, n_low, n_high
    cdef double lo, hi, x, c_low, c_high, s_low, s_high, sse, d
    cdef int it, iterations = 0
    cdef bint changed, converged = False
    cdef unsigned char lab
    if n == 0:
        raise ValueError("empty input")
    lo = xs[0]
    hi = xs[0]
    for i in range(n):
        x = xs[i]
        if x < lo:
            lo = x
        if x > hi:
            hi = x
    c_low = lo
    c_high = hi
    labels = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] lv = labels
    history = []
    for it in range(1, max_iters + 1):
        iterations = it
        changed = it == 1
        s_low = 0.0
        s_high = 0.0
        n_low = 0
        n_high = 0
        for i in range(n):
            x = xs[i]
            if fabs(x - c_low) <= fabs(x - c_high):
                lab = 0
                s_low += x
                n_low += 1
            else:
                lab = 1
                s_high += x
                n_high += 1
            if lab != lv[i]:
                lv[i] = lab
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
            d = xs[i] - (c_high if lv[i] else c_low)
            sse += d * d
        history.append(sse)
    return c_low, c_high, labels, iterations, converged, history


def elimination_mask(atype, ctx, dst_port, size, Py_ssize_t n_ctx, double threshold, long long first_tier_port):
    cdef const signed char[::1] at = np.ascontiguousarray(atype, dtype=np.int8)
    cdef const long long[::1] cx = np.ascontiguousarray(ctx, dtype=np.int64)
    cdef const long long[::1] dp = np.ascontiguousarray(dst_port, dtype=np.int64)
    cdef const long long[::1] sz = np.ascontiguousarray(size, dtype=np.int64)
    cdef Py_ssize_t n = at.shape[0]
    cdef Py_ssize_t i, c
    cdef signed char a, s
    cdef long long unmapped = 0
    emit = np.zeros(n, dtype=np.uint8)
    states = np.zeros(n_ctx, dtype=np.int8)
    cdef unsigned char[::1] ev = emit
    cdef signed char[::1] st = states
    for i in range(n):
        a = at[i]
        c = cx[i]
        s = st[c]
        if a == BEGIN:
            st[c] = START
            ev[i] = 1
        elif a == RECEIVE and dp[i] == first_tier_port and s == START:
            if <double>sz[i] > threshold:
                st[c] = COMPLEX
                ev[i] = 1
            else:
                st[c] = SIMPLE
        elif a == END:
            st[c] = FINISHED
            ev[i] = 1
        elif s == COMPLEX:
            ev[i] = 1
        elif s == UNMAPPED:
            ev[i] = 1
            unmapped += 1
    return emit, states, unmapped
