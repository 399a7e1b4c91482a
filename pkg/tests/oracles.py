"""Independent reference computations used to derive expected test values."""

import numpy as np


def exhaustive_split_bruteforce(values):
    """Minimum-SSE two-way split of the sorted values, trying every split point directly."""
    xs = sorted(values)
    best = None
    for k in range(1, len(xs)):
        left, right = xs[:k], xs[k:]
        ml = sum(left) / len(left)
        mr = sum(right) / len(right)
        sse = sum((x - ml) ** 2 for x in left) + sum((x - mr) ** 2 for x in right)
        if best is None or sse < best[3]:
            best = (k, ml, mr, sse)
    return best


def exhaustive_split(values):
    """Same result as the brute force, in O(n log n) with prefix sums.

    Returns (k, c_low, c_high, sse) where the low cluster is the k smallest values.
    """
    xs = np.sort(np.asarray(values, dtype=np.float64))
    n = len(xs)
    # centre first so the prefix-sum SSE formula stays well conditioned
    xs = xs - xs.mean()
    cs = np.cumsum(xs)
    cs2 = np.cumsum(xs * xs)
    k = np.arange(1, n)
    left = cs2[k - 1] - cs[k - 1] ** 2 / k
    right = (cs2[-1] - cs2[k - 1]) - (cs[-1] - cs[k - 1]) ** 2 / (n - k)
    sse = left + right
    j = int(np.argmin(sse))
    return int(k[j]), sse[j]


def fifo_pairs(sends, receives):
    """FIFO message matching by sorting both time lists and zipping them."""
    return list(zip(sorted(sends), sorted(receives)))


def web1_tuples_expected(n_simple, n_complex, eliminate):
    """web1 records per request: simple 4 (2 kept), complex 6 (all kept)."""
    return (2 if eliminate else 4) * n_simple + 6 * n_complex

