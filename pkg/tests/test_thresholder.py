import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import exhaustive_split, exhaustive_split_bruteforce
from tracetrim._pykernels import lloyd_two_means as py_lloyd
from tracetrim.errors import InvalidInputError
from tracetrim.model import ActivityType, ContextId, MessageId, PathClass, RawActivityRecord
from tracetrim.simgen import WorkloadConfig, simulate
from tracetrim.thresholder import compute_threshold, extract_first_sizes, kmeans2

SIX = [100, 120, 140, 900, 920, 940]


def test_oracles_agree():
    rng = np.random.default_rng(0)
    for _ in range(50):
        xs = rng.normal(0, 10, size=rng.integers(2, 30)).tolist()
        k, _, _, sse = exhaustive_split_bruteforce(xs)
        k2, sse2 = exhaustive_split(xs)
        assert k == k2
        assert sse == pytest.approx(sse2, rel=1e-9, abs=1e-9)


def test_six_point_example_matches_oracle():
    k, lo, hi, _ = exhaustive_split_bruteforce(SIX)
    assert (k, lo, hi) == (3, 120.0, 920.0)
    c = kmeans2(SIX)
    assert (c.c_low, c.c_high) == (120.0, 920.0)
    assert c.iterations <= 2
    assert c.assignments.tolist() == [0, 0, 0, 1, 1, 1]
    assert compute_threshold(SIX).value == 520.0


def test_constant_input():
    c = kmeans2([500, 500, 500])
    assert c.c_low == c.c_high == 500.0
    assert compute_threshold([500, 500, 500]).value == 500.0


def test_four_points_one_step():
    _, lo, hi, _ = exhaustive_split_bruteforce([1, 2, 3, 4])
    assert (lo, hi) == (1.5, 3.5)
    c = kmeans2([1, 2, 3, 4])
    assert (c.c_low, c.c_high) == (1.5, 3.5)


def test_ties_go_low():
    # 2 is equidistant from centroids 1 and 3
    c = kmeans2([1, 2, 3])
    assert c.assignments.tolist()[1] == 0


def test_empty_input_rejected():
    with pytest.raises(InvalidInputError):
        kmeans2([])
    with pytest.raises(InvalidInputError):
        compute_threshold([])


def test_max_iters_bounds_work():
    xs = np.random.default_rng(1).normal(0, 1, 5000)
    c = kmeans2(xs, max_iters=1)
    assert c.iterations == 1
    assert len(c.sse_history) == 1


def test_single_sample():
    c = kmeans2([7.0])
    assert c.c_low == c.c_high == 7.0 and c.sse == 0.0


finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)


@given(st.lists(finite, min_size=1, max_size=200))
@settings(max_examples=200)
def test_lloyd_invariants(xs):
    c = kmeans2(xs)
    assert c.c_low <= c.c_high
    hist = c.sse_history
    assert all(b <= a for a, b in zip(hist, hist[1:]))
    labels = c.assignments.tolist()
    if c.converged:
        for x, lab in zip(xs, labels):
            near_low = abs(x - c.c_low) <= abs(x - c.c_high)
            assert lab == (0 if near_low else 1)
    t = compute_threshold(xs).value
    assert c.c_low <= t <= c.c_high


@given(st.lists(st.integers(1, 100_000), min_size=2, max_size=100), st.integers(-8, 8))
@settings(max_examples=200)
def test_scale_equivariance(xs, exp):
    a = 2.0 ** exp  # power of two keeps the scaling exact
    base = kmeans2(xs)
    scaled = kmeans2([x * a for x in xs])
    assert scaled.c_low == base.c_low * a
    assert scaled.c_high == base.c_high * a
    assert scaled.assignments.tolist() == base.assignments.tolist()
    assert compute_threshold([x * a for x in xs]).value == compute_threshold(xs).value * a


def test_deterministic():
    xs = np.random.default_rng(5).normal(300, 90, 1000)
    a, b = kmeans2(xs), kmeans2(xs)
    assert (a.c_low, a.c_high, a.iterations) == (b.c_low, b.c_high, b.iterations)
    assert np.array_equal(a.assignments, b.assignments)


WEB = ContextId("web1", "httpd", 100, 7)


def _req(t, size, complex_=False):
    client = MessageId("10.0.1.1", 40000 + t, "10.0.0.1", 80)
    out = [RawActivityRecord(ActivityType.BEGIN, t, WEB), RawActivityRecord(ActivityType.RECEIVE, t + 1, WEB, client, size)]
    if complex_:
        back = MessageId("10.0.0.2", 8080, "10.0.0.1", 41000)
        out.append(RawActivityRecord(ActivityType.RECEIVE, t + 2, WEB, back, 5000))
    out.append(RawActivityRecord(ActivityType.END, t + 3, WEB))
    return out


def test_extract_first_sizes():
    stream = _req(0, 200) + _req(10, 800, complex_=True)
    assert extract_first_sizes(stream, 80) == [200, 800]
    assert extract_first_sizes([], 80) == []


def test_extract_skips_episode_without_client_message():
    stream = [RawActivityRecord(ActivityType.BEGIN, 0, WEB), RawActivityRecord(ActivityType.END, 1, WEB)]
    assert extract_first_sizes(stream + _req(5, 300), 80) == [300]


def test_threshold_between_cluster_extremes():
    records, truth = simulate(WorkloadConfig(n_requests=1000, seed=42))
    t = compute_threshold(extract_first_sizes(records["web1"], 80)).value
    assert max(truth.first_sizes(PathClass.SIMPLE)) < t < min(truth.first_sizes(PathClass.COMPLEX))


def test_transfer_pass_reaches_minimum_sse_split():
    xs = [6, 11, 21, 29, 36]
    # Lloyd alone stops at {6, 11, 21} | {29, 36} (SSE 141.17)
    _, _, labels, _, converged, _ = py_lloyd(xs, 100)
    assert converged and labels.tolist() == [0, 0, 0, 1, 1]
    k, lo, hi, sse = exhaustive_split_bruteforce(xs)
    assert k == 2 and sse == pytest.approx(125.1666667)
    c = kmeans2(xs)
    assert c.assignments.tolist() == [0, 0, 1, 1, 1]
    assert c.transfers == 1
    assert c.c_low == pytest.approx(lo) and c.c_high == pytest.approx(hi)
    assert c.sse == pytest.approx(sse)
    assert c.sse_history == sorted(c.sse_history, reverse=True)
