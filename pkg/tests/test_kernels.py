"""The compiled and pure-Python kernels must agree exactly."""

import numpy as np
import pytest

from tracetrim import kernels
from tracetrim._pykernels import elimination_mask as py_mask
from tracetrim._pykernels import lloyd_two_means as py_lloyd

needs_ext = pytest.mark.skipif(kernels.BACKEND != "cython", reason="compiled kernels not built")


@needs_ext
@pytest.mark.parametrize("seed", range(20))
def test_lloyd_parity(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 3000))
    xs = np.concatenate([rng.normal(100, 15, n), rng.normal(400, 40, n // 3 + 1)])
    rng.shuffle(xs)
    c = kernels.BACKENDS["cython"].lloyd_two_means(xs, 100)
    p = py_lloyd(xs, 100)
    assert c[0] == p[0] and c[1] == p[1]
    assert np.array_equal(c[2], p[2])
    assert c[3:] == p[3:]


@needs_ext
@pytest.mark.parametrize("seed", range(20))
def test_elimination_parity(seed):
    rng = np.random.default_rng(seed)
    n, n_ctx = 500, 7
    atype = rng.integers(0, 4, n).astype(np.int8)
    ctx = rng.integers(0, n_ctx, n)
    dst = np.where(rng.random(n) < 0.5, 80, 8080)
    size = rng.integers(0, 1000, n)
    c = kernels.BACKENDS["cython"].elimination_mask(atype, ctx, dst, size, n_ctx, 500.0, 80)
    p = py_mask(atype, ctx, dst, size, n_ctx, 500.0, 80)
    assert np.array_equal(c[0], p[0])
    assert np.array_equal(c[1], p[1])
    assert c[2] == p[2]


def test_backend_reported():
    assert kernels.BACKEND in kernels.BACKENDS
    assert "python" in kernels.BACKENDS


def test_empty_lloyd_input_raises():
    for impl in kernels.BACKENDS.values():
        with pytest.raises(ValueError):
            impl.lloyd_two_means(np.empty(0), 10)


def test_fallback_selected_when_extension_missing(monkeypatch):
    import importlib
    import sys

    import tracetrim

    monkeypatch.setitem(sys.modules, "tracetrim._kernels", None)  # makes the import fail
    monkeypatch.delattr(tracetrim, "_kernels", raising=False)
    try:
        reloaded = importlib.reload(kernels)
        assert reloaded.BACKEND == "python"
        assert reloaded.lloyd_two_means is py_lloyd
    finally:
        monkeypatch.undo()
        importlib.reload(kernels)


def test_pipeline_identical_on_both_backends(tmp_path, monkeypatch):
    from tracetrim.report import PipelineConfig, pipeline
    from tracetrim.simgen import WorkloadConfig

    cfg = WorkloadConfig(400, seed=21)
    native = pipeline(PipelineConfig(tmp_path / "native", cfg))
    monkeypatch.setattr(kernels, "lloyd_two_means", py_lloyd)
    monkeypatch.setattr(kernels, "elimination_mask", py_mask)
    pure = pipeline(PipelineConfig(tmp_path / "pure", cfg))
    assert native.report == pure.report
    assert native.threshold == pure.threshold
    for name in ("paths_noelim.jsonl", "paths_elim.jsonl"):
        assert (tmp_path / "native" / name).read_bytes() == (tmp_path / "pure" / name).read_bytes()
