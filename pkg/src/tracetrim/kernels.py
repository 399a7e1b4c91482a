"""Kernel backend chosen at import: the compiled extension when built, else pure Python."""

from __future__ import annotations

from . import _pykernels

try:
    from . import _kernels as _impl
except ImportError:  # extension not built
    _impl = _pykernels
    BACKEND = "python"
else:
    BACKEND = "cython"

lloyd_two_means = _impl.lloyd_two_means
elimination_mask = _impl.elimination_mask

BACKENDS = {"python": _pykernels}
if BACKEND == "cython":
    BACKENDS["cython"] = _impl
