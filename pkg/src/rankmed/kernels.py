"""Backend dispatch for the hot kernels.

The compiled extension is preferred when importable; set ``RANKMED_PURE=1``
to force the numpy fallbacks (used by the benchmark and parity tests).
"""

import os

from . import _kernels_py

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_impl = _kernels_py if (_ckernels is None or os.environ.get("RANKMED_PURE") == "1") else _ckernels


def backend_name():
    """Name of the active kernel backend: 'compiled' or 'pure'."""
    return "compiled" if _impl is _ckernels else "pure"


def use_backend(name):
    """Switch backends at runtime ('compiled', 'pure', or 'auto')."""
    global _impl
    if name == "pure":
        _impl = _kernels_py
    elif name == "compiled":
        if _ckernels is None:
            raise RuntimeError("compiled kernels are not available")
        _impl = _ckernels
    elif name == "auto":
        _impl = _ckernels if _ckernels is not None else _kernels_py
    else:
        raise ValueError(f"unknown backend {name!r}")


def mgs_residual(basis, count, row):
    return _impl.mgs_residual(basis, count, row)


def best_split_scan(values, labels, n_classes, min_leaf):
    return _impl.best_split_scan(values, labels, n_classes, min_leaf)
