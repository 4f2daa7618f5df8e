"""Backend selection for the packed jet-convolution kernels.

The compiled extension (folijet._kernels, Cython) is used when importable;
otherwise the numpy implementation.  Set FOLIJET_PURE_PYTHON=1 to force the
fallback (used by the benchmark and for debugging).
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_np

if os.environ.get("FOLIJET_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_np
    BACKEND = "numpy"
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:  # pragma: no cover - build-environment dependent
        _impl = _kernels_np
        BACKEND = "numpy"

_COMPILED = BACKEND == "compiled"


def _c(arr: np.ndarray) -> np.ndarray:
    # the extension requires contiguous complex128 buffers; the numpy
    # implementation takes anything array-like
    return np.ascontiguousarray(arr, dtype=np.complex128) if _COMPILED else arr


def axis_mul(a: np.ndarray, b: np.ndarray, m: int, cap: int = -1) -> np.ndarray:
    """Product of packed jets truncated to the common (rows, window) frame.

    ``cap`` limits the computed x-order (later rows stay zero)."""
    return _impl.axis_mul(_c(a), _c(b), m, cap)


def jet_mul(a: np.ndarray, row: np.ndarray, m: int) -> np.ndarray:
    """Product of a packed jet with a single u-jet window."""
    return _impl.jet_mul(_c(a), _c(row), m)


def taylor_shift(dpows: np.ndarray, drows: np.ndarray, m: int, cap: int = -1) -> np.ndarray:
    """Packed jet of F(u + delta) from stacked shift powers and derivatives."""
    return _impl.taylor_shift(_c(dpows), _c(drows), m, cap)


def taylor_shift_row(dpows: np.ndarray, row: np.ndarray, m: int, cap: int = -1) -> np.ndarray:
    """Packed jet of F(u + delta) from F's window row (derivatives internal)."""
    return _impl.taylor_shift_row(_c(dpows), _c(row), m, cap)


def row_product(a: np.ndarray, b: np.ndarray, k: int, m: int) -> np.ndarray:
    """Row k of the truncated product of two packed jets."""
    return _impl.row_product(_c(a), _c(b), k, m)
