"""Numpy fallback for the hot jet-convolution kernels.

Arrays are packed bivariate jets: shape (K+1, W) complex128, row r holding
the Laurent window (exponents -M .. W-1-M) of the x^r coefficient.
"""

from __future__ import annotations

import numpy as np


def axis_mul(a: np.ndarray, b: np.ndarray, m: int, cap: int = -1) -> np.ndarray:
    """Truncated product of two packed jets, re-windowed to the common frame."""
    rows, w = a.shape
    out = np.zeros_like(a)
    if cap >= 0 and cap + 1 < rows:
        rows = cap + 1
    a_live = [r for r in range(rows) if a[r].any()]
    b_live = [r for r in range(rows) if b[r].any()]
    for r1 in a_live:
        ar = a[r1]
        for r2 in b_live:
            r = r1 + r2
            if r >= rows:
                break
            out[r] += np.convolve(ar, b[r2])[m: m + w]
    return out


def jet_mul(a: np.ndarray, row: np.ndarray, m: int) -> np.ndarray:
    """Multiply every x-row of ``a`` by a single u-jet window ``row``."""
    rows, w = a.shape
    out = np.zeros_like(a)
    for r in range(rows):
        if a[r].any():
            out[r] = np.convolve(a[r], row)[m: m + w]
    return out


def taylor_shift(dpows: np.ndarray, drows: np.ndarray, m: int, cap: int = -1) -> np.ndarray:
    """sum_t jet_mul(dpows[t], drows[t]): packed jet of F(u + delta).

    ``dpows`` stacks the powers of the shift (t, rows, W); ``drows`` stacks
    the scaled derivatives of F (t, W).
    """
    t_count, rows, w = dpows.shape
    out = np.zeros((rows, w), dtype=np.complex128)
    stop = rows if cap < 0 else min(rows, cap + 1)
    for t in range(t_count):
        if not drows[t].any():
            continue
        row = drows[t]
        block = dpows[t]
        for r in range(stop):
            if block[r].any():
                out[r] += np.convolve(block[r], row)[m: m + w]
    return out


def taylor_shift_row(dpows: np.ndarray, row: np.ndarray, m: int, cap: int = -1) -> np.ndarray:
    """taylor_shift with the scaled derivative stack built internally."""
    t_count, rows, w = dpows.shape
    drows = np.zeros((t_count, w), dtype=np.complex128)
    drows[0] = row
    exps = np.arange(1 - m, w - m, dtype=np.float64)
    for t in range(1, t_count):
        drows[t, :-1] = drows[t - 1, 1:] * exps / t
    return taylor_shift(dpows, drows, m, cap)


def row_product(a: np.ndarray, b: np.ndarray, k: int, m: int) -> np.ndarray:
    """Row k of the truncated product of two packed jets."""
    w = a.shape[1]
    out = np.zeros(w, dtype=np.complex128)
    for r1 in range(k + 1):
        if a[r1].any() and b[k - r1].any():
            out += np.convolve(a[r1], b[k - r1])[m: m + w]
    return out
