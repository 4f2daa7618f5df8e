# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for packed bivariate jet convolution.

Same contracts as folijet._kernels_np; rows are x-orders, columns a fixed
Laurent exponent window of width W whose index m corresponds to exponent 0.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def axis_mul(cnp.complex128_t[:, :] a, cnp.complex128_t[:, :] b, Py_ssize_t m,
             Py_ssize_t cap=-1):
    cdef Py_ssize_t rows_full = a.shape[0]
    cdef Py_ssize_t rows = rows_full
    cdef Py_ssize_t w = a.shape[1]
    if cap >= 0 and cap + 1 < rows:
        rows = cap + 1
    out_arr = np.zeros((rows_full, w), dtype=np.complex128)
    cdef cnp.complex128_t[:, :] out = out_arr
    cdef Py_ssize_t r1, r2, i, j, lo, hi, t
    cdef cnp.complex128_t av
    cdef bint live
    for r1 in range(rows):
        live = False
        for i in range(w):
            if a[r1, i] != 0:
                live = True
                break
        if not live:
            continue
        for r2 in range(rows - r1):
            live = False
            for i in range(w):
                if b[r2, i] != 0:
                    live = True
                    break
            if not live:
                continue
            # out[r1+r2, t] += sum_{i+j = t+m} a[r1, i] * b[r2, j]
            for i in range(w):
                av = a[r1, i]
                if av == 0:
                    continue
                lo = m - i
                if lo < 0:
                    lo = 0
                hi = m + w - i
                if hi > w:
                    hi = w
                for j in range(lo, hi):
                    out[r1 + r2, i + j - m] = out[r1 + r2, i + j - m] + av * b[r2, j]
    return out_arr


def jet_mul(cnp.complex128_t[:, :] a, cnp.complex128_t[:] row, Py_ssize_t m):
    cdef Py_ssize_t rows = a.shape[0]
    cdef Py_ssize_t w = a.shape[1]
    out_arr = np.zeros((rows, w), dtype=np.complex128)
    cdef cnp.complex128_t[:, :] out = out_arr
    cdef Py_ssize_t r, i, j, lo, hi
    cdef cnp.complex128_t av
    for r in range(rows):
        for i in range(w):
            av = a[r, i]
            if av == 0:
                continue
            lo = m - i
            if lo < 0:
                lo = 0
            hi = m + w - i
            if hi > w:
                hi = w
            for j in range(lo, hi):
                out[r, i + j - m] = out[r, i + j - m] + av * row[j]
    return out_arr


def taylor_shift(cnp.complex128_t[:, :, :] dpows, cnp.complex128_t[:, :] drows,
                 Py_ssize_t m, Py_ssize_t cap=-1):
    cdef Py_ssize_t t_count = dpows.shape[0]
    cdef Py_ssize_t rows_full = dpows.shape[1]
    cdef Py_ssize_t rows = rows_full
    cdef Py_ssize_t w = dpows.shape[2]
    if cap >= 0 and cap + 1 < rows:
        rows = cap + 1
    out_arr = np.zeros((rows_full, w), dtype=np.complex128)
    cdef cnp.complex128_t[:, :] out = out_arr
    cdef Py_ssize_t t, r, i, j, lo, hi
    cdef cnp.complex128_t av
    cdef bint live
    for t in range(t_count):
        live = False
        for i in range(w):
            if drows[t, i] != 0:
                live = True
                break
        if not live:
            continue
        for r in range(rows):
            live = False
            for i in range(w):
                if dpows[t, r, i] != 0:
                    live = True
                    break
            if not live:
                continue
            for i in range(w):
                av = dpows[t, r, i]
                if av == 0:
                    continue
                lo = m - i
                if lo < 0:
                    lo = 0
                hi = m + w - i
                if hi > w:
                    hi = w
                for j in range(lo, hi):
                    out[r, i + j - m] = out[r, i + j - m] + av * drows[t, j]
    return out_arr


def taylor_shift_row(cnp.complex128_t[:, :, :] dpows, cnp.complex128_t[:] row,
                     Py_ssize_t m, Py_ssize_t cap=-1):
    """taylor_shift with the scaled derivative stack built internally."""
    cdef Py_ssize_t t_count = dpows.shape[0]
    cdef Py_ssize_t w = dpows.shape[2]
    drows_arr = np.zeros((t_count, w), dtype=np.complex128)
    cdef cnp.complex128_t[:, :] drows = drows_arr
    cdef Py_ssize_t t, i
    for i in range(w):
        drows[0, i] = row[i]
    for t in range(1, t_count):
        # (1/t!) d/du of the previous scaled derivative: exponent e -> e*(...)
        for i in range(w - 1):
            drows[t, i] = drows[t - 1, i + 1] * (i + 1 - m) / t
        drows[t, w - 1] = 0
    return taylor_shift(dpows, drows_arr, m, cap)


def row_product(cnp.complex128_t[:, :] a, cnp.complex128_t[:, :] b, Py_ssize_t k,
                Py_ssize_t m):
    """Row k of the truncated product of two packed jets."""
    cdef Py_ssize_t rows = a.shape[0]
    cdef Py_ssize_t w = a.shape[1]
    out_arr = np.zeros(w, dtype=np.complex128)
    cdef cnp.complex128_t[:] out = out_arr
    cdef Py_ssize_t r1, i, j, lo, hi
    cdef cnp.complex128_t av
    for r1 in range(k + 1):
        for i in range(w):
            av = a[r1, i]
            if av == 0:
                continue
            lo = m - i
            if lo < 0:
                lo = 0
            hi = m + w - i
            if hi > w:
                hi = w
            for j in range(lo, hi):
                out[i + j - m] = out[i + j - m] + av * b[k - r1, j]
    return out_arr
