# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for sparse Fourier coefficient maps.

Keys are ``(N, 2)`` int64 arrays sorted lexicographically; values are the
matching complex128 coefficients.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()

# Largest dense accumulation box (cells) before deferring to the sort path.
DEF BOX_LIMIT = 4194304


def convolve(const cnp.int64_t[:, ::1] ka, const double complex[::1] ca,
             const cnp.int64_t[:, ::1] kb, const double complex[::1] cb):
    """Exact product of two coefficient maps.

    Returns ``(keys, values)`` in lexicographic order, or ``None`` when the
    bounding box of the sum support is too large for dense accumulation.
    """
    cdef Py_ssize_t na = ka.shape[0], nb = kb.shape[0]
    cdef Py_ssize_t i, j, idx, n_out, pos
    cdef cnp.int64_t lo1a, hi1a, lo2a, hi2a, lo1b, hi1b, lo2b, hi2b
    cdef cnp.int64_t lo1, lo2, w1, w2, a1, a2
    cdef double complex c

    if na == 0 or nb == 0:
        return np.empty((0, 2), dtype=np.int64), np.empty(0, dtype=np.complex128)

    lo1a = hi1a = ka[0, 0]
    lo2a = hi2a = ka[0, 1]
    for i in range(1, na):
        if ka[i, 0] < lo1a: lo1a = ka[i, 0]
        if ka[i, 0] > hi1a: hi1a = ka[i, 0]
        if ka[i, 1] < lo2a: lo2a = ka[i, 1]
        if ka[i, 1] > hi2a: hi2a = ka[i, 1]
    lo1b = hi1b = kb[0, 0]
    lo2b = hi2b = kb[0, 1]
    for j in range(1, nb):
        if kb[j, 0] < lo1b: lo1b = kb[j, 0]
        if kb[j, 0] > hi1b: hi1b = kb[j, 0]
        if kb[j, 1] < lo2b: lo2b = kb[j, 1]
        if kb[j, 1] > hi2b: hi2b = kb[j, 1]

    lo1 = lo1a + lo1b
    lo2 = lo2a + lo2b
    w1 = hi1a + hi1b - lo1 + 1
    w2 = hi2a + hi2b - lo2 + 1
    if w1 * w2 > BOX_LIMIT:
        return None

    acc_arr = np.zeros(w1 * w2, dtype=np.complex128)
    hit_arr = np.zeros(w1 * w2, dtype=np.uint8)
    cdef double complex[::1] acc = acc_arr
    cdef cnp.uint8_t[::1] hit = hit_arr

    with nogil:
        for i in range(na):
            a1 = ka[i, 0] - lo1
            a2 = ka[i, 1] - lo2
            c = ca[i]
            for j in range(nb):
                idx = (a1 + kb[j, 0]) * w2 + a2 + kb[j, 1]
                acc[idx] = acc[idx] + c * cb[j]
                hit[idx] = 1
        n_out = 0
        for idx in range(w1 * w2):
            n_out += hit[idx]

    keys_arr = np.empty((n_out, 2), dtype=np.int64)
    vals_arr = np.empty(n_out, dtype=np.complex128)
    cdef cnp.int64_t[:, ::1] keys = keys_arr
    cdef double complex[::1] vals = vals_arr
    pos = 0
    with nogil:
        for idx in range(w1 * w2):
            if hit[idx]:
                keys[pos, 0] = idx // w2 + lo1
                keys[pos, 1] = idx % w2 + lo2
                vals[pos] = acc[idx]
                pos += 1
    return keys_arr, vals_arr


def inner(const cnp.int64_t[:, ::1] ka, const double complex[::1] ca,
          const cnp.int64_t[:, ::1] kb, const double complex[::1] cb):
    """Sum of ``ca[k] * conj(cb[k])`` over the common keys (sorted merge)."""
    cdef Py_ssize_t na = ka.shape[0], nb = kb.shape[0]
    cdef Py_ssize_t i = 0, j = 0
    cdef double re = 0.0, im = 0.0
    cdef double complex x, y
    with nogil:
        while i < na and j < nb:
            if ka[i, 0] < kb[j, 0] or (ka[i, 0] == kb[j, 0] and ka[i, 1] < kb[j, 1]):
                i += 1
            elif ka[i, 0] == kb[j, 0] and ka[i, 1] == kb[j, 1]:
                x = ca[i]
                y = cb[j]
                re += x.real * y.real + x.imag * y.imag
                im += x.imag * y.real - x.real * y.imag
                i += 1
                j += 1
            else:
                j += 1
    return complex(re, im)


cdef inline bint _less(cnp.int64_t a0, cnp.int64_t a1, cnp.int64_t b0, cnp.int64_t b1) noexcept nogil:
    return a0 < b0 or (a0 == b0 and a1 < b1)


def merge(const cnp.int64_t[:, ::1] ka, const double complex[::1] ca,
          const cnp.int64_t[:, ::1] kb, const double complex[::1] cb, double sign):
    """Sorted-merge sum ``a + sign * b``."""
    cdef Py_ssize_t na = ka.shape[0], nb = kb.shape[0]
    cdef Py_ssize_t i = 0, j = 0, pos = 0
    keys_arr = np.empty((na + nb, 2), dtype=np.int64)
    vals_arr = np.empty(na + nb, dtype=np.complex128)
    cdef cnp.int64_t[:, ::1] keys = keys_arr
    cdef double complex[::1] vals = vals_arr
    with nogil:
        while i < na or j < nb:
            if j >= nb or (i < na and _less(ka[i, 0], ka[i, 1], kb[j, 0], kb[j, 1])):
                keys[pos, 0] = ka[i, 0]
                keys[pos, 1] = ka[i, 1]
                vals[pos] = ca[i]
                i += 1
            elif i >= na or _less(kb[j, 0], kb[j, 1], ka[i, 0], ka[i, 1]):
                keys[pos, 0] = kb[j, 0]
                keys[pos, 1] = kb[j, 1]
                vals[pos] = sign * cb[j]
                j += 1
            else:
                keys[pos, 0] = ka[i, 0]
                keys[pos, 1] = ka[i, 1]
                vals[pos] = ca[i] + sign * cb[j]
                i += 1
                j += 1
            pos += 1
    return keys_arr[:pos], vals_arr[:pos]


def canonical(const cnp.int64_t[:, ::1] keys, const double complex[::1] vals, double prune_rel):
    """Enforce ``c(-k) = conj(c(k))`` exactly and drop entries below the pruning floor.

    The support must already be closed under ``k -> -k``; returns ``None`` if not.
    """
    cdef Py_ssize_t n = keys.shape[0], i, pos = 0
    cdef double mx = 0.0, mag, floor
    cdef double complex a, b
    out_v = np.empty(n, dtype=np.complex128)
    mags_arr = np.empty(n, dtype=np.float64)
    cdef double complex[::1] sv = out_v
    cdef double[::1] mags = mags_arr
    for i in range(n):
        if keys[i, 0] != -keys[n - 1 - i, 0] or keys[i, 1] != -keys[n - 1 - i, 1]:
            return None
    with nogil:
        for i in range(n):
            a = vals[i]
            b = vals[n - 1 - i]
            sv[i] = 0.5 * (a.real + b.real) + 0.5j * (a.imag - b.imag)
            mag = sv[i].real * sv[i].real + sv[i].imag * sv[i].imag
            mags[i] = mag
            if mag > mx:
                mx = mag
        floor = prune_rel * prune_rel * mx
    keys_arr = np.empty((n, 2), dtype=np.int64)
    vals_arr = np.empty(n, dtype=np.complex128)
    cdef cnp.int64_t[:, ::1] ko = keys_arr
    cdef double complex[::1] vo = vals_arr
    with nogil:
        for i in range(n):
            if mags[i] > 0.0 and mags[i] >= floor:
                ko[pos, 0] = keys[i, 0]
                ko[pos, 1] = keys[i, 1]
                vo[pos] = sv[i]
                pos += 1
    return keys_arr[:pos], vals_arr[:pos]
