"""Pure-Python (numpy) versions of the coefficient-map kernels.

Same signatures and output ordering as the compiled ``_kernels`` module.
"""

import numpy as np

_SHIFT = np.int64(1) << np.int64(32)


def _codes(keys):
    # monotone in lexicographic (k1, k2) order for |k2| < 2**31
    return keys[:, 0] * _SHIFT + keys[:, 1]


def convolve(ka, ca, kb, cb):
    ka = np.asarray(ka, dtype=np.int64)
    kb = np.asarray(kb, dtype=np.int64)
    if len(ka) == 0 or len(kb) == 0:
        return np.empty((0, 2), dtype=np.int64), np.empty(0, dtype=np.complex128)
    k1 = (ka[:, None, 0] + kb[None, :, 0]).ravel()
    k2 = (ka[:, None, 1] + kb[None, :, 1]).ravel()
    prod = (np.asarray(ca)[:, None] * np.asarray(cb)[None, :]).ravel()
    codes = k1 * _SHIFT + k2
    uniq, first, inv = np.unique(codes, return_index=True, return_inverse=True)
    re = np.bincount(inv, weights=prod.real, minlength=len(uniq))
    im = np.bincount(inv, weights=prod.imag, minlength=len(uniq))
    keys = np.stack([k1[first], k2[first]], axis=1)
    return keys, re + 1j * im


def inner(ka, ca, kb, cb):
    ka = np.asarray(ka, dtype=np.int64)
    kb = np.asarray(kb, dtype=np.int64)
    if len(ka) == 0 or len(kb) == 0:
        return 0j
    _, ia, ib = np.intersect1d(_codes(ka), _codes(kb), assume_unique=True,
                               return_indices=True)
    return complex(np.sum(np.asarray(ca)[ia] * np.conj(np.asarray(cb)[ib])))


def merge(ka, ca, kb, cb, sign):
    if len(ka) == 0:
        return np.asarray(kb, dtype=np.int64), sign * np.asarray(cb)
    if len(kb) == 0:
        return np.asarray(ka, dtype=np.int64), np.asarray(ca)
    a, b = _codes(np.asarray(ka)), _codes(np.asarray(kb))
    codes = np.union1d(a, b)
    out = np.zeros(len(codes), dtype=np.complex128)
    out[np.searchsorted(codes, a)] += ca
    out[np.searchsorted(codes, b)] += sign * np.asarray(cb)
    k1 = (codes + (np.int64(1) << np.int64(31))) >> np.int64(32)
    return np.stack([k1, codes - k1 * _SHIFT], axis=1), out


def canonical(keys, vals, prune_rel):
    keys = np.asarray(keys)
    vals = np.asarray(vals)
    n = len(vals)
    if n == 0:
        return keys.reshape(0, 2), vals
    if not np.array_equal(keys, -keys[::-1]):
        return None
    # negation reverses lexicographic order, so the mirror of entry i is n-1-i
    mirror = vals[::-1]
    sv = 0.5 * (vals.real + mirror.real) + 0.5j * (vals.imag - mirror.imag)
    mag = sv.real * sv.real + sv.imag * sv.imag
    keep = (mag > 0.0) & (mag >= prune_rel * prune_rel * mag.max())
    return keys[keep], sv[keep]
