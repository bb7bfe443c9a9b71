"""Backend selection for the coefficient-map kernels.

The compiled extension is used when it imports; otherwise the numpy
fallback. Setting ``CONJSCAN_PURE_PYTHON=1`` forces the fallback.
"""

import os

from . import _kernels_py

try:
    if os.environ.get("CONJSCAN_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-Python backend requested")
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

BACKEND = "cython" if _compiled is not None else "python"


def convolve(ka, ca, kb, cb):
    if _compiled is not None:
        out = _compiled.convolve(ka, ca, kb, cb)
        if out is not None:
            return out
    return _kernels_py.convolve(ka, ca, kb, cb)


def inner(ka, ca, kb, cb):
    if _compiled is not None:
        return _compiled.inner(ka, ca, kb, cb)
    return _kernels_py.inner(ka, ca, kb, cb)


def merge(ka, ca, kb, cb, sign=1.0):
    if _compiled is not None:
        return _compiled.merge(ka, ca, kb, cb, sign)
    return _kernels_py.merge(ka, ca, kb, cb, sign)


def canonical(keys, vals, prune_rel):
    if _compiled is not None:
        return _compiled.canonical(keys, vals, prune_rel)
    return _kernels_py.canonical(keys, vals, prune_rel)


def available_backends():
    """Names of kernel modules importable in this environment."""
    names = ["python"]
    if _compiled is not None:
        names.append("cython")
    return names


def backend_module(name):
    if name == "python":
        return _kernels_py
    if name == "cython" and _compiled is not None:
        return _compiled
    raise ValueError(f"backend {name!r} is not available")
