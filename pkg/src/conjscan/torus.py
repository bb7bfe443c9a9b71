"""Finite real trigonometric polynomials on the rectangular flat torus.

The torus is ``[0, 2*pi/alpha) x [0, 2*pi)``. A scalar is stored as a sparse
map from integer wavevectors ``(k1, k2)`` to the complex coefficient of
``exp(i*(k1*alpha*x + k2*y))``. Keys are kept in lexicographic order, the map
is conjugate-symmetric (so the function is real), and products are exact
convolutions with no truncation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

from . import kernels

PRUNE_REL = 1e-14
TOL_REALITY = 1e-12
TOL_DIVFREE = 1e-12


class GeometryMismatchError(ValueError):
    """Operands live on tori with different aspect ratios."""


class NotDivergenceFreeError(ValueError):
    """A divergence-free field was required."""


@dataclass(frozen=True)
class TorusGeometry:
    """Rectangular flat torus with aspect ratio ``alpha``."""

    alpha: float

    def __post_init__(self):
        alpha = float(self.alpha)
        if not math.isfinite(alpha) or alpha <= 0.0:
            raise ValueError(f"alpha must be positive and finite, got {self.alpha!r}")
        object.__setattr__(self, "alpha", alpha)

    @property
    def lx(self) -> float:
        return 2.0 * math.pi / self.alpha

    @property
    def ly(self) -> float:
        return 2.0 * math.pi

    @property
    def area(self) -> float:
        return self.lx * self.ly


def _check_same(a: TorusGeometry, b: TorusGeometry) -> None:
    if a != b:
        raise GeometryMismatchError(f"geometry mismatch: alpha={a.alpha} vs alpha={b.alpha}")


def _canonical(keys: np.ndarray, vals: np.ndarray):
    """Symmetrize a map whose support is already mirror-closed, then prune."""
    out = kernels.canonical(keys, vals, PRUNE_REL)
    if out is None:
        raise ValueError("support is not closed under k -> -k")
    keys, vals = out
    keys.flags.writeable = False
    vals.flags.writeable = False
    return keys, vals


_SHIFT = np.int64(1) << np.int64(32)


def _codes(keys):
    return keys[:, 0] * _SHIFT + keys[:, 1]


def _decode(codes):
    k1 = (codes + (np.int64(1) << np.int64(31))) >> np.int64(32)
    k2 = codes - k1 * _SHIFT
    return np.stack([k1, k2], axis=1)


def align(a: "TrigScalar", b: "TrigScalar"):
    """Coefficients of ``a`` and ``b`` on the union of their supports."""
    _check_same(a.geometry, b.geometry)
    ca, cb = _codes(a.keys), _codes(b.keys)
    if len(ca) == len(cb) and np.array_equal(ca, cb):
        return a.keys, np.asarray(a.coeffs), np.asarray(b.coeffs)
    codes = np.union1d(ca, cb)
    va = np.zeros(len(codes), dtype=np.complex128)
    vb = np.zeros(len(codes), dtype=np.complex128)
    va[np.searchsorted(codes, ca)] = a.coeffs
    vb[np.searchsorted(codes, cb)] = b.coeffs
    return _decode(codes), va, vb


class TrigScalar:
    """Sparse real trigonometric polynomial on a :class:`TorusGeometry`.

    Instances are immutable. Build them with :func:`trig_from_modes`,
    :meth:`constant` or arithmetic on existing scalars.
    """

    __slots__ = ("geometry", "keys", "coeffs")

    def __init__(self, geometry: TorusGeometry, keys, coeffs):
        # internal constructor: keys sorted, support mirror-closed
        keys, coeffs = _canonical(np.ascontiguousarray(keys, dtype=np.int64).reshape(-1, 2),
                                  np.ascontiguousarray(coeffs, dtype=np.complex128))
        object.__setattr__(self, "geometry", geometry)
        object.__setattr__(self, "keys", keys)
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, name, value):
        raise AttributeError("TrigScalar is immutable")

    @classmethod
    def zero(cls, geometry: TorusGeometry) -> "TrigScalar":
        return cls(geometry, np.empty((0, 2), dtype=np.int64), np.empty(0, dtype=np.complex128))

    @classmethod
    def constant(cls, geometry: TorusGeometry, value: float) -> "TrigScalar":
        return cls(geometry, [[0, 0]], [complex(float(value))])

    def __len__(self):
        return len(self.coeffs)

    def __repr__(self):
        return f"TrigScalar(alpha={self.geometry.alpha}, modes={self.to_dict()})"

    def to_dict(self) -> dict:
        return {(int(k[0]), int(k[1])): complex(c) for k, c in zip(self.keys, self.coeffs)}

    def coeff(self, k1: int, k2: int) -> complex:
        code = np.int64(k1) * _SHIFT + np.int64(k2)
        codes = _codes(self.keys)
        i = int(np.searchsorted(codes, code))
        if i < len(codes) and codes[i] == code:
            return complex(self.coeffs[i])
        return 0j

    @property
    def is_zero(self) -> bool:
        return len(self.coeffs) == 0

    @property
    def mean(self) -> float:
        return self.coeff(0, 0).real

    def bandwidth(self) -> int:
        """Largest ``max(|k1|, |k2|)`` over the support."""
        if self.is_zero:
            return 0
        return int(np.abs(self.keys).max())

    def reality_defect(self) -> float:
        """Max relative violation of ``c(-k) = conj(c(k))``."""
        if self.is_zero:
            return 0.0
        keys, vals = self.keys, self.coeffs
        if not np.array_equal(keys, -keys[::-1]):
            return math.inf
        return float(np.max(np.abs(vals - np.conj(vals[::-1]))) / np.max(np.abs(vals)))

    def _wrap(self, keys, vals) -> "TrigScalar":
        return TrigScalar(self.geometry, keys, vals)

    def __neg__(self):
        return self._wrap(self.keys, -self.coeffs)

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = TrigScalar.constant(self.geometry, other)
        if not isinstance(other, TrigScalar):
            return NotImplemented
        _check_same(self.geometry, other.geometry)
        return self._wrap(*kernels.merge(self.keys, self.coeffs, other.keys, other.coeffs, 1.0))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, float)):
            other = TrigScalar.constant(self.geometry, other)
        if not isinstance(other, TrigScalar):
            return NotImplemented
        _check_same(self.geometry, other.geometry)
        return self._wrap(*kernels.merge(self.keys, self.coeffs, other.keys, other.coeffs, -1.0))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TrigScalar):
            return trig_product(self, other)
        if isinstance(other, (int, float, np.floating, np.integer)):
            return self._wrap(self.keys, float(other) * self.coeffs)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return self._wrap(self.keys, self.coeffs / float(other))
        return NotImplemented

    def __call__(self, x, y):
        return eval_at(self, x, y)

    def allclose(self, other: "TrigScalar", atol: float = 1e-12) -> bool:
        """Coefficientwise comparison on the union of supports."""
        _, va, vb = align(self, other)
        return bool(np.all(np.abs(va - vb) <= atol))


def trig_from_modes(geometry: TorusGeometry,
                    modes: Mapping | Iterable,
                    tol: float = TOL_REALITY) -> TrigScalar:
    """Build a real scalar from ``(k, amplitude)`` pairs.

    Missing mirror modes are filled in with the complex conjugate. A
    wavevector given twice with different values, a mirror pair that is not
    conjugate, or a non-real mean mode raises ``ValueError``.
    """
    items = modes.items() if isinstance(modes, Mapping) else modes
    given: dict[tuple[int, int], complex] = {}
    for k, amp in items:
        k1, k2 = (int(k[0]), int(k[1]))
        if (k1, k2) != tuple(k):
            raise ValueError(f"wavevector components must be integers, got {k!r}")
        amp = complex(amp)
        if not (math.isfinite(amp.real) and math.isfinite(amp.imag)):
            raise ValueError(f"non-finite amplitude at {(k1, k2)}")
        if (k1, k2) in given:
            prev = given[(k1, k2)]
            if abs(prev - amp) > tol * max(abs(prev), abs(amp)):
                raise ValueError(f"wavevector {(k1, k2)} supplied twice with different values")
            continue
        given[(k1, k2)] = amp
    scale = max((abs(a) for a in given.values()), default=0.0)
    full: dict[tuple[int, int], complex] = {}
    for (k1, k2), amp in given.items():
        mirror = (-k1, -k2)
        if mirror in given:
            if abs(given[mirror] - amp.conjugate()) > tol * scale:
                raise ValueError(f"modes {(k1, k2)} and {mirror} are not complex conjugates")
        full[(k1, k2)] = amp
        full.setdefault(mirror, amp.conjugate())
    if not full:
        return TrigScalar.zero(geometry)
    keys = np.array(sorted(full), dtype=np.int64)
    vals = np.array([full[tuple(k)] for k in keys.tolist()], dtype=np.complex128)
    return TrigScalar(geometry, keys, vals)


def cos_mode(geometry: TorusGeometry, k1: int, k2: int, amplitude: float = 1.0) -> TrigScalar:
    """``amplitude * cos(k1*alpha*x + k2*y)``."""
    if (k1, k2) == (0, 0):
        return TrigScalar.constant(geometry, amplitude)
    return trig_from_modes(geometry, {(k1, k2): amplitude / 2, (-k1, -k2): amplitude / 2})


def sin_mode(geometry: TorusGeometry, k1: int, k2: int, amplitude: float = 1.0) -> TrigScalar:
    """``amplitude * sin(k1*alpha*x + k2*y)``."""
    if (k1, k2) == (0, 0):
        return TrigScalar.zero(geometry)
    return trig_from_modes(geometry, {(k1, k2): -0.5j * amplitude})


def trig_product(f: TrigScalar, g: TrigScalar) -> TrigScalar:
    """Exact product (full convolution of the coefficient maps)."""
    _check_same(f.geometry, g.geometry)
    keys, vals = kernels.convolve(f.keys, f.coeffs, g.keys, g.coeffs)
    return TrigScalar(f.geometry, keys, vals)


def eval_at(f: TrigScalar, x, y, tol: float = TOL_REALITY):
    """Point values of ``f``; ``x`` and ``y`` may be arrays of equal shape."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if f.is_zero:
        return np.zeros(np.broadcast(x, y).shape)[()]
    phase = (np.multiply.outer(x, f.keys[:, 0] * f.geometry.alpha)
             + np.multiply.outer(y, f.keys[:, 1].astype(float)))
    total = np.exp(1j * phase) @ f.coeffs
    bound = tol * float(np.sum(np.abs(f.coeffs)))
    if np.any(np.abs(total.imag) > bound + 1e-300):
        raise ValueError("imaginary residual exceeds the reality tolerance")
    return total.real[()] if np.ndim(total) else float(total.real)


@dataclass(frozen=True)
class VectorField:
    """Planar vector field with trigonometric-polynomial components."""

    x: TrigScalar
    y: TrigScalar

    def __post_init__(self):
        _check_same(self.x.geometry, self.y.geometry)

    @property
    def geometry(self) -> TorusGeometry:
        return self.x.geometry

    @classmethod
    def zero(cls, geometry: TorusGeometry) -> "VectorField":
        z = TrigScalar.zero(geometry)
        return cls(z, z)

    @classmethod
    def constant(cls, geometry: TorusGeometry, cx: float, cy: float) -> "VectorField":
        return cls(TrigScalar.constant(geometry, cx), TrigScalar.constant(geometry, cy))

    @property
    def is_zero(self) -> bool:
        return self.x.is_zero and self.y.is_zero

    def __neg__(self):
        return VectorField(-self.x, -self.y)

    def __add__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return VectorField(self.x + other.x, self.y + other.y)

    def __sub__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return VectorField(self.x - other.x, self.y - other.y)

    def __mul__(self, c):
        if isinstance(c, (int, float, np.floating, np.integer)):
            return VectorField(self.x * c, self.y * c)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, c):
        return VectorField(self.x / c, self.y / c)

    def __call__(self, x, y):
        return eval_at(self.x, x, y), eval_at(self.y, x, y)

    @cached_property
    def divergence_ratio(self) -> float:
        """``||div u|| / ||u||`` (zero for the zero field)."""
        norm2 = l2_inner(self, self)
        if norm2 == 0.0:
            return 0.0
        a = self.geometry.alpha
        keys, cx, cy = align(self.x, self.y)
        d = 1j * (keys[:, 0] * a * cx + keys[:, 1] * cy)
        div2 = self.geometry.area * float(np.sum(np.abs(d) ** 2))
        return math.sqrt(div2 / norm2)

    def is_div_free(self, tol: float = TOL_DIVFREE) -> bool:
        return self.divergence_ratio <= tol

    @property
    def div_free(self) -> bool:
        return self.is_div_free()

    def allclose(self, other: "VectorField", atol: float = 1e-12) -> bool:
        return self.x.allclose(other.x, atol) and self.y.allclose(other.y, atol)


def l2_inner(f, g) -> float:
    """L2 inner product over the torus, computed from coefficients.

    Accepts two scalars or two vector fields (components paired).
    """
    if isinstance(f, VectorField) and isinstance(g, VectorField):
        return l2_inner(f.x, g.x) + l2_inner(f.y, g.y)
    if not (isinstance(f, TrigScalar) and isinstance(g, TrigScalar)):
        raise TypeError("l2_inner needs two TrigScalars or two VectorFields")
    _check_same(f.geometry, g.geometry)
    s = kernels.inner(f.keys, f.coeffs, g.keys, g.coeffs)
    return f.geometry.area * s.real


def l2_norm2(f) -> float:
    return l2_inner(f, f)
