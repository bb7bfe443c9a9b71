"""Differential and projection operators of 2D ideal hydrodynamics on the torus.

All operators act mode by mode on :class:`~conjscan.torus.TrigScalar`
coefficients, so they are exact up to rounding. The metric is flat: covariant
derivatives are componentwise directional derivatives and the curvature of
the base torus vanishes.
"""

from __future__ import annotations

import math

import numpy as np

from .torus import (
    TOL_DIVFREE,
    NotDivergenceFreeError,
    TrigScalar,
    VectorField,
    align,
    l2_inner,
)

# Sign s in [u, v] = s * (u.grad v - v.grad u). Fixed so that the bracket form
# of the conjugacy criterion equals its curvature form; see tests/test_conjugacy.
BRACKET_SIGN = 1

_RESIDUAL_FLOOR = 1e-300


def ddx(f: TrigScalar) -> TrigScalar:
    return TrigScalar(f.geometry, f.keys, 1j * f.geometry.alpha * f.keys[:, 0] * f.coeffs)


def ddy(f: TrigScalar) -> TrigScalar:
    return TrigScalar(f.geometry, f.keys, 1j * f.keys[:, 1] * f.coeffs)


def grad(f: TrigScalar) -> VectorField:
    return VectorField(ddx(f), ddy(f))


def perp_grad(f: TrigScalar) -> VectorField:
    """Velocity of the stream function ``f``: ``(-f_y, f_x)``."""
    return VectorField(-ddy(f), ddx(f))


def div(u: VectorField) -> TrigScalar:
    return ddx(u.x) + ddy(u.y)


def curl(u: VectorField) -> TrigScalar:
    return ddx(u.y) - ddy(u.x)


def laplacian(f: TrigScalar) -> TrigScalar:
    a = f.geometry.alpha
    k2 = (a * f.keys[:, 0]) ** 2 + f.keys[:, 1].astype(float) ** 2
    return TrigScalar(f.geometry, f.keys, -k2 * f.coeffs)


def vector_laplacian(u: VectorField) -> VectorField:
    return VectorField(laplacian(u.x), laplacian(u.y))


def directional(u: VectorField, f: TrigScalar) -> TrigScalar:
    """``(u . grad) f``."""
    return u.x * ddx(f) + u.y * ddy(f)


def advect(u: VectorField, v: VectorField) -> VectorField:
    """``(u . grad) v`` componentwise."""
    return VectorField(directional(u, v.x), directional(u, v.y))


def require_div_free(*fields: VectorField, tol: float = TOL_DIVFREE) -> None:
    for f in fields:
        if not f.is_div_free(tol):
            raise NotDivergenceFreeError(
                f"field is not divergence-free (||div||/||u|| = {f.divergence_ratio:.3e})")


def lie_bracket(u: VectorField, v: VectorField, tol: float = TOL_DIVFREE) -> VectorField:
    require_div_free(u, v, tol=tol)
    w = advect(u, v) - advect(v, u)
    return w if BRACKET_SIGN == 1 else -w


def _split(w: VectorField):
    """Per-mode Helmholtz split of ``w`` into (divergence-free, gradient)."""
    geom = w.geometry
    keys, cx, cy = align(w.x, w.y)
    if len(keys) == 0:
        return w, VectorField.zero(geom)
    kx = geom.alpha * keys[:, 0]
    ky = keys[:, 1].astype(float)
    k2 = kx * kx + ky * ky
    mean = k2 == 0.0
    k2[mean] = 1.0
    d = (kx * cx + ky * cy) / k2
    d[mean] = 0.0
    gx, gy = kx * d, ky * d
    p = VectorField(TrigScalar(geom, keys, cx - gx), TrigScalar(geom, keys, cy - gy))
    q = VectorField(TrigScalar(geom, keys, gx), TrigScalar(geom, keys, gy))
    return p, q


def leray_project(w: VectorField) -> VectorField:
    """Divergence-free part of ``w`` (the mean mode stays here)."""
    return _split(w)[0]


def gradient_part(w: VectorField) -> VectorField:
    """Gradient part ``grad lap^{-1} div w``."""
    return _split(w)[1]


def stokes_apply(u: VectorField, tol: float = TOL_DIVFREE) -> VectorField:
    require_div_free(u, tol=tol)
    return -leray_project(vector_laplacian(u))


def stationarity_residual(u0: VectorField) -> float:
    """``||P(u0 . grad u0)|| / ||u0||^2``; zero for a steady Euler flow."""
    r = leray_project(advect(u0, u0))
    return math.sqrt(max(l2_inner(r, r), 0.0)) / max(l2_inner(u0, u0), _RESIDUAL_FLOOR)


def inverse_laplacian(f: TrigScalar) -> TrigScalar:
    """Mean-free solution of ``lap g = f``; ``f`` must have zero mean."""
    if abs(f.mean) > 0.0:
        raise ValueError("inverse Laplacian needs a mean-free scalar")
    a = f.geometry.alpha
    k2 = (a * f.keys[:, 0]) ** 2 + f.keys[:, 1].astype(float) ** 2
    return TrigScalar(f.geometry, f.keys, -f.coeffs / np.where(k2 == 0.0, 1.0, k2))
