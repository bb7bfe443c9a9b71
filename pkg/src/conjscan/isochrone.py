"""Streamline travel times for planar steady flows with closed streamlines.

The period of the level set ``{psi = c}`` is ``T(c) = oint dl / |grad psi|``.
It is computed twice, independently: by integrating a particle around the
streamline until it returns to a section ray through the stagnation point,
and by tracing the level set with predictor-corrector continuation and
integrating ``1/|grad psi|`` along arclength.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

RTOL = 1e-10
TOL_T = 1e-9
ISO_TOL = 1e-6
GRAD_FLOOR = 1e-8


class StagnationError(ValueError):
    """The gradient of the stream function vanished on the streamline."""


class NoReturnError(RuntimeError):
    """The particle did not come back to the section in time."""


class ContourNotClosedError(RuntimeError):
    """Level-set continuation did not close up."""


@dataclass(frozen=True)
class Domain:
    kind: str                      # "ellipse" | "disk" | "annulus"
    params: tuple

    @property
    def extent(self) -> float:
        """Radius of a disk around the center containing the domain."""
        if self.kind == "ellipse":
            return max(self.params)
        return self.params[-1]


@dataclass(frozen=True)
class PlanarStream:
    """Stream function with analytic gradient and a single elliptic stagnation point."""

    psi: Callable[[float, float], float]
    grad: Callable[[float, float], tuple]
    domain: Domain
    center: tuple = (0.0, 0.0)
    level_range: tuple = (0.0, 1.0)
    name: str = ""

    def velocity(self, x, y):
        gx, gy = self.grad(x, y)
        return -gy, gx

    def check_level(self, c: float) -> None:
        lo, hi = self.level_range
        if not lo < c < hi:
            raise ValueError(f"level {c!r} is outside the open range ({lo}, {hi})")


def elliptic_vortex(a: float, b: float) -> PlanarStream:
    """Constant-vorticity vortex ``psi = ((x/a)^2 + (y/b)^2) / 2`` in the ellipse."""
    if not (a > 0 and b > 0):
        raise ValueError("ellipse axes must be positive")
    a, b = float(a), float(b)
    return PlanarStream(
        psi=lambda x, y: 0.5 * ((x / a) ** 2 + (y / b) ** 2),
        grad=lambda x, y: (x / a ** 2, y / b ** 2),
        domain=Domain("ellipse", (a, b)),
        level_range=(0.0, 0.5),
        name=f"ellipse({a:g},{b:g})",
    )


def vorticity(a: float, b: float) -> float:
    """Laplacian of the elliptic-vortex stream function."""
    return (a * a + b * b) / (a * a * b * b)


def disk_rotation(radius: float) -> PlanarStream:
    """Solid-body rotation of the disk, the round member of the elliptic family."""
    s = elliptic_vortex(radius, radius)
    return PlanarStream(s.psi, s.grad, Domain("disk", (float(radius),)),
                        level_range=s.level_range, name=f"disk({radius:g})")


def power4(r_outer: float = 1.0, r_inner: Optional[float] = None) -> PlanarStream:
    """``psi = r^4 / 4`` on a disk (or annulus); period ``2*pi / r^2``."""
    dom = (Domain("disk", (float(r_outer),)) if r_inner is None
           else Domain("annulus", (float(r_inner), float(r_outer))))
    lo = 0.0 if r_inner is None else r_inner ** 4 / 4
    return PlanarStream(
        psi=lambda x, y: 0.25 * (x * x + y * y) ** 2,
        grad=lambda x, y: ((x * x + y * y) * x, (x * x + y * y) * y),
        domain=dom,
        level_range=(lo, r_outer ** 4 / 4),
        name="power4",
    )


def seed_point(s: PlanarStream, c: float, angle: float = 0.0) -> np.ndarray:
    """Point of ``{psi = c}`` on the ray from the center at ``angle``."""
    s.check_level(c)
    cx, cy = s.center
    e = (math.cos(angle), math.sin(angle))

    def f(r):
        return s.psi(cx + r * e[0], cy + r * e[1]) - c

    r_hi = s.domain.extent
    while f(r_hi) < 0.0:
        r_hi *= 1.5
        if r_hi > 1e6 * s.domain.extent:
            raise ValueError(f"level {c!r} not reached along the seed ray")
    r_lo = s.domain.params[0] if s.domain.kind == "annulus" else 0.0
    r = brentq(f, r_lo, r_hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return np.array([cx + r * e[0], cy + r * e[1]])


def _grad_norm(s: PlanarStream, p) -> float:
    gx, gy = s.grad(p[0], p[1])
    return math.hypot(gx, gy)


def period_ode(s: PlanarStream, c: float, angle: float = 0.0, rtol: float = RTOL,
               tol_t: float = TOL_T, max_time: float = 1e4) -> float:
    """First-return time of a particle seeded on ``{psi = c}``.

    The winding angle about the center is integrated alongside the particle
    position; the return to the seed ray is the event ``|angle| = 2*pi``.
    """
    p0 = seed_point(s, c, angle)
    if _grad_norm(s, p0) < GRAD_FLOOR:
        raise StagnationError(f"|grad psi| below {GRAD_FLOOR} at the seed")
    cx, cy = s.center

    def rhs(t, z):
        ux, uy = s.velocity(z[0], z[1])
        dx, dy = z[0] - cx, z[1] - cy
        return [ux, uy, (dx * uy - dy * ux) / (dx * dx + dy * dy)]

    def around_pos(t, z):
        return z[2] - 2 * math.pi

    def around_neg(t, z):
        return z[2] + 2 * math.pi

    def stagnant(t, z):
        return _grad_norm(s, z) - GRAD_FLOOR

    for ev in (around_pos, around_neg, stagnant):
        ev.terminal = True

    scale = float(np.hypot(*(p0 - np.array(s.center))))
    sol = solve_ivp(rhs, (0.0, max_time), [p0[0], p0[1], 0.0], method="DOP853",
                    rtol=rtol, atol=rtol * min(scale, 1.0) * 1e-2,
                    events=(around_pos, around_neg, stagnant), dense_output=True)
    if sol.t_events[2].size:
        raise StagnationError("particle reached a stagnation point")
    hits = [e[0] for e in sol.t_events[:2] if e.size]
    if not hits:
        raise NoReturnError(f"no return to the section within t = {max_time}")
    t_ret = min(hits)
    # polish the crossing on the dense output beyond brentq's default
    sign = 1.0 if sol.t_events[0].size and sol.t_events[0][0] == t_ret else -1.0
    g = lambda t: sol.sol(t)[2] - sign * 2 * math.pi
    step = max(tol_t, 1e-6 * t_ret)
    lo, hi = t_ret - step, min(t_ret + step, sol.t[-1])
    if g(lo) * g(hi) < 0.0:
        t_ret = brentq(g, lo, hi, xtol=tol_t * 1e-3, rtol=4 * np.finfo(float).eps)
    return float(t_ret)


def period_ode_with_error(s: PlanarStream, c: float, rtol: float = RTOL, **kw):
    """Return time plus an error estimate from a 10x looser integration."""
    t = period_ode(s, c, rtol=rtol, **kw)
    t_loose = period_ode(s, c, rtol=10 * rtol, **kw)
    return t, abs(t - t_loose)


def trace_level_set(s: PlanarStream, c: float, n_steps: int = 2000,
                    angle: float = 0.0, tol_close: Optional[float] = None,
                    max_newton: int = 50) -> np.ndarray:
    """Points along ``{psi = c}`` in the flow direction, start point first.

    Each step is a Heun predictor along the unit tangent ``grad_perp psi /
    |grad psi|`` followed by Newton correction along ``grad psi`` back onto
    the level set. Stops once the winding angle about the center completes a
    full turn; the returned polygon is implicitly closed.
    """
    p0 = seed_point(s, c, angle)
    center = np.array(s.center, dtype=float)
    r0 = float(np.hypot(*(p0 - center)))
    h = 2 * math.pi * r0 / n_steps
    if tol_close is None:
        tol_close = 2.0 * h

    def tangent(p):
        gx, gy = s.grad(p[0], p[1])
        nrm = math.hypot(gx, gy)
        if nrm < GRAD_FLOOR:
            raise StagnationError(f"|grad psi| below {GRAD_FLOOR} on the level set")
        return np.array([-gy, gx]) / nrm

    def correct(q):
        for _ in range(max_newton):
            gx, gy = s.grad(q[0], q[1])
            g2 = gx * gx + gy * gy
            if g2 < GRAD_FLOOR ** 2:
                raise StagnationError(f"|grad psi| below {GRAD_FLOOR} on the level set")
            r = s.psi(q[0], q[1]) - c
            q = q - r * np.array([gx, gy]) / g2
            if abs(r) <= 4 * np.finfo(float).eps * max(abs(c), 1e-300):
                break
        return q

    def polar(p):
        d = p - center
        return math.atan2(d[1], d[0])

    points = [p0]
    p = p0
    theta = 0.0
    prev = polar(p0)
    for _ in range(20 * n_steps):
        t0 = tangent(p)
        q = correct(p + 0.5 * h * (t0 + tangent(p + h * t0)))
        a = polar(q)
        dtheta = (a - prev + math.pi) % (2 * math.pi) - math.pi
        if abs(theta + dtheta) >= 2 * math.pi:
            if np.hypot(*(q - p0)) > tol_close and np.hypot(*(p - p0)) > tol_close:
                raise ContourNotClosedError("level set did not return to its start")
            return np.array(points)
        theta += dtheta
        prev = a
        points.append(q)
        p = q
    raise ContourNotClosedError(f"level set not closed after {20 * n_steps} steps")


def period_quadrature(s: PlanarStream, c: float, n_steps: int = 2000,
                      angle: float = 0.0) -> float:
    """``oint dl / |grad psi|`` over the traced level set.

    The traced points are interpolated by a periodic cubic spline in chord
    length, and the integrand is summed with 4-point Gauss-Legendre on each
    interval.
    """
    pts = trace_level_set(s, c, n_steps=n_steps, angle=angle)
    closed = np.vstack([pts, pts[:1]])
    chord = np.hypot(*np.diff(closed, axis=0).T)
    sgrid = np.concatenate([[0.0], np.cumsum(chord)])
    spline = CubicSpline(sgrid, closed, bc_type="periodic")
    deriv = spline.derivative()
    xg, wg = np.polynomial.legendre.leggauss(4)
    mid = 0.5 * (sgrid[1:] + sgrid[:-1])
    half = 0.5 * chord
    snodes = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    weights = (half[:, None] * wg[None, :]).ravel()
    xy = spline(snodes)
    dxy = deriv(snodes)
    gx, gy = s.grad(xy[:, 0], xy[:, 1])
    speed = np.hypot(dxy[:, 0], dxy[:, 1])
    return float(np.sum(weights * speed / np.hypot(gx, gy)))


@dataclass
class PeriodResult:
    c: float
    T_ode: float = math.nan
    T_quad: float = math.nan
    discrepancy: float = math.nan
    status: str = "ok"

    COLUMNS = ("c", "T_ode", "T_quad", "discrepancy", "status")

    def row(self) -> dict:
        return {k: getattr(self, k) for k in self.COLUMNS}


def period(s: PlanarStream, c: float) -> PeriodResult:
    res = PeriodResult(c=float(c))
    try:
        res.T_ode = period_ode(s, c)
        res.T_quad = period_quadrature(s, c)
        res.discrepancy = abs(res.T_ode - res.T_quad) / res.T_ode
    except (ValueError, RuntimeError) as exc:
        res.status = f"error:{exc}"
    return res


@dataclass
class IsochronalityReport:
    records: list = field(default_factory=list)
    max_relative_spread: float = math.nan

    def isochronal(self, tol: float = ISO_TOL) -> bool:
        return self.max_relative_spread <= tol


def isochronality_report(s: PlanarStream, levels: Sequence[float],
                         threads: int = 1) -> IsochronalityReport:
    """Periods at each level and the spread ``max |T - mean| / mean``."""
    levels = list(levels)
    if len(levels) < 2:
        raise ValueError("isochronality needs at least two levels")
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(lambda c: period(s, c), levels))
    else:
        records = [period(s, c) for c in levels]
    ts = np.array([r.T_ode for r in records if r.status == "ok"])
    spread = math.nan
    if ts.size:
        mean = ts.mean()
        spread = float(np.max(np.abs(ts - mean)) / mean)
    return IsochronalityReport(records, spread)


def interior_levels(s: PlanarStream, count: int) -> list[float]:
    """``count`` evenly spaced levels strictly inside the level range."""
    if count < 1:
        raise ValueError("need at least one level")
    lo, hi = s.level_range
    return [lo + (hi - lo) * j / (count + 1) for j in range(1, count + 1)]
