"""Conjugate-point criterion along the geodesic of a steady Euler flow.

For a stationary ``u0`` and a divergence-free direction ``v`` the criterion

    m_c = <[u0, v] . grad u0 + u0 . grad [u0, v], v> / ||v||^2

certifies a conjugate point no later than ``pi * sqrt(2 / m_c)`` whenever it
is positive. It is computed two ways: directly from the bracket, and as the
flat Gauss-Codazzi sectional curvature term minus ``||P(u0 . grad v)||^2``.
The two must agree; their gap is reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .operators import (
    advect,
    gradient_part,
    leray_project,
    lie_bracket,
    require_div_free,
    stationarity_residual,
)
from .torus import TOL_DIVFREE, VectorField, _check_same, l2_inner

STATIONARITY_TOL = 1e-8
IDENTITY_TOL = 1e-8


class InconclusiveError(ValueError):
    """The criterion is not positive, so no conjugate-time bound follows."""


def _prepare(u0: VectorField, v: VectorField, tol: float) -> float:
    _check_same(u0.geometry, v.geometry)
    require_div_free(u0, v, tol=tol)
    v2 = l2_inner(v, v)
    if v2 == 0.0:
        raise ValueError("test direction v must be nonzero")
    return v2


def mc_bracket_form(u0: VectorField, v: VectorField, tol: float = TOL_DIVFREE) -> float:
    v2 = _prepare(u0, v, tol)
    b = lie_bracket(u0, v, tol=tol)
    return l2_inner(advect(b, u0) + advect(u0, b), v) / v2


def sectional_curvature_term(u0: VectorField, v: VectorField, tol: float = TOL_DIVFREE) -> float:
    """``<R(v, u0) u0, v> / ||v||^2`` via the Gauss-Codazzi identity.

    The base-manifold curvature term drops out because the torus is flat.
    """
    v2 = _prepare(u0, v, tol)
    q_uv = gradient_part(advect(u0, v))
    return (l2_inner(gradient_part(advect(u0, u0)), gradient_part(advect(v, v)))
            - l2_inner(q_uv, q_uv)) / v2


def mc_curvature_form(u0: VectorField, v: VectorField, tol: float = TOL_DIVFREE) -> float:
    v2 = _prepare(u0, v, tol)
    p_uv = leray_project(advect(u0, v))
    return sectional_curvature_term(u0, v, tol) - l2_inner(p_uv, p_uv) / v2


def conjugate_time_bound(mc: float) -> float:
    """Upper bound ``pi * sqrt(2 / mc)`` on the first conjugate time."""
    if not mc > 0.0:
        raise InconclusiveError(f"criterion inconclusive: no bound (mc = {mc!r})")
    return math.pi * math.sqrt(2.0 / mc)


@dataclass
class ConjugacyResult:
    """Criterion values for one test direction.

    ``tc`` is only an upper bound on the conjugate time, present when
    ``mc > 0``.
    """

    mc: float
    tc: Optional[float]
    curvature_term: float
    p_advect_norm2: float
    stationarity: float
    mc_curvature: float = math.nan
    identity_gap: float = 0.0
    status: str = "ok"
    label: str = ""

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "mc": self.mc,
            "mc_curvature": self.mc_curvature,
            "curvature_term": self.curvature_term,
            "p_advect_norm2": self.p_advect_norm2,
            "stationarity": self.stationarity,
            "identity_gap": self.identity_gap,
            "tc": self.tc,
            "status": self.status,
        }


@dataclass
class ConjugacyReport:
    results: list[ConjugacyResult] = field(default_factory=list)
    best: Optional[int] = None

    @property
    def best_result(self) -> Optional[ConjugacyResult]:
        return None if self.best is None else self.results[self.best]


def relative_gap(a: float, b: float, scale: float = 0.0) -> float:
    den = max(abs(a), abs(b), scale)
    return 0.0 if den == 0.0 else abs(a - b) / den


def evaluate(u0: VectorField, v: VectorField, stationarity: Optional[float] = None,
             tol: float = TOL_DIVFREE, label: str = "") -> ConjugacyResult:
    """Both forms of the criterion for one direction, sharing intermediate terms."""
    v2 = _prepare(u0, v, tol)
    if stationarity is None:
        stationarity = stationarity_residual(u0)
    b = lie_bracket(u0, v, tol=tol)
    mc = l2_inner(advect(b, u0) + advect(u0, b), v) / v2
    uv = advect(u0, v)
    q_uv = gradient_part(uv)
    p_uv = uv - q_uv
    curv = (l2_inner(gradient_part(advect(u0, u0)), gradient_part(advect(v, v)))
            - l2_inner(q_uv, q_uv)) / v2
    p2 = l2_inner(p_uv, p_uv) / v2
    mc_curv = curv - p2
    # the two forms cancel large terms; compare against the size of those terms
    scale = abs(curv) + p2
    gap = relative_gap(mc, mc_curv, 1e-3 * scale)
    tc = conjugate_time_bound(mc) if mc > 0.0 else None
    status = ["conjugate" if tc is not None else "inconclusive"]
    if stationarity > STATIONARITY_TOL:
        status.append("warning:nonstationary")
    if gap > IDENTITY_TOL:
        status.append("warning:identity")
    return ConjugacyResult(mc=mc, tc=tc, curvature_term=curv, p_advect_norm2=p2,
                           stationarity=stationarity, mc_curvature=mc_curv,
                           identity_gap=gap, status=";".join(status), label=label)


def conjugacy_report(u0: VectorField, candidates: Sequence[VectorField],
                     labels: Optional[Sequence[str]] = None,
                     tol: float = TOL_DIVFREE) -> ConjugacyReport:
    """Evaluate every candidate direction and pick the one maximizing ``mc``.

    A candidate that cannot be evaluated gets an ``error:`` status instead of
    aborting the batch.
    """
    if len(candidates) == 0:
        raise ValueError("conjugacy_report needs at least one candidate")
    labels = list(labels) if labels is not None else [f"v{i}" for i in range(len(candidates))]
    stat = stationarity_residual(u0)
    report = ConjugacyReport()
    for lab, v in zip(labels, candidates):
        try:
            res = evaluate(u0, v, stationarity=stat, tol=tol, label=lab)
        except ValueError as exc:
            res = ConjugacyResult(mc=math.nan, tc=None, curvature_term=math.nan,
                                  p_advect_norm2=math.nan, stationarity=stat,
                                  status=f"error:{exc}", label=lab)
        report.results.append(res)
    finite = [i for i, r in enumerate(report.results) if math.isfinite(r.mc)]
    if finite:
        report.best = max(finite, key=lambda i: report.results[i].mc)
    return report
