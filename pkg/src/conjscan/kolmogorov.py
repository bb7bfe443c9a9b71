"""Kolmogorov flows on the rectangular torus and their conjugacy scan.

The steady state has stream function ``-cos(n*alpha*x) * cos(m*y)``. Two
shear-type test directions are built from

    phi_1 = -2 cos(n*alpha*x + y) cos(m*y)
    phi_2 = -2 cos(n*alpha*x) cos(m*y + alpha*x)

and the numeric criterion is compared with closed-form expressions.

Normalization: the closed forms describe the criterion for the steady state
rescaled to unit L2 norm on the reference square ``[0, 2*pi)^2`` of the
coordinates ``(alpha*x, y)``, i.e. ``mc(u0, v) / (alpha * ||u0||^2)``. For
``n, m != 0`` that divisor is ``pi^2 * (n^2 alpha^2 + m^2)``. The scan reports
this normalized value as ``mc_num``.

The closed forms hold for non-resonant cells: form 1 needs ``|m| >= 2`` and
form 2 needs ``|n| >= 2``. At ``|m| = 1`` (form 1) or ``|n| = 1`` (form 2)
extra mode interactions appear and the formulas no longer match, though the
sign still agrees. The second formula in its original form
(:func:`mc_closed_form_2_original`) carries an ``n^2`` prefactor and a
``1 + ...`` denominator factor. Against the numerics the correct expression
has ``m^2`` and ``alpha^2 + ...`` instead (:func:`mc_closed_form_2`). The region inequalities are unaffected.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .conjugacy import conjugate_time_bound, mc_bracket_form
from .operators import perp_grad
from .torus import TorusGeometry, TrigScalar, VectorField, cos_mode, l2_inner, sin_mode

NORM_CONST = 1.0


@dataclass(frozen=True)
class KolmogorovParams:
    n: int
    m: int
    alpha: float

    def __post_init__(self):
        if int(self.n) != self.n or int(self.m) != self.m:
            raise ValueError("n and m must be integers")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "m", int(self.m))
        if (self.n, self.m) == (0, 0):
            raise ValueError("(n, m) = (0, 0) is not a Kolmogorov flow")
        TorusGeometry(self.alpha)
        object.__setattr__(self, "alpha", float(self.alpha))

    @property
    def geometry(self) -> TorusGeometry:
        return TorusGeometry(self.alpha)

    @property
    def eigenvalue(self) -> float:
        return self.n ** 2 * self.alpha ** 2 + self.m ** 2

    @property
    def is_shear(self) -> bool:
        return self.n == 0 or self.m == 0


def kolmogorov_stream(p: KolmogorovParams) -> TrigScalar:
    g = p.geometry
    return -(cos_mode(g, p.n, 0) * cos_mode(g, 0, p.m))


def kolmogorov_field(p: KolmogorovParams) -> VectorField:
    return perp_grad(kolmogorov_stream(p))


def test_stream_1(p: KolmogorovParams) -> TrigScalar:
    g = p.geometry
    return -2.0 * (cos_mode(g, p.n, 1) * cos_mode(g, 0, p.m))


def test_stream_2(p: KolmogorovParams) -> TrigScalar:
    g = p.geometry
    return -2.0 * (cos_mode(g, p.n, 0) * cos_mode(g, 1, p.m))


def test_field_1(p: KolmogorovParams) -> VectorField:
    return perp_grad(test_stream_1(p))


def test_field_2(p: KolmogorovParams) -> VectorField:
    return perp_grad(test_stream_2(p))


# keep pytest from collecting the constructors above
test_stream_1.__test__ = test_stream_2.__test__ = False
test_field_1.__test__ = test_field_2.__test__ = False


def _denominator(n, m, alpha):
    lam = m * m + n * n * alpha * alpha
    return lam * (1 + lam)


def numerator_1(n, m, alpha):
    return 3 + 11 * m ** 2 + 6 * m ** 4 + (3 - 2 * m ** 2) * n ** 2 * alpha ** 2


def numerator_2(n, m, alpha):
    return 3 + 11 * n ** 2 + 6 * n ** 4 + (3 - 2 * n ** 2) * m ** 2 / alpha ** 2


def mc_closed_form_1(p: KolmogorovParams) -> float:
    n, m, a = p.n, p.m, p.alpha
    return -(n * n * a * a / (8 * math.pi ** 2)) * numerator_1(n, m, a) / _denominator(n, m, a)


def mc_closed_form_2_original(p: KolmogorovParams) -> float:
    """Second closed form in its original, uncorrected form (see module notes)."""
    n, m, a = p.n, p.m, p.alpha
    return -(n * n * a ** 4 / (8 * math.pi ** 2)) * numerator_2(n, m, a) / _denominator(n, m, a)


def mc_closed_form_2(p: KolmogorovParams) -> float:
    """Second closed form, corrected to match the test field it belongs to.

    Equals ``alpha^2 * mc_closed_form_1(m, n, 1/alpha)``: the second test field
    is the first one with the roles of the two axes exchanged.
    """
    n, m, a = p.n, p.m, p.alpha
    lam = m * m + n * n * a * a
    return (-(m * m * a ** 4 / (8 * math.pi ** 2)) * numerator_2(n, m, a)
            / (lam * (a * a + lam)))


def region_predicate(p: KolmogorovParams) -> tuple[bool, bool]:
    """Whether each admissibility inequality (numerator <= 0) holds.

    Evaluated in exact rational arithmetic on the binary value of ``alpha``.
    """
    n, m, a = p.n, p.m, Fraction(p.alpha)
    return numerator_1(n, m, a) <= 0, numerator_2(n, m, a) <= 0


def reference_norm2(u0: VectorField) -> float:
    """``||u0||^2`` on the reference square of area ``4*pi^2``."""
    return 4.0 * math.pi ** 2 / u0.geometry.area * l2_inner(u0, u0)


def normalized_mc(u0: VectorField, v: VectorField) -> float:
    """Criterion for ``u0`` rescaled to unit reference norm."""
    return mc_bracket_form(u0, v) / reference_norm2(u0)


def relative_agreement(num: float, closed: float, norm_const: float = NORM_CONST) -> float:
    target = norm_const * closed
    if target == 0.0:
        return abs(num)
    return abs(num - target) / abs(target)


@dataclass
class ScanRecord:
    params: KolmogorovParams
    mc_num_1: float = math.nan
    mc_num_2: float = math.nan
    mc_cf_1: float = math.nan
    mc_cf_2: float = math.nan
    in_region_1: bool = False
    in_region_2: bool = False
    tc: Optional[float] = None
    agreement_1: float = math.nan
    agreement_2: float = math.nan
    status: str = "ok"
    mc_raw_1: float = math.nan
    mc_raw_2: float = math.nan
    u0_reference_norm2: float = math.nan

    COLUMNS = ("alpha", "n", "m", "lambda", "mc_num_1", "mc_cf_1", "agreement_1",
               "in_region_1", "mc_num_2", "mc_cf_2", "agreement_2", "in_region_2",
               "tc", "status")

    def row(self) -> dict:
        p = self.params
        return {
            "alpha": p.alpha, "n": p.n, "m": p.m, "lambda": p.eigenvalue,
            "mc_num_1": self.mc_num_1, "mc_cf_1": self.mc_cf_1,
            "agreement_1": self.agreement_1, "in_region_1": self.in_region_1,
            "mc_num_2": self.mc_num_2, "mc_cf_2": self.mc_cf_2,
            "agreement_2": self.agreement_2, "in_region_2": self.in_region_2,
            "tc": self.tc, "status": self.status,
        }


def cell_status(p: KolmogorovParams) -> str:
    flags = []
    if p.is_shear:
        flags.append("shear")
    else:
        if abs(p.m) == 1:
            flags.append("resonant_1")
        if abs(p.n) == 1:
            flags.append("resonant_2")
    return ";".join(flags) or "ok"


def scan_cell(p: KolmogorovParams, norm_const: float = NORM_CONST) -> ScanRecord:
    rec = ScanRecord(params=p)
    rec.mc_cf_1 = mc_closed_form_1(p)
    rec.mc_cf_2 = mc_closed_form_2(p)
    rec.in_region_1, rec.in_region_2 = region_predicate(p)
    status = cell_status(p)
    try:
        u0 = kolmogorov_field(p)
        ref = reference_norm2(u0)
        rec.u0_reference_norm2 = ref
        rec.mc_raw_1 = mc_bracket_form(u0, test_field_1(p))
        rec.mc_raw_2 = mc_bracket_form(u0, test_field_2(p))
        rec.mc_num_1 = rec.mc_raw_1 / ref
        rec.mc_num_2 = rec.mc_raw_2 / ref
        rec.agreement_1 = relative_agreement(rec.mc_num_1, rec.mc_cf_1, norm_const)
        rec.agreement_2 = relative_agreement(rec.mc_num_2, rec.mc_cf_2, norm_const)
        best = max(rec.mc_num_1, rec.mc_num_2)
        if best > 0.0:
            rec.tc = conjugate_time_bound(best)
    except ValueError as exc:
        status = f"error:{exc}"
    rec.status = status
    return rec


def scan_grid(alpha: float, n_max: int, m_max: int) -> list[KolmogorovParams]:
    if n_max < 1 or m_max < 1:
        raise ValueError("n_max and m_max must be at least 1")
    return [KolmogorovParams(n, m, alpha)
            for n in range(-n_max, n_max + 1)
            for m in range(-m_max, m_max + 1)
            if (n, m) != (0, 0)]


def scan(alpha: float, n_max: int, m_max: int, threads: int = 1,
         norm_const: float = NORM_CONST) -> list[ScanRecord]:
    """Evaluate every cell ``|n| <= n_max, |m| <= m_max`` in lexicographic order."""
    cells = scan_grid(alpha, n_max, m_max)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda p: scan_cell(p, norm_const), cells))
    return [scan_cell(p, norm_const) for p in cells]


def unidirectional_field(k1: int, k2: int, alpha: float, phase: str = "cos") -> VectorField:
    """Straight-streamline Kolmogorov member from ``-f(k1*alpha*x + k2*y) / lambda``."""
    if (k1, k2) == (0, 0):
        raise ValueError("unidirectional flow needs a nonzero wavevector")
    g = TorusGeometry(alpha)
    lam = k1 * k1 * g.alpha ** 2 + k2 * k2
    if phase == "cos":
        psi = cos_mode(g, k1, k2, -1.0 / lam)
    elif phase == "sin":
        psi = sin_mode(g, k1, k2, -1.0 / lam)
    else:
        raise ValueError(f"phase must be 'cos' or 'sin', got {phase!r}")
    return perp_grad(psi)


@dataclass
class PlotGrid:
    x_axis: list
    y_axis: list
    values_1: list
    values_2: list
    alpha: Optional[float] = None
    n: Optional[int] = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {"x_axis": self.x_axis, "y_axis": self.y_axis,
             "values_1": self.values_1, "values_2": self.values_2,
             "alpha": self.alpha, "clip": "positive"}
        if self.n is not None:
            d["n"] = self.n
        return d


def _clip(p: KolmogorovParams) -> tuple[float, float]:
    return max(mc_closed_form_1(p), 0.0), max(mc_closed_form_2(p), 0.0)


def plot_grid_nm(alpha: float, n_max: int, m_max: int) -> PlotGrid:
    """Positive part of both closed forms over ``(n, m)``; rows follow ``m``."""
    ns = list(range(-n_max, n_max + 1))
    ms = list(range(-m_max, m_max + 1))
    v1, v2 = [], []
    for m in ms:
        r1, r2 = [], []
        for n in ns:
            if (n, m) == (0, 0):
                a, b = 0.0, 0.0
            else:
                a, b = _clip(KolmogorovParams(n, m, alpha))
            r1.append(a)
            r2.append(b)
        v1.append(r1)
        v2.append(r2)
    return PlotGrid(ns, ms, v1, v2, alpha=float(alpha))


def plot_grid_malpha(n: int, m_max: int, alphas) -> PlotGrid:
    """Positive part of both closed forms over ``(m, alpha)``; rows follow ``alpha``."""
    ms = list(range(-m_max, m_max + 1))
    alphas = [float(a) for a in alphas]
    v1, v2 = [], []
    for a in alphas:
        r1, r2 = [], []
        for m in ms:
            if (n, m) == (0, 0):
                x, y = 0.0, 0.0
            else:
                x, y = _clip(KolmogorovParams(n, m, a))
            r1.append(x)
            r2.append(y)
        v1.append(r1)
        v2.append(r2)
    return PlotGrid(ms, alphas, v1, v2, n=n)
