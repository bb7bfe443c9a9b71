import math

import numpy as np
import pytest

from conjscan.kolmogorov import (
    KolmogorovParams,
    ScanRecord,
    cell_status,
    kolmogorov_field,
    kolmogorov_stream,
    mc_closed_form_1,
    mc_closed_form_2,
    mc_closed_form_2_original,
    normalized_mc,
    plot_grid_malpha,
    plot_grid_nm,
    region_predicate,
    scan,
    scan_cell,
    test_field_1,
    test_field_2,
    test_stream_1,
    unidirectional_field,
)
from conjscan.operators import div, perp_grad, stationarity_residual, stokes_apply
from conjscan.torus import TorusGeometry, cos_mode

from conftest import random_div_free

PI2 = math.pi ** 2


def test_params_validation():
    for bad in [(0, 0, 1.0), (1, 1, 0.0), (1, 1, -2.0), (1.5, 1, 1.0)]:
        with pytest.raises(ValueError):
            KolmogorovParams(*bad)


def test_state_constructors(rng):
    p = KolmogorovParams(6, 2, 1)
    assert kolmogorov_stream(p)(0.0, 0.0) == pytest.approx(-1.0)
    g = TorusGeometry(1)
    assert kolmogorov_field(KolmogorovParams(1, 0, 1)).allclose(perp_grad(-cos_mode(g, 1, 0)))
    for q in (p, KolmogorovParams(-3, 5, 0.5), KolmogorovParams(0, 4, 2.0)):
        u = kolmogorov_field(q)
        assert stokes_apply(u).allclose(q.eigenvalue * u, atol=1e-10)
        assert stationarity_residual(u) <= 1e-12
        for v in (test_field_1(q), test_field_2(q)):
            assert div(v).allclose(0 * kolmogorov_stream(q), atol=1e-13)


def test_test_stream_sampling(rng):
    p = KolmogorovParams(2, 3, 0.5)
    x, y = rng.uniform(0, 4 * np.pi, 16), rng.uniform(0, 2 * np.pi, 16)
    want = -2 * np.cos(2 * 0.5 * x + y) * np.cos(3 * y)
    assert np.allclose(test_stream_1(p)(x, y), want, atol=1e-14)
    # m = 0 still works
    q = KolmogorovParams(2, 0, 1)
    assert np.allclose(test_stream_1(q)(x, y), -2 * np.cos(2 * x + y), atol=1e-14)


def test_closed_form_arithmetic():
    assert mc_closed_form_1(KolmogorovParams(6, 2, 1)) == pytest.approx(1332 / (13120 * PI2), rel=1e-14)
    assert mc_closed_form_1(KolmogorovParams(1, 1, 1)) == pytest.approx(-21 / (48 * PI2), rel=1e-14)
    assert mc_closed_form_1(KolmogorovParams(0, 3, 2)) == 0.0
    assert mc_closed_form_2_original(KolmogorovParams(6, 2, 1)) < 0
    assert mc_closed_form_2(KolmogorovParams(6, 2, 1)) < 0


def test_corrected_second_form_is_axis_swap():
    for n, m, a in [(2, 3, 1.0), (4, -2, 0.5), (3, 5, 3.0)]:
        swapped = a * a * mc_closed_form_1(KolmogorovParams(m, n, 1 / a))
        assert mc_closed_form_2(KolmogorovParams(n, m, a)) == pytest.approx(swapped, rel=1e-13)


def test_original_second_form_disagrees_with_numerics():
    p = KolmogorovParams(2, 3, 1)
    num = normalized_mc(kolmogorov_field(p), test_field_2(p))
    assert num == pytest.approx(mc_closed_form_2(p), rel=1e-12)
    assert num / mc_closed_form_2_original(p) == pytest.approx(9 / 4, rel=1e-12)


def test_region_examples():
    assert region_predicate(KolmogorovParams(6, 2, 1)) == (True, False)
    assert region_predicate(KolmogorovParams(1, 1, 1)) == (False, False)
    assert region_predicate(KolmogorovParams(1, 2, 6))[0]


def test_region_boundary_is_exact():
    # numerator 3 + 11*4 + 96 + (3 - 8) n^2 a^2 vanishes at n^2 a^2 = 143/5
    a = math.sqrt(143 / 5)
    inside = region_predicate(KolmogorovParams(1, 2, a))[0]
    from fractions import Fraction
    assert inside == (Fraction(a) ** 2 >= Fraction(143, 5))


@pytest.mark.parametrize("alpha", [0.5, 1.0, 3.0])
def test_non_resonant_agreement(alpha):
    for n, m in [(2, 2), (3, -4), (-5, 6), (6, 2)]:
        rec = scan_cell(KolmogorovParams(n, m, alpha))
        assert rec.status == "ok"
        assert rec.agreement_1 <= 1e-12 and rec.agreement_2 <= 1e-12


def test_resonant_cells_flagged():
    rec = scan_cell(KolmogorovParams(1, 1, 1))
    assert rec.status == "resonant_1;resonant_2"
    assert rec.mc_raw_1 == pytest.approx(-11 / 12, rel=1e-12)
    assert rec.agreement_1 > 1e-3
    assert np.sign(rec.mc_num_1) == np.sign(rec.mc_cf_1)
    assert cell_status(KolmogorovParams(0, 2, 1)) == "shear"


def test_negated_wavevector_symmetry():
    for n, m, a in [(6, 2, 1.0), (1, 3, 0.5), (2, 1, 2.0)]:
        r, s = scan_cell(KolmogorovParams(n, m, a)), scan_cell(KolmogorovParams(-n, -m, a))
        for name in ("mc_num_1", "mc_num_2", "mc_cf_1", "mc_cf_2"):
            x, y = getattr(r, name), getattr(s, name)
            assert abs(x - y) <= 1e-12 * max(abs(x), 1e-300)


def test_headline_record():
    rec = scan_cell(KolmogorovParams(6, 2, 1))
    assert rec.mc_cf_1 == pytest.approx(1.0287e-2, rel=1e-4)
    assert rec.in_region_1 and not rec.in_region_2
    assert rec.tc == pytest.approx(43.8056, abs=1e-3)
    assert list(rec.row()) == list(ScanRecord.COLUMNS)


def test_scan_small_grid_and_threads():
    recs = scan(1.0, 1, 1)
    assert [(r.params.n, r.params.m) for r in recs] == [
        (-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)]
    shear = [r for r in recs if r.params.is_shear]
    assert all(r.mc_num_1 == 0.0 or abs(r.mc_num_1) < 1e-14 for r in shear if r.params.n == 0)
    threaded = scan(1.0, 1, 1, threads=4)
    assert [r.row() for r in threaded] == [r.row() for r in recs]
    with pytest.raises(ValueError):
        scan(1.0, 0, 2)


def test_unidirectional_fields(rng):
    for k1, k2, phase in [(1, 0, "cos"), (2, -3, "sin"), (0, 1, "cos")]:
        u = unidirectional_field(k1, k2, 1.5, phase)
        assert stationarity_residual(u) <= 1e-12
        v = random_div_free(u.geometry, rng)
        assert normalized_mc(u, v) <= 1e-10
    with pytest.raises(ValueError):
        unidirectional_field(0, 0, 1.0)
    with pytest.raises(ValueError):
        unidirectional_field(1, 0, 1.0, "tan")


def test_plot_grids():
    grid = plot_grid_nm(3.0, 4, 4).to_dict()
    assert grid["clip"] == "positive" and grid["alpha"] == 3.0
    for i, m in enumerate(grid["y_axis"]):
        for j, n in enumerate(grid["x_axis"]):
            if (n, m) == (0, 0):
                continue
            inside = region_predicate(KolmogorovParams(n, m, 3.0))[0]
            assert (grid["values_1"][i][j] > 0) == (inside and n != 0)
    row = plot_grid_malpha(1, 1, [0.1, 0.2]).to_dict()
    assert row["n"] == 1
    assert all(v == 0.0 for r in row["values_1"] for v in r)
