import math

import numpy as np
import pytest

from oracle_values import RESIDUE_CLOSED_FORM, RESIDUE_STATED, S_AT_RESONANCE
from reslab.algebra_a2 import RHO_X
from reslab.contour_engine import ResolventEngine
from reslab.resonance import (
    CSV_HEADER,
    DEFAULT_RADIUS,
    RadiusError,
    chart_residue_closed_form,
    extract_residue,
    laurent_coefficients,
    predicted_residue,
    residue_operator_value,
    residue_record,
    resonance_scan,
    sheets_with,
    symbol_at_resonance,
)
from reslab.spectral_symbols import make_spherical_symbol
from reslab.spherical_eval import BasePoint
from reslab.surface import FmCache, SheetSignature, SurfaceError


@pytest.fixture(scope="module")
def scan(atlas2, gauss):
    return resonance_scan(atlas2, ResolventEngine.for_symbol(gauss))


def test_sheets_with():
    sh = sheets_with(1, 2)
    assert [str(e) for e in sh] == ["+,+,+", "+,+,-", "-,+,+", "-,+,-"]


def test_formula_values(gauss):
    for n in range(3):
        assert abs(symbol_at_resonance(gauss, n) - S_AT_RESONANCE[n]) < 1e-12 * abs(S_AT_RESONANCE[n])
        assert abs(chart_residue_closed_form(gauss, n) - RESIDUE_CLOSED_FORM[n]) < 1e-12 * abs(RESIDUE_CLOSED_FORM[n])
        assert abs(predicted_residue(gauss, n) - RESIDUE_STATED[n]) < 1e-12 * abs(RESIDUE_STATED[n])


def test_extracted_residues_match_oracle(atlas2, engine):
    cache = FmCache()
    for n in range(3):
        for eps in sheets_with(n, 2):
            got = extract_residue(atlas2, engine, n, eps, cache=cache)
            assert abs(got - RESIDUE_CLOSED_FORM[n]) < 1e-8 * abs(RESIDUE_CLOSED_FORM[n])


def test_closed_form_to_stated_ratio(gauss):
    """The extracted residue equals the stated value times -i/(2 rho_X)."""
    for n in range(3):
        ratio = chart_residue_closed_form(gauss, n) / predicted_residue(gauss, n)
        assert abs(ratio - (-1j / (2 * RHO_X))) < 1e-14


def test_simple_pole_and_radius_independence(atlas2, engine):
    eps = SheetSignature((1, 1, 1))
    c1, c2 = laurent_coefficients(atlas2, engine, 1, eps)
    c1b, _ = laurent_coefficients(atlas2, engine, 1, eps, radius=DEFAULT_RADIUS / 2, order=64)
    assert abs(c2) < 1e-10 * abs(c1)
    assert abs(c1 - c1b) < 1e-10 * abs(c1)


def test_record_fields(atlas2, engine):
    r = residue_record(atlas2, engine, 0, SheetSignature((1, -1, 1)))
    d = r.to_dict()
    assert d["extracted"] == [r.extracted.real, r.extracted.imag]
    assert d["closed_form_rel_error"] < 1e-8
    assert len(r.csv_row()) == len(CSV_HEADER)


def test_bad_chart_requests(atlas2, engine):
    with pytest.raises(RadiusError):
        extract_residue(atlas2, engine, 0, SheetSignature((1, 1, 1)), radius=1.0)
    with pytest.raises(SurfaceError):
        extract_residue(atlas2, engine, 0, SheetSignature((-1, 1, 1)))


def test_residue_operator_two_routes(gauss):
    """(n+1/2)^2 h(i(n+1/2)rho) phi_{(n+1/2)rho}(y) against the six-rotation spherical symbol."""
    y = BasePoint.from_pair(0.4, -0.1)
    sym = make_spherical_symbol(gauss, y, order=32)
    for n in range(3):
        a = (n + 0.5) ** 2
        direct = residue_operator_value(gauss, n, y)
        via_symbol = a * symbol_at_resonance(sym, n)
        # order-32 quadrature error grows with the exponent (n+1/2) rho
        assert abs(direct - via_symbol) < 1e-6 * abs(direct)
        at_origin = residue_operator_value(gauss, n, BasePoint.origin())
        assert abs(at_origin - a * S_AT_RESONANCE[n]) < 1e-12 * abs(at_origin)


def test_scan_detects_exactly_the_resonances(scan):
    assert [round(-p.imag / RHO_X, 12) for p in scan.detected] == [0.5, 1.5]
    assert all(p["laurent_ratio"] < 1e-6 for p in scan.poles)
    assert len(scan.controls) == 20
    assert scan.clean
    assert all(c.ratio < 1e-8 for c in scan.controls)


def test_scan_report_json(scan):
    d = scan.to_dict()
    assert d["poles"][0]["z"] == [0.0, -0.5 * RHO_X]
    assert "normalization" in d
