"""Acceptance criteria 1-11, each at its stated tolerance.

Every test records a one-line verdict that is printed in the pytest terminal summary.
Run directly with ``python3 tests/test_acceptance.py`` or through ``pytest -v``.
"""

import json
import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from reslab.algebra_a2 import RHO_X
from reslab.branchkit import Side, c, c_inv, two_sqrt_product
from reslab.contour_engine import F_unit, ResolventEngine, log_jump_predicted
from reslab.resonance import predicted_residue, residue_record, resonance_scan, sheets_with
from reslab.spectral_symbols import XI, phi_zu, symbol_from_config
from reslab.suites import (
    decomposition_grid,
    jump_points,
    suite_decomposition,
    suite_gluing,
    suite_spherical,
    suite_symbols,
)
from reslab.surface import FmCache, build_atlas, removable_points

RESULTS: dict[int, list[str]] = {}


def record(k, label, ok, residual, tol, seconds, limit=None):
    verdict = "PASS" if ok else "FAIL"
    budget = f" (budget {limit:g} s)" if limit else ""
    RESULTS.setdefault(k, []).append(
        f"criterion {k:>2} {label}: {verdict}  residual {residual:.3e}  tol {tol:.0e}  time {seconds:.1f} s{budget}")


def test_criterion_01_branch_kit():
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    z = rng.normal(size=1000) * 2 + 1j * rng.normal(size=1000) * 2
    z = z[np.abs(z.imag) > 1e-6]
    p = two_sqrt_product(z)
    x = rng.uniform(-1, 1, 1000)
    root = np.sqrt(1 - x * x)
    res = max(
        np.max(np.abs(c(c_inv(z)) - z) / np.maximum(1, np.abs(z))),
        np.max(np.abs(two_sqrt_product(-z) + p) / np.maximum(1, np.abs(p))),
        np.max(np.abs(c_inv(x, Side.ABOVE) - (x - 1j * root))),
        np.max(np.abs(c_inv(x, Side.BELOW) - (x + 1j * root))),
    )
    dt = time.perf_counter() - t0
    ok = res < 1e-12 and dt < 1.0
    record(1, "branch kit", ok, res, 1e-12, dt, 1)
    assert res < 1e-12
    assert dt < 1.0


def test_criterion_02_identity_suite():
    t0 = time.perf_counter()
    checks = suite_symbols(7)
    dt = time.perf_counter() - t0
    res = max(ch.residual for ch in checks)
    record(2, "identity suite", res < 1e-10 and dt < 5, res, 1e-10, dt, 5)
    assert res < 1e-10
    assert dt < 5


def test_criterion_03_deformation_identity():
    t0 = time.perf_counter()
    checks = suite_decomposition(7)
    dt = time.perf_counter() - t0
    assert len(decomposition_grid(7)) == 20
    res = checks[0].residual
    record(3, "deformation identity", res < 1e-8 and dt < 30, res, 1e-8, dt, 30)
    assert res < 1e-8
    assert dt < 30


def test_criterion_04_even_and_flat(gauss):
    t0 = time.perf_counter()
    zs = [0.8 + 0.1j, 0.3 - 0.7j, 1.4 + 0.2j, 0.05 + 0.01j, 2.0 - 0.3j]
    even = max(abs(F_unit(gauss, -z) - F_unit(gauss, z)) / abs(F_unit(gauss, z)) for z in zs)
    d = complex(1, 0.5) / abs(complex(1, 0.5))
    q2 = abs(F_unit(gauss, 1e-2 * d)) / 1e-2**6
    q3 = abs(F_unit(gauss, 1e-3 * d)) / 1e-3**6
    ratio = max(q2 / q3, q3 / q2)
    dt = time.perf_counter() - t0
    record(4, "evenness", even < 1e-11, even, 1e-11, dt)
    record(4, "flatness |F/z^6| ratio", ratio < 10, ratio, 10, dt)
    assert even < 1e-11
    assert ratio < 10


def test_criterion_05_singularity_cancellation():
    t0 = time.perf_counter()
    worst_phi = worst_int = 0.0
    for n in (0, 1):
        for m in (0, 1):
            for delta in (1, -1):
                for eps in (1, -1):
                    z, zeta, k = removable_points(n, m, delta, eps)
                    w = 1j * (n + 0.5) / z - zeta
                    u = XI ** (3 - k) * w
                    worst_phi = max(worst_phi, abs(phi_zu(z, 1.0, u)))
                    v = z * c(u)
                    worst_int = max(worst_int, abs(v.real), abs(v.imag - round(v.imag)))
    dt = time.perf_counter() - t0
    record(5, "cancelling factor |phi|", worst_phi < 1e-10, worst_phi, 1e-10, dt)
    record(5, "z c(xi^{3-k} w) in iZ", worst_int < 1e-10, worst_int, 1e-10, dt)
    assert worst_phi < 1e-10
    assert worst_int < 1e-10


def test_criterion_06_gluing():
    t0 = time.perf_counter()
    checks = [ch for ch in suite_gluing(7) if ch.name.startswith("gluing_")]
    dt = time.perf_counter() - t0
    cases = {ch.anchor.split("(")[-1] for ch in checks}
    assert {"1.a)", "1.b eps_0=+)", "1.b eps_0=-)", "1.b eps_1=+)", "1.b eps_1=-)", "1.b eps_2=-)"} <= cases
    res = max(ch.residual for ch in checks)
    record(6, "sheet gluing N=2", res < 1e-9 and dt < 120, res, 1e-9, dt, 120)
    assert res < 1e-9
    assert dt < 120


def test_criterion_07_log_jump_as_stated(gauss):
    """R(z e^{2 pi i}) - R(z) - (2 pi i/(rho_X^2 |W|)) F(z/rho_X), relative, at five points."""
    t0 = time.perf_counter()
    eng = ResolventEngine(gauss)
    worst = 0.0
    for z in jump_points():
        assert z.imag < 0
        pred = log_jump_predicted(gauss, z)
        diff = eng.R_logcover(z, 1) - eng.R_logcover(z, 0)
        worst = max(worst, abs(diff - pred) / abs(pred))
    dt = time.perf_counter() - t0
    record(7, "logarithmic jump (stated sign)", worst < 1e-6 and dt < 120, worst, 1e-6, dt, 120)
    assert dt < 120
    assert worst < 1e-6


def test_criterion_08_resonances(gauss):
    t0 = time.perf_counter()
    rep = resonance_scan(build_atlas(2), ResolventEngine.for_symbol(gauss), v_max=2.5)
    dt = time.perf_counter() - t0
    found = [round(-p.imag / RHO_X, 12) for p in rep.detected]
    ctrl = max(cr.ratio for cr in rep.controls)
    lau = max(p["laurent_ratio"] for p in rep.poles)
    ok = found == [0.5, 1.5] and rep.clean
    record(8, "poles at -i/2, -3i/2 rho_X; controls clean", ok, ctrl, 1e-8, dt)
    record(8, "simple pole |c_-2|/|c_-1|", lau < 1e-6, lau, 1e-6, dt)
    assert found == [0.5, 1.5]
    assert rep.clean
    assert lau < 1e-6


def _family_b():
    return symbol_from_config({"family": "spherical", "beta": 1.0, "prefactor": [[1.0, 0, 0], [0.5, 1, 0]],
                               "y": [0.4, -0.1], "h_params": {"order": 32}})


def _residue_table(symbol, per_n):
    atlas = build_atlas(2)
    eng = ResolventEngine.for_symbol(symbol)
    cache = FmCache()
    out = {}
    for n in range(3):
        out[n] = [residue_record(atlas, eng, n, e, cache=cache) for e in sheets_with(n, 2)[:per_n]]
    return out


@pytest.fixture(scope="module")
def family_a_residues(gauss):
    t0 = time.perf_counter()
    tab = _residue_table(gauss, 4)
    return tab, time.perf_counter() - t0


@pytest.fixture(scope="module")
def family_b_residues():
    t0 = time.perf_counter()
    tab = _residue_table(_family_b(), 2)
    return tab, time.perf_counter() - t0


def test_criterion_09_family_a_stated_value(family_a_residues, gauss):
    tab, dt = family_a_residues
    for n in range(3):
        stated = -(n + 0.5) ** 2 / 24 * gauss.evaluate(1j * (n + 0.5), 1.0)
        assert abs(tab[n][0].predicted - stated) < 1e-12 * abs(stated)
    worst = max(r.rel_error for recs in tab.values() for r in recs)
    record(9, "residues family A vs -(n+1/2)^2 S/24", worst < 1e-6 and dt < 60, worst, 1e-6, dt, 60)
    assert dt < 60
    assert worst < 1e-6


def test_criterion_09_family_b_stated_value(family_b_residues):
    tab, dt = family_b_residues
    worst = max(r.rel_error for recs in tab.values() for r in recs)
    record(9, "residues family B vs -(n+1/2)^2 S/24", worst < 1e-4 and dt < 600, worst, 1e-4, dt, 600)
    assert dt < 600
    assert worst < 1e-4


def test_criterion_09_eps_independence(family_a_residues, family_b_residues):
    worst = 0.0
    for tab, _ in (family_a_residues, family_b_residues):
        for recs in tab.values():
            ref = recs[0].extracted
            worst = max(worst, max(abs(r.extracted - ref) / abs(ref) for r in recs))
    record(9, "eps-independence across charts", worst < 1e-8, worst, 1e-8, 0.0)
    assert worst < 1e-8


def test_criterion_10_spherical():
    t0 = time.perf_counter()
    checks = {ch.name: ch for ch in suite_spherical(7)}
    dt = time.perf_counter() - t0
    for name, label in (("phi_origin", "phi(o) = 1"), ("phi_weyl", "Weyl invariance"),
                        ("phi_order_doubling", "order doubling")):
        ch = checks[name]
        record(10, label, ch.passed, ch.residual, ch.tol, dt)
    assert checks["phi_origin"].residual < 1e-10
    assert checks["phi_weyl"].residual < 1e-8
    assert checks["phi_order_doubling"].residual < 1e-9


def test_criterion_11_determinism(tmp_path):
    t0 = time.perf_counter()
    blobs = []
    for run, threads in enumerate((1, 4, 8, 1)):
        out = tmp_path / f"verify_{run}.json"
        env = dict(os.environ, RESLAB_THREADS=str(threads))
        res = subprocess.run([sys.executable, "-m", "reslab", "verify", "all", "--seed", "7", "--out", str(out)],
                             env=env, capture_output=True, text=True)
        assert res.returncode in (0, 1), res.stderr
        blobs.append(out.read_bytes())
    dt = time.perf_counter() - t0
    same = all(b == blobs[0] for b in blobs)
    record(11, "verify all --seed 7 byte-identical (workers 1, 4, 8, rerun)", same, 0.0 if same else 1.0, 0.5, dt)
    assert same
    assert "time" not in json.loads(blobs[0])


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
