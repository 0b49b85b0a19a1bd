"""Invariant suites driven by ``reslab verify``.

Every check records a name, a short description of the identity, the measured residual
and its tolerance.  Checks marked informational are reported but never fail a suite.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .algebra_a2 import A2, RHO_X, SpectralParam, polar_param
from .branchkit import EllipseSpec, Side, c, c_inv, c_of_r, sqrt_cartesian, sqrt_principal, two_sqrt_product
from .contour_engine import F_unit, ResolventEngine, check_decomposition, log_jump_predicted
from .resonance import (
    DEFAULT_RADIUS,
    NORMALIZATION_NOTE,
    residue_record,
    resonance_scan,
    sheets_with,
)
from .spectral_symbols import (
    gamma_X,
    integrand_F,
    integrand_F_closed,
    make_gaussian_symbol,
    minus_three_psi_phi_phi,
    plancherel_density,
    plancherel_density_polar,
    sum_psi_phi,
)
from .spherical_eval import BasePoint, quadrature_for, spherical_phi
from .surface import FmCache, SheetSignature, build_atlas, lift_F, section

SUITES = ("branch", "symbols", "spherical", "decomposition", "gluing", "jump", "residues", "resonances")


@dataclass
class Check:
    name: str
    anchor: str
    residual: float
    tol: float
    informational: bool = False
    detail: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.residual < self.tol)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


def worker_count() -> int:
    raw = os.environ.get("RESLAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def ordered_map(fn, items):
    """Map with up to RESLAB_THREADS workers; results keep the input order."""
    items = list(items)
    n = min(worker_count(), max(1, len(items)))
    if n == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


def _rel(a, b):
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))


def _default_symbol():
    return make_gaussian_symbol(1.0, ((1.0, 0, 0), (0.5, 1, 0)))


# ---------------------------------------------------------------- branch

def suite_branch(seed: int, symbol=None) -> list[Check]:
    rng = np.random.default_rng(seed)
    n = 1000
    z = rng.normal(size=n) * 2 + 1j * rng.normal(size=n) * 2
    z = z[np.abs(z.imag) > 1e-3]
    out = []
    out.append(Check("c_inv_roundtrip", "c(c^{-1}(z)) = z off [-1,1]", _rel(c(c_inv(z)), z), 1e-12))
    w = np.sqrt(rng.uniform(0.01, 0.98, n)) * np.exp(1j * rng.uniform(0, 2 * np.pi, n))
    out.append(Check("c_inv_of_c", "c^{-1}(c(w)) = w on the punctured unit disk", _rel(c_inv(c(w)), w), 1e-12))
    p = two_sqrt_product(z)
    out.append(Check("two_sqrt_parity", "sqrt(z+1)sqrt(z-1) is odd",
                     float(np.max(np.abs(two_sqrt_product(-z) + p) / np.abs(p))), 1e-12))
    out.append(Check("two_sqrt_square", "(sqrt(z+1)sqrt(z-1))^2 = z^2 - 1", _rel(p * p, z * z - 1), 1e-12))
    x = rng.uniform(-1, 1, n)
    root = np.sqrt(1 - x * x)
    res = max(_rel(c_inv(x, Side.ABOVE), x - 1j * root), _rel(c_inv(x, Side.BELOW), x + 1j * root))
    out.append(Check("c_inv_boundary", "c^{-1}(x +- i0) = x -+ i sqrt(1-x^2)", res, 1e-12))
    res = max(_rel(two_sqrt_product(x, Side.ABOVE), 1j * root), _rel(two_sqrt_product(x, Side.BELOW), -1j * root))
    out.append(Check("two_sqrt_boundary", "sqrt(x+-i0+1)sqrt(x+-i0-1) = +-i sqrt(1-x^2)", res, 1e-12))
    lim = two_sqrt_product(x + 1e-13j)
    out.append(Check("two_sqrt_limit_above", "values just above [-1,1] approach the +i0 side",
                     float(np.max(np.abs(lim - 1j * root))), 1e-6))
    xr = -1 - rng.uniform(0.01, 5, n)
    out.append(Check("two_sqrt_negative_axis", "sqrt(x+1)sqrt(x-1) = -sqrt(x^2-1) for x < -1",
                     _rel(two_sqrt_product(xr), -np.sqrt(xr * xr - 1)), 1e-12))
    cart = np.array([sqrt_cartesian(complex(v)) for v in z])
    out.append(Check("sqrt_cartesian", "principal root matches the Cartesian formula", _rel(sqrt_principal(z), cart), 1e-12))
    return out


# ---------------------------------------------------------------- symbols

def suite_symbols(seed: int, symbol=None) -> list[Check]:
    S = symbol or _default_symbol()
    rng = np.random.default_rng(seed)
    n = 200
    z = rng.normal(size=n) * 0.8 + 1j * rng.normal(size=n) * 0.3
    w = np.exp(1j * rng.uniform(0, 2 * np.pi, n)) * rng.uniform(0.8, 1.25, n)
    out = [
        Check("sum_psi_phi", "sum over u of psi_z(w/u) prod phi = -3 psi_z(w) phi_{z,1}(xi w) phi_{z,1}(xi^2 w)",
              _rel(sum_psi_phi(S, z, w), minus_three_psi_phi_phi(S, z, w)), 1e-10),
        Check("integrand_assembly", "psi prod phi equals S z^3 prod c th / (2 pi i w)",
              _rel(integrand_F(S, z, w), integrand_F_closed(S, z, w)), 1e-10),
    ]
    wu = np.exp(1j * rng.uniform(0, 2 * np.pi, n))
    zr = rng.uniform(0.1, 2.0, n) + 1j * rng.uniform(-0.3, 0.3, n)
    a = []
    b = []
    for zz, ww in zip(zr, wu):
        x1, x2 = polar_param(zz, ww)
        a.append(plancherel_density(SpectralParam(complex(x1), complex(x2))))
        b.append(plancherel_density_polar(zz, ww))
    out.append(Check("plancherel_dual", "root-product and polar forms of the Plancherel density agree", _rel(a, b), 1e-10))
    ga, gb = [], []
    for _ in range(50):
        lam = SpectralParam(complex(rng.normal() * 0.7, rng.normal() * 0.2), complex(rng.normal() * 0.7, rng.normal() * 0.2))
        ga.append(gamma_X(lam, "gamma"))
        gb.append(gamma_X(lam, "cos"))
    out.append(Check("gamma_dual", "Gamma-product and cosine-product forms of Gamma_X agree", _rel(ga, gb), 1e-10))
    g0 = gamma_X(SpectralParam(0, 0))
    out.append(Check("gamma_origin", "Gamma_X(0) = 8 pi^6", _rel(g0, 8 * math.pi**6), 1e-10))
    return out


# ---------------------------------------------------------------- spherical

def suite_spherical(seed: int, symbol=None) -> list[Check]:
    y = BasePoint.from_pair(0.4, -0.1)
    lam = SpectralParam(0.7j, 0.3j)
    out = [Check("phi_origin", "phi_lambda(o) = 1",
                 abs(spherical_phi(lam, BasePoint.origin()).value - 1.0), 1e-10)]
    base = spherical_phi(lam, y, 32).value
    worst = 0.0
    for wmat in A2.weyl_elements:
        wl = wmat @ lam.vec
        worst = max(worst, abs(spherical_phi(SpectralParam(wl[0], wl[1]), y, 32).value - base))
    out.append(Check("phi_weyl", "phi_{w lambda} = phi_lambda for all six Weyl elements", worst, 1e-8))
    fine = spherical_phi(lam, y, 64).value
    out.append(Check("phi_order_doubling", "orders 32 and 64 agree", abs(fine - base), 1e-9))
    val = complex(quadrature_for(y, 32).phi_coeffs(np.array([[-1.0, 0.0, 1.0]]))[0])
    out.append(Check("phi_minus_rho", "phi_{-rho}(y) = phi_rho(y) = 1", abs(val - 1.0), 1e-8))
    return out


# ---------------------------------------------------------------- decomposition

def decomposition_grid(seed: int, count: int = 20, margin: float = 0.05):
    """Admissible (z, r): z off iR, every i(n+1/2)/z at level distance >= margin from the ellipse."""
    rng = np.random.default_rng(seed)
    pts = []
    while len(pts) < count:
        mod = rng.uniform(0.3, 2.5)
        ang = rng.uniform(-math.pi / 2 + 0.05, math.pi / 2 - 0.05)
        if rng.uniform() < 0.5:
            ang = -ang
        z = mod * complex(math.cos(ang), math.sin(ang))
        cval = rng.uniform(1.05, 1.5)
        r = cval - math.sqrt(cval * cval - 1)
        e = EllipseSpec(r)
        k = int(mod * cval) + 2
        levels = [float(e.level(1j * (j + 0.5) / z)) for j in range(-k - 1, k + 1)]
        if min(abs(l - 1.0) for l in levels) < margin:
            continue
        pts.append((z, r))
    return pts


def suite_decomposition(seed: int, symbol=None, count: int = 20) -> list[Check]:
    S = symbol or _default_symbol()
    grid = decomposition_grid(seed, count)
    reports = ordered_map(lambda zr: check_decomposition(S, zr[0], zr[1]), grid)
    worst = max(r.rel_residual for r in reports)
    detail = {"points": [[r.z.real, r.z.imag, c_of_r(r.r), list(r.S), r.rel_residual] for r in reports]}
    out = [Check("deformation_identity", "F = F_r + 2 pi i G_r on an admissible grid", worst, 1e-8, detail=detail)]
    z = 0.9 * complex(math.cos(-math.pi / 6), math.sin(-math.pi / 6))
    r = 1.2 - math.sqrt(1.2**2 - 1)
    rep = check_decomposition(S, z, r)
    out.append(Check("deformation_reference_point", "F = F_r + 2 pi i G_r at z = 0.9 e^{-i pi/6}, c(r) = 1.2",
                     rep.rel_residual, 1e-8, detail={"S": list(rep.S)}))
    zs = [0.8 + 0.1j, 0.3 - 0.7j, 1.4 + 0.2j]
    ev = max(abs(F_unit(S, -v) - F_unit(S, v)) / abs(F_unit(S, v)) for v in zs)
    out.append(Check("F_even", "F(-z) = F(z)", ev, 1e-11))
    q2 = abs(F_unit(S, 1e-2 * (1 + 0.5j))) / abs(1e-2 * (1 + 0.5j)) ** 6
    q3 = abs(F_unit(S, 1e-3 * (1 + 0.5j))) / abs(1e-3 * (1 + 0.5j)) ** 6
    out.append(Check("F_flat_at_zero", "|F(z)|/|z|^6 changes by less than 10x from |z| = 1e-2 to 1e-3",
                     max(q2 / q3, q3 / q2), 10.0, detail={"ratio_1e-2": q2, "ratio_1e-3": q3}))
    return out


# ---------------------------------------------------------------- gluing

def gluing_cases(N: int):
    """(m, eps, case) triples covering all-plus sheets and both signs of eps_{m+1} with a later minus."""
    cases = []
    for m in range(-1, N):
        plus = [1] * (N + 1)
        cases.append((m, SheetSignature(tuple(plus)), "1.a"))
        for s in (1, -1):
            e = [1] * (N + 1)
            e[m + 1] = s
            later = [k for k in range(m + 2, N + 1)]
            if s == 1 and not later:
                continue
            if s == 1:
                e[later[-1]] = -1
            for k in range(0, m + 1):
                e[k] = -1 if k % 2 == 0 else 1
            cases.append((m, SheetSignature(tuple(e)), f"1.b eps_{m + 1}={'+' if s > 0 else '-'}"))
    return cases


def suite_gluing(seed: int, symbol=None, N: int = 2) -> list[Check]:
    S = symbol or _default_symbol()
    atlas = build_atlas(N)
    cache = FmCache()
    out = []
    for m, eps, case in gluing_cases(N):
        pts = atlas.overlap_points(m, 5)
        worst = 0.0
        for z in pts:
            p = section(z, eps)
            a = lift_F(atlas, S, p, m, eps, cache)
            b = lift_F(atlas, S, p, m + 1, eps, cache)
            worst = max(worst, abs(a - b) / max(abs(b), 1e-300))
        out.append(Check(f"gluing_m{m}_{eps}", f"lifted F from W_({m}) and W_({m + 1}) agree ({case})", worst, 1e-9))
    phys = SheetSignature.physical(N)
    worst = 0.0
    for m in (0, 1):
        for d in atlas.region(m)[1:4]:
            z = -1j * d.v + 0.5 * d.radius
            worst = max(worst, abs(lift_F(atlas, S, section(z, phys), m, cache=cache) - F_unit(S, z)) / abs(F_unit(S, z)))
    out.append(Check("physical_sheet_F", "F_(m) + 4 pi i sum G_(n) = F on W_(m) off iR", worst, 1e-9))
    z = -0.3j + 0.05
    v = abs(lift_F(atlas, S, section(z, phys), cache=cache) - F_unit(S, z)) / abs(F_unit(S, z))
    out.append(Check("physical_sheet_m_minus_1", "lifted F equals F at z = -0.3i + 0.05", v, 1e-9))
    return out


# ---------------------------------------------------------------- jump

def jump_points():
    return [RHO_X * v for v in (0.3 - 0.2j, 0.15 - 0.35j, -0.25 - 0.1j, 0.05 - 0.38j, 0.35 - 0.05j)]


def suite_jump(seed: int, symbol=None) -> list[Check]:
    S = symbol or _default_symbol()
    eng = ResolventEngine(S)
    pts = jump_points()

    def one(z):
        r0 = eng.R_logcover(z, 0)
        rp = eng.R_logcover(z, 1)
        rm = eng.R_logcover(z, -1)
        return z, r0, rp, rm, eng.R_below(z), log_jump_predicted(S, z)

    rows = ordered_map(one, pts)
    ccw = max(abs((rp - r0) + pred) / abs(pred) for _, r0, rp, _, _, pred in rows)
    cw = max(abs((rm - r0) - pred) / abs(pred) for _, r0, _, rm, _, pred in rows)
    stated = max(abs((rp - r0) - pred) / abs(pred) for _, r0, rp, _, _, pred in rows)
    base = max(abs(r0 - rb) / abs(rb) for _, r0, _, _, rb, _ in rows)
    return [
        Check("log_cover_base_sheet", "t-plane contour on the base sheet equals the continuation below the axis", base, 1e-9),
        Check("log_jump_counterclockwise", "R(z e^{2 pi i}) - R(z) = -(2 pi i/(rho^2 |W|)) F(z/rho)", ccw, 1e-6),
        Check("log_jump_clockwise", "R(z e^{-2 pi i}) - R(z) = +(2 pi i/(rho^2 |W|)) F(z/rho)", cw, 1e-6),
        Check("log_jump_stated_sign", "counterclockwise jump with the + sign (stated form)", stated, 1e-6, informational=True),
    ]


# ---------------------------------------------------------------- residues

def suite_residues(seed: int, symbol=None, N: int = 2, family_b=None) -> list[Check]:
    S = symbol or _default_symbol()
    atlas = build_atlas(N)
    eng = ResolventEngine.for_symbol(S)
    cache = FmCache()
    out = []
    for n in range(N + 1):
        recs = [residue_record(atlas, eng, n, e, cache=cache) for e in sheets_with(n, N)]
        half = residue_record(atlas, eng, n, sheets_with(n, N)[0], radius=DEFAULT_RADIUS / 2, cache=cache)
        vals = [r.extracted for r in recs]
        spread = max(abs(v - vals[0]) for v in vals) / abs(vals[0])
        out.append(Check(f"residue_closed_form_n{n}", "extracted residue equals i (n+1/2)^2 S / (48 rho_X)",
                         max(r.closed_form_rel_error for r in recs), 1e-6, detail={"records": [r.to_dict() for r in recs]}))
        out.append(Check(f"residue_eps_independence_n{n}", "residue is the same for every eps with eps_n = +1", spread, 1e-8))
        out.append(Check(f"residue_radius_independence_n{n}", "chart radius and half radius agree",
                         abs(half.extracted - vals[0]) / abs(vals[0]), 1e-8))
        out.append(Check(f"residue_simple_pole_n{n}", "|c_-2| / |c_-1| at the pole", max(r.laurent_ratio for r in recs), 1e-6))
        out.append(Check(f"residue_stated_constant_n{n}", "extracted residue equals -(n+1/2)^2 S / 24 (stated form)",
                         max(r.rel_error for r in recs), 1e-6, informational=True))
    return out


def suite_resonances(seed: int, symbol=None, N: int = 2) -> list[Check]:
    S = symbol or _default_symbol()
    atlas = build_atlas(N)
    rep = resonance_scan(atlas, ResolventEngine.for_symbol(S), v_max=2.5)
    det = [p for p in rep.poles]
    found = sorted(round(abs(p["z"].imag) / RHO_X, 12) for p in det if p["detected"])
    out = [Check("resonances_located", "poles detected exactly at -i(1/2) rho_X and -i(3/2) rho_X",
                 0.0 if found == [0.5, 1.5] else 1.0, 0.5, detail={"found_v": found})]
    out.append(Check("resonances_controls_clean", "Cauchy integrals at control points vanish",
                     max(c.ratio for c in rep.controls), 1e-8, detail={"controls": [c.to_dict() for c in rep.controls]}))
    out.append(Check("resonances_simple", "|c_-2| / |c_-1| at detected poles", max(p["laurent_ratio"] for p in det), 1e-6))
    return out


SUITE_FUNCS = {
    "branch": suite_branch,
    "symbols": suite_symbols,
    "spherical": suite_spherical,
    "decomposition": suite_decomposition,
    "gluing": suite_gluing,
    "jump": suite_jump,
    "residues": suite_residues,
    "resonances": suite_resonances,
}


def run_suite(name: str, seed: int, symbol=None) -> dict:
    names = SUITES if name == "all" else (name,)
    for nm in names:
        if nm not in SUITE_FUNCS:
            raise KeyError(nm)
    sections = ordered_map(lambda nm: (nm, SUITE_FUNCS[nm](seed, symbol)), names)
    checks = []
    for nm, cs in sections:
        for ch in cs:
            d = ch.to_dict()
            d["suite"] = nm
            checks.append(d)
    passed = all(ch["passed"] for ch in checks if not ch["informational"])
    return {"suite": name, "seed": seed, "passed": passed, "normalization": NORMALIZATION_NOTE, "checks": checks}
