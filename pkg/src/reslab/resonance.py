"""Residues of the lifted resolvent at the branch points z^(n) = -i(n+1/2) rho_X.

Residues are taken in the chart kappa_{n,eps}: zeta_n -> z = -i rho_X (n+1/2)/sqrt(rho_X^2 zeta_n^2 + 1)
as (1/2 pi i) times the integral of R~ over a circle |zeta_n| = radius.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .algebra_a2 import RHO, RHO_X, RHO_X_SQ, WEYL_ORDER, SpectralParam
from .contour_engine import ResolventEngine
from .spectral_symbols import XI, GaussianSymbol, SpectralSymbol, phi_zu, psi
from .spherical_eval import BasePoint, spherical_phi
from .surface import (
    CoverAtlas,
    FmCache,
    SheetSignature,
    SurfaceError,
    SurfacePoint,
    chart_kappa_inverse,
    lift_R,
    zeta_plus,
)

DEFAULT_RADIUS = 0.05 / RHO_X
DEFAULT_ORDER = 32
C_CONST = 12 * math.pi**2 / (RHO_X_SQ * WEYL_ORDER)
NORMALIZATION_NOTE = "Plancherel constant c0 = 1; rescale for other normalizations"


class RadiusError(SurfaceError):
    """The chart circle leaves the branch disk of the atlas."""


@dataclass(frozen=True)
class ResidueRecord:
    n: int
    eps: tuple[int, ...]
    extracted: complex
    predicted: complex
    rel_error: float
    radius: float
    order: int
    chart: str = "kappa_{n,eps}"
    closed_form: complex = 0j
    closed_form_rel_error: float = 0.0
    laurent_ratio: float = 0.0

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "eps": list(self.eps),
            "chart": self.chart,
            "extracted": [self.extracted.real, self.extracted.imag],
            "predicted": [self.predicted.real, self.predicted.imag],
            "rel_error": self.rel_error,
            "closed_form": [self.closed_form.real, self.closed_form.imag],
            "closed_form_rel_error": self.closed_form_rel_error,
            "laurent_ratio": self.laurent_ratio,
            "radius": self.radius,
            "order": self.order,
        }

    def csv_row(self) -> list:
        return [self.n, "".join("+" if e > 0 else "-" for e in self.eps),
                repr(self.extracted.real), repr(self.extracted.imag),
                repr(self.predicted.real), repr(self.predicted.imag),
                repr(self.rel_error), repr(self.radius), self.order]


CSV_HEADER = ["n", "eps", "re_extracted", "im_extracted", "re_predicted", "im_predicted", "rel_error", "radius", "order"]


def _rel(a: complex, b: complex) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def symbol_at_resonance(symbol: SpectralSymbol, n: int) -> complex:
    """S(i(n+1/2), 1): the model of (f x phi_{(n+1/2) rho})(y)."""
    return complex(symbol.evaluate(1j * (n + 0.5), 1.0))


def predicted_residue(symbol: SpectralSymbol, n: int) -> complex:
    """-(1/(4|W|)) (n+1/2)^2 S(i(n+1/2), 1), the stated residue value."""
    return -((n + 0.5) ** 2) * symbol_at_resonance(symbol, n) / (4 * WEYL_ORDER)


def chart_residue_closed_form(symbol: SpectralSymbol, n: int) -> complex:
    """Residue in the chart kappa_{n,eps} assembled from the local pieces.

    Res at kappa_+ of G~_(n) is 3 psi phi(xi) phi(xi^2) / (i pi) at z = i(n+1/2), w = 1;
    kappa_- gives the negative; the rescaled chart contributes -1/(3 rho_X) and the
    lifted resolvent carries the factor C = 12 pi^2 / (rho_X^2 |W|).
    The result equals i (n+1/2)^2 S(i(n+1/2), 1) / (48 rho_X).
    """
    z0 = 1j * (n + 0.5)
    res_plus = 3 * psi(symbol, z0, 1.0) * phi_zu(z0, 1.0, XI) * phi_zu(z0, 1.0, XI * XI) / (1j * math.pi)
    res_minus = -res_plus
    res_scaled = -res_minus / (3 * RHO_X)
    return complex(C_CONST * res_scaled)


def stated_chart_value(symbol: SpectralSymbol, n: int) -> complex:
    """C * (1/(2 pi)) (n+1/2)^2 psi_{i(n+1/2)}(1), the stated chart-level intermediate."""
    return complex(C_CONST * (n + 0.5) ** 2 * psi(symbol, 1j * (n + 0.5), 1.0) / (2 * math.pi))


def residue_operator_value(h: GaussianSymbol, n: int, y: BasePoint, order: int = 32) -> complex:
    """(n+1/2)^2 h . phi_{(n+1/2) rho}(y).

    ``h`` is read in the variable lambda of S = h(lambda) phi_{i lambda}; the spherical
    function phi_{(n+1/2) rho} belongs to lambda = -i (n+1/2) rho, where h takes the same
    value as at i (n+1/2) rho by evenness.
    """
    a = n + 0.5
    lam = SpectralParam(a * RHO.x1, a * RHO.x2)
    hval = complex(h.h(1j * lam.x1, 1j * lam.x2))
    phi = spherical_phi(lam, y, order).value if not y.is_origin else 1.0
    return complex(a * a * hval * phi)


def _chart_points(atlas: CoverAtlas, n: int, eps: SheetSignature, radius: float, order: int):
    th = 2 * np.pi * (np.arange(order) + 0.5) / order
    zetas = radius * np.exp(1j * th)
    pts = [chart_kappa_inverse(n, -1, complex(zv), eps, scaled=True) for zv in zetas]
    for p in pts:
        if not atlas.in_region(n, p.z / RHO_X):
            raise RadiusError(f"chart circle of radius {radius} leaves W_({n})")
    return zetas, pts


def laurent_coefficients(atlas: CoverAtlas, engine: ResolventEngine, n: int, eps: SheetSignature,
                         radius: float = DEFAULT_RADIUS, order: int = DEFAULT_ORDER,
                         cache: FmCache | None = None) -> tuple[complex, complex]:
    """(c_{-1}, c_{-2}) of R~ o kappa_{n,eps}^{-1} at zeta_n = 0 by the trapezoid rule."""
    if eps.eps[n] != 1:
        raise SurfaceError("chart sheets are labelled by eps with eps_n = +1")
    zetas, pts = _chart_points(atlas, n, eps, radius, order)
    vals = np.array([lift_R(atlas, engine, p, m=n, cache=cache) for p in pts])
    c1 = np.add.reduce(vals * zetas) / order
    c2 = np.add.reduce(vals * zetas * zetas) / order
    return complex(c1), complex(c2)


def extract_residue(atlas: CoverAtlas, engine: ResolventEngine, n: int, eps: SheetSignature,
                    radius: float = DEFAULT_RADIUS, order: int = DEFAULT_ORDER,
                    cache: FmCache | None = None) -> complex:
    """(1/2 pi i) times the integral of R~ o kappa_{n,eps}^{-1} over |zeta_n| = radius."""
    return laurent_coefficients(atlas, engine, n, eps, radius, order, cache)[0]


def residue_record(atlas: CoverAtlas, engine: ResolventEngine, n: int, eps: SheetSignature,
                   radius: float = DEFAULT_RADIUS, order: int = DEFAULT_ORDER,
                   cache: FmCache | None = None) -> ResidueRecord:
    c1, c2 = laurent_coefficients(atlas, engine, n, eps, radius, order, cache)
    pred = predicted_residue(engine.symbol, n)
    closed = chart_residue_closed_form(engine.symbol, n)
    return ResidueRecord(
        n=n, eps=eps.eps, extracted=c1, predicted=pred, rel_error=_rel(c1, pred), radius=radius, order=order,
        chart=f"kappa_{{{n},eps}}: z = -i rho_X ({n}+1/2)/sqrt(rho_X^2 zeta^2 + 1)",
        closed_form=closed, closed_form_rel_error=_rel(c1, closed),
        laurent_ratio=abs(c2) / max(abs(c1), 1e-300),
    )


def sheets_with(n: int, N: int) -> list[SheetSignature]:
    """All eps in {+-1}^{N+1} with eps_n = +1, in lexicographic order (+ before -)."""
    out = []
    for rest in itertools.product((1, -1), repeat=N):
        e = list(rest[:n]) + [1] + list(rest[n:])
        out.append(SheetSignature(tuple(e)))
    return out


# ---------------------------------------------------------------- scan

@dataclass(frozen=True)
class ControlResult:
    label: str
    z: complex
    eps: tuple[int, ...]
    radius: float
    integral: complex
    scale: float
    ratio: float

    def to_dict(self) -> dict:
        return {"label": self.label, "z": [self.z.real, self.z.imag], "eps": list(self.eps),
                "radius": self.radius, "integral": [self.integral.real, self.integral.imag],
                "scale": self.scale, "ratio": self.ratio}


@dataclass
class ScanReport:
    poles: list = field(default_factory=list)
    records: list = field(default_factory=list)
    controls: list = field(default_factory=list)
    tol: float = 1e-8

    @property
    def detected(self) -> list[complex]:
        return [p["z"] for p in self.poles if p["detected"]]

    @property
    def clean(self) -> bool:
        return all(c.ratio < self.tol for c in self.controls)

    def to_dict(self) -> dict:
        return {
            "poles": [{"n": p["n"], "z": [p["z"].real, p["z"].imag], "detected": p["detected"],
                       "pole_ratio": p["pole_ratio"], "laurent_ratio": p["laurent_ratio"]} for p in self.poles],
            "records": [r.to_dict() for r in self.records],
            "controls": [c.to_dict() for c in self.controls],
            "clean": self.clean,
            "normalization": NORMALIZATION_NOTE,
        }


def _continued_point(z0: complex, base: SurfacePoint, z: complex) -> SurfacePoint:
    """Point over z near z0 on the sheet of ``base`` (scaled coordinates), by local square roots."""
    q = base.plain()
    zp0, zp = z0 / RHO_X, z / RHO_X
    coords = []
    for k, zk in enumerate(q.zeta):
        t0 = 1j * (k + 0.5) / zp0
        t = 1j * (k + 0.5) / zp
        coords.append(zk * np.sqrt((t * t - 1.0) / (t0 * t0 - 1.0)))
    return SurfacePoint(zp, tuple(complex(c) for c in coords)).to_scaled()


def control_integral(atlas: CoverAtlas, engine: ResolventEngine, z0: complex, eps: SheetSignature,
                     radius: float, order: int = DEFAULT_ORDER, label: str = "",
                     cache: FmCache | None = None) -> ControlResult:
    """(1/2 pi i) integral of R~ over a z-circle on a fixed sheet, relative to radius * max|R~|."""
    z0 = complex(z0)
    zp0 = z0 / RHO_X
    base = SurfacePoint(zp0, tuple(e * zeta_plus(k, zp0, "right") for k, e in enumerate(eps.eps))).to_scaled()
    th = 2 * np.pi * (np.arange(order) + 0.5) / order
    zs = z0 + radius * np.exp(1j * th)
    vals = np.array([lift_R(atlas, engine, _continued_point(z0, base, complex(z)), cache=cache) for z in zs])
    integral = complex(np.add.reduce(vals * (zs - z0)) / order)
    scale = float(np.max(np.abs(vals)))
    return ControlResult(label, z0, eps.eps, radius, integral, scale, abs(integral) / max(radius * scale, 1e-300))


def default_control_points(atlas: CoverAtlas) -> list[tuple[str, complex, SheetSignature]]:
    """Twenty points on the lift of -i(0, 2.5) rho_X away from the resonances."""
    N = atlas.N
    phys = SheetSignature.physical(N)
    flipped = SheetSignature(tuple(-1 for _ in range(N + 1)))
    pts = []
    for v in (0.2, 0.35, 0.8, 1.0, 1.2, 1.8, 2.0, 2.2, 2.4):
        pts.append((f"axis v={v}", -1j * v * RHO_X, phys))
    for v in (0.5, 1.5, 1.0, 2.0):
        for s in (1, -1):
            pts.append((f"offset v={v} {'+' if s > 0 else '-'}0.1rho", (-1j * v + 0.1 * s) * RHO_X, phys))
    for v in (0.3, 1.25, 2.3):
        pts.append((f"sheet {flipped} v={v}", -1j * v * RHO_X, flipped))
    return pts


def _control_radius(atlas: CoverAtlas, z0: complex) -> float:
    zp = z0 / RHO_X
    dist = min(abs(zp + 1j * (n + 0.5)) for n in range(atlas.N + 1))
    best = 0.0
    for d in atlas.disks:
        if d.contains(zp):
            best = max(best, d.radius - abs(zp + 1j * d.v))
    if best == 0.0:
        best = abs(zp.real)
    return RHO_X * 0.5 * min(best, 0.5 * dist, 0.1)


def resonance_scan(atlas: CoverAtlas, engine: ResolventEngine, v_max: float = 2.5,
                   order: int = DEFAULT_ORDER, radius: float = DEFAULT_RADIUS,
                   controls=None, sheets: str = "all", tol: float = 1e-8) -> ScanReport:
    """Residues at every z^(n) with n + 1/2 < v_max and Cauchy integrals at control points."""
    report = ScanReport(tol=tol)
    cache = FmCache()
    for n in range(atlas.N + 1):
        if n + 0.5 >= v_max:
            break
        eps_list = sheets_with(n, atlas.N) if sheets == "all" else [SheetSignature.physical(atlas.N)]
        recs = [residue_record(atlas, engine, n, e, radius, order, cache) for e in eps_list]
        report.records.extend(recs)
        c1 = recs[0].extracted
        # a z-circle value scale for the pole strength: |c_{-1}| / (radius * max |R~|)
        zetas, pts = _chart_points(atlas, n, eps_list[0], radius, order)
        scale = max(abs(lift_R(atlas, engine, p, m=n, cache=cache)) for p in pts)
        pole_ratio = abs(c1) / max(radius * scale, 1e-300)
        report.poles.append({"n": n, "z": -1j * (n + 0.5) * RHO_X, "detected": pole_ratio > 1e-3,
                             "pole_ratio": pole_ratio, "laurent_ratio": max(r.laurent_ratio for r in recs)})
    pts = controls if controls is not None else default_control_points(atlas)
    for label, z0, eps in pts:
        rad = _control_radius(atlas, z0)
        report.controls.append(control_integral(atlas, engine, z0, eps, rad, order, label, cache))
    return report
