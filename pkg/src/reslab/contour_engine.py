"""Contour quadrature for F, F_r, G_(n) and the resolvent matrix element R.

Conventions (F units unless stated): z is the rescaled variable z_X / rho_X.

* F(z) = contour integral over |w| = 1 (counterclockwise) of psi_z(w) prod_u phi_{z,u}(w) dw.
* F_r uses |w| = r; G_(n) is the residue term of the deformation F = F_r + 2 pi i G_r.
* R(z_X) = (1/|W|) int_0^inf F(r) r / (rho_X^2 r^2 - z_X^2) dr for Im z_X > 0, with its
  continuation below the real axis and around the logarithmic cover.

The integrand of F and F_r is invariant under w -> u w for sixth roots of unity u, so
closed-circle sums run over the arc [0, pi/3) and are multiplied by 6.  Node counts on
the full circle are therefore 6 * 2^k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .algebra_a2 import RHO_X, RHO_X_SQ, WEYL_ORDER
from .branchkit import c_inv, enumerate_S, residue_condition_holds, s_of_c_inv
from .spectral_symbols import (
    XI,
    SpectralSymbol,
    integrand_F,
    phi_zu,
    psi,
)

ARC_NODES_START = 32
ARC_NODES_MAX = 4096
CLOSED_TOL = 1e-10


class ContourError(ValueError):
    """Point outside the domain of the requested contour integral."""


class ResidueConditionError(ContourError):
    """Some i(n+1/2) lies on z * dE_{c(r), s(r)}."""


@dataclass(frozen=True)
class QuadResult:
    value: complex
    error: float
    nodes: int


@dataclass(frozen=True)
class ContourSpec:
    """A parametrized contour with its quadrature nodes.

    kinds: "unit-circle", "circle" (radius), "ellipse" (z * c(|w| = r)),
    "chart-circle" (center, radius), "gamma-plus" (y0, T, panel width, order).
    Closed curves use the shifted periodic trapezoid rule on the counterclockwise circle
    parameter; the ellipse is its image under z * c, which runs clockwise for r < 1.
    """

    kind: str
    params: tuple = ()
    order: int = 384

    def nodes(self):
        """(points, weights) so that sum f(points) * weights approximates the integral."""
        if self.kind in ("unit-circle", "circle", "chart-circle", "ellipse"):
            n = self.order
            th = (np.arange(n) + 0.5) * (2 * np.pi / n)
            e = np.exp(1j * th)
            h = 2 * np.pi / n
            if self.kind == "unit-circle":
                return e, 1j * e * h
            if self.kind == "circle":
                (r,) = self.params
                return r * e, 1j * r * e * h
            if self.kind == "chart-circle":
                center, radius = self.params
                return center + radius * e, 1j * radius * e * h
            z, r = self.params
            w = r * e
            return z * 0.5 * (w + 1 / w), z * 0.5 * (1 - 1 / (w * w)) * 1j * w * h
        if self.kind == "gamma-plus":
            y0, T, width, order = self.params
            return gamma_plus_nodes(y0, T, width, order)
        raise ValueError(f"unknown contour kind {self.kind!r}")


def gl_panels(a: complex, b: complex, width: float, order: int):
    """Composite Gauss-Legendre nodes and weights on the segment [a, b]."""
    length = abs(b - a)
    if length == 0:
        return np.zeros(0, complex), np.zeros(0, complex)
    k = max(1, int(math.ceil(length / width)))
    x, w = np.polynomial.legendre.leggauss(order)
    pts, wts = [], []
    for j in range(k):
        p0 = a + (b - a) * j / k
        p1 = a + (b - a) * (j + 1) / k
        pts.append(0.5 * (p1 - p0) * x + 0.5 * (p1 + p0))
        wts.append(0.5 * (p1 - p0) * w)
    return np.concatenate(pts).astype(complex), np.concatenate(wts).astype(complex)


def gamma_plus_nodes(y0: float, T: float, width: float = 0.25, order: int = 32):
    """gamma_+ : 0 -> 2 i y0 vertically, then horizontally to T + 2 i y0."""
    top = 2j * y0
    p1, w1 = gl_panels(0.0, top, width, order)
    p2, w2 = gl_panels(top, T + top, width, order)
    return np.concatenate([p1, p2]), np.concatenate([w1, w2])


# ---------------------------------------------------------------- closed-circle integrals

def _arc_sum(f, radius: float, m: int) -> complex:
    th = (np.arange(m) + 0.5) * (np.pi / 3 / m)
    w = radius * np.exp(1j * th)
    vals = f(w) * (1j * w)
    return 6.0 * (np.pi / 3 / m) * np.add.reduce(vals)


def circle_integral(f, radius: float = 1.0, tol: float = CLOSED_TOL,
                    m0: int = ARC_NODES_START, mmax: int = ARC_NODES_MAX) -> QuadResult:
    """Counterclockwise integral over |w| = radius of a sixfold-symmetric integrand f(w) dw."""
    m = m0
    prev = _arc_sum(f, radius, m)
    while True:
        m *= 2
        cur = _arc_sum(f, radius, m)
        err = abs(cur - prev)
        if err <= tol * abs(cur) or err == 0.0 or m >= mmax:
            return QuadResult(complex(cur), float(err), 6 * m)
        prev = cur


def circle_integral_batch(f, zs, radius: float = 1.0, tol: float = CLOSED_TOL,
                          m0: int = ARC_NODES_START, mmax: int = ARC_NODES_MAX):
    """Vectorized version over many z: f(z[:,None], w[None,:]) -> matrix."""
    zs = np.asarray(zs, dtype=complex).ravel()
    out = np.zeros(zs.size, dtype=complex)
    err = np.zeros(zs.size)
    todo = np.arange(zs.size)
    m = m0

    def arc(idx, mm):
        th = (np.arange(mm) + 0.5) * (np.pi / 3 / mm)
        w = radius * np.exp(1j * th)
        res = np.empty(idx.size, dtype=complex)
        step = max(1, 2**20 // mm)
        for s in range(0, idx.size, step):
            sub = idx[s:s + step]
            vals = f(zs[sub][:, None], w[None, :]) * (1j * w)[None, :]
            res[s:s + sub.size] = 6.0 * (np.pi / 3 / mm) * np.add.reduce(vals, axis=1)
        return res

    prev = arc(todo, m)
    while todo.size:
        m *= 2
        cur = arc(todo, m)
        e = np.abs(cur - prev)
        done = (e <= tol * np.abs(cur)) | (e == 0.0) | (m >= mmax)
        out[todo[done]] = cur[done]
        err[todo[done]] = e[done]
        prev = cur[~done]
        todo = todo[~done]
    return out, err


def _check_F_domain(z: complex):
    if z.real == 0 and abs(z.imag) >= 0.5:
        raise ContourError(f"F is not defined on i((-inf,-1/2] u [1/2,inf)): z = {z}")


def F_unit_result(symbol: SpectralSymbol, z: complex, tol: float = CLOSED_TOL) -> QuadResult:
    z = complex(z)
    _check_F_domain(z)
    if z == 0:
        return QuadResult(0j, 0.0, 0)
    return circle_integral(lambda w: integrand_F(symbol, z, w), 1.0, tol)


def F_unit(symbol: SpectralSymbol, z, tol: float = CLOSED_TOL):
    """F(z) by the periodic trapezoid rule on the unit circle; scalar or array input."""
    if np.ndim(z) == 0:
        return F_unit_result(symbol, complex(z), tol).value
    zs = np.asarray(z, dtype=complex)
    flat = zs.ravel()
    for v in flat:
        _check_F_domain(complex(v))
    out = np.zeros(flat.size, dtype=complex)
    nz = flat != 0
    if np.any(nz):
        vals, _ = circle_integral_batch(lambda zz, w: integrand_F(symbol, zz, w), flat[nz], 1.0, tol)
        out[nz] = vals
    return out.reshape(zs.shape)


def F_r_result(symbol: SpectralSymbol, z: complex, r: float, tol: float = CLOSED_TOL) -> QuadResult:
    z = complex(z)
    if not residue_condition_holds(z, r):
        raise ResidueConditionError(f"residue condition fails for z = {z}, r = {r}")
    if z == 0:
        return QuadResult(0j, 0.0, 0)
    return circle_integral(lambda w: integrand_F(symbol, z, w), r, tol)


def F_r(symbol: SpectralSymbol, z, r: float, tol: float = CLOSED_TOL):
    """F_r(z): the same integrand over |w| = r."""
    if np.ndim(z) == 0:
        return F_r_result(symbol, complex(z), r, tol).value
    zs = np.asarray(z, dtype=complex)
    flat = zs.ravel()
    for v in flat:
        if not residue_condition_holds(complex(v), r):
            raise ResidueConditionError(f"residue condition fails for z = {v}, r = {r}")
    out = np.zeros(flat.size, dtype=complex)
    nz = flat != 0
    if np.any(nz):
        vals, _ = circle_integral_batch(lambda zz, w: integrand_F(symbol, zz, w), flat[nz], r, tol)
        out[nz] = vals
    return out.reshape(zs.shape)


# ---------------------------------------------------------------- residue terms

def G_n(symbol: SpectralSymbol, n: int, z):
    """G_(n)(z) = -3 psi_z(w0) phi_{z,1}(xi w0) phi_{z,1}(xi^2 w0) t / (i pi s(c^{-1}(t)))

    with t = (i/z)(n+1/2) and w0 = c^{-1}(t); defined for z off the imaginary axis.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(z.real == 0):
        raise ContourError("G_(n) is defined off the imaginary axis only")
    t = 1j * (n + 0.5) / z
    w0 = np.asarray(c_inv(t))
    sc = np.asarray(s_of_c_inv(t))
    val = -3.0 * psi(symbol, z, w0) * phi_zu(z, 1.0, XI * w0) * phi_zu(z, 1.0, XI * XI * w0) * t / (1j * np.pi * sc)
    return complex(val) if np.ndim(val) == 0 else val


def G_r(symbol: SpectralSymbol, z: complex, r: float) -> complex:
    """Sum of G_(n)(z) over n in S_{r,z}."""
    z = complex(z)
    if z.real == 0:
        raise ContourError("G_r is defined off the imaginary axis only")
    return complex(sum(G_n(symbol, n, z) for n in sorted(enumerate_S(r, z))))


@dataclass(frozen=True)
class DecompositionReport:
    z: complex
    r: float
    F_unit: complex
    F_r: complex
    G_r: complex
    S: tuple
    abs_residual: float
    rel_residual: float

    @property
    def passed(self) -> bool:
        return self.rel_residual < 1e-8


def check_decomposition(symbol: SpectralSymbol, z: complex, r: float) -> DecompositionReport:
    """Compare F(z) with F_r(z) + 2 pi i G_r(z)."""
    z = complex(z)
    if z == 0:
        return DecompositionReport(z, r, 0j, 0j, 0j, (), 0.0, 0.0)
    f = F_unit(symbol, z)
    fr = F_r(symbol, z, r)
    S = tuple(sorted(enumerate_S(r, z)))
    g = G_r(symbol, z, r) if z.real != 0 else 0j
    res = abs(f - (fr + 2j * np.pi * g))
    return DecompositionReport(z, r, f, fr, g, S, res, res / max(abs(f), 1e-300))


# ---------------------------------------------------------------- resolvent

def _f_bound(symbol: SpectralSymbol, x):
    """Bound for |F| on the real axis or on gamma_+ at real part x (heights up to 0.25)."""
    x = np.asarray(x, dtype=float)
    if hasattr(symbol, "real_axis_bound"):
        rr = np.abs(x) + 0.25
        return 8.0 * rr**3 * symbol.real_axis_bound(rr) * np.exp(1.5 * _beta(symbol) * (rr**2 - x**2))
    return np.full(x.shape, np.inf)


def _beta(symbol) -> float:
    for attr in ("beta",):
        if hasattr(symbol, attr):
            return float(getattr(symbol, attr))
    if hasattr(symbol, "h"):
        return float(symbol.h.beta)
    if hasattr(symbol, "base"):
        return _beta(symbol.base)
    return 0.0


@dataclass
class ResolventEngine:
    """Holds F on fixed quadrature nodes and evaluates R in the original variable.

    y0 fixes gamma_+ (height 2 y0); the region Q is {Re > 0, 0 <= Im < y0} in F units.
    F values at nodes where the Gaussian tail bound is below ``tail_tol`` are set to 0.
    """

    symbol: SpectralSymbol
    y0: float = 0.1
    T: float | None = None
    width: float = 0.25
    order: int = 32
    tail_tol: float = 1e-18
    node_symbol: SpectralSymbol | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    @classmethod
    def for_symbol(cls, symbol: SpectralSymbol, **kw) -> "ResolventEngine":
        """Engine with defaults suited to the symbol family.

        Spherical-backed symbols get wider panels and a low-order spherical rule for the
        F values on the real axis and gamma_+; those only enter the holomorphic part H.
        """
        if getattr(symbol, "family", "") == "spherical" and hasattr(symbol, "with_order"):
            kw.setdefault("width", 0.5)
            kw.setdefault("order", 16)
            kw.setdefault("node_symbol", symbol.with_order(8))
        return cls(symbol, **kw)

    def __post_init__(self):
        if self.T is None:
            b = _beta(self.symbol)
            self.T = max(20.0, 6.0 / math.sqrt(b)) if b > 0 else 20.0
        if not 0 < 2 * self.y0 < 0.5:
            raise ValueError("gamma_+ height 2*y0 must stay below 1/2")

    @property
    def norm(self) -> float:
        return 1.0 / (WEYL_ORDER * RHO_X_SQ)

    def _nodes_F(self, key: str):
        if key in self._cache:
            return self._cache[key]
        if key == "real":
            pts, wts = gl_panels(0.0, self.T, self.width, self.order)
        elif key == "gamma":
            pts, wts = gamma_plus_nodes(self.y0, self.T, self.width, self.order)
        else:
            raise KeyError(key)
        bound = _f_bound(self.symbol, pts.real)
        keep = bound * np.abs(wts) > self.tail_tol
        vals = np.zeros(pts.size, dtype=complex)
        if np.any(keep):
            vals[keep] = F_unit(self.node_symbol or self.symbol, pts[keep])
        self._cache[key] = (pts, wts, vals)
        return self._cache[key]

    def _A_real(self, zeta):
        pts, wts, vals = self._nodes_F("real")
        zeta = np.atleast_1d(np.asarray(zeta, dtype=complex))
        return np.add.reduce((vals * wts)[None, :] / (pts[None, :] - zeta[:, None]), axis=1)

    def _B_real(self, zeta):
        pts, wts, vals = self._nodes_F("real")
        zeta = np.atleast_1d(np.asarray(zeta, dtype=complex))
        return np.add.reduce((vals * wts)[None, :] / (pts[None, :] + zeta[:, None]), axis=1)

    def _A_gamma(self, zeta):
        pts, wts, vals = self._nodes_F("gamma")
        zeta = np.atleast_1d(np.asarray(zeta, dtype=complex))
        return np.add.reduce((vals * wts)[None, :] / (pts[None, :] - zeta[:, None]), axis=1)

    def holomorphic_part(self, zeta):
        """H(zeta) = (B(zeta) + A_gamma(zeta)) / (2 |W| rho_X^2), zeta in F units."""
        scalar = np.ndim(zeta) == 0
        zeta = np.atleast_1d(np.asarray(zeta, dtype=complex))
        val = 0.5 * self.norm * (self._B_real(zeta) + self._A_gamma(zeta))
        return complex(val[0]) if scalar else val

    def R_upper(self, z):
        """R(z) for Im z > 0 (original variable) by the real-axis integral."""
        scalar = np.ndim(z) == 0
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        if np.any(z.imag <= 0):
            raise ContourError("R_upper needs Im z > 0")
        zeta = z / RHO_X
        val = 0.5 * self.norm * (self._A_real(zeta) + self._B_real(zeta))
        return complex(val[0]) if scalar else val

    def R_below(self, z):
        """Continuation of R across the positive reals: H(z/rho) + (pi i / (|W| rho^2)) F(z/rho)."""
        scalar = np.ndim(z) == 0
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        zeta = z / RHO_X
        for v in zeta:
            if v.imag >= 0 and not (v.real > 0 and v.imag < self.y0):
                raise ContourError(f"R_below needs Im z < 0 or z/rho in Q, got z = {v * RHO_X}")
            if v.real == 0 and v.imag <= -0.5:
                raise ContourError("R_below is not defined on i(-inf, -rho_X/2]")
        val = self.holomorphic_part(zeta) + 1j * np.pi * self.norm * F_unit(self.symbol, zeta)
        return complex(val[0]) if scalar else val

    def R_logcover(self, z: complex, turns: int = 0, t_split: float = math.log(0.45)) -> complex:
        """R at z e^{2 pi i turns} on the logarithmic cover (counterclockwise turns > 0).

        The sheet turns = 0 is R_upper on the upper half plane and R_below below it.
        In t = log r the integral reads (1/(|W| rho^2)) int F(e^t) e^{2t} / (e^{2t} - e^{2 tau}) dt
        with tau = Log(z/rho) + 2 pi i turns.  For Re t < t_split the path runs at height
        Im tau - pi/2, which keeps the poles tau + i pi k (k >= 0) above it and k < 0 below;
        a vertical connector joins it to the real axis.  Needs |z| / rho < e^{t_split}.
        """
        zeta = complex(z) / RHO_X
        if zeta == 0 or abs(zeta) >= math.exp(t_split) * 0.95:
            raise ContourError("R_logcover needs 0 < |z|/rho_X < 0.95 e^{t_split}")
        tau = complex(math.log(abs(zeta)), math.atan2(zeta.imag, zeta.real) + 2 * math.pi * turns)
        height = tau.imag - math.pi / 2
        e2tau = np.exp(2 * tau)

        def kern(t):
            e2t = np.exp(2 * t)
            return F_unit(self.symbol, np.exp(t)) * e2t / (e2t - e2tau)

        left = tau.real - 6.0
        p1, w1 = gl_panels(complex(left, height), complex(t_split, height), self.width, self.order)
        p2, w2 = gl_panels(complex(t_split, height), complex(t_split, 0.0), self.width, self.order)
        part_t = np.add.reduce(kern(p1) * w1) + np.add.reduce(kern(p2) * w2)
        a = math.exp(t_split)
        p3, w3 = gl_panels(a, self.T, self.width, self.order)
        keep = _f_bound(self.symbol, p3.real) * np.abs(w3) > self.tail_tol
        f3 = np.zeros(p3.size, dtype=complex)
        f3[keep] = F_unit(self.symbol, p3[keep])
        part_r = np.add.reduce(f3 * p3 / (p3 * p3 - zeta * zeta) * w3)
        return complex(self.norm * (part_t + part_r))


def log_jump_predicted(symbol: SpectralSymbol, z: complex) -> complex:
    """(2 pi i / (rho_X^2 |W|)) F(z / rho_X), the jump magnitude for one full turn."""
    return 2j * np.pi / (RHO_X_SQ * WEYL_ORDER) * F_unit(symbol, complex(z) / RHO_X)
