"""Integrand algebra: th(pi v), phi_{z,u}, psi_z, Plancherel density, Gamma_X and symbols.

A symbol S(z, w) models the spectral data (f x phi_{i lambda(z,w)})(y).  Two families
ship: a Gaussian-symmetric one and one backed by numerical spherical functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gamma as _gamma

from .algebra_a2 import POSITIVE_ROOTS, SpectralParam, polar_param, root_coordinate
from .spherical_eval import BasePoint, quadrature_for

XI = complex(np.exp(1j * np.pi / 3))
U_ROOTS = (1.0 + 0j, XI, XI * XI)
POLE_GUARD = 1e-9


class PoleProximityError(ArithmeticError):
    """An evaluation point lies within the guard band of a th(pi v) pole."""

    def __init__(self, message: str, location=None):
        super().__init__(message)
        self.location = location


def half_integer_distance(v):
    """Distance from v to the pole set i(Z + 1/2) of th(pi v)."""
    v = np.asarray(v, dtype=complex)
    h = np.floor(v.imag) + 0.5
    return np.abs(v - 1j * h)


def th_pi(v, guard: float = POLE_GUARD):
    """tanh(pi v) via exp(-2|.|) with the imaginary part reduced mod pi."""
    v = np.asarray(v, dtype=complex)
    d = half_integer_distance(v)
    if np.any(d < guard):
        bad = v[d < guard] if v.ndim else v
        raise PoleProximityError("th(pi v) evaluated next to a pole", np.ravel(bad)[0])
    a = np.pi * v
    a = a - 1j * np.pi * np.round(a.imag / np.pi)
    sgn = np.where(a.real < 0, -1.0, 1.0)
    e = np.exp(-2.0 * sgn * a)
    r = sgn * (1.0 - e) / (1.0 + e)
    return complex(r) if r.ndim == 0 else r


def _u_value(u) -> complex:
    if isinstance(u, (int, np.integer)) and 0 <= int(u) < 3:
        return U_ROOTS[int(u)]
    return complex(u)


def cos_c(w):
    return 0.5 * (w + 1.0 / w)


def phi_zu(z, u, w):
    """phi_{z,u}(w) = (z c(uw) / (i w)) th(pi z c(uw)); ``u`` is an index 0..2 or a sixth root."""
    uv = _u_value(u)
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    v = z * cos_c(uv * w)
    r = v / (1j * w) * th_pi(v)
    return complex(r) if np.ndim(r) == 0 else r


def prod_phi(z, w):
    """Product over u in {1, xi, xi^2} of phi_{z,u}(w)."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    out = np.ones(np.broadcast(z, w).shape, dtype=complex)
    for uv in U_ROOTS:
        out = out * phi_zu(z, uv, w)
    return out


# ---------------------------------------------------------------- symbols

def _elementary_sq(z, w):
    """e1, e2, e3 of the squares {(z c(u w))^2}_u."""
    q = [(z * cos_c(uv * w)) ** 2 for uv in U_ROOTS]
    e1 = q[0] + q[1] + q[2]
    e2 = q[0] * q[1] + q[0] * q[2] + q[1] * q[2]
    e3 = q[0] * q[1] * q[2]
    return e1, e2, e3


def _elementary_from_lambda(x1, x2):
    x1 = np.asarray(x1, dtype=complex)
    x2 = np.asarray(x2, dtype=complex)
    l12 = x1
    l23 = -0.5 * x1 + 0.5 * math.sqrt(3.0) * x2
    l13 = l12 + l23
    q = [l12 * l12, l23 * l23, l13 * l13]
    e1 = q[0] + q[1] + q[2]
    e2 = q[0] * q[1] + q[0] * q[2] + q[1] * q[2]
    e3 = q[0] * q[1] * q[2]
    return e1, e2, e3


class SpectralSymbol:
    """Base class: even, rotation-covariant, holomorphic-in-z model of the spectral data."""

    family: str = "custom"

    def evaluate(self, z, w):
        raise NotImplementedError

    def __call__(self, z, w):
        return self.evaluate(z, w)

    def to_config(self) -> dict:
        raise NotImplementedError

    def scaled(self, factor: complex) -> "SpectralSymbol":
        return ScaledSymbol(self, complex(factor))


@dataclass(frozen=True)
class GaussianSymbol(SpectralSymbol):
    """S(z,w) = P(e2, e3) exp(-(3/2) beta z^2), P = sum coef * e2^p * e3^q.

    Written in root coordinates this is the W-invariant entire function
    h(lambda) = P(e2, e3) exp(-beta sum_alpha lambda_alpha^2) of lambda = lambda(z, w).
    """

    beta: float = 1.0
    prefactor: tuple[tuple[float, int, int], ...] = ((1.0, 0, 0),)
    family: str = field(default="gaussian", init=False)

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        pre = tuple((float(c), int(p), int(q)) for c, p, q in self.prefactor)
        if any(p < 0 or q < 0 for _, p, q in pre):
            raise ValueError("prefactor exponents must be non-negative")
        object.__setattr__(self, "prefactor", pre)

    def _poly(self, e2, e3):
        out = 0j
        for coef, p, q in self.prefactor:
            out = out + coef * e2**p * e3**q
        return out

    def evaluate(self, z, w):
        z = np.asarray(z, dtype=complex)
        w = np.asarray(w, dtype=complex)
        _, e2, e3 = _elementary_sq(z, w)
        r = self._poly(e2, e3) * np.exp(-1.5 * self.beta * z * z)
        r = np.broadcast_to(r, np.broadcast(z, w).shape)
        return complex(r) if r.ndim == 0 else np.array(r)

    def h(self, x1, x2):
        """The same function written on the complexified dual space."""
        e1, e2, e3 = _elementary_from_lambda(x1, x2)
        r = self._poly(e2, e3) * np.exp(-self.beta * e1)
        return complex(r) if np.ndim(r) == 0 else r

    def poly_bound(self, radius: float) -> float:
        """Bound of |P| when every |z c(u w)| is at most ``radius``."""
        return sum(abs(c) * (3 * radius**4) ** p * (radius**6) ** q for c, p, q in self.prefactor)

    def real_axis_bound(self, r):
        """|S(r, w)| bound for real r and |w| = 1."""
        r = np.asarray(r, dtype=float)
        return np.vectorize(self.poly_bound)(r) * np.exp(-1.5 * self.beta * r * r)

    def to_config(self) -> dict:
        return {"family": "gaussian", "beta": self.beta, "prefactor": [list(t) for t in self.prefactor],
                "y": None, "h_params": None}


_ROT_COS = tuple(math.cos(k * math.pi / 3) for k in range(6))
_ROT_SIN = tuple(math.sin(k * math.pi / 3) for k in range(6))


@dataclass(frozen=True)
class SphericalSymbol(SpectralSymbol):
    """S(z,w) = h(lambda) (phi_{i lambda}(y) + phi_{-i lambda}(y)) / 2 with lambda = lambda(z,w).

    The spherical factor is averaged over the six rotations of lambda by multiples of
    pi/3 (the rotation subgroup of W together with -1).  In exact arithmetic this is the
    same function; numerically it makes evenness and rotation covariance exact.
    """

    h: GaussianSymbol
    y: BasePoint
    order: int = 32
    family: str = field(default="spherical", init=False)

    def phi_average(self, x1, x2):
        q = quadrature_for(self.y, self.order)
        x1 = np.asarray(x1, dtype=complex)
        x2 = np.asarray(x2, dtype=complex)
        acc = 0j
        for cr, sr in zip(_ROT_COS, _ROT_SIN):
            acc = acc + q.phi(1j * (cr * x1 - sr * x2), 1j * (sr * x1 + cr * x2))
        return acc / 6.0

    def evaluate(self, z, w):
        z = np.asarray(z, dtype=complex)
        w = np.asarray(w, dtype=complex)
        x1, x2 = polar_param(z, w)
        r = self.h.h(x1, x2) * self.phi_average(x1, x2)
        return complex(r) if np.ndim(r) == 0 else r

    def with_order(self, order: int) -> "SphericalSymbol":
        return SphericalSymbol(h=self.h, y=self.y, order=order)

    def real_axis_bound(self, r):
        # |phi_{i lambda}(y)| <= 1 for real lambda
        return self.h.real_axis_bound(r)

    def to_config(self) -> dict:
        return {"family": "spherical", "beta": self.h.beta, "prefactor": [list(t) for t in self.h.prefactor],
                "y": list(self.y.h), "h_params": {"order": self.order}}


@dataclass(frozen=True)
class ScaledSymbol(SpectralSymbol):
    base: SpectralSymbol
    factor: complex

    @property
    def family(self):
        return self.base.family

    def evaluate(self, z, w):
        return self.factor * self.base.evaluate(z, w)

    def real_axis_bound(self, r):
        return abs(self.factor) * self.base.real_axis_bound(r)

    def to_config(self) -> dict:
        cfg = dict(self.base.to_config())
        cfg["scale"] = [self.factor.real, self.factor.imag]
        return cfg


def make_gaussian_symbol(beta: float, prefactor=((1.0, 0, 0),)) -> GaussianSymbol:
    return GaussianSymbol(beta=beta, prefactor=tuple(tuple(t) for t in prefactor))


def make_spherical_symbol(h: GaussianSymbol, y: BasePoint, order: int = 32) -> SphericalSymbol:
    return SphericalSymbol(h=h, y=y, order=order)


def symbol_from_config(cfg: dict) -> SpectralSymbol:
    fam = cfg.get("family", "gaussian")
    beta = float(cfg.get("beta", 1.0))
    pre = tuple(tuple(t) for t in (cfg.get("prefactor") or [[1.0, 0, 0]]))
    g = make_gaussian_symbol(beta, pre)
    if fam in ("gaussian", "A"):
        sym: SpectralSymbol = g
    elif fam in ("spherical", "B"):
        yv = cfg.get("y") or [0.0, 0.0]
        y = BasePoint.from_pair(yv[0], yv[1]) if len(yv) == 2 else BasePoint(tuple(yv))
        order = int((cfg.get("h_params") or {}).get("order", 32))
        sym = make_spherical_symbol(g, y, order)
    else:
        raise ValueError(f"unknown symbol family {fam!r}")
    if "scale" in cfg:
        sc = cfg["scale"]
        sym = sym.scaled(complex(sc[0], sc[1]))
    return sym


# ---------------------------------------------------------------- psi and integrands

def psi(symbol: SpectralSymbol, z, w):
    """psi_z(w) = S(z,w) (i w)^2 / (2 pi)."""
    w = np.asarray(w, dtype=complex)
    r = symbol.evaluate(z, w) * (1j * w) ** 2 / (2 * np.pi)
    return complex(r) if np.ndim(r) == 0 else r


def integrand_F(symbol: SpectralSymbol, z, w):
    """psi_z(w) times the product of the three phi_{z,u}(w)."""
    return psi(symbol, z, w) * prod_phi(z, w)


def integrand_F_closed(symbol: SpectralSymbol, z, w):
    """The same integrand written as S z^3 prod c(uw) th(pi z c(uw)) / (2 pi i w)."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    p = np.ones(np.broadcast(z, w).shape, dtype=complex)
    for uv in U_ROOTS:
        cu = cos_c(uv * w)
        p = p * cu * th_pi(z * cu)
    return symbol.evaluate(z, w) * z**3 * p / (2j * np.pi * w)


def sum_psi_phi(symbol: SpectralSymbol, z, w):
    """Sum over sixth roots u in {1, xi, xi^2} of psi_z(w/u) prod_{u' != u} phi_{z,u'}(w/u)."""
    total = 0j
    for i, uv in enumerate(U_ROOTS):
        wu = w / uv
        term = psi(symbol, z, wu)
        for j, up in enumerate(U_ROOTS):
            if j != i:
                term = term * phi_zu(z, up, wu)
        total = total + term
    return total


def minus_three_psi_phi_phi(symbol: SpectralSymbol, z, w):
    return -3.0 * psi(symbol, z, w) * phi_zu(z, 1.0, XI * w) * phi_zu(z, 1.0, XI * XI * w)


# ---------------------------------------------------------------- Plancherel and Gamma_X

def plancherel_density(lam: SpectralParam):
    """prod over positive roots of lambda_alpha th(pi lambda_alpha), with c0 = 1."""
    out = 1.0 + 0j
    for a in POSITIVE_ROOTS:
        la = root_coordinate(lam, a)
        out *= la * th_pi(la)
    return out


def plancherel_density_polar(z, w):
    """z^3 prod_u c(uw) th(pi z c(uw)) at lambda(z, w)."""
    out = complex(z) ** 3
    for uv in U_ROOTS:
        cu = cos_c(uv * complex(w))
        out *= cu * th_pi(complex(z) * cu)
    return out


class GammaPoleError(ArithmeticError):
    pass


def gamma_X(lam: SpectralParam, form: str = "gamma") -> complex:
    """Gamma_X(lambda) as the product of Gamma values over all roots or as the cosine product."""
    coords = [root_coordinate(lam, a) for a in POSITIVE_ROOTS]
    for la in coords:
        if half_integer_distance(1j * la) < POLE_GUARD:
            raise GammaPoleError("lambda_alpha in Z + 1/2: Gamma_X is singular")
    if form == "cos":
        out = 1.0 + 0j
        for la in coords:
            out *= 2 * np.pi**2 / np.cos(np.pi * la)
        return complex(out)
    out = 1.0 + 0j
    for la in coords + [-x for x in coords]:
        out *= _gamma(0.75 + la / 2) * _gamma(0.25 + la / 2)
    return complex(out)


def is_reducible(lam: SpectralParam) -> bool:
    """True iff some i lambda_alpha lies in i(Z + 1/2)."""
    return any(half_integer_distance(1j * root_coordinate(lam, a)) < POLE_GUARD for a in POSITIVE_ROOTS)


# ---------------------------------------------------------------- validation gate

class SymbolValidationError(ValueError):
    pass


def validate_symbol(symbol: SpectralSymbol, seed: int = 0, tol: float = 1e-8) -> dict:
    """Evenness, sixth-root rotation covariance of psi and Cauchy-Riemann checks on samples."""
    rng = np.random.default_rng(seed)
    z = rng.normal(size=8) * 0.6 + 1j * rng.normal(size=8) * 0.3
    w = np.exp(1j * rng.uniform(0, 2 * np.pi, 8)) * rng.uniform(0.7, 1.3, 8)
    s0 = np.asarray(symbol.evaluate(z, w))
    scale = np.maximum(np.abs(s0), 1e-300)
    even_z = np.max(np.abs(np.asarray(symbol.evaluate(-z, w)) - s0) / scale)
    even_w = np.max(np.abs(np.asarray(symbol.evaluate(z, -w)) - s0) / scale)
    p0 = psi(symbol, z, w)
    rot = 0.0
    for u in (XI, XI * XI, 1 / XI, 1 / (XI * XI)):
        rot = max(rot, float(np.max(np.abs(psi(symbol, z, w / u) - p0 / u**2) / np.abs(p0))))
    hstep = 1e-5
    dx = (np.asarray(symbol.evaluate(z + hstep, w)) - np.asarray(symbol.evaluate(z - hstep, w))) / (2 * hstep)
    dy = (np.asarray(symbol.evaluate(z + 1j * hstep, w)) - np.asarray(symbol.evaluate(z - 1j * hstep, w))) / (2 * hstep)
    cr = float(np.max(np.abs(dy - 1j * dx) / np.maximum(np.abs(dx), 1.0)))
    report = {"even_z": float(even_z), "even_w": float(even_w), "rotation": rot, "cauchy_riemann": cr}
    if even_z > tol or even_w > tol or rot > tol or cr > 1e-6:
        raise SymbolValidationError(f"symbol failed structural checks: {report}")
    return report
