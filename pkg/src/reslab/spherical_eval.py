"""Harish-Chandra spherical functions of SL(3,R)/SO(3) by quadrature over K = SO(3).

Convention: phi_mu(g) = int_K exp((mu - rho)(H(gk))) dk with g = k a n (Iwasawa,
a = exp H).  phi_mu is Weyl invariant in mu, equals 1 at the origin, and is bounded
for imaginary mu.  Points are A-part representatives y = exp(diag(h)) o.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .algebra_a2 import SpectralParam, diag_coefficients

RHO_COEFFS = np.array([1.0, 0.0, -1.0])
ROW_CHUNK = 64


class SphericalQuadratureError(RuntimeError):
    """Quadrature error estimate above the requested tolerance."""


class IwasawaError(ValueError):
    """Matrix is not (numerically) in SL(3,R) or Gram-Schmidt hit a tiny pivot."""


@dataclass(frozen=True)
class BasePoint:
    h: tuple[float, float, float]

    def __post_init__(self):
        h = tuple(float(v) for v in self.h)
        if len(h) != 3 or abs(sum(h)) > 1e-12:
            raise ValueError("base point needs three diagonal entries summing to 0")
        object.__setattr__(self, "h", tuple(sorted(h, reverse=True)))

    @classmethod
    def from_pair(cls, h1: float, h2: float) -> "BasePoint":
        return cls((h1, h2, -h1 - h2))

    @classmethod
    def origin(cls) -> "BasePoint":
        return cls((0.0, 0.0, 0.0))

    @property
    def is_origin(self) -> bool:
        return all(v == 0.0 for v in self.h)


@dataclass(frozen=True)
class IwasawaLog:
    t: tuple[float, float, float]
    k: np.ndarray
    n: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return self.k @ np.diag(np.exp(self.t)) @ self.n


def iwasawa_log(g) -> IwasawaLog:
    """g = k exp(diag t) n by Gram-Schmidt on the columns of g."""
    g = np.asarray(g, dtype=float)
    if g.shape != (3, 3):
        raise IwasawaError("expected a 3x3 matrix")
    if abs(np.linalg.det(g) - 1.0) > 1e-10:
        raise IwasawaError("determinant must be 1")
    q = np.zeros((3, 3))
    r = np.zeros((3, 3))
    scale = max(np.abs(g).max(), 1.0)
    for j in range(3):
        v = g[:, j].copy()
        for i in range(j):
            r[i, j] = q[:, i] @ g[:, j]
            v -= r[i, j] * q[:, i]
        nv = np.linalg.norm(v)
        if nv < 1e-12 * scale:
            raise IwasawaError("near-singular Gram-Schmidt pivot")
        r[j, j] = nv
        q[:, j] = v / nv
    d = np.diag(r).copy()
    t = np.log(d)
    t -= t.sum() / 3.0
    return IwasawaLog(tuple(float(x) for x in t), q, r / d[:, None])


def _euler_zyz(alpha, beta, gamma):
    ca, sa = np.cos(alpha), np.sin(alpha)
    cb, sb = np.cos(beta), np.sin(beta)
    cg, sg = np.cos(gamma), np.sin(gamma)
    k = np.empty(alpha.shape + (3, 3))
    k[..., 0, 0] = ca * cb * cg - sa * sg
    k[..., 0, 1] = -ca * cb * sg - sa * cg
    k[..., 0, 2] = ca * sb
    k[..., 1, 0] = sa * cb * cg + ca * sg
    k[..., 1, 1] = -sa * cb * sg + ca * cg
    k[..., 1, 2] = sa * sb
    k[..., 2, 0] = -sb * cg
    k[..., 2, 1] = sb * sg
    k[..., 2, 2] = cb
    return k


def _gauss_legendre(order: int, a: float, b: float):
    x, w = np.polynomial.legendre.leggauss(order)
    return 0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w


def _periodic(order: int):
    x = (np.arange(order) + 0.5) * (2 * math.pi / order)
    return x, np.full(order, 2 * math.pi / order)


def haar_euler_nodes(order: int):
    """Product rule on SO(3) in ZYZ Euler angles, weights summing to 1.

    The two azimuthal angles are periodic and get the trapezoid rule; the polar angle
    gets Gauss-Legendre with the sin(beta) density.
    """
    a, wa = _periodic(order)
    b, wb = _gauss_legendre(order, 0.0, math.pi)
    g, wg = _periodic(order)
    A, B, G = np.meshgrid(a, b, g, indexing="ij")
    W = (wa[:, None, None] * (wb * np.sin(b))[None, :, None] * wg[None, None, :]) / (8 * math.pi**2)
    return _euler_zyz(A.ravel(), B.ravel(), G.ravel()), W.ravel()


def iwasawa_t_of_ak(h, ks) -> np.ndarray:
    """t(exp(diag h) k) for a batch of rotations, using |a k e1| and |a^{-1} k e3|."""
    a = np.exp(np.asarray(h, dtype=float))
    u = ks[:, :, 0] * a
    v = ks[:, :, 2] / a
    t1 = np.log(np.sqrt(np.einsum("ij,ij->i", u, u)))
    t12 = np.log(np.sqrt(np.einsum("ij,ij->i", v, v)))
    return np.stack([t1, t12 - t1, -t12], axis=1)


class SphericalQuadrature:
    """Precomputed K-quadrature for one base point and order."""

    def __init__(self, y: BasePoint, order: int = 32):
        if order < 2:
            raise ValueError("quadrature order must be at least 2")
        self.y = y
        self.order = int(order)
        ks, w = haar_euler_nodes(self.order)
        t = iwasawa_t_of_ak(y.h, ks)
        self.t = t
        self.weights = w * np.exp(-(t @ RHO_COEFFS))
        # exponent sum_j c_j t_j with c3 = -c1 - c2 becomes (c1-c3) t1 + (c2-c3) t2
        self._t1 = t[:, 0].copy()
        self._t2 = t[:, 1].copy()

    def envelope(self, coeffs) -> np.ndarray:
        """Node-wise modulus sum: sum_k w_k |exp(mu(t_k))|, an upper bound for |phi|."""
        coeffs = np.atleast_2d(np.asarray(coeffs, dtype=complex)).real
        return self._reduce(coeffs.astype(complex))

    def phi_coeffs(self, coeffs) -> np.ndarray:
        """phi_mu(y) for mu given by diagonal coefficients, shape (M, 3) -> (M,)."""
        coeffs = np.atleast_2d(np.asarray(coeffs, dtype=complex))
        return self._reduce(coeffs)

    def _reduce(self, coeffs: np.ndarray) -> np.ndarray:
        if self.y.is_origin:
            return np.ones(coeffs.shape[0], dtype=complex)
        p = coeffs[:, 0] - coeffs[:, 2]
        q = coeffs[:, 1] - coeffs[:, 2]
        out = np.empty(coeffs.shape[0], dtype=complex)
        for s in range(0, coeffs.shape[0], ROW_CHUNK):
            e = p[s:s + ROW_CHUNK, None] * self._t1[None, :] + q[s:s + ROW_CHUNK, None] * self._t2[None, :]
            out[s:s + ROW_CHUNK] = np.add.reduce(np.exp(e) * self.weights[None, :], axis=1)
        return out

    def phi(self, x1, x2) -> np.ndarray:
        """phi_mu(y) for mu with (complex) coordinates x1, x2 (broadcast arrays)."""
        x1 = np.asarray(x1, dtype=complex)
        x2 = np.asarray(x2, dtype=complex)
        shape = np.broadcast(x1, x2).shape
        co = diag_coefficients(np.broadcast_to(x1, shape).ravel(), np.broadcast_to(x2, shape).ravel())
        return self.phi_coeffs(co).reshape(shape)


@lru_cache(maxsize=32)
def quadrature_for(y: BasePoint, order: int) -> SphericalQuadrature:
    return SphericalQuadrature(y, order)


@dataclass(frozen=True)
class SphericalValue:
    value: complex
    error_estimate: float
    order: int


def spherical_phi(lam: SpectralParam, y: BasePoint, order: int = 32, tol: float | None = None) -> SphericalValue:
    """phi_lam(y) with an error estimate from the half-order rule.

    ``tol`` triggers order doubling (up to 4x) until the estimate falls below it.
    """
    cur = order
    for _ in range(3):
        v = complex(quadrature_for(y, cur).phi(lam.x1, lam.x2))
        coarse = complex(quadrature_for(y, max(cur // 2, 2)).phi(lam.x1, lam.x2))
        err = abs(v - coarse)
        if tol is None or err <= tol:
            return SphericalValue(v, err, cur)
        cur *= 2
    raise SphericalQuadratureError(f"spherical quadrature error {err:.3e} above tolerance {tol:.3e}")


def conv_value(h, lam: SpectralParam, y: BasePoint, order: int = 32) -> complex:
    """h(lam) * phi_lam(y): the value (f x phi_lam)(y) for K-invariant f with transform h."""
    return complex(h(lam.x1, lam.x2)) * spherical_phi(lam, y, order).value
