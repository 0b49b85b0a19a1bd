"""Root system A2 of SL(3,R)/SO(3) in the (x1, x2) coordinates of the dual Cartan space.

The dual space a* is identified with R^2 so that the simple root alpha_12 is e1 and
the inner product is 12 times the Euclidean one.  Complexified points are stored as
pairs of complex numbers.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

SQRT3 = float(np.sqrt(3.0))
INNER_SCALE = 12.0
RHO_X_SQ = 12.0
RHO_X = float(np.sqrt(RHO_X_SQ))
WEYL_ORDER = 6


@dataclass(frozen=True)
class SpectralParam:
    """A point of the complexified dual space in (x1, x2) coordinates."""

    x1: complex
    x2: complex

    def __post_init__(self):
        object.__setattr__(self, "x1", complex(self.x1))
        object.__setattr__(self, "x2", complex(self.x2))

    @property
    def vec(self) -> np.ndarray:
        return np.array([self.x1, self.x2], dtype=complex)

    @classmethod
    def from_vec(cls, v) -> "SpectralParam":
        return cls(complex(v[0]), complex(v[1]))

    def __add__(self, other: "SpectralParam") -> "SpectralParam":
        return SpectralParam(self.x1 + other.x1, self.x2 + other.x2)

    def __sub__(self, other: "SpectralParam") -> "SpectralParam":
        return SpectralParam(self.x1 - other.x1, self.x2 - other.x2)

    def __neg__(self) -> "SpectralParam":
        return SpectralParam(-self.x1, -self.x2)

    def __mul__(self, scalar) -> "SpectralParam":
        return SpectralParam(scalar * self.x1, scalar * self.x2)

    __rmul__ = __mul__

    @property
    def l12(self) -> complex:
        return self.x1

    @property
    def l23(self) -> complex:
        return -0.5 * self.x1 + 0.5 * SQRT3 * self.x2

    @property
    def l13(self) -> complex:
        return self.l12 + self.l23

    def positive_root_coordinates(self) -> tuple[complex, complex, complex]:
        return (self.l12, self.l23, self.l13)

    def diag_coefficients(self) -> np.ndarray:
        """Coefficients (c1, c2, c3) with lambda(diag(h)) = sum c_j h_j."""
        return diag_coefficients(self.x1, self.x2)


def diag_coefficients(x1, x2) -> np.ndarray:
    """Vectorized map (x1, x2) -> (c1, c2, c3), trace-free, stacked on the last axis."""
    x1 = np.asarray(x1, dtype=complex)
    x2 = np.asarray(x2, dtype=complex)
    t = x2 / SQRT3
    return np.stack([x1 + t, -x1 + t, -2.0 * t], axis=-1)


def inner(a: SpectralParam, b: SpectralParam) -> complex:
    """Complex-bilinear extension of the scaled inner product."""
    return INNER_SCALE * (a.x1 * b.x1 + a.x2 * b.x2)


@dataclass(frozen=True)
class Root:
    label: str
    vec: tuple[float, float]

    def __neg__(self) -> "Root":
        lab = self.label[1:] if self.label.startswith("-") else "-" + self.label
        return Root(lab, (-self.vec[0], -self.vec[1]))


ALPHA_12 = Root("12", (1.0, 0.0))
ALPHA_23 = Root("23", (-0.5, 0.5 * SQRT3))
ALPHA_13 = Root("13", (0.5, 0.5 * SQRT3))
POSITIVE_ROOTS = (ALPHA_12, ALPHA_23, ALPHA_13)
ALL_ROOTS = POSITIVE_ROOTS + tuple(-a for a in POSITIVE_ROOTS)
RHO = SpectralParam(*ALPHA_13.vec)


def root_coordinate(lam: SpectralParam, alpha: Root) -> complex:
    """lambda_alpha = <lambda, alpha> / <alpha, alpha>."""
    a = np.array(alpha.vec)
    num = INNER_SCALE * (lam.x1 * a[0] + lam.x2 * a[1])
    den = INNER_SCALE * float(a @ a)
    return num / den


def _reflection(alpha: Root) -> np.ndarray:
    a = np.array(alpha.vec)
    return np.eye(2) - 2.0 * np.outer(a, a) / float(a @ a)


def _generate_weyl() -> tuple[np.ndarray, ...]:
    gens = [_reflection(ALPHA_12), _reflection(ALPHA_23)]
    found = [np.eye(2)]
    frontier = [np.eye(2)]
    while frontier:
        nxt = []
        for g in frontier:
            for s in gens:
                h = s @ g
                if not any(np.allclose(h, f, atol=1e-12) for f in found):
                    found.append(h)
                    nxt.append(h)
        frontier = nxt
    return tuple(found)


@dataclass(frozen=True)
class RootSystemA2:
    positive_roots: tuple[Root, ...] = POSITIVE_ROOTS
    rho: SpectralParam = RHO
    rho_X_sq: float = RHO_X_SQ

    @cached_property
    def weyl_elements(self) -> tuple[np.ndarray, ...]:
        return _generate_weyl()

    @cached_property
    def fundamental_weights(self) -> tuple[SpectralParam, SpectralParam]:
        a12 = np.array(ALPHA_12.vec)
        a23 = np.array(ALPHA_23.vec)
        w12 = (2.0 / 3.0) * (2 * a12 + a23)
        w23 = (2.0 / 3.0) * (a12 + 2 * a23)
        return (SpectralParam(*w12), SpectralParam(*w23))

    @property
    def rho_X(self) -> float:
        return float(np.sqrt(self.rho_X_sq))


A2 = RootSystemA2()


def weyl_orbit(lam: SpectralParam) -> list[SpectralParam]:
    v = lam.vec
    return [SpectralParam.from_vec(w @ v) for w in A2.weyl_elements]


def polar_param(z, w):
    """lambda(z, w) as (x1, x2) arrays.

    On the unit circle this is x1 + i x2 = z w for real z.  For general nonzero w the
    holomorphic extension x1 = z c(w), x2 = -i z s(w) is used, which keeps every root
    coordinate holomorphic in w (lambda_12 = z c(w), lambda_23 = -z c(xi w)).
    """
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    inv = 1.0 / w
    x1 = z * 0.5 * (w + inv)
    x2 = -1j * z * 0.5 * (w - inv)
    return x1, x2


def polar_spectral_param(z: complex, w: complex) -> SpectralParam:
    x1, x2 = polar_param(z, w)
    return SpectralParam(complex(x1), complex(x2))
