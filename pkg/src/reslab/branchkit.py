"""Branch-cut toolkit: c, s, principal square roots, sqrt(z+1)sqrt(z-1), c^{-1}, ellipses.

Values on a cut are reached only through an explicit ``Side`` flag, never through
signed zeros.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np


class BranchCutError(ValueError):
    """Argument lies on a branch cut and no side was chosen."""


class Side(enum.Enum):
    ABOVE = "+i0"
    BELOW = "-i0"

    @property
    def sign(self) -> int:
        return 1 if self is Side.ABOVE else -1


def _out(x, scalar):
    return complex(x) if scalar else x


def c(z):
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise ValueError("c(z) requires z != 0")
    r = 0.5 * (z + 1.0 / z)
    return _out(r, r.ndim == 0)


def s(z):
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise ValueError("s(z) requires z != 0")
    r = 0.5 * (z - 1.0 / z)
    return _out(r, r.ndim == 0)


def sqrt_principal(z, side: Side | None = None):
    """Principal square root on C minus (-inf, 0]; cut values need ``side``."""
    z = np.asarray(z, dtype=complex)
    on_cut = (z.imag == 0) & (z.real <= 0)
    if np.any(on_cut) and side is None:
        raise BranchCutError("argument on (-inf, 0] requires a side flag")
    r = np.sqrt(z)
    if np.any(on_cut):
        r = np.where(on_cut, side.sign * 1j * np.sqrt(np.abs(z.real)), r)
    return _out(r, r.ndim == 0)


def sqrt_cartesian(z):
    """Closed-form principal root sqrt(x+iy) from real arithmetic (reference formula)."""
    x, y = z.real, z.imag
    m = math.hypot(x, y)
    # take the root without cancellation first, then divide for the other part
    if x >= 0:
        re = math.sqrt((m + x) / 2.0)
        im = y / (2.0 * re) if re > 0 else 0.0
    else:
        im = math.copysign(math.sqrt((m - x) / 2.0), y)
        re = abs(y) / (2.0 * abs(im))
    return complex(re, im)


def _p_raw(z):
    return np.sqrt(z + 1.0) * np.sqrt(z - 1.0)


def two_sqrt_product(z, side: Side | None = None):
    """sqrt(z+1) sqrt(z-1), holomorphic on C minus [-1, 1] and exactly odd."""
    z = np.asarray(z, dtype=complex)
    on_seg = (z.imag == 0) & (np.abs(z.real) <= 1.0)
    if np.any(on_seg) and side is None:
        raise BranchCutError("argument on [-1, 1] requires a side flag")
    left = (z.real < 0) | ((z.real == 0) & (z.imag < 0))
    r = np.where(left, -_p_raw(-z), _p_raw(z))
    if np.any(on_seg):
        x = z.real
        r = np.where(on_seg, side.sign * 1j * np.sqrt(np.clip(1.0 - x * x, 0.0, None)), r)
    return _out(r, r.ndim == 0)


def c_inv(z, side: Side | None = None):
    """Inverse of c mapping C minus [-1,1] onto the punctured open unit disk."""
    p = np.asarray(two_sqrt_product(z, side), dtype=complex)
    z = np.asarray(z, dtype=complex)
    r = 1.0 / (z + p)
    return _out(r, r.ndim == 0)


def s_of_c_inv(z, side: Side | None = None):
    return -two_sqrt_product(z, side)


@dataclass(frozen=True)
class EllipseSpec:
    """Ellipse E_{c(r), |s(r)|} centred at 0, image of the circle |w| = r under c."""

    r: float

    def __post_init__(self):
        if not 0.0 < self.r < 1.0:
            raise ValueError("ellipse parameter r must lie in (0, 1)")

    @property
    def a(self) -> float:
        return 0.5 * (self.r + 1.0 / self.r)

    @property
    def b(self) -> float:
        return 0.5 * (1.0 / self.r - self.r)

    @property
    def semi_axes(self) -> tuple[float, float]:
        return (self.a, -self.b)

    def level(self, p):
        p = np.asarray(p, dtype=complex)
        return (p.real / self.a) ** 2 + (p.imag / self.b) ** 2


def c_of_r(r: float) -> float:
    return 0.5 * (r + 1.0 / r)


def r_of_c(cval: float) -> float:
    """Radius in (0,1) with c(r) = cval > 1."""
    return cval - math.sqrt(cval * cval - 1.0)


def ellipse_contains(r: float, p) -> bool:
    """Open-ellipse membership of p in E_{c(r), s(r)}."""
    return bool(EllipseSpec(r).level(p) < 1.0)


def _half_integer_candidates(z: complex, r: float) -> list[int]:
    bound = abs(z) * c_of_r(r)
    k = int(math.floor(bound + 0.5)) + 1
    return [n for n in range(-k - 1, k + 1) if abs(n + 0.5) <= bound]


def residue_condition_holds(z: complex, r: float, margin: float = 1e-9) -> bool:
    """True when no point i(n+1/2) lies on the curve z * dE_{c(r), s(r)}.

    ``margin`` is a tolerance on the ellipse level function around 1.
    """
    z = complex(z)
    if z == 0:
        return True
    e = EllipseSpec(r)
    for n in _half_integer_candidates(z, r):
        lev = float(e.level(1j * (n + 0.5) / z))
        if abs(lev - 1.0) <= margin:
            return False
    return True


def enumerate_S(r: float, z: complex) -> frozenset[int]:
    """S_{r,z}: integers n with i(n+1/2) inside z * E_{c(r), s(r)} (segment removed off iR)."""
    z = complex(z)
    if z == 0:
        raise ValueError("enumerate_S requires z != 0")
    e = EllipseSpec(r)
    on_axis = z.real == 0
    out = set()
    for n in _half_integer_candidates(z, r):
        p = 1j * (n + 0.5) / z
        if e.level(p) < 1.0:
            if not on_axis and p.imag == 0 and abs(p.real) <= 1.0:
                continue
            out.add(n)
    return frozenset(out)
