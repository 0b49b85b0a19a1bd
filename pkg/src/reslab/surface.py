"""Riemann surfaces M_n, M_(N) and the rescaled M_(X,N); lifts of G_(n), F and R.

A plain point (z, zeta_0..zeta_N) satisfies zeta_n^2 = t_n^2 - 1 with t_n = (i/z)(n+1/2).
A scaled point (z, zeta) corresponds to the plain point (z / rho_X, rho_X zeta).

The physical section is zeta_n^+(z) = sqrt(t_n+1) sqrt(t_n-1) (holomorphic off the cut
i((-inf,-(n+1/2)] u [n+1/2,inf))).  On the cut the value from Re z > 0 is used.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .algebra_a2 import RHO_X, RHO_X_SQ, WEYL_ORDER
from .branchkit import EllipseSpec, Side, c_of_r, r_of_c, sqrt_principal, two_sqrt_product
from .contour_engine import F_r, F_unit, ResolventEngine
from .spectral_symbols import XI, PoleProximityError, SpectralSymbol, half_integer_distance, phi_zu, psi

DEFINING_TOL = 1e-12
BRANCH_GUARD = 1e-3
REMOVABLE_RADIUS = 1e-3
REMOVABLE_NODES = 32


class SurfaceError(ValueError):
    """Generic domain violation on the covering surfaces."""


class AtlasMembershipError(SurfaceError):
    pass


class SheetMismatchError(SurfaceError):
    pass


class TrackingError(SurfaceError):
    """Root tracking could not decide between the two square roots."""


class BranchPointPole(ArithmeticError):
    """Evaluation at a pole (+-i(n+1/2), 0) of the lifted functions."""

    def __init__(self, n: int, z: complex):
        super().__init__(f"pole of the lift at the branch point over z = {z} (n = {n})")
        self.n = n
        self.z = z


# ---------------------------------------------------------------- points and sheets

def _t(n: int, z: complex) -> complex:
    return 1j * (n + 0.5) / z


@dataclass(frozen=True)
class SheetSignature:
    eps: tuple[int, ...]

    def __post_init__(self):
        e = tuple(int(x) for x in self.eps)
        if not e or any(x not in (1, -1) for x in e):
            raise ValueError("sheet signature entries must be +1 or -1")
        object.__setattr__(self, "eps", e)

    @classmethod
    def parse(cls, text: str) -> "SheetSignature":
        parts = [p.strip() for p in text.split(",") if p.strip()]
        return cls(tuple(1 if p in ("+", "+1", "1") else -1 for p in parts))

    @classmethod
    def physical(cls, N: int) -> "SheetSignature":
        return cls((1,) * (N + 1))

    @property
    def N(self) -> int:
        return len(self.eps) - 1

    def drop(self, m: int) -> tuple[int, ...]:
        """epsilon(m-check): the signature without its m-th entry."""
        return self.eps[:m] + self.eps[m + 1:]

    def flip(self, k: int) -> "SheetSignature":
        e = list(self.eps)
        e[k] = -e[k]
        return SheetSignature(tuple(e))

    def __str__(self) -> str:
        return ",".join("+" if x > 0 else "-" for x in self.eps)


@dataclass(frozen=True)
class SurfacePoint:
    z: complex
    zeta: tuple[complex, ...]
    scaled: bool = False

    def __post_init__(self):
        object.__setattr__(self, "z", complex(self.z))
        object.__setattr__(self, "zeta", tuple(complex(v) for v in self.zeta))
        if self.z == 0:
            raise SurfaceError("z = 0 is not on the surface")

    @property
    def N(self) -> int:
        return len(self.zeta) - 1

    def plain(self) -> "SurfacePoint":
        if not self.scaled:
            return self
        return SurfacePoint(self.z / RHO_X, tuple(RHO_X * v for v in self.zeta), False)

    def to_scaled(self) -> "SurfacePoint":
        if self.scaled:
            return self
        return SurfacePoint(self.z * RHO_X, tuple(v / RHO_X for v in self.zeta), True)

    def residuals(self) -> list[float]:
        """|zeta_n^2 - (t_n^2 - 1)| relative to the size of the terms."""
        p = self.plain()
        out = []
        for n, zn in enumerate(p.zeta):
            t = _t(n, p.z)
            rhs = t * t - 1.0
            out.append(abs(zn * zn - rhs) / max(1.0, abs(rhs)))
        return out

    def is_valid(self, tol: float = DEFINING_TOL) -> bool:
        return max(self.residuals()) < tol

    def signature(self) -> SheetSignature:
        """Signs of zeta_n relative to zeta_n^+(z) (right-side values on the cuts)."""
        p = self.plain()
        eps = []
        for n, zn in enumerate(p.zeta):
            zp = zeta_plus(n, p.z)
            if abs(zp) < 1e-14:
                eps.append(1)
            else:
                eps.append(1 if abs(zn - zp) <= abs(zn + zp) else -1)
        return SheetSignature(tuple(eps))


def zeta_plus(n: int, z: complex, side: str | None = "right") -> complex:
    """zeta_n^+(z) = sqrt(t+1) sqrt(t-1), t = (i/z)(n+1/2).

    On the cut (z imaginary with |z| >= n+1/2) the value is the limit from Re z > 0
    (``side="right"``) or Re z < 0 (``side="left"``); ``side=None`` rejects the cut.
    """
    z = complex(z)
    if n < 0:
        raise ValueError("zeta_plus needs n >= 0")
    t = _t(n, z)
    on_cut = z.real == 0 and abs(z.imag) >= n + 0.5
    if on_cut:
        if side is None:
            raise SurfaceError(f"z = {z} lies on the cut of zeta_{n}^+; choose a side")
        if side not in ("right", "left"):
            raise ValueError("side must be 'right' or 'left'")
        # from Re z > 0 the value t = (i/z)(n+1/2) approaches [-1, 1] from above
        s = Side.ABOVE if side == "right" else Side.BELOW
        return complex(two_sqrt_product(complex(t.real, 0.0), s))
    return complex(two_sqrt_product(t))


def section(z: complex, eps: SheetSignature, side: str = "right") -> SurfacePoint:
    """sigma_eps(z) on M_(N), N = len(eps) - 1."""
    return SurfacePoint(z, tuple(e * zeta_plus(n, z, side) for n, e in enumerate(eps.eps)))


def scaled_section(z: complex, eps: SheetSignature, side: str = "right") -> SurfacePoint:
    return section(complex(z) / RHO_X, eps, side).to_scaled()


def branch_fibre_point(n: int, eps: SheetSignature, scaled: bool = False) -> SurfacePoint:
    """(z^(n), zeta^(n,eps)): zeta_n = 0, other coordinates eps_k zeta_k^+ from Re z > 0."""
    z0 = -1j * (n + 0.5)
    zeta = []
    for k, e in enumerate(eps.eps):
        zeta.append(0j if k == n else e * zeta_plus(k, z0, "right"))
    p = SurfacePoint(z0, tuple(zeta))
    return p.to_scaled() if scaled else p


# ---------------------------------------------------------------- lifted G

def _lift_G_raw(symbol: SpectralSymbol, n: int, z: complex, zeta: complex) -> complex:
    t = _t(n, z)
    w = t - zeta
    return complex(-3.0 * psi(symbol, z, w) * phi_zu(z, 1.0, XI * w) * phi_zu(z, 1.0, XI * XI * w)
                   * t / (-1j * np.pi * zeta))


def _near_phi_pole(z: complex, w: complex, radius: float) -> bool:
    for u in (XI, XI * XI):
        if half_integer_distance(z * 0.5 * (u * w + 1 / (u * w))) < radius:
            return True
    return False


def lift_G(symbol: SpectralSymbol, n: int, z: complex, zeta: complex) -> complex:
    """G~_(n)(z, zeta) on M_n.

    The zeros of one phi-factor cancel the poles of the other at isolated points of M_n;
    near those points the value is the mean over a small circle in the local coordinate z,
    with zeta continued along the circle.
    """
    z = complex(z)
    zeta = complex(zeta)
    if abs(zeta) < 1e-13:
        raise BranchPointPole(n, z)
    t = _t(n, z)
    if abs(zeta * zeta - (t * t - 1.0)) > 1e-9 * max(1.0, abs(t * t - 1.0)):
        raise SurfaceError("(z, zeta) is not on M_n")
    w = t - zeta
    if not _near_phi_pole(z, w, 1e-4):
        try:
            return _lift_G_raw(symbol, n, z, zeta)
        except PoleProximityError:
            pass
    base = t * t - 1.0
    acc = 0j
    for j in range(REMOVABLE_NODES):
        zj = z + REMOVABLE_RADIUS * abs(z) * cmath.exp(2j * math.pi * (j + 0.5) / REMOVABLE_NODES)
        tj = _t(n, zj)
        zetaj = zeta * cmath.sqrt((tj * tj - 1.0) / base)
        acc += _lift_G_raw(symbol, n, zj, zetaj)
    return acc / REMOVABLE_NODES


def lift_G_point(symbol: SpectralSymbol, n: int, p: SurfacePoint) -> complex:
    q = p.plain()
    return lift_G(symbol, n, q.z, q.zeta[n])


def lift_G_scaled(symbol: SpectralSymbol, n: int, z: complex, zeta: complex) -> complex:
    """G~_(X,n)(z, zeta) = -(1/3) G~_(n)(z / rho_X, rho_X zeta)."""
    return -lift_G(symbol, n, complex(z) / RHO_X, RHO_X * complex(zeta)) / 3.0


def removable_points(n: int, m: int, delta: int, eps: int):
    """The (z, zeta) where a phi factor of G~_(n) is singular.

    Returns (z, zeta, k) with w = t - zeta: th(pi z c(xi^k w)) has its pole there and the
    factor phi_{z,1}(xi^{3-k} w) vanishes, which cancels it.
    """
    a = n + 0.5
    b = m + 0.5
    q = a * a - delta * a * b + b * b
    lin = 2 * b - delta * a
    z = -1j * (2 / math.sqrt(3)) * lin * math.sqrt(q) / (eps * abs(lin))
    zeta = eps * 1j * 0.5 * abs(lin) / math.sqrt(q)
    k = 2 if delta == 1 else 1
    return complex(z), complex(zeta), k


# ---------------------------------------------------------------- charts

def chart_kappa_inverse(n: int, sign: int, zeta: complex, eps: SheetSignature | None = None,
                        scaled: bool = False) -> SurfacePoint:
    """Inverse chart around a branch point.

    Plain: z = sign * i(n+1/2) / sqrt(zeta^2 + 1), returned as a point of M_n.
    Scaled (sign must be -1): z = -i rho_X (n+1/2) / sqrt(rho_X^2 zeta^2 + 1); with ``eps``
    the other coordinates are continued from the fibre point (z^(n), zeta^(n,eps)) and a
    point of M_(X,N) is returned.
    """
    zeta = complex(zeta)
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    zz = RHO_X * zeta if scaled else zeta
    if zz.real == 0 and abs(zz.imag) >= 1:
        raise SurfaceError("chart coordinate on i((-inf,-1] u [1,inf))")
    if scaled and sign != -1:
        raise ValueError("the scaled chart lives over the lower half plane (sign -1)")
    root = complex(sqrt_principal(zz * zz + 1.0))
    zp = sign * 1j * (n + 0.5) / root
    if eps is None:
        p = SurfacePoint(zp, (zz,))
        return p.to_scaled() if scaled else p
    if sign != -1:
        raise ValueError("fibre continuation is implemented for the lower branch points")
    if eps.eps[n] != 1:
        raise SurfaceError("chart sheets are labelled by eps with eps_n = +1")
    base = branch_fibre_point(n, eps)
    coords = []
    for k in range(len(eps.eps)):
        if k == n:
            coords.append(zz)
            continue
        t0 = _t(k, base.z)
        tk = _t(k, zp)
        coords.append(base.zeta[k] * cmath.sqrt((tk * tk - 1.0) / (t0 * t0 - 1.0)))
    p = SurfacePoint(zp, tuple(coords))
    return p.to_scaled() if scaled else p


def chart_kappa(n: int, p: SurfacePoint) -> complex:
    """Chart coordinate: zeta_n of the point (scaled coordinate for scaled points)."""
    return p.zeta[n] if len(p.zeta) > n else p.zeta[0]


# ---------------------------------------------------------------- atlas

@dataclass(frozen=True)
class AtlasDisk:
    m: int
    v: float
    radius: float
    r: float | None

    def contains(self, z: complex) -> bool:
        return abs(complex(z) + 1j * self.v) < self.radius


def _admissible(m: int, v: float, cval: float, radius: float, level_margin: float, samples: int = 48) -> bool:
    e = EllipseSpec(r_of_c(cval))
    th = 2 * np.pi * (np.arange(samples) + 0.5) / samples
    zs = np.concatenate([[-1j * v], -1j * v + radius * np.exp(1j * th)])
    for k in (m, m + 1):
        lev = e.level(1j * (k + 0.5) / zs)
        if k <= m and np.any(lev >= 1 - level_margin):
            return False
        if k > m and np.any(lev <= 1 + level_margin):
            return False
    if m >= 1:
        lev = e.level(1j * 0.5 / zs)
        if np.any(lev >= 1 - level_margin):
            return False
    return True


def _best_disk(m: int, v: float, N: int, geo: float, margin: float, level_margin: float):
    cmax = 1 + 1 / (2 * N + 3) - margin
    fl = math.floor(v)
    if v < fl + 0.5:
        cmax = min(cmax, (fl + 0.5) / v - margin)
    best = (0.0, None)
    if cmax <= 1 + 1e-6:
        return best
    for cval in np.linspace(1 + (cmax - 1) / 40, cmax, 40):
        if not _admissible(m, v, cval, 0.0, level_margin):
            continue
        lo, hi = 0.0, geo
        if _admissible(m, v, cval, hi, level_margin):
            lo = hi
        else:
            for _ in range(30):
                mid = 0.5 * (lo + hi)
                if _admissible(m, v, cval, mid, level_margin):
                    lo = mid
                else:
                    hi = mid
        if lo > best[0] * (1 + 1e-9):
            best = (lo, r_of_c(cval))
    return best


@dataclass(frozen=True)
class CoverAtlas:
    """Concrete neighbourhoods W_(m), m = -1..N, as finite unions of disks on -iR+.

    ``R`` holds the radii of the branch disks W_{m+1/2}; each disk carries the radius
    r_v used for F_(m) = F_{r_v} on it.
    """

    N: int
    R: tuple[float, ...]
    disks: tuple[AtlasDisk, ...]

    def region(self, m: int) -> tuple[AtlasDisk, ...]:
        return tuple(d for d in self.disks if d.m == m)

    def in_region(self, m: int, z: complex) -> bool:
        return any(d.contains(z) for d in self.region(m))

    def disk_for(self, m: int, z: complex) -> AtlasDisk:
        for d in self.region(m):
            if d.contains(z):
                return d
        raise AtlasMembershipError(f"z = {z} is not in W_({m})")

    def resolve_m(self, z: complex) -> int:
        """Smallest m with z in W_(m); points off every disk fall back to m = -1 off the cuts."""
        z = complex(z)
        for m in range(-1, self.N + 1):
            if self.in_region(m, z):
                return m
        if z.real == 0 and abs(z.imag) >= 0.5:
            raise AtlasMembershipError(f"z = {z} lies on the cut outside every atlas disk")
        return -1

    def overlap_points(self, m: int, count: int = 5) -> list[complex]:
        """Points of W_(m) and W_(m+1) off iR (left and right of the axis)."""
        out = []
        c = -1j * (m + 1.5)
        rad = self.R[m + 1]
        for j in range(200):
            if len(out) >= count:
                break
            ang = math.pi / 2 + (0.15 + 0.7 * ((j * 0.618034) % 1.0)) * (1 if j % 2 == 0 else -1) * math.pi / 2
            for frac in (0.9, 0.7, 0.5, 0.3):
                z = c + frac * rad * cmath.exp(1j * ang)
                if z.real != 0 and self.in_region(m, z) and self.in_region(m + 1, z):
                    out.append(z)
                    break
        if len(out) < count:
            raise AtlasMembershipError(f"could not find {count} overlap points between W_({m}) and W_({m + 1})")
        return out

    def to_config(self) -> dict:
        return {"N": self.N, "R": list(self.R),
                "disks": [[d.m, d.v, d.radius, d.r] for d in self.disks]}


@lru_cache(maxsize=8)
def build_atlas(N: int = 2, R_cap: float = 0.2, margin: float = 1e-3, level_margin: float = 0.02) -> CoverAtlas:
    """Disks and radii satisfying the containment constraints for F_(m), m = -1..N.

    Branch disk radii are min(R_cap, largest admissible radius).  Interior disks follow
    -iR+ with centres stepping by 0.8 of the current radius, so consecutive disks overlap.
    """
    if N < 0:
        raise ValueError("N must be non-negative")
    R = []
    branch = []
    for m in range(N + 1):
        v = m + 0.5
        rad, r = _best_disk(m, v, N, min(R_cap, 0.49), margin, level_margin)
        if rad <= 0:
            raise SurfaceError(f"no admissible branch disk for m = {m}")
        rad = min(R_cap, 0.9 * rad)
        R.append(rad)
        branch.append(AtlasDisk(m, v, rad, r))
    disks = []
    # W_(-1): disks inside the lower half plane over -i(0, 1/2)
    v = 0.25
    lower = []
    while v > 0.005:
        rad = 0.9 * min(v, 0.5 - v)
        lower.append(AtlasDisk(-1, v, rad, None))
        v -= 0.8 * rad
    v = 0.25
    upper = []
    while True:
        v += 0.8 * 0.9 * min(v, 0.5 - v)
        rad = 0.9 * min(v, 0.5 - v)
        upper.append(AtlasDisk(-1, v, rad, None))
        if v >= 0.5 - 0.5 * R[0] or rad < 1e-4:
            break
    disks.extend(sorted(lower + upper, key=lambda d: d.v))
    for m in range(N + 1):
        disks.append(branch[m])
        v = m + 0.5
        rad = branch[m].radius
        top = m + 1.5 - 0.5 * R[m + 1] if m < N else m + 1.5 - 0.05
        while v < top:
            step_from = rad
            v = v + 0.8 * step_from
            geo = 0.9 * min(v - (m + 0.5), m + 1.5 - v)
            rad, r = _best_disk(m, v, N, geo, margin, level_margin)
            if rad < 1e-4:
                raise SurfaceError(f"atlas construction stalled at v = {v} (m = {m})")
            disks.append(AtlasDisk(m, v, rad, r))
    return CoverAtlas(N, tuple(R), tuple(disks))


# ---------------------------------------------------------------- lifted F and R

@dataclass
class FmCache:
    """Memo of F_(m)(z) values keyed by (m, z)."""

    values: dict = field(default_factory=dict)


def F_region(atlas: CoverAtlas, symbol: SpectralSymbol, m: int, z: complex, cache: FmCache | None = None) -> complex:
    """F_(m)(z): F itself for m = -1, else F_{r_v} on a disk W_v of W_(m) containing z."""
    z = complex(z)
    key = (id(symbol), m, z)
    if cache is not None and key in cache.values:
        return cache.values[key]
    if m == -1:
        if atlas.in_region(-1, z) or atlas.resolve_m(z) == -1:
            val = F_unit(symbol, z)
        else:
            raise AtlasMembershipError(f"z = {z} not admissible for m = -1")
    else:
        d = atlas.disk_for(m, z)
        val = F_r(symbol, z, d.r)
    if cache is not None:
        cache.values[key] = val
    return val


def lift_F(atlas: CoverAtlas, symbol: SpectralSymbol, p: SurfacePoint, m: int | None = None,
           eps: SheetSignature | None = None, cache: FmCache | None = None) -> complex:
    """F~(z, zeta) = F_(m)(z) + 4 pi i sum_{n<=m} G~_(n)(z, zeta_n)
                    + 4 pi i sum_{n>m, eps_n=-1} [G~_(n)(z, zeta_n) - G~_(n)(z, -zeta_n)].

    For n > m the sign eps_n is read off the point; a passed ``eps`` must agree there.
    """
    p = p.plain()
    if p.N != atlas.N:
        raise SurfaceError(f"point has N = {p.N}, atlas has N = {atlas.N}")
    if not p.is_valid(1e-10):
        raise SurfaceError("point violates the defining equations")
    z = p.z
    if m is None:
        m = atlas.resolve_m(z)
    elif m >= 0 and not atlas.in_region(m, z):
        raise AtlasMembershipError(f"z = {z} is not in W_({m})")
    inferred = p.signature()
    if eps is not None:
        if len(eps.eps) != p.N + 1:
            raise SheetMismatchError("signature length differs from N + 1")
        for n in range(m + 1, p.N + 1):
            if eps.eps[n] != inferred.eps[n]:
                raise SheetMismatchError(f"point lies on eps_{n} = {inferred.eps[n]}, not {eps.eps[n]}")
    total = F_region(atlas, symbol, m, z, cache)
    for n in range(0, m + 1):
        total += 4j * np.pi * lift_G(symbol, n, z, p.zeta[n])
    for n in range(m + 1, p.N + 1):
        if inferred.eps[n] == -1:
            total += 4j * np.pi * (lift_G(symbol, n, z, p.zeta[n]) - lift_G(symbol, n, z, -p.zeta[n]))
    return complex(total)


def lift_R(atlas: CoverAtlas, engine: ResolventEngine, p: SurfacePoint, m: int | None = None,
           eps: SheetSignature | None = None, cache: FmCache | None = None) -> complex:
    """R~_(N)(z, zeta) = H(z / rho_X) + (pi i / (|W| rho_X^2)) F~(z / rho_X, rho_X zeta)."""
    if not p.scaled:
        raise SurfaceError("lift_R expects a point of the rescaled surface")
    if not (p.z.imag < 0 and abs(p.z.imag) < (atlas.N + 1.5) * RHO_X):
        raise SurfaceError("lift_R needs -(N+3/2) rho_X < Im z < 0")
    q = p.plain()
    h = engine.holomorphic_part(q.z)
    f = lift_F(atlas, engine.symbol, q, m, eps, cache)
    return complex(h + 1j * np.pi / (WEYL_ORDER * RHO_X_SQ) * f)


# ---------------------------------------------------------------- path continuation

@dataclass(frozen=True)
class TraceStep:
    z: complex
    zeta: tuple[complex, ...]
    eps: tuple[int, ...]


def _branch_points(N: int, scaled: bool):
    s = RHO_X if scaled else 1.0
    return [sgn * 1j * (n + 0.5) * s for n in range(N + 1) for sgn in (1, -1)]


def continue_along_path(start: SurfacePoint, path, max_step: float = 0.02, guard: float = BRANCH_GUARD,
                        return_trace: bool = False):
    """Continue each zeta_n along a polyline in z by nearest-root tracking.

    Steps are subdivided until every coordinate moves by less than max(0.1 |zeta|, 0.05);
    a step where the two roots are nearly equidistant from the previous value raises
    TrackingError.  The path must stay ``guard`` away from every branch value +-i(n+1/2).
    """
    if not start.is_valid(1e-10):
        raise SurfaceError("start point violates the defining equations")
    pts = [complex(v) for v in path]
    if not pts or abs(pts[0] - start.z) > 1e-12 * max(1.0, abs(start.z)):
        pts = [start.z] + pts
    bps = _branch_points(start.N, start.scaled)
    scale = RHO_X if start.scaled else 1.0
    cur_z = start.z
    cur = [v * (scale if start.scaled else 1.0) for v in start.zeta]  # plain coordinates
    trace = [TraceStep(cur_z, start.zeta, start.signature().eps)]

    def seg_dist(a, b, c):
        ab = b - a
        if ab == 0:
            return abs(c - a)
        s = max(0.0, min(1.0, ((c - a) * ab.conjugate()).real / abs(ab) ** 2))
        return abs(a + s * ab - c)

    for target in pts[1:]:
        for b in bps:
            if seg_dist(cur_z, target, b) < guard * scale:
                raise SurfaceError(f"path passes within {guard} of the branch value {b}")
        if target == 0 or seg_dist(cur_z, target, 0) < guard * scale:
            raise SurfaceError("path passes through z = 0")
        nsteps = max(1, int(math.ceil(abs(target - cur_z) / (max_step * scale))))
        a = cur_z
        j = 0
        h = 1.0 / nsteps
        s = 0.0
        while s < 1.0 - 1e-15:
            ds = min(h, 1.0 - s)
            znew = a + (s + ds) * (target - a)
            zp = znew / scale
            new = []
            ok = True
            for n, prev in enumerate(cur):
                t = _t(n, zp)
                root = cmath.sqrt(t * t - 1.0)
                d1, d2 = abs(root - prev), abs(-root - prev)
                pick = root if d1 <= d2 else -root
                near, far = min(d1, d2), max(d1, d2)
                if abs(pick - prev) > max(0.1 * abs(prev), 0.05) or near > 0.25 * far:
                    ok = False
                    break
                new.append(pick)
            if not ok:
                h = ds / 2
                j += 1
                if h < 1e-12:
                    raise TrackingError(f"root tracking failed near z = {znew}")
                continue
            cur = new
            cur_z = znew
            s += ds
            if return_trace:
                zeta_out = tuple(v / scale for v in cur) if start.scaled else tuple(cur)
                p = SurfacePoint(cur_z, zeta_out, start.scaled)
                trace.append(TraceStep(cur_z, zeta_out, p.signature().eps))
            h = min(2 * h, 1.0 / nsteps)
        cur_z = target
    zeta_out = tuple(v / scale for v in cur) if start.scaled else tuple(cur)
    end = SurfacePoint(cur_z, zeta_out, start.scaled)
    if return_trace:
        return end, trace
    return end
