"""Hyperbolic-plane primitives at arbitrary precision.

Points of the upper half-plane (HPoint) and of the unit disk (DPoint),
polar coordinates, Moebius maps with unit determinant, the Cayley transform,
fixed points of hyperbolic maps and the conjugator that sends a flare to
the standard annular wedge {1 < |z| < kappa}.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from mpmath import mp, mpc, mpf

from .errors import BoundaryError, DomainError, NotHyperbolicError

_MODULE = "geometry"


def boundary_tol() -> mpf:
    """Distance to the model boundary below which a point is rejected."""
    return mpf(10) ** (-(mp.dps // 2))


def det_tol() -> mpf:
    return mpf(10) ** (-(mp.dps // 2))


class PointAtInfinity:
    """The boundary point at infinity of the upper half-plane."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFINITY"

    def __reduce__(self):
        return (PointAtInfinity, ())


INFINITY = PointAtInfinity()


@dataclass(frozen=True)
class HPoint:
    """x + iy in the upper half-plane."""

    x: mpf
    y: mpf

    def __post_init__(self):
        object.__setattr__(self, "x", mpf(self.x))
        object.__setattr__(self, "y", mpf(self.y))
        if not self.y > 0:
            raise BoundaryError("HPoint needs y > 0", _MODULE, y=self.y)
        if self.y < boundary_tol():
            raise BoundaryError("HPoint too close to the real axis", _MODULE, y=self.y)

    @classmethod
    def from_complex(cls, z) -> "HPoint":
        z = mpc(z)
        return cls(z.real, z.imag)

    @property
    def z(self) -> mpc:
        return mpc(self.x, self.y)


@dataclass(frozen=True)
class DPoint:
    """A point w of the open unit disk."""

    w: mpc

    def __post_init__(self):
        object.__setattr__(self, "w", mpc(self.w))
        if not abs(self.w) < 1 - boundary_tol():
            raise BoundaryError("DPoint too close to the unit circle", _MODULE, w=self.w)

    @property
    def z(self) -> mpc:
        return self.w


@dataclass(frozen=True)
class PolarPoint:
    """Polar coordinates (r, theta) of an HPoint, theta in (0, pi)."""

    r: mpf
    theta: mpf

    def __post_init__(self):
        object.__setattr__(self, "r", mpf(self.r))
        object.__setattr__(self, "theta", mpf(self.theta))
        if not self.r > 0:
            raise DomainError("polar radius must be positive", _MODULE, r=self.r)
        if not (0 < self.theta < mp.pi):
            raise BoundaryError("polar angle must lie in (0, pi)", _MODULE, theta=self.theta)


Point = Union[HPoint, DPoint]


@dataclass(frozen=True)
class MoebiusMap:
    """The map z -> (az + b)/(cz + d) with ad - bc = 1."""

    a: mpc
    b: mpc
    c: mpc
    d: mpc

    def __post_init__(self):
        for name in "abcd":
            v = mp.mpmathify(getattr(self, name))
            if isinstance(v, mpc) and v.imag == 0:
                v = v.real
            object.__setattr__(self, name, v)
        if abs(self.det() - 1) > det_tol():
            raise DomainError("Moebius map must have unit determinant", _MODULE, det=self.det())

    @classmethod
    def normalized(cls, a, b, c, d) -> "MoebiusMap":
        """Scale an invertible matrix to unit determinant."""
        a, b, c, d = (mp.mpmathify(v) for v in (a, b, c, d))
        det = a * d - b * c
        if det == 0:
            raise DomainError("singular matrix", _MODULE)
        k = mp.sqrt(det)
        if isinstance(k, mpc) and k.imag == 0:
            k = k.real
        return cls(a / k, b / k, c / k, d / k)

    @classmethod
    def identity(cls) -> "MoebiusMap":
        return cls(1, 0, 0, 1)

    def det(self):
        return self.a * self.d - self.b * self.c

    def trace(self):
        return self.a + self.d

    def entries(self) -> tuple:
        return (self.a, self.b, self.c, self.d)

    def is_real(self) -> bool:
        return all(not isinstance(v, mpc) for v in self.entries())

    def is_disk_preserving(self) -> bool:
        tol = det_tol()
        return abs(self.d - mp.conj(self.a)) < tol and abs(self.c - mp.conj(self.b)) < tol

    def __matmul__(self, other: "MoebiusMap") -> "MoebiusMap":
        a, b, c, d = self.entries()
        e, f, g, h = other.entries()
        return MoebiusMap(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def inverse(self) -> "MoebiusMap":
        return MoebiusMap(self.d, -self.b, -self.c, self.a)

    def act(self, z):
        """Raw action on a complex number; no model checks."""
        return (self.a * z + self.b) / (self.c * z + self.d)

    def act_boundary(self, x):
        """Action on a boundary point (real number or INFINITY)."""
        if x is INFINITY:
            return INFINITY if self.c == 0 else self.a / self.c
        den = self.c * x + self.d
        if den == 0:
            return INFINITY
        return (self.a * x + self.b) / den

    def projectively_equal(self, other: "MoebiusMap", tol=None) -> bool:
        tol = det_tol() if tol is None else tol
        pairs = list(zip(self.entries(), other.entries()))
        return (all(abs(p - q) < tol for p, q in pairs)
                or all(abs(p + q) < tol for p, q in pairs))


def apply(m: MoebiusMap, z: Point) -> Point:
    """Apply m to a point of the model m preserves."""
    if isinstance(z, HPoint):
        if not m.is_real():
            raise DomainError("map does not preserve the upper half-plane", _MODULE)
        den = m.c * z.z + m.d
        if den == 0:
            raise BoundaryError("image is the point at infinity", _MODULE)
        return HPoint.from_complex((m.a * z.z + m.b) / den)
    if isinstance(z, DPoint):
        if not m.is_disk_preserving():
            raise DomainError("map does not preserve the unit disk", _MODULE)
        return DPoint(m.act(z.w))
    raise DomainError("unsupported point type", _MODULE, point=type(z).__name__)


def cayley(z: HPoint) -> DPoint:
    """C(z) = (z - i)/(z + i), upper half-plane to disk."""
    zc = z.z
    return DPoint((zc - 1j) / (zc + 1j))


def cayley_inv(w: DPoint) -> HPoint:
    """C^-1(w) = i(1 + w)/(1 - w), disk to upper half-plane."""
    if abs(1 - w.w) < boundary_tol():
        raise BoundaryError("w = 1 maps to infinity", _MODULE)
    return HPoint.from_complex(1j * (1 + w.w) / (1 - w.w))


CAYLEY = MoebiusMap.normalized(1, -1j, 1, 1j)


def to_polar(z: HPoint) -> PolarPoint:
    return PolarPoint(mp.hypot(z.x, z.y), mp.atan2(z.y, z.x))


def from_polar(p: PolarPoint) -> HPoint:
    return HPoint(p.r * mp.cos(p.theta), p.r * mp.sin(p.theta))


def fixed_points(m: MoebiusMap):
    """Real fixed points (z1, z2), z1 < z2, of a hyperbolic real map.

    An unbounded fixed point is reported as INFINITY and sorted last.
    """
    if not m.is_real():
        raise DomainError("fixed_points needs a real map", _MODULE)
    a, b, c, d = m.entries()
    tr = a + d
    if abs(tr) <= 2 + det_tol():
        raise NotHyperbolicError("map is not hyperbolic", _MODULE, trace=tr)
    if c == 0:
        return (b / (d - a), INFINITY)
    root = mp.sqrt(tr * tr - 4)
    p, q = (a - d - root) / (2 * c), (a - d + root) / (2 * c)
    return (p, q) if p < q else (q, p)


def flare_conjugator(z1, z2, t) -> MoebiusMap:
    """U(z) = ((t - z2)/(t - z1)) (z - z1)/(z - z2), normalized to det 1.

    U sends z1 to 0, z2 to infinity and t to 1.
    """
    if any(v is INFINITY for v in (z1, z2, t)):
        raise DomainError("flare conjugator needs finite fixed points", _MODULE)
    z1, z2, t = mpf(z1), mpf(z2), mpf(t)
    if not (z1 < t < z2):
        raise DomainError("flare conjugator needs z1 < t < z2", _MODULE, z1=z1, t=t, z2=z2)
    c = (t - z2) / (t - z1)
    return MoebiusMap.normalized(c, -c * z1, 1, -z2)


def hyperbolic_distance_disk(w1, w2) -> mpf:
    """Hyperbolic distance in the unit disk (curvature -1)."""
    w1, w2 = mpc(w1), mpc(w2)
    num = abs(w1 - w2)
    den = abs(1 - mp.conj(w1) * w2)
    return 2 * mp.atanh(num / den)
