"""Concrete Fuchsian groups with one flare: infinite-volume Hecke groups and
the orientation-preserving cover of the symmetric Schottky reflection group.

Each model exposes the same small interface to the solver:

* ``pullback_raw(z)`` reduces a complex point of the upper half-plane to the
  fundamental domain and reports the number of moves used;
* ``flare_polar(z)`` gives polar coordinates of U(z) in the flare domain;
* ``cusp_coords(z)`` gives (x, y) in the cusp chart (Hecke only);
* ``n_cusps``, ``kappa`` and ``anchor`` describe the expansions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from mpmath import mp, mpc, mpf

from .errors import DomainError, NonTerminationError
from .geometry import (
    CAYLEY,
    DPoint,
    HPoint,
    MoebiusMap,
    apply,
    boundary_tol,
    cayley,
    cayley_inv,
    fixed_points,
    flare_conjugator,
)

_MODULE = "groups"
MOVE_CAP = 10_000


@dataclass(frozen=True)
class PullbackResult:
    point: HPoint | DPoint
    word_length: int


@dataclass(frozen=True)
class Expansion:
    """Identifies one expansion of a group: ('cusp', i) or ('flare', j)."""

    kind: str
    index: int = 0

    def __str__(self) -> str:
        return f"{self.kind}{self.index}"


CUSP0 = Expansion("cusp", 0)
FLARE0 = Expansion("flare", 0)


class GroupModel:
    """Shared behaviour of the concrete group models."""

    kind: str
    digits: int
    kappa: mpf
    U: MoebiusMap
    n_cusps: int
    n_flares: int = 1
    anchor: Expansion

    @property
    def log_kappa(self) -> mpf:
        return mp.log(self.kappa)

    def expansions(self) -> list[Expansion]:
        return [Expansion("cusp", i) for i in range(self.n_cusps)] + [
            Expansion("flare", j) for j in range(self.n_flares)
        ]

    def flare_polar(self, z: mpc, index: int = 0):
        """(rho, theta) of U(z) for a complex point z of the upper half-plane."""
        w = self.U.act(z)
        return abs(w), mp.arg(w)

    def cusp_coords(self, z: mpc, index: int = 0):
        return z.real, z.imag

    def pullback_raw(self, z: mpc):
        raise NotImplementedError

    def in_domain_raw(self, z: mpc) -> bool:
        raise NotImplementedError

    def generators_h(self) -> list[MoebiusMap]:
        """Generators of the group acting on the upper half-plane."""
        raise NotImplementedError

    def domain_box(self):
        """Bounding box (xmin, xmax, ymin, ymax) of the fundamental domain in
        the model used for pictures."""
        raise NotImplementedError


# --- Hecke groups -------------------------------------------------------

@dataclass(frozen=True)
class HeckeGroup(GroupModel):
    """Group generated by z -> z + 1 and z -> -r^2/z with 0 < r < 1/2."""

    r: mpf
    digits: int
    T: MoebiusMap = field(repr=False)
    S: MoebiusMap = field(repr=False)
    A: MoebiusMap = field(repr=False)
    z1: mpf
    z2: mpf
    U: MoebiusMap = field(repr=False)
    kappa: mpf

    kind = "hecke"
    n_cusps = 1
    anchor = CUSP0

    @property
    def parameter(self):
        return self.r

    def generators_h(self):
        return [self.T, self.S]

    def pullback_raw(self, z: mpc):
        if self.in_domain_raw(z):
            return z, 0
        r2 = self.r * self.r
        half = mpf(1) / 2
        moves = 0
        while True:
            k = int(mp.floor(z.real + half))
            if k:
                z = mpc(z.real - k, z.imag)
                moves += abs(k)
            if z.real * z.real + z.imag * z.imag < r2:
                z = -r2 / z
                moves += 1
            else:
                break
            if moves > MOVE_CAP:
                raise NonTerminationError("Hecke pullback exceeded its move cap", _MODULE, z=z)
        if z.real < 0:
            z = mpc(z.real + 1, z.imag)
            moves += 1
        return z, moves

    def in_domain_raw(self, z: mpc) -> bool:
        tol = boundary_tol()
        r = self.r
        return (
            -tol <= z.real <= 1 + tol
            and abs(z) >= r - tol
            and abs(z - 1) >= r - tol
        )

    def domain_box(self):
        return (mpf(0), mpf(1), mpf(0), mpf(1))


def hecke_new(r, digits: int = 50) -> HeckeGroup:
    """Build the Hecke group with parameter r in (0, 1/2) and its flare data."""
    with mp.workdps(digits):
        r = mpf(r)
        if not (0 < r < mpf(1) / 2):
            raise DomainError("Hecke parameter r must lie in (0, 1/2)", _MODULE, r=r)
        T = MoebiusMap(1, 1, 0, 1)
        S = MoebiusMap(0, -r, 1 / r, 0)
        A = T @ S
        z1, z2 = fixed_points(A)
        U = flare_conjugator(z1, z2, r)
        kappa = U.act_boundary(1 - r)
        g = HeckeGroup(r=r, digits=digits, T=T, S=S, A=A, z1=z1, z2=z2, U=U, kappa=kappa)
        _check_flare(g, A)
        tol = mpf(10) ** (-(digits - 5))
        if abs(mp.sqrt(kappa) + 1 / mp.sqrt(kappa) - 1 / r) > tol:
            raise DomainError("trace identity failed", _MODULE, r=r)
        if abs(kappa - (z2 / r) ** 2) > tol * kappa:
            raise DomainError("kappa closed form failed", _MODULE, r=r)
        return g


def hecke_pullback(g: HeckeGroup, z: HPoint) -> PullbackResult:
    """Reduce z into the closed fundamental domain F_r."""
    with mp.workdps(g.digits):
        w, n = g.pullback_raw(z.z)
        return PullbackResult(HPoint.from_complex(w), n)


def flare_cutoff_angle(g: HeckeGroup, h) -> mpf:
    """Acute angle with the real axis of the circle through z1, z2 centred at 1/2 - ih."""
    h = mpf(h)
    if not h > 0:
        raise DomainError("cutoff height must be positive", _MODULE, h=h)
    return mp.pi / 2 - mp.atan(h / mp.sqrt(mpf(1) / 4 - g.r * g.r))


# --- Symmetric Schottky cover -------------------------------------------

@dataclass(frozen=True)
class SchottkyCover(GroupModel):
    """Orientation-preserving index-2 subgroup generated by the rotation
    D1D2 and D1R of the symmetric Schottky reflection group with arc angle
    theta (circles centred at sec(theta/2) e^{2 pi i k/3}, radius tan(theta/2)).
    """

    theta: mpf
    digits: int
    rot_disk: MoebiusMap = field(repr=False)
    d2r_disk: MoebiusMap = field(repr=False)
    d1r_disk: MoebiusMap = field(repr=False)
    rot_h: MoebiusMap = field(repr=False)
    d2r_h: MoebiusMap = field(repr=False)
    d1r_h: MoebiusMap = field(repr=False)
    z1: mpf
    z2: mpf
    t: mpf
    right_wall: mpf
    U: MoebiusMap = field(repr=False)
    kappa: mpf
    centers: tuple = field(repr=False)
    radius: mpf = field(repr=False)

    kind = "schottky"
    n_cusps = 0
    anchor = FLARE0

    @property
    def parameter(self):
        return self.theta

    def generators_h(self):
        return [self.rot_h, self.d1r_h]

    def generators_disk(self):
        return [self.rot_disk, self.d1r_disk]

    def reflect_circles(self, w: mpc):
        """Reflect through whichever circle contains w until none does."""
        rho2 = self.radius * self.radius
        moves = 0
        while True:
            for c in self.centers:
                d = w - c
                if d.real * d.real + d.imag * d.imag < rho2:
                    w = c + rho2 / mp.conj(d)
                    moves += 1
                    break
            else:
                return w, moves
            if moves > MOVE_CAP:
                raise NonTerminationError("Schottky pullback exceeded its move cap", _MODULE, w=w)

    def pullback_disk(self, w: mpc):
        """Reduce w into the cover's domain: the sector 0 <= arg w <= 2pi/3
        outside the circles. Circle reflections are followed by a rotation
        by a multiple of 2pi/3 and, when an odd number of reflections was
        used, the reflection in the line arg w = pi/3, so that the total
        motion is orientation preserving."""
        w, reflections = self.reflect_circles(w)
        moves = reflections
        if w == 0:
            return w, moves
        third = 2 * mp.pi / 3
        k = int(mp.floor(mp.arg(w) / third)) % 3
        if k:
            w = w * mp.expjpi(-mpf(2 * k) / 3)
            moves += 1
        if reflections % 2 == 1:
            w = self._snap_sector(mp.expjpi(mpf(2) / 3) * mp.conj(w))
            moves += 1
        return w, moves

    def _snap_sector(self, w: mpc) -> mpc:
        # rounding can leave w a hair outside the closed sector
        tol = boundary_tol()
        if w.imag < 0 and w.imag > -tol:
            return mpc(w.real, 0)
        return w

    def pullback_raw(self, z: mpc):
        w, n = self.pullback_disk(CAYLEY.act(z))
        return CAYLEY.inverse().act(w), n

    def in_disk_domain(self, w: mpc, cover: bool = True) -> bool:
        tol = boundary_tol()
        rho = self.radius
        if abs(w) >= 1:
            return False
        if any(abs(w - c) < rho - tol for c in self.centers):
            return False
        if not cover or abs(w) < tol:
            return True
        a = mp.arg(w)
        return -tol <= a <= 2 * mp.pi / 3 + tol

    def in_domain_raw(self, z: mpc) -> bool:
        return self.in_disk_domain(CAYLEY.act(z))

    def domain_box(self):
        cinv = CAYLEY.inverse()
        zs = [cinv.act(w) for w in self._boundary_samples(200)
              if abs(w) < 1 and self.in_disk_domain(w)]
        xs = [z.real for z in zs if z.imag > 0]
        ys = [z.imag for z in zs if z.imag > 0]
        return (min(xs), max(xs), mpf(0), max(ys))

    def _boundary_samples(self, samples: int) -> list:
        """Disk points along the two sector rays and the two circle arcs."""
        sec = 1 / mp.cos(self.theta / 2)
        w0 = sec - self.radius
        pts = []
        for j in range(samples + 1):
            u = w0 * j / samples
            pts.append(mpc(u, 0))
            pts.append(u * mp.expjpi(mpf(2) / 3))
        for c in self.centers[:1] + self.centers[1:2]:
            # arc of the circle at angle 0 and the one at angle 2pi/3 inside the sector
            base = mp.arg(-c)
            span = mp.pi / 2 - self.theta / 2
            for j in range(samples + 1):
                phi = base - span + 2 * span * j / samples
                pts.append(c + self.radius * mp.expj(phi))
        return pts

    def max_flare_angle(self, samples: int = 400) -> mpf:
        """Largest flare angle theta(U z) over the cover's fundamental domain.

        Scans the domain boundary (two rays and two circle arcs) in the disk.
        """
        cinv = CAYLEY.inverse()
        best = mpf(0)
        for w in self._boundary_samples(samples):
            if abs(w) >= 1 or not self.in_disk_domain(w):
                continue
            z = cinv.act(w)
            if z.imag <= 0:
                continue
            best = max(best, mp.arg(self.U.act(z)))
        return best


def schottky_new(theta, digits: int = 50) -> SchottkyCover:
    """Build the Schottky cover for arc angle theta in (0, 2pi/3) (radians)."""
    with mp.workdps(digits):
        theta = mpf(theta)
        if not (0 < theta < 2 * mp.pi / 3):
            raise DomainError("Schottky arc angle must lie in (0, 2pi/3)", _MODULE, theta=theta)
        h = theta / 2
        q = theta / 4
        csc_h, cot_h = 1 / mp.sin(h), mp.cot(h)
        rot_disk = MoebiusMap(mp.expjpi(mpf(1) / 3), 0, 0, mp.expjpi(-mpf(1) / 3))
        d2r_disk = MoebiusMap(1j * csc_h, -1j * cot_h, 1j * cot_h, -1j * csc_h)
        d1r_disk = rot_disk @ d2r_disk
        s3 = mp.sqrt(3)
        rot_h = MoebiusMap(mpf(1) / 2, s3 / 2, -s3 / 2, mpf(1) / 2)
        d2r_h = MoebiusMap(0, mp.cot(q), -mp.tan(q), 0)
        d1r_h = rot_h @ d2r_h
        z1, z2 = fixed_points(d1r_h)
        # endpoints of the circle R on the unit circle are e^{+-i theta/2};
        # C^-1(e^{i phi}) = -cot(phi/2). Keep the one between the fixed points.
        candidates = [-mp.cot(h / 2), mp.cot(h / 2)]
        inside = [c for c in candidates if z1 < c < z2]
        if len(inside) != 1:
            raise DomainError("could not locate the left end of R", _MODULE, theta=theta)
        t = inside[0]
        U = flare_conjugator(z1, z2, t)
        # right flare wall: lower endpoint of the circle at angle 2pi/3
        right = -mp.cot(mp.pi / 3 - h / 2)
        kappa = abs(U.act_boundary(right))
        rho = mp.tan(h)
        sec = 1 / mp.cos(h)
        centers = tuple(sec * mp.expjpi(mpf(2 * k) / 3) for k in range(3))
        g = SchottkyCover(
            theta=theta, digits=digits, rot_disk=rot_disk, d2r_disk=d2r_disk,
            d1r_disk=d1r_disk, rot_h=rot_h, d2r_h=d2r_h, d1r_h=d1r_h, z1=z1, z2=z2,
            t=t, right_wall=right, U=U, kappa=kappa, centers=centers, radius=rho,
        )
        _check_flare(g, d1r_h)
        tol = mpf(10) ** (-(digits - 5))
        if abs(mp.sqrt(kappa) + 1 / mp.sqrt(kappa) - abs(d1r_h.trace())) > tol:
            raise DomainError("trace identity failed for the Schottky flare", _MODULE, theta=theta)
        return g


def schottky_pullback(g: SchottkyCover, w: DPoint, cover: bool = False) -> PullbackResult:
    """Reduce a disk point by reflecting through the Schottky circles.

    With ``cover=False`` the result lies outside all three circles (the
    reflection group's domain). With ``cover=True`` it is further moved into
    the sector 0 <= arg <= 2pi/3 by orientation-preserving motions, which is
    the fundamental domain used by the solver.
    """
    with mp.workdps(g.digits):
        if cover:
            v, n = g.pullback_disk(w.w)
        else:
            v, n = g.reflect_circles(w.w)
        return PullbackResult(DPoint(v), n)


def in_fundamental_domain(g: GroupModel, z, cover: bool = True) -> bool:
    """Closed fundamental-domain membership with tolerance 10^-(digits/2)."""
    with mp.workdps(g.digits):
        if isinstance(g, HeckeGroup):
            if not isinstance(z, HPoint):
                raise DomainError("Hecke domain test needs an HPoint", _MODULE)
            return g.in_domain_raw(z.z)
        if isinstance(z, DPoint):
            return g.in_disk_domain(z.w, cover=cover)
        return g.in_disk_domain(CAYLEY.act(z.z), cover=cover)


def _check_flare(g: GroupModel, m: MoebiusMap) -> None:
    D = g.U @ m @ g.U.inverse()
    tol = mpf(10) ** (-(g.digits - 5))
    if abs(D.b) > tol or abs(D.c) > tol:
        raise DomainError("flare conjugator failed to diagonalize", _MODULE)
    if not g.kappa > 1:
        raise DomainError("flare width must exceed 1", _MODULE, kappa=g.kappa)


def make_group(kind: str, parameter, digits: int = 50) -> GroupModel:
    """Construct a group from its kind and parameter (r, or theta in degrees)."""
    if kind == "hecke":
        return hecke_new(parameter, digits)
    if kind == "schottky":
        with mp.workdps(digits):
            theta = mp.radians(mpf(parameter))
        return schottky_new(theta, digits)
    raise DomainError("unknown group kind", _MODULE, kind=kind)


__all__ = [
    "CUSP0", "FLARE0", "Expansion", "GroupModel", "HeckeGroup", "PullbackResult",
    "SchottkyCover", "flare_cutoff_angle", "hecke_new", "hecke_pullback",
    "in_fundamental_domain", "make_group", "schottky_new", "schottky_pullback",
    "apply", "cayley", "cayley_inv",
]
