"""Evaluation of a solved eigenfunction and post-hoc consistency checks.

An ``Eigenfunction`` bundles a group, a spectral parameter and coefficient
vectors. It evaluates anywhere in the upper half-plane by pulling the point
back to the fundamental domain and summing the expansion that converges best
there. The checks test group invariance on fresh points, the eigen-equation
through a finite-difference Laplacian, and sign-definiteness on a grid.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from mpmath import mp, mpc, mpf

from .errors import DomainError
from .expansions import cusp_row, flare_row
from .geometry import HPoint
from .groups import Expansion, GroupModel
from .solver import REJECT, AdmissibilityConfig, admissible_expansions, ray_points_h

_MODULE = "eigenfunction"


@dataclass
class Eigenfunction:
    """f = sum of cusp and flare expansions with the given coefficients."""

    g: GroupModel
    s: mpf
    cusp_coeffs: tuple
    flare_coeffs: tuple
    adm: AdmissibilityConfig | None = None

    def __post_init__(self):
        self.s = mpf(self.s)
        self.cusp_coeffs = tuple(tuple(mpf(c) for c in v) for v in self.cusp_coeffs)
        self.flare_coeffs = tuple(tuple(mpf(c) for c in v) for v in self.flare_coeffs)
        if len(self.cusp_coeffs) != self.g.n_cusps or len(self.flare_coeffs) != self.g.n_flares:
            raise DomainError("coefficient blocks do not match the group", _MODULE)

    @property
    def lambda0(self) -> mpf:
        return self.s * (1 - self.s)

    @property
    def constant(self):
        """The constant value when f is the lambda = 0 constant function.

        That is the case at s = 1 when every coefficient other than the
        anchor's zeroth one vanishes; otherwise None.
        """
        if self.s != 1:
            return None
        a = self.g.anchor
        blocks = self.cusp_coeffs if a.kind == "cusp" else self.flare_coeffs
        anchor_value = blocks[a.index][0]
        rest = [c for b in self.cusp_coeffs + self.flare_coeffs for c in b]
        if sum(1 for c in rest if c != 0) == 1 and anchor_value != 0:
            return anchor_value
        return None

    def expansion(self, e: Expansion, z: mpc) -> mpf:
        """Value of the single expansion e at the complex point z."""
        if e.kind == "cusp":
            c = self.cusp_coeffs[e.index]
            x, y = self.g.cusp_coords(z, e.index)
            row = cusp_row(len(c) - 1, self.s, x, y)
        elif e.kind == "flare":
            c = self.flare_coeffs[e.index]
            rho, theta = self.g.flare_polar(z, e.index)
            row = flare_row(len(c) - 1, self.s, self.g.kappa, rho, theta)
        else:
            raise DomainError("cannot evaluate a rejected expansion", _MODULE)
        return mp.fdot(c, row)

    def best_expansion(self, z: mpc) -> Expansion:
        """The admissible expansion at z, or the one whose tail decays fastest.

        Tail ratios: e^{-2 pi y} for a cusp and e^{-2 pi (pi - theta)/log kappa}
        for a flare.
        """
        if self.adm is not None:
            cands = admissible_expansions(z, self.g, self.adm)
            if cands:
                return cands[0]
        best, rate = REJECT, -mp.inf
        for e in self.g.expansions():
            if e.kind == "cusp":
                r = 2 * mp.pi * self.g.cusp_coords(z, e.index)[1]
            else:
                theta = self.g.flare_polar(z, e.index)[1]
                r = 2 * mp.pi * (mp.pi - theta) / self.g.log_kappa
            if r > rate:
                best, rate = e, r
        return best

    def __call__(self, z) -> mpf:
        const = self.constant
        if const is not None:
            return const
        zc = z.z if isinstance(z, HPoint) else mpc(z)
        zp, _ = self.g.pullback_raw(zc)
        return self.expansion(self.best_expansion(zp), zp)


# --- checks -------------------------------------------------------------

@dataclass(frozen=True)
class CheckReport:
    name: str
    passed: bool
    value: mpf
    tolerance: mpf
    samples: int

    def as_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "value": mp.nstr(self.value, 6),
                "tolerance": mp.nstr(self.tolerance, 3), "samples": self.samples}


def fresh_points(f: Eigenfunction, count: int = 100, seed: int = 12345) -> list:
    """Points outside the fundamental domain whose own location and pullback
    both have an admissible expansion, drawn at random heights and angles.

    When the pullback admits more than one expansion, one different from
    the expansion used at z is chosen so that the check also ties the
    expansions to each other.
    """
    g, adm = f.g, f.adm
    rng = random.Random(seed)
    out = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > 50 * count:
            raise DomainError("could not draw enough admissible fresh points", _MODULE,
                              found=len(out))
        if g.n_cusps and rng.random() < 0.5:
            y = adm.y0 * (1 + mpf(rng.random()) / 5)
            z = mpc(mpf(rng.random()) / 2, y)
        else:
            phi = mpf(rng.uniform(0.6, 1.0)) * adm.alpha0
            rad = g.kappa ** (mpf(rng.random()) / 2)
            w = rad * mp.expj(phi)
            z = g.U.inverse().act(w)
        zp, word = g.pullback_raw(z)
        if word == 0:
            continue
        a = admissible_expansions(z, g, adm)
        b = admissible_expansions(zp, g, adm)
        if a and b:
            other = [e for e in b if e != a[0]]
            out.append((z, zp, a[0], other[0] if other else b[0]))
    return out


def invariance_check(f: Eigenfunction, count: int = 100, digits: int | None = None,
                     seed: int = 12345) -> CheckReport:
    """max |f(z) - f(pullback z)| / max(1, |f(z)|) on fresh points."""
    digits = f.g.digits if digits is None else digits
    with mp.workdps(f.g.digits):
        tol = mpf(10) ** (-mpf(digits) / 3)
        worst = mpf(0)
        pts = fresh_points(f, count, seed)
        for z, zp, a, b in pts:
            fz = f.expansion(a, z)
            err = abs(fz - f.expansion(b, zp)) / max(1, abs(fz))
            worst = max(worst, err)
        return CheckReport("invariance", worst < tol, worst, tol, len(pts))


def hyperbolic_laplacian_fd(func, z: mpc, h) -> mpf:
    """-y^2 (f_xx + f_yy) by the five-point second-order stencil."""
    h = mpf(h)
    c = func(z)
    lap = (func(z + h) + func(z - h) + func(z + 1j * h) + func(z - 1j * h) - 4 * c) / (h * h)
    return -(z.imag ** 2) * lap


def interior_points(f: Eigenfunction, count: int = 20) -> list:
    """Points of the fundamental domain well inside an admissible region."""
    g = f.g
    out = []
    if g.n_cusps:
        for j in range(count // 2):
            out.append(mpc(mpf(j + 1) / (count // 2 + 1), f.adm.y0 + mpf(1) / 5 + mpf(j) / 50))
    k = count - len(out)
    for j in range(k):
        phi = f.adm.alpha0 * (mpf(1) / 3 + mpf(j) / (2 * k))
        out.append(ray_points_h(g, phi, 1)[0].z)
    return out


def laplacian_check(f: Eigenfunction, count: int = 20, h="1e-4",
                    tol="1e-6") -> CheckReport:
    """||Delta f - lambda0 f|| / ||lambda0 f|| over interior points.

    Each stencil uses the single expansion chosen at its centre, so the
    five samples come from the same smooth function.
    """
    with mp.workdps(f.g.digits):
        h, tol = mpf(h), mpf(tol)
        lam = f.lambda0
        num, den = [], []
        pts = interior_points(f, count)
        for z in pts:
            e = f.best_expansion(z)
            val = f.expansion(e, z)
            lap = hyperbolic_laplacian_fd(lambda w: f.expansion(e, w), z, h)
            num.append(lap - lam * val)
            den.append(lam * val)
        if lam == 0:
            rel = mp.norm(num)
        else:
            rel = mp.norm(num) / mp.norm(den)
        return CheckReport("laplacian", rel < tol, rel, tol, len(pts))


def domain_grid(g: GroupModel, n: int) -> list:
    """Cell centres of an n x n grid on the domain box, rows from the top.

    Returns a list of (x, y, inside) tuples.
    """
    x0, x1, y0, y1 = g.domain_box()
    out = []
    for i in range(n):
        y = y1 - (y1 - y0) * (i + mpf(1) / 2) / n
        for j in range(n):
            x = x0 + (x1 - x0) * (j + mpf(1) / 2) / n
            out.append((x, y, g.in_domain_raw(mpc(x, y))))
    return out


def evaluate_grid(f: Eigenfunction, n: int, digits: int | None = None) -> list:
    """(x, y, inside, value) over the domain grid; every point is pulled back."""
    with mp.workdps(digits or f.g.digits):
        return [(x, y, inside, f(mpc(x, y))) for x, y, inside in domain_grid(f.g, n)]


def positivity_check(f: Eigenfunction, n: int = 50, tol="1e-6",
                     digits: int | None = None, values: Sequence | None = None) -> CheckReport:
    """min f over the in-domain grid points must be >= -tol."""
    tol = mpf(tol)
    if values is None:
        values = evaluate_grid(f, n, digits)
    inside = [v for _, _, ok, v in values if ok]
    low = min(inside) if inside else mpf(0)
    return CheckReport("positivity", low >= -tol, low, tol, len(inside))
