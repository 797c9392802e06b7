"""Test points, expansion selection, linear-system assembly and least squares.

A row of the system states that the eigenfunction takes the same value at a
test point z and at its pullback z* into the fundamental domain, each side
evaluated with the expansion chosen for that point. Points already inside
the domain that are admissible for two different expansions give a row
equating those two expansions at the point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from mpmath import mp, mpc, mpf

from .errors import ConditioningError, ConfigurationError, CoverageError, DomainError
from .expansions import cusp_row, flare_decay_angle, flare_row, scale_factor, truncation_order
from .geometry import HPoint, PolarPoint
from .groups import Expansion, GroupModel, HeckeGroup

_MODULE = "solver"


@dataclass(frozen=True)
class AdmissibilityConfig:
    """Cusp floor y0 (admissible if Im >= y0) and flare ceiling alpha0
    (admissible if the flare angle is <= alpha0)."""

    y0: mpf
    alpha0: mpf

    def __post_init__(self):
        object.__setattr__(self, "y0", mpf(self.y0))
        object.__setattr__(self, "alpha0", mpf(self.alpha0))
        if not self.y0 > 0:
            raise ConfigurationError("y0 must be positive", _MODULE, y0=self.y0)
        if not (0 < self.alpha0 < mp.pi):
            raise ConfigurationError("alpha0 must lie in (0, pi)", _MODULE, alpha0=self.alpha0)


REJECT = Expansion("rejected", -1)


@dataclass(frozen=True)
class TestPoint:
    """A point, its pullback and the expansion used on each side of its row."""

    __test__ = False  # not a pytest class

    z: HPoint
    z_pullback: HPoint
    side_z: Expansion
    side_pullback: Expansion
    interior: bool
    word_length: int = 0


# --- point generators ---------------------------------------------------

def gen_horocycle_points(g: GroupModel, Y, count: int) -> list[HPoint]:
    """Half a horocycle at height Y: x_j = (j - 1/2)/(2 count), j = 1..count."""
    if count < 1:
        raise ConfigurationError("point count must be positive", _MODULE, count=count)
    Y = mpf(Y)
    if not Y > 0:
        raise ConfigurationError("horocycle height must be positive", _MODULE, Y=Y)
    return [HPoint((j - mpf(1) / 2) / (2 * count), Y) for j in range(1, count + 1)]


def gen_ray_points(kappa, phi, count: int) -> list[PolarPoint]:
    """Ray points kappa^{j/(2 count)} e^{i phi}, j = 1..count (radii in (1, sqrt kappa])."""
    if count < 1:
        raise ConfigurationError("point count must be positive", _MODULE, count=count)
    phi = mpf(phi)
    if not (0 < phi < mp.pi):
        raise ConfigurationError("ray angle must lie in (0, pi)", _MODULE, phi=phi)
    kappa = mpf(kappa)
    return [PolarPoint(kappa ** (mpf(j) / (2 * count)), phi) for j in range(1, count + 1)]


def ray_points_h(g: GroupModel, phi, count: int) -> list[HPoint]:
    """Ray points in flare coordinates mapped back to the group's half-plane."""
    Uinv = g.U.inverse()
    out = []
    for p in gen_ray_points(g.kappa, phi, count):
        w = mpc(p.r * mp.cos(p.theta), p.r * mp.sin(p.theta))
        out.append(HPoint.from_complex(Uinv.act(w)))
    return out


# --- classification -----------------------------------------------------

def admissible_expansions(z, g: GroupModel, cfg: AdmissibilityConfig) -> list[Expansion]:
    """Admissible expansions at z in order of preference.

    Flares come first (smallest flare angle first), then cusps (largest
    height first).
    """
    zc = z.z if isinstance(z, HPoint) else mpc(z)
    flares = []
    for j in range(g.n_flares):
        _, theta = g.flare_polar(zc, j)
        if theta <= cfg.alpha0:
            flares.append((theta, Expansion("flare", j)))
    cusps = []
    for i in range(g.n_cusps):
        _, y = g.cusp_coords(zc, i)
        if y >= cfg.y0:
            cusps.append((-y, Expansion("cusp", i)))
    flares.sort(key=lambda t: (t[0], t[1].index))
    cusps.sort(key=lambda t: (t[0], t[1].index))
    return [e for _, e in flares] + [e for _, e in cusps]


def classify(z, g: GroupModel, cfg: AdmissibilityConfig) -> Expansion:
    """Choose one expansion for z, or REJECT when none is admissible.

    A sole admissible expansion wins; when cusps and flares are both
    admissible a flare is used; among flares the smallest angle wins and
    among cusps the largest height.
    """
    cands = admissible_expansions(z, g, cfg)
    return cands[0] if cands else REJECT


def make_test_points(g: GroupModel, zs: Sequence[HPoint], cfg: AdmissibilityConfig) -> list[TestPoint]:
    """Pull back and classify points; drop rejected and degenerate ones."""
    out = []
    with mp.workdps(g.digits):
        for z in zs:
            zp, word = g.pullback_raw(z.z)
            if word == 0:
                cands = admissible_expansions(z, g, cfg)
                if len(cands) >= 2:
                    out.append(TestPoint(z, z, cands[0], cands[1], True, 0))
                continue
            a = classify(z, g, cfg)
            b = classify(zp, g, cfg)
            if a is REJECT or b is REJECT:
                continue
            out.append(TestPoint(z, HPoint.from_complex(zp), a, b, False, word))
    return out


# --- settings -----------------------------------------------------------

@dataclass(frozen=True)
class SolverSettings:
    """Everything that fixes the linear systems apart from s."""

    adm: AdmissibilityConfig
    M_C: int
    M_F: int
    horocycle_y: tuple = ()
    ray_angle: tuple = ()
    n_horocycle: int = 0
    n_ray: int = 0

    def n_columns(self, g: GroupModel) -> int:
        return g.n_cusps * (self.M_C + 1) + g.n_flares * (self.M_F + 1)


# kept as strings so they are parsed at the working precision
HECKE_Y0 = "0.28"
HECKE_ALPHA0 = "2.3"
HECKE_HOROCYCLES = ("0.3", "0.29")
HECKE_RAYS = ("2.2", "2.15")


def default_eps(digits: int) -> mpf:
    """Truncation target: two orders below the invariance tolerance 10^-(digits/3)."""
    return mpf(10) ** (-(mpf(digits) / 3 + 2))


def schottky_ray_angles(g) -> tuple:
    """Ray angles just outside the cover's domain in flare coordinates."""
    tmax = g.max_flare_angle()
    gap = mp.pi - tmax
    phi1 = tmax + gap / 6
    return (phi1, phi1 - gap / 24)


def default_settings(g: GroupModel, eps=None, y0=None, alpha0=None, M_C=None, M_F=None,
                     horocycle_y=None, ray_angle=None, points=None, row_factor=2.5) -> SolverSettings:
    """Fill in unset solver parameters from the group and working precision."""
    with mp.workdps(g.digits):
        eps = default_eps(g.digits) if eps is None else mpf(eps)
        if isinstance(g, HeckeGroup):
            y0 = mpf(HECKE_Y0 if y0 is None else y0)
            rays = _pair(HECKE_RAYS if ray_angle is None else ray_angle, mpf("0.05"))
            horos = _pair(HECKE_HOROCYCLES if horocycle_y is None else horocycle_y, mpf("0.01"))
            alpha0 = mpf(HECKE_ALPHA0 if alpha0 is None else alpha0)
        else:
            y0 = mpf(1) if y0 is None else mpf(y0)
            rays = schottky_ray_angles(g) if ray_angle is None else _pair(ray_angle, mpf("0.05"))
            horos = ()
            if alpha0 is None:
                alpha0 = max(rays) + (mp.pi - max(rays)) / 20
            alpha0 = mpf(alpha0)
        adm = AdmissibilityConfig(y0, alpha0)
        s_est = mpf(1)
        if M_C is None:
            M_C = truncation_order("cusp", eps, y0, s=s_est) if g.n_cusps else 0
        if M_F is None:
            M_F = truncation_order("flare", eps, flare_decay_angle(alpha0), g.kappa, s_est)
        n_cols = g.n_cusps * (M_C + 1) + g.n_flares * (M_F + 1)
        if points is None:
            points = int(math.ceil(row_factor * n_cols))
        if isinstance(g, HeckeGroup):
            n_h = (points + 1) // 2
            n_r = points - n_h
        else:
            n_h, n_r = 0, points
        return SolverSettings(adm, int(M_C), int(M_F), tuple(horos), tuple(rays), n_h, n_r)


def _pair(v, offset) -> tuple:
    if isinstance(v, (tuple, list)):
        return tuple(mpf(x) for x in v)
    v = mpf(v)
    return (v, v - offset)


def point_set(g: GroupModel, st: SolverSettings, which: int) -> list[TestPoint]:
    """Test points of set ``which`` (0 or 1): a horocycle plus a ray for Hecke
    groups, a ray only for the Schottky cover."""
    with mp.workdps(g.digits):
        zs = []
        if st.horocycle_y and st.n_horocycle:
            zs += gen_horocycle_points(g, st.horocycle_y[which], st.n_horocycle)
        if st.ray_angle and st.n_ray:
            zs += ray_points_h(g, st.ray_angle[which], st.n_ray)
        return make_test_points(g, zs, st.adm)


# --- linear system ------------------------------------------------------

@dataclass
class LinearSystem:
    """Rows A x = rhs over the folded coefficients; column ``anchor`` is pinned to 1."""

    s: mpf
    layout: list
    rows: list
    rhs: list
    anchor: int
    scales: list
    n_cusps: int
    n_flares: int
    M_C: int
    M_F: int

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def n_cols(self) -> int:
        return len(self.layout)


@dataclass(frozen=True)
class SolveOutput:
    cusp_coeffs: tuple
    flare_coeffs: tuple
    residual: mpf
    condition_estimate: mpf
    n_rows: int = 0
    scaled_column_norms: tuple = field(default=(), repr=False)

    def coefficient(self, e: Expansion, n: int) -> mpf:
        block = self.cusp_coeffs if e.kind == "cusp" else self.flare_coeffs
        return block[e.index][n]

    def vector(self) -> list:
        out = []
        for c in self.cusp_coeffs:
            out.extend(c)
        for c in self.flare_coeffs:
            out.extend(c)
        return out


def column_layout(g: GroupModel, M_C: int, M_F: int) -> list:
    cols = []
    for i in range(g.n_cusps):
        cols += [(Expansion("cusp", i), n) for n in range(M_C + 1)]
    for j in range(g.n_flares):
        cols += [(Expansion("flare", j), n) for n in range(M_F + 1)]
    return cols


def expansion_values(g: GroupModel, e: Expansion, z: HPoint, s, M_C: int, M_F: int) -> list:
    """Basis values of expansion e at z (length M_C+1 or M_F+1)."""
    zc = z.z
    if e.kind == "cusp":
        x, y = g.cusp_coords(zc, e.index)
        return cusp_row(M_C, s, x, y)
    if e.kind == "flare":
        rho, theta = g.flare_polar(zc, e.index)
        return flare_row(M_F, s, g.kappa, rho, theta)
    raise DomainError("cannot evaluate a rejected expansion", _MODULE)


def build_system(g: GroupModel, points: Sequence[TestPoint], s, cfg: AdmissibilityConfig,
                 M_C: int, M_F: int, rhs=None) -> LinearSystem:
    """Assemble one row per test point at spectral parameter s."""
    if not points:
        raise CoverageError("no usable test points", _MODULE)
    layout = column_layout(g, M_C, M_F)
    offsets = {}
    pos = 0
    for i in range(g.n_cusps):
        offsets[Expansion("cusp", i)] = pos
        pos += M_C + 1
    for j in range(g.n_flares):
        offsets[Expansion("flare", j)] = pos
        pos += M_F + 1
    n = len(layout)
    if len(points) < n:
        raise ConfigurationError(
            "system is not overdetermined", _MODULE, rows=len(points), unknowns=n - 1)
    with mp.workdps(g.digits):
        s = mpf(s)
        rows = []
        used = set()
        for tp in points:
            row = [mpf(0)] * n
            for sign, e, z in ((1, tp.side_z, tp.z), (-1, tp.side_pullback, tp.z_pullback)):
                vals = expansion_values(g, e, z, s, M_C, M_F)
                o = offsets[e]
                for k, v in enumerate(vals):
                    row[o + k] += v if sign > 0 else -v
                used.add(e)
            rows.append(row)
        for e in g.expansions():
            if e not in used:
                raise CoverageError("an expansion has no rows", _MODULE, expansion=str(e))
        alpha = flare_decay_angle(cfg.alpha0)
        scales = [scale_factor(e.kind, k, s, g.kappa, alpha) for e, k in layout]
        anchor = offsets[g.anchor]
        b = [mpf(0)] * len(rows) if rhs is None else [mpf(v) for v in rhs]
        return LinearSystem(s, layout, rows, b, anchor, scales, g.n_cusps, g.n_flares, M_C, M_F)


def householder_lstsq(A: list, b: list):
    """Least-squares solution of A x = b by Householder QR.

    A is a list of rows (m x n, m >= n). Returns (x, residual_norm, diag(R)).
    Raises ConditioningError when a pivot vanishes.
    """
    m = len(A)
    n = len(A[0])
    # work column-major for cache-friendly dot products
    cols = [[A[i][j] for i in range(m)] for j in range(n)]
    rhs = list(b)
    diag = []
    for j in range(n):
        v = cols[j]
        s2 = mp.fdot(v[j:], v[j:])
        alpha = mp.sqrt(s2)
        if alpha == 0:
            raise ConditioningError("zero column in least-squares system", _MODULE, column=j)
        if v[j] > 0:
            alpha = -alpha
        v0 = v[j] - alpha
        vnorm2 = s2 - v[j] * v[j] + v0 * v0
        if vnorm2 == 0:
            diag.append(alpha)
            continue
        beta = 2 / vnorm2
        tail = v[j + 1:]
        for k in range(j + 1, n):
            c = cols[k]
            y = (v0 * c[j] + mp.fdot(tail, c[j + 1:])) * beta
            if y:
                c[j] -= v0 * y
                for i in range(j + 1, m):
                    c[i] -= v[i] * y
        y = (v0 * rhs[j] + mp.fdot(tail, rhs[j + 1:])) * beta
        if y:
            rhs[j] -= v0 * y
            for i in range(j + 1, m):
                rhs[i] -= v[i] * y
        v[j] = alpha
        diag.append(alpha)
    x = [mpf(0)] * n
    for j in range(n - 1, -1, -1):
        acc = rhs[j] - mp.fdot([cols[k][j] for k in range(j + 1, n)], x[j + 1:])
        x[j] = acc / cols[j][j]
    resid = mp.sqrt(mp.fdot(rhs[n:], rhs[n:]))
    return x, resid, diag


def solve_ls(system: LinearSystem) -> SolveOutput:
    """Least-squares solve with the anchor coefficient pinned to 1.

    Columns are multiplied by their scale factors and then equilibrated to
    unit norm before a Householder QR at full working precision; the
    solution is mapped back to natural units.
    """
    m, n = system.n_rows, system.n_cols
    if m < n:
        raise ConfigurationError("system is not overdetermined", _MODULE, rows=m, unknowns=n - 1)
    a = system.anchor
    free = [j for j in range(n) if j != a]
    with mp.workprec(mp.prec + 20):
        b = [system.rhs[i] - system.rows[i][a] for i in range(m)]
        cols_scaled = []
        norms = []
        for j in free:
            sc = system.scales[j]
            col = [system.rows[i][j] * sc for i in range(m)]
            nrm = mp.sqrt(mp.fdot(col, col))
            if nrm == 0:
                raise ConditioningError("a coefficient has an all-zero column", _MODULE,
                                        column=str(system.layout[j]))
            cols_scaled.append(col)
            norms.append(nrm)
        A = [[cols_scaled[k][i] / norms[k] for k in range(len(free))] for i in range(m)]
        y, _, diag = householder_lstsq(A, b)
        dmax = max(abs(d) for d in diag)
        dmin = min(abs(d) for d in diag)
        cond = dmax / dmin if dmin else mp.inf
        if dmin <= dmax * mpf(10) ** (-(mp.dps - 10)):
            raise ConditioningError("least-squares system is numerically rank deficient",
                                    _MODULE, condition=mp.nstr(cond, 5))
        x = [mpf(0)] * n
        x[a] = mpf(1)
        for k, j in enumerate(free):
            x[j] = y[k] / norms[k] * system.scales[j]
        r = [mp.fdot(system.rows[i], x) - system.rhs[i] for i in range(m)]
        resid = mp.sqrt(mp.fdot(r, r))
    x = [+v for v in x]
    x[a] = mpf(1)
    cusp, flare = _split(system, x)
    return SolveOutput(cusp, flare, +resid, +cond, m, tuple(+v for v in norms))


def _split(system: LinearSystem, x: list):
    pos = 0
    cusp = []
    for _ in range(system.n_cusps):
        cusp.append(tuple(x[pos:pos + system.M_C + 1]))
        pos += system.M_C + 1
    flare = []
    for _ in range(system.n_flares):
        flare.append(tuple(x[pos:pos + system.M_F + 1]))
        pos += system.M_F + 1
    return tuple(cusp), tuple(flare)


def planted_rhs(system: LinearSystem, x_planted: Sequence) -> list:
    """Right-hand side that makes x_planted an exact solution of ``system``."""
    return [mp.fdot(row, x_planted) for row in system.rows]
