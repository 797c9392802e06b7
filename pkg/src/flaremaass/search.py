"""Search over the spectral parameter s for the base eigenvalue.

Two independent test-point sets give two least-squares solutions a1(s) and
a2(s). At an eigenvalue they agree, so the differences c_j(s) at a few
tracked coefficients vanish. The secant method drives them to zero; the grid
search minimises ||a1(s) - a2(s)|| by repeated zooming.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

from mpmath import mp, mpf

from .errors import DegenerateStepError, DomainError, NonConvergenceError
from .groups import GroupModel
from .solver import (
    LinearSystem,
    SolveOutput,
    SolverSettings,
    TestPoint,
    build_system,
    default_settings,
    planted_rhs,
    point_set,
    solve_ls,
)

_MODULE = "search"
log = logging.getLogger(__name__)


def hausdorff_from_s(s):
    """delta = s and lambda0 = s(1 - s) for s in (1/2, 1]."""
    s = mpf(s)
    if not (mpf(1) / 2 < s <= 1):
        raise DomainError("no square-integrable base eigenfunction unless 1/2 < s <= 1",
                          _MODULE, s=s)
    return s, s * (1 - s)


@dataclass(frozen=True)
class SearchConfig:
    """Start value, initial spread and stopping limits of the search."""

    s0: mpf
    delta0: mpf = mpf("0.01")
    ell: int = 4
    max_iters: int = 20
    grid_points: int = 9
    grid_levels: int = 40
    grid_retries: int = 4

    def __post_init__(self):
        object.__setattr__(self, "s0", mpf(self.s0))
        object.__setattr__(self, "delta0", mpf(self.delta0))
        half = mpf(1) / 2
        if not (half < self.s0 < 1 and half < self.s0 + self.delta0 < 1 and self.delta0 > 0):
            raise DomainError("s0 and s0 + delta0 must lie in (1/2, 1)", _MODULE,
                              s0=self.s0, delta0=self.delta0)
        if self.ell < 1:
            raise DomainError("need at least one tracked coefficient", _MODULE, ell=self.ell)


@dataclass
class SearchResult:
    s_final: mpf
    delta_hausdorff: mpf
    lambda0: mpf
    cusp_coeffs: tuple
    flare_coeffs: tuple
    iterations: int
    final_spread: mpf
    residuals: tuple
    method: str = "secant"
    trajectory: list = field(default_factory=list)
    outputs: tuple = field(default=(), repr=False)


class SpectralProblem:
    """A group with two fixed test-point sets; solves for coefficients at any s."""

    def __init__(self, g: GroupModel, settings: SolverSettings,
                 points: Sequence[Sequence[TestPoint]] | None = None):
        self.g = g
        self.settings = settings
        if points is None:
            points = (point_set(g, settings, 0), point_set(g, settings, 1))
        self.points = tuple(list(p) for p in points)

    @classmethod
    def default(cls, g: GroupModel, **kw) -> "SpectralProblem":
        return cls(g, default_settings(g, **kw))

    def tracked_indices(self, ell: int = 4) -> list[int]:
        """Flat column indices of the first ell non-anchor coefficients of the
        anchor's own expansion."""
        st = self.settings
        if self.g.anchor.kind == "cusp":
            base = self.g.anchor.index * (st.M_C + 1)
            top = st.M_C
        else:
            base = self.g.n_cusps * (st.M_C + 1) + self.g.anchor.index * (st.M_F + 1)
            top = st.M_F
        return [base + k for k in range(1, min(ell, top) + 1)]

    def system(self, which: int, s) -> LinearSystem:
        st = self.settings
        return build_system(self.g, self.points[which], s, st.adm, st.M_C, st.M_F)

    def solve(self, which: int, s) -> SolveOutput:
        with mp.workdps(self.g.digits):
            return solve_ls(self.system(which, s))


class PlantedProblem(SpectralProblem):
    """Synthetic eigenproblem with a known answer.

    The right-hand side of each point set's system is A_k(s*) x*, so at
    s = s* both sets recover x* exactly while elsewhere they disagree.
    """

    def __init__(self, g: GroupModel, settings: SolverSettings, s_star, x_star,
                 points=None):
        super().__init__(g, settings, points)
        with mp.workdps(g.digits):
            self.s_star = mpf(s_star)
            self.x_star = [mpf(v) for v in x_star]
            self.rhs = tuple(
                planted_rhs(super(PlantedProblem, self).system(k, self.s_star), self.x_star)
                for k in range(2)
            )

    def system(self, which: int, s) -> LinearSystem:
        st = self.settings
        return build_system(self.g, self.points[which], s, st.adm, st.M_C, st.M_F,
                            rhs=self.rhs[which])


def coeff_diff(problem: SpectralProblem, s, indices: Sequence[int]):
    """Differences a1(s)[i] - a2(s)[i] at the tracked indices, plus both solves."""
    o1 = problem.solve(0, s)
    o2 = problem.solve(1, s)
    v1, v2 = o1.vector(), o2.vector()
    return [v1[i] - v2[i] for i in indices], (o1, o2)


def secant_update(s, d, c_at_s: Sequence, c_at_sd: Sequence):
    """One secant step from the pair (s, s + d).

    Each tracked difference gives a root estimate
    t_j = (c_j(s)(s + d) - c_j(s + d) s) / (c_j(s) - c_j(s + d)).
    Returns the midpoint of the roots, the new spread 5 (t_max - t_min) and
    whether the spread failed to halve (no further improvement expected).
    """
    if len(c_at_s) != len(c_at_sd):
        raise DomainError("difference vectors differ in length", _MODULE)
    s, d = mpf(s), mpf(d)
    roots = []
    for a, b in zip(c_at_s, c_at_sd):
        a, b = mpf(a), mpf(b)
        if a == 0 and b == 0:
            roots.append(s)
            continue
        den = a - b
        if den == 0:
            continue
        roots.append((a * (s + d) - b * s) / den)
    if not roots:
        raise DegenerateStepError("all secant denominators vanished", _MODULE, s=s, d=d)
    lo, hi = min(roots), max(roots)
    d_new = 5 * (hi - lo)
    converged = d_new == 0 or d_new > d / 2
    return (lo + hi) / 2, d_new, converged


def _clamp(s, d):
    """Keep s and s + d inside (1/2 + 1e-6, 1]; report whether clamping happened."""
    lo = mpf(1) / 2 + mpf(10) ** -6
    hi = 1 - d
    if s < lo:
        return lo, True
    if s > hi:
        return hi, True
    return s, False


def secant_search(problem: SpectralProblem, cfg: SearchConfig,
                  progress: Callable | None = None) -> SearchResult:
    """Secant iteration on the tracked coefficient differences."""
    g = problem.g
    with mp.workdps(g.digits):
        idx = problem.tracked_indices(cfg.ell)
        s, d = cfg.s0, cfg.delta0
        floor = mpf(10) ** (-(g.digits - 5))
        trajectory = []
        degenerate = 0
        s_final = None
        for it in range(1, cfg.max_iters + 1):
            c0, _ = coeff_diff(problem, s, idx)
            c1, _ = coeff_diff(problem, s + d, idx)
            s_mid, d_new, converged = secant_update(s, d, c0, c1)
            trajectory.append({"iteration": it, "s": s, "spread": d, "s_next": s_mid,
                               "spread_next": d_new,
                               "max_diff": max(abs(c) for c in c0)})
            log.info("secant %d: s=%s d=%s -> %s", it, mp.nstr(s, 15), mp.nstr(d, 3),
                     mp.nstr(s_mid, 15))
            if progress:
                progress(trajectory[-1])
            half = mpf(1) / 2
            far = (abs(s_mid - s) > 2 * max(d, d_new) or d_new > cfg.delta0
                   or not (half < s_mid <= 1))
            if far:
                # a long step, a wide root spread or a root outside (1/2, 1]
                # means we are still far from the eigenvalue: keep iterating
                d_new = min(cfg.delta0, max(d_new, abs(s_mid - s) / 100))
            elif converged or d_new < floor:
                s_final = s_mid
                break
            s_next, clamped = _clamp(s_mid, d_new)
            degenerate = degenerate + 1 if clamped else 0
            if degenerate >= 2:
                raise DegenerateStepError("two consecutive clamped secant steps", _MODULE,
                                          s=s_mid)
            s, d = s_next, d_new
        if s_final is None:
            raise NonConvergenceError("secant search hit its iteration cap", _MODULE,
                                      trajectory=trajectory, max_iters=cfg.max_iters)
        return _finish(problem, s_final, len(trajectory), d_new, "secant", trajectory)


def _finish(problem, s_final, iterations, spread, method, trajectory) -> SearchResult:
    delta, lam = hausdorff_from_s(s_final)
    o1 = problem.solve(0, s_final)
    o2 = problem.solve(1, s_final)
    return SearchResult(
        s_final=s_final, delta_hausdorff=delta, lambda0=lam,
        cusp_coeffs=o1.cusp_coeffs, flare_coeffs=o1.flare_coeffs,
        iterations=iterations, final_spread=mpf(spread),
        residuals=(o1.residual, o2.residual), method=method,
        trajectory=trajectory, outputs=(o1, o2),
    )


def initial_guess(problem: SpectralProblem, lo="0.501", hi="0.99", n: int = 14,
                  ell: int = 1):
    """Coarse scan of the first tracked difference for a sign change.

    Returns a start value for the secant search: the linear-interpolation
    root inside the first bracketing subinterval, or the scan point where
    |c_1| is smallest if no sign change is seen. Running the scan on a
    low-precision copy of the problem is usually enough.
    """
    with mp.workdps(problem.g.digits):
        lo, hi = mpf(lo), mpf(hi)
        idx = problem.tracked_indices(ell)[:1]
        grid = [lo + (hi - lo) * k / (n - 1) for k in range(n)]
        vals = []
        for t in grid:
            c, _ = coeff_diff(problem, t, idx)
            vals.append(c[0])
            if len(vals) >= 2 and vals[-2] * vals[-1] <= 0:
                a, b = grid[len(vals) - 2], t
                fa, fb = vals[-2], vals[-1]
                return a if fa == fb else a - fa * (b - a) / (fb - fa)
        return grid[min(range(n), key=lambda k: abs(vals[k]))]


def coefficient_distance(problem: SpectralProblem, s) -> mpf:
    """||a1(s) - a2(s)||_2 over all coefficients."""
    o1 = problem.solve(0, s)
    o2 = problem.solve(1, s)
    return mp.sqrt(mp.fsum((a - b) ** 2 for a, b in zip(o1.vector(), o2.vector())))


def grid_minimize(f: Callable, center, half_width, n: int, max_levels: int = 40,
                  retries: int = 4, lo=None, hi=None, patience: int = 3):
    """Zooming grid search for the minimum of f.

    Each level evaluates n equally spaced points on [center - w, center + w],
    recentres on the argmin and shrinks w to one grid spacing. Stops when
    the minimum has failed to decrease on ``patience`` consecutive levels.
    An argmin on the grid edge widens the grid instead (at most ``retries``
    times).

    Returns (argmin, min value, final spacing, levels, trajectory).
    """
    center, w = mpf(center), mpf(half_width)
    cache = {}

    def val(t):
        key = mp.nstr(t, mp.dps)
        if key not in cache:
            cache[key] = f(t)
        return cache[key]

    if n <= 1:
        return center, val(center), mpf(0), 0, []
    best, best_val = None, mp.inf
    trajectory = []
    spacing = 2 * w / (n - 1)
    levels = 0
    stalls = 0
    while levels < max_levels:
        levels += 1
        spacing = 2 * w / (n - 1)
        grid = [center - w + k * spacing for k in range(n)]
        if lo is not None:
            grid = [max(t, lo) for t in grid]
        if hi is not None:
            grid = [min(t, hi) for t in grid]
        vals = [val(t) for t in grid]
        i = min(range(n), key=lambda k: vals[k])
        trajectory.append({"level": levels, "center": center, "half_width": w,
                           "argmin": grid[i], "min": vals[i]})
        edge = i in (0, n - 1)
        clipped = (lo is not None and grid[i] <= lo) or (hi is not None and grid[i] >= hi)
        if edge and not clipped and retries > 0:
            retries -= 1
            center, w = grid[i], 2 * w
            continue
        if vals[i] >= best_val:
            # the old argmin may simply be the closest point at this resolution:
            # refine in place a few times before declaring the noise floor
            stalls += 1
            if stalls >= patience:
                break
            w = spacing
            continue
        stalls = 0
        best, best_val = grid[i], vals[i]
        center, w = grid[i], spacing
    return best, best_val, spacing, levels, trajectory


def grid_search(problem: SpectralProblem, cfg: SearchConfig) -> SearchResult:
    """Zooming grid search on the L2 distance between the two solutions."""
    g = problem.g
    with mp.workdps(g.digits):
        lo = mpf(1) / 2 + mpf(10) ** -6
        best, _, spacing, levels, traj = grid_minimize(
            lambda t: coefficient_distance(problem, t),
            cfg.s0, cfg.delta0, cfg.grid_points, cfg.grid_levels, cfg.grid_retries,
            lo=lo, hi=mpf(1),
        )
        return _finish(problem, best, levels, spacing, "grid", traj)
