"""Truncated cusp and flare Fourier expansions in folded (real cosine) form.

Cusp (width 1 at infinity), with nu = s - 1/2:
    f(x + iy) = a_0 y^{1/2 - nu} + sum_{n>=1} a_n sqrt(y) K_nu(2 pi n y) cos(2 pi n x)

Flare (annulus 1 < |z| < kappa), in polar coordinates (r, theta):
    f = sum_{n>=0} b_n sqrt(sin theta) P^{-nu}_{mu_n}(cos theta) cos(2 pi n log r / log kappa)
with mu_n = -1/2 + 2 pi i n / log kappa.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from mpmath import mp, mpc, mpf

from .errors import ConfigurationError, DomainError
from .geometry import HPoint, PolarPoint
from .specfun import bessel_K, legendre_P_complex, legendre_P_many

_MODULE = "expansions"
MAX_ORDER = 400


@dataclass(frozen=True)
class CuspExpansion:
    s: mpf
    coeffs: tuple
    folded: bool = True

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(mpf(c) for c in self.coeffs))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1


@dataclass(frozen=True)
class FlareExpansion:
    s: mpf
    kappa: mpf
    coeffs: tuple
    folded: bool = True

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(mpf(c) for c in self.coeffs))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1


def cosines(alpha, count: int) -> list:
    """cos(n alpha) for n = 0..count-1 by the Chebyshev recurrence."""
    if count <= 0:
        return []
    c1 = mp.cos(alpha)
    out = [mpf(1), c1]
    for _ in range(2, count):
        out.append(2 * c1 * out[-1] - out[-2])
    return out[:count]


def cusp_basis(n: int, s, y) -> mpf:
    """W_n(y): y^{1/2 - nu} for n = 0 and sqrt(y) K_nu(2 pi n y) for n >= 1."""
    s, y = mpf(s), mpf(y)
    if not y > 0:
        raise DomainError("cusp basis needs y > 0", _MODULE, y=y)
    nu = s - mpf(1) / 2
    if n == 0:
        return y ** (mpf(1) / 2 - nu)
    return mp.sqrt(y) * bessel_K(nu, 2 * mp.pi * abs(n) * y)


def cusp_basis_vector(M: int, s, y) -> list:
    """W_0(y), ..., W_M(y)."""
    s, y = mpf(s), mpf(y)
    nu = s - mpf(1) / 2
    sy = mp.sqrt(y)
    twopiy = 2 * mp.pi * y
    out = [y ** (mpf(1) / 2 - nu)]
    out.extend(sy * bessel_K(nu, twopiy * n) for n in range(1, M + 1))
    return out


def flare_basis(n: int, s, kappa, theta) -> mpf:
    """sqrt(sin theta) P^{-nu}_{mu_n}(cos theta)."""
    return flare_basis_vector_at(s, kappa, theta, [n])[0]


def flare_basis_vector_at(s, kappa, theta, ns: Sequence[int]) -> list:
    s, theta = mpf(s), mpf(theta)
    if not (0 < theta < mp.pi):
        raise DomainError("flare basis needs 0 < theta < pi", _MODULE, theta=theta)
    nu = s - mpf(1) / 2
    root = mp.sqrt(mp.sin(theta))
    return [root * p for p in legendre_P_many(nu, ns, kappa, mp.cos(theta))]


def flare_basis_vector(M: int, s, kappa, theta) -> list:
    return flare_basis_vector_at(s, kappa, theta, range(M + 1))


def cusp_row(M: int, s, x, y) -> list:
    """Values W_n(y) cos(2 pi n x), n = 0..M."""
    W = cusp_basis_vector(M, s, y)
    C = cosines(2 * mp.pi * mpf(x), M + 1)
    return [w * c for w, c in zip(W, C)]


def flare_row(M: int, s, kappa, rho, theta) -> list:
    """Values sqrt(sin theta) P_n(cos theta) cos(2 pi n log rho / log kappa), n = 0..M."""
    kappa = mpf(kappa)
    V = flare_basis_vector(M, s, kappa, theta)
    C = cosines(2 * mp.pi * mp.log(mpf(rho)) / mp.log(kappa), M + 1)
    return [v * c for v, c in zip(V, C)]


def _dot(a, b) -> mpf:
    return mp.fsum(x * y for x, y in zip(a, b))


def eval_cusp(e: CuspExpansion, z: HPoint) -> mpf:
    """Folded cusp expansion at z."""
    if not e.folded:
        raise DomainError("only folded cusp expansions are evaluated", _MODULE)
    if all(c == 0 for c in e.coeffs):
        return mpf(0)
    return _dot(e.coeffs, cusp_row(e.order, e.s, z.x, z.y))


def eval_flare(e: FlareExpansion, p: PolarPoint) -> mpf:
    """Folded flare expansion at polar point p."""
    if not e.folded:
        raise DomainError("only folded flare expansions are evaluated", _MODULE)
    if all(c == 0 for c in e.coeffs):
        return mpf(0)
    return _dot(e.coeffs, flare_row(e.order, e.s, e.kappa, p.r, p.theta))


def eval_flare_unfolded(coeffs: dict, s, kappa, p: PolarPoint) -> mpc:
    """Two-sided flare series sum_n b_n sqrt(sin t) P^{-nu}_{mu_n}(cos t) e^{2 pi i n log r/log kappa}.

    Uses the generic complex hypergeometric series and keeps imaginary parts;
    with b_n = b_{-n} real it must agree with the folded evaluator.
    """
    s = mpf(s)
    nu = s - mpf(1) / 2
    lk = mp.log(mpf(kappa))
    root = mp.sqrt(mp.sin(p.theta))
    x = mp.cos(p.theta)
    total = mpc(0)
    for n, b in coeffs.items():
        phase = mp.expj(2 * mp.pi * n * mp.log(p.r) / lk)
        total += b * root * legendre_P_complex(nu, n, kappa, x) * phase
    return total


def eval_cusp_unfolded(coeffs: dict, s, z: HPoint) -> mpc:
    """Two-sided cusp series sum_n a_n W_|n|(y) e(n x)."""
    total = mpc(0)
    for n, a in coeffs.items():
        total += a * cusp_basis(abs(n), s, z.y) * mp.expj(2 * mp.pi * n * z.x)
    return total


def scale_factor(kind: str, n: int, s, kappa=None, alpha=None) -> mpf:
    """Expected size of the n-th coefficient, used to scale matrix columns.

    cusp: n^{s - 1/2}; flare: n^s e^{-pi n alpha / log kappa}; 1 for n = 0.
    """
    if n < 0:
        raise DomainError("scale factor needs n >= 0", _MODULE, n=n)
    if n == 0:
        return mpf(1)
    s = mpf(s)
    if kind == "cusp":
        return mpf(n) ** (s - mpf(1) / 2)
    if kind == "flare":
        return mpf(n) ** s * mp.exp(-mp.pi * n * mpf(alpha) / mp.log(mpf(kappa)))
    raise DomainError("unknown expansion kind", _MODULE, kind=kind)


def truncation_order(kind: str, target_eps, y0_or_alpha0, kappa=None, s=mpf(1),
                     cap: int = MAX_ORDER, minimum: int = 1) -> int:
    """Smallest M whose coefficient envelope at the admissibility edge is below eps.

    cusp: M^{s-1/2} e^{-2 pi M y0} < eps.
    flare: M^s e^{-pi M alpha0 / log kappa} < eps, where alpha0 is the decay
    angle of the envelope (see ``flare_decay_angle``).
    """
    eps = float(target_eps)
    if not (0 < eps <= 1):
        raise ConfigurationError("target eps must lie in (0, 1]", _MODULE, eps=eps)
    s = float(s)
    v = float(y0_or_alpha0)
    if v <= 0:
        raise ConfigurationError("admissibility parameter must be positive", _MODULE, value=v)
    log_eps = math.log(eps)
    for M in range(minimum, cap + 1):
        if kind == "cusp":
            env = (s - 0.5) * math.log(M) - 2 * math.pi * M * v
        elif kind == "flare":
            env = s * math.log(M) - math.pi * M * v / math.log(float(kappa))
        else:
            raise DomainError("unknown expansion kind", _MODULE, kind=kind)
        if env < log_eps:
            return M
    raise ConfigurationError("truncation order exceeds its cap", _MODULE, cap=cap, kind=kind)


def flare_decay_angle(alpha_admissible) -> mpf:
    """Decay angle of the flare-term envelope at an admissible angle.

    Coefficients decay like e^{-pi tau_n} and the basis grows like
    e^{tau_n theta} with tau_n = 2 pi n / log kappa, so terms at
    theta <= alpha behave as e^{-pi n (2(pi - alpha)) / log kappa}.
    """
    return 2 * (mp.pi - mpf(alpha_admissible))
