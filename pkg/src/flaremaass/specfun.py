"""Arbitrary-precision special functions for the cusp and flare expansions.

All functions work at the ambient mpmath precision (``mp.prec``). The hot
paths (the Legendre hypergeometric series and both Bessel-I series behind
K_nu) run in fixed-point integer arithmetic, which is several times faster
than summing mpf terms one by one.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass
from functools import lru_cache

from mpmath import mp, mpc, mpf
from mpmath.libmp import from_man_exp, to_fixed

from .errors import BoundaryError, ConvergenceError, DomainError, PoleError

_MODULE = "specfun"
_LOG2_10 = math.log2(10)
_GUARD = 20


@dataclass(frozen=True)
class Precision:
    """Working precision in significant decimal digits."""

    digits: int = 50

    def __post_init__(self):
        if int(self.digits) != self.digits or self.digits < 15:
            raise DomainError("precision must be an integer >= 15 digits", _MODULE, digits=self.digits)

    @contextmanager
    def active(self):
        with mp.workdps(self.digits):
            yield self


@contextmanager
def working_precision(digits: int):
    """Run a block at ``digits`` significant decimal digits."""
    with Precision(digits).active():
        yield


@dataclass(frozen=True)
class SpectralParams:
    """Spectral parameter s with nu = s - 1/2 and lambda = s(1 - s)."""

    s: mpf
    kappa: mpf

    def __post_init__(self):
        s = mpf(self.s)
        if not (mpf(1) / 2 < s <= 1):
            raise DomainError("s must lie in (1/2, 1]", _MODULE, s=s)
        if not mpf(self.kappa) > 1:
            raise DomainError("kappa must exceed 1", _MODULE, kappa=self.kappa)

    @property
    def nu(self) -> mpf:
        return mpf(self.s) - mpf(1) / 2

    @property
    def lam(self) -> mpf:
        s = mpf(self.s)
        return s * (1 - s)

    def mu(self, n: int) -> mpc:
        return derive_mu(n, self.kappa)


def _target_bits() -> int:
    """Relative accuracy demanded of series: 10^-(digits+5)."""
    return int(math.ceil((mp.dps + 5) * _LOG2_10))


def _term_cap() -> int:
    return 100 * mp.dps


def _is_nonpositive_integer(x) -> bool:
    x = mp.mpmathify(x)
    if isinstance(x, mpc):
        if x.imag != 0:
            return False
        x = x.real
    return x <= 0 and x == mp.floor(x)


def gamma_fn(x) -> mpf:
    """Gamma function at a real argument."""
    x = mpf(x)
    if _is_nonpositive_integer(x):
        raise PoleError("Gamma has a pole at nonpositive integers", _MODULE, x=x)
    return mp.gamma(x)


def e_char(x) -> mpc:
    """Return e^{2 pi i x}; exact at multiples of 1/4."""
    x = mpf(x)
    return mpc(mp.cospi(2 * x), mp.sinpi(2 * x))


def derive_mu(n: int, kappa) -> mpc:
    """Degree mu_n = -1/2 + 2 pi i n / log(kappa) of the n-th flare mode."""
    kappa = mpf(kappa)
    if not kappa > 1:
        raise DomainError("kappa must exceed 1", _MODULE, kappa=kappa)
    return mpc(-mpf(1) / 2, 2 * mp.pi * n / mp.log(kappa))


def _hyp2f1_legendre(tau2, c, z) -> mpf:
    """2F1(1/2 + i tau, 1/2 - i tau; c; z) for real c > 0 and 0 <= z < 1.

    The Pochhammer pairs multiply to the positive reals (k + 1/2)^2 + tau^2,
    so every term is real and nonnegative and the sum can be accumulated in
    fixed point without cancellation.
    """
    rel = _target_bits()
    wp = mp.prec + _GUARD + 10
    one = 1 << wp
    T2 = to_fixed(mpf(tau2)._mpf_, wp)
    Z = to_fixed(mpf(z)._mpf_, wp)
    C = to_fixed(mpf(c)._mpf_, wp)
    t = one
    s = one
    # terms behave like z^k once k exceeds tau, hence the 1/(1 - z) allowance
    cap = _term_cap() + int((rel + 64) / (1 - float(z))) + int(mp.sqrt(tau2))
    for k in range(cap):
        A = (((2 * k + 1) ** 2) << (wp - 2)) + T2
        B = (k + 1) * (C + (k << wp))
        t = (t * ((A * Z) >> wp)) // B
        s += t
        if (t << rel) < s:
            # geometric tail estimate; later ratios never exceed max(current, z)
            rho = max((A * Z) // B, Z)
            if rho < one and ((t * rho) << rel) < s * (one - rho):
                return mpf(from_man_exp(s, -wp))
        if t == 0:
            return mpf(from_man_exp(s, -wp))
    raise ConvergenceError("hypergeometric series hit its term cap", _MODULE, cap=cap, z=z)


def _hyp2f1_series(a, b, c, z) -> mpc:
    """Plain complex series with a geometric-ratio tail test."""
    tol = mpf(2) ** (-_target_bits())
    cap = _term_cap()
    zabs = abs(z)
    t = mpc(1)
    s = mpc(1)
    biggest = mpf(1)
    for k in range(cap):
        t *= (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        s += t
        at = abs(t)
        if at > biggest:
            biggest = at
        if at == 0:
            return s, biggest
        rho = abs((a + k + 1) * (b + k + 1) / ((c + k + 1) * (k + 2)) * z)
        rho = max(rho, zabs)
        if rho < 1 and at * rho / (1 - rho) < tol * abs(s):
            return s, biggest
    raise ConvergenceError("hypergeometric series hit its term cap", _MODULE, cap=cap, z=z)


def hyp2f1(a, b, c, z):
    """Gauss hypergeometric function 2F1(a, b; c; z) for real |z| < 1.

    Complex parameters are allowed. Returns an mpf when every term is real
    (in particular for the conjugate pair a = 1/2 + i tau, b = 1/2 - i tau
    that defines the flare Legendre functions), otherwise an mpc.
    """
    a, b, c = mp.mpmathify(a), mp.mpmathify(b), mp.mpmathify(c)
    z = mpf(z)
    if _is_nonpositive_integer(c):
        raise DomainError("c is a pole of the hypergeometric series", _MODULE, c=c)
    if not abs(z) < 1:
        raise DomainError("hypergeometric series needs |z| < 1", _MODULE, z=z)
    if z == 0:
        return mpf(1)
    half = mpf(1) / 2
    if (
        mp.re(a) == half and mp.re(b) == half and mp.im(a) == -mp.im(b)
        and mp.im(c) == 0 and mp.re(c) > 0 and z > 0
    ):
        return _hyp2f1_legendre(mp.im(a) ** 2, mp.re(c), z)

    target = mp.prec
    extra = _GUARD
    while True:
        with mp.workprec(target + extra):
            s, biggest = _hyp2f1_series(a, b, c, z)
            loss = 0 if s == 0 else int(mp.log(biggest / abs(s), 2))
        if loss <= extra - 10 or extra > 4 * target:
            break
        extra = loss + _GUARD
    all_real = mp.im(a) == 0 and mp.im(b) == 0 and mp.im(c) == 0
    if all_real:
        return +mp.re(s)
    return +s


def _legendre_prefactor(nu, x):
    return ((1 + x) / (1 - x)) ** (-nu / 2) / mp.gamma(1 + nu)


def _check_legendre_args(nu, x):
    if not (0 <= nu <= mpf(1) / 2):
        raise DomainError("Legendre order nu must lie in [0, 1/2]", _MODULE, nu=nu)
    tol = mpf(10) ** (-(mp.dps // 2))
    if not (-1 < x < 1) or 1 - abs(x) < tol:
        raise BoundaryError("Legendre argument too close to +-1", _MODULE, x=x)


def legendre_P(nu, n: int, kappa, x) -> mpf:
    """P^{-nu}_{mu_n}(x) with mu_n = -1/2 + 2 pi i n / log(kappa).

    Computed from the hypergeometric definition
    P^{-nu}_mu(x) = ((1+x)/(1-x))^{-nu/2} 2F1(mu+1, -mu; 1+nu; (1-x)/2) / Gamma(1+nu).
    The value depends on n only through n^2, so n and -n agree exactly.
    """
    nu, x = mpf(nu), mpf(x)
    _check_legendre_args(nu, x)
    tau = 2 * mp.pi * abs(int(n)) / mp.log(mpf(kappa))
    return _legendre_prefactor(nu, x) * _hyp2f1_legendre(tau * tau, 1 + nu, (1 - x) / 2)


def legendre_P_many(nu, ns, kappa, x) -> list:
    """legendre_P for several mode numbers at one argument, sharing the prefactor."""
    nu, x = mpf(nu), mpf(x)
    _check_legendre_args(nu, x)
    pre = _legendre_prefactor(nu, x)
    step = 2 * mp.pi / mp.log(mpf(kappa))
    z = (1 - x) / 2
    c = 1 + nu
    return [pre * _hyp2f1_legendre((step * abs(int(n))) ** 2, c, z) for n in ns]


def legendre_P_complex(nu, n: int, kappa, x) -> mpc:
    """Unfolded evaluation through the generic complex series.

    Keeps the imaginary part instead of discarding it; used to check that
    the flare Legendre functions are real to working precision.
    """
    nu, x = mpf(nu), mpf(x)
    _check_legendre_args(nu, x)
    mu = derive_mu(n, kappa)
    a, b, c, z = mu + 1, -mu, 1 + nu, (1 - x) / 2
    with mp.workprec(mp.prec + _GUARD):
        s, _ = _hyp2f1_series(a, b, c, z)
        val = _legendre_prefactor(nu, x) * s
    return +val


# --- K-Bessel --------------------------------------------------------------

def _asymptotic_threshold(bits: int) -> float:
    """Argument above which the asymptotic series reaches 2^-bits."""
    return (bits + 16) * math.log(2) / 2 + 4


@lru_cache(maxsize=256)
def _nu_constants(nu_key, wp: int):
    with mp.workprec(wp):
        nu = mpf(nu_key)
        return (
            mp.gamma(1 - nu),
            mp.gamma(1 + nu),
            mp.pi / (2 * mp.sinpi(nu)),
        )


def _bessel_k_series(nu: mpf, x: mpf, bits: int) -> mpf:
    """K_nu via Bessel-I power series at boosted precision.

    The I series grow like e^x while K decays like e^-x, so 2x/log 2 extra
    bits absorb the cancellation. Small nu loses a further -log2(sin pi nu)
    bits in pi/(2 sin pi nu) (I_-nu - I_nu).
    """
    extra = int(2 * float(x) / math.log(2)) + _GUARD
    if nu != 0:
        extra += max(0, int(-math.log2(float(mp.sinpi(nu))))) + 4
    wp = ((bits + extra) // 64 + 1) * 64
    one = 1 << wp
    with mp.workprec(wp):
        h = x / 2
        Q = to_fixed((h * h)._mpf_, wp)
        half_x = float(h)
        cap = 100 * mp.dps + int(4 * half_x)
        if nu == 0:
            t = one
            s0 = one
            sh = 0
            harm = 0
            for k in range(1, cap):
                t = ((t * Q) >> wp) // (k * k)
                harm += one // k
                s0 += t
                sh += (t * harm) >> wp
                if k > half_x and t < 4:
                    break
            else:
                raise ConvergenceError("K_0 series hit its term cap", _MODULE, x=x)
            I0 = mpf(from_man_exp(s0, -wp))
            S = mpf(from_man_exp(sh, -wp))
            val = -(mp.log(h) + mp.euler) * I0 + S
        else:
            g_minus, g_plus, factor = _nu_constants(nu._mpf_, wp)
            NU = to_fixed(nu._mpf_, wp)
            tm = tp = one
            sm = sp = one
            for k in range(cap):
                kk = (k + 1) << wp
                tm = (tm * Q) // ((k + 1) * (kk - NU))
                tp = (tp * Q) // ((k + 1) * (kk + NU))
                sm += tm
                sp += tp
                if k + 1 > half_x and tm < 4:
                    break
            else:
                raise ConvergenceError("K_nu series hit its term cap", _MODULE, x=x)
            Sm = mpf(from_man_exp(sm, -wp))
            Sp = mpf(from_man_exp(sp, -wp))
            hn = h ** nu
            val = factor * (Sm / (hn * g_minus) - Sp * hn / g_plus)
    return val


def _bessel_k_asymptotic(nu: mpf, x: mpf, bits: int):
    """Hankel asymptotic series; returns None if it stalls before 2^-bits.

    For real nu with |nu| <= 1/2 the terms alternate and the error is bounded
    by the first omitted term.
    """
    with mp.workprec(bits + _GUARD):
        tol = mpf(2) ** (-bits)
        mu4 = 4 * nu * nu
        t = mpf(1)
        s = mpf(1)
        prev = mpf(1)
        for k in range(1, 100 * mp.dps):
            t = t * (mu4 - (2 * k - 1) ** 2) / (8 * k * x)
            at = abs(t)
            if at < tol:
                return mp.sqrt(mp.pi / (2 * x)) * mp.exp(-x) * s
            if at > prev:
                return None
            prev = at
            s += t
    return None


def bessel_K(nu, x) -> mpf:
    """Modified Bessel function K_nu(x) for real nu in [0, 1/2] and x > 0.

    Small arguments use the Bessel-I power series; large arguments use the
    asymptotic expansion. The switch point is where the asymptotic series
    can first reach working precision, so both branches agree there.
    """
    nu, x = abs(mpf(nu)), mpf(x)
    if not x > 0:
        raise DomainError("K-Bessel needs x > 0", _MODULE, x=x)
    if nu > mpf(1) / 2:
        raise DomainError("K-Bessel order must lie in [0, 1/2]", _MODULE, nu=nu)
    bits = mp.prec + 10
    if x > _asymptotic_threshold(bits):
        val = _bessel_k_asymptotic(nu, x, bits)
        if val is not None:
            return +val
    return +_bessel_k_series(nu, x, bits)
