import pytest
from hypothesis import given
from hypothesis import strategies as st
from mpmath import mp, mpc, mpf

from flaremaass.errors import BoundaryError, DomainError, PoleError
from flaremaass.specfun import (
    Precision,
    SpectralParams,
    bessel_K,
    derive_mu,
    e_char,
    gamma_fn,
    hyp2f1,
    legendre_P,
    legendre_P_complex,
    legendre_P_many,
    working_precision,
)

TOL = mpf(10) ** -48

# Values frozen from mpmath's independent routines (legenp, besselk) at
# 80 digits.
LEGENDRE_0267_1 = "1.33888587766694684173761412746436104013992384969142544499872"
K_NU_2PI = "0.000921442000235806004802489831644397689226961951143445818136141"


def rel(a, b):
    return abs(a - b) / abs(b)


# --- precision and parameters ---------------------------------------------

def test_precision_minimum():
    with pytest.raises(DomainError):
        Precision(10)


def test_working_precision_restores():
    with working_precision(80):
        assert mp.dps == 80
    assert mp.dps == 50


def test_spectral_params():
    p = SpectralParams(mpf("0.75"), mpf(6))
    assert p.nu == mpf("0.25") and p.lam == mpf("0.1875")
    with pytest.raises(DomainError):
        SpectralParams(mpf("0.4"), mpf(6))
    with pytest.raises(DomainError):
        SpectralParams(mpf("0.75"), mpf(1))


# --- gamma ------------------------------------------------------------------

def test_gamma_examples():
    assert abs(gamma_fn(1) - 1) < TOL
    assert abs(gamma_fn(mpf(1) / 2) - mp.sqrt(mp.pi)) < TOL
    # Gamma(1.25) = Gamma(2.25)/1.25 = 0.25 Gamma(0.25) via the recurrence
    assert rel(gamma_fn(mpf("1.25")), mpf("0.25") * gamma_fn(mpf("0.25"))) < TOL


def test_gamma_pole():
    with pytest.raises(PoleError):
        gamma_fn(0)
    with pytest.raises(PoleError):
        gamma_fn(-3)


@given(st.floats(min_value=0.01, max_value=5))
def test_gamma_recurrence(x):
    x = mpf(x)
    assert rel(gamma_fn(x + 1), x * gamma_fn(x)) < mpf(10) ** -47


# --- hypergeometric ---------------------------------------------------------

def test_hyp2f1_at_zero():
    assert hyp2f1(mpf("0.3"), mpf("1.7"), mpf("2.2"), 0) == 1


def test_hyp2f1_log_identity():
    assert abs(hyp2f1(1, 1, 2, mpf(1) / 2) - 2 * mp.log(2)) < TOL


def test_hyp2f1_pole_in_c():
    with pytest.raises(DomainError):
        hyp2f1(1, 1, -2, mpf("0.5"))


def test_hyp2f1_legendre_pairing_is_real():
    mu = mpc(-mpf(1) / 2, mpf("1.3"))
    v = hyp2f1(mu + 1, -mu, 1 + mpf("0.2"), mpf("0.4"))
    assert not isinstance(v, mpc) or abs(v.imag) < TOL


@given(st.floats(min_value=-2, max_value=2), st.floats(min_value=-2, max_value=2),
       st.floats(min_value=0.3, max_value=3), st.floats(min_value=0, max_value=0.9))
def test_hyp2f1_doubled_precision_agrees(a, b, c, z):
    base = hyp2f1(a, b, c, z)
    with mp.workdps(100):
        ref = hyp2f1(a, b, c, z)
    assert abs(base - ref) <= mpf(10) ** -45 * max(1, abs(ref))


@given(st.floats(min_value=0, max_value=5), st.floats(min_value=0.5, max_value=1.5),
       st.floats(min_value=0, max_value=0.95))
def test_hyp2f1_matches_mpmath(tau, c, z):
    a = mpc(mpf(1) / 2, tau)
    ours = hyp2f1(a, mp.conj(a), c, z)
    ref = mp.hyp2f1(a, mp.conj(a), c, z)
    assert abs(ours - ref) <= mpf(10) ** -45 * max(1, abs(ref))


# --- mu and characters ------------------------------------------------------

def test_derive_mu():
    assert derive_mu(0, 6) == mpc(-0.5, 0)
    assert derive_mu(-3, 6) == mp.conj(derive_mu(3, 6))
    assert abs(derive_mu(1, mp.exp(2 * mp.pi)) - mpc(-0.5, 1)) < TOL


def test_e_char():
    assert e_char(0) == 1
    assert e_char(mpf(1) / 2) == -1
    assert e_char(mpf(1) / 4) == 1j


@given(st.floats(min_value=-10, max_value=10))
def test_e_char_unit_modulus(x):
    assert abs(abs(e_char(x)) - 1) < TOL


# --- Legendre ---------------------------------------------------------------

def test_legendre_at_x_one_limit():
    # (1 - x)/2 -> 0 makes the hypergeometric factor 1; with nu = 0 the prefactor is 1
    x = 1 - mpf(10) ** -20
    for n in (0, 1, 5):
        assert abs(legendre_P(0, n, 6, x) - 1) < mpf(10) ** -15


def test_legendre_frozen_value():
    assert rel(legendre_P(mpf("0.267"), 1, mpf("5.9965"), mp.cos(mpf("0.5"))),
               mpf(LEGENDRE_0267_1)) < mpf(10) ** -45


def test_legendre_doubled_precision_series_oracle():
    x = mp.cos(mpf("0.5"))
    v = legendre_P(mpf("0.267"), 1, mpf("5.9965"), x)
    with mp.workdps(100):
        nu, kappa = mpf("0.267"), mpf("5.9965")
        mu = derive_mu(1, kappa)
        z = (1 - x) / 2
        term, total, k = mpc(1), mpc(1), 0
        while abs(term) > mpf(10) ** -110:
            term *= (mu + 1 + k) * (-mu + k) / ((1 + nu + k) * (k + 1)) * z
            total += term
            k += 1
        ref = ((1 + x) / (1 - x)) ** (-nu / 2) / mp.gamma(1 + nu) * total
    assert abs(ref.imag) < mpf(10) ** -100
    assert rel(v, ref.real) < mpf(10) ** -45


def test_legendre_boundary():
    with pytest.raises(BoundaryError):
        legendre_P(mpf("0.2"), 1, 6, 1)
    with pytest.raises(BoundaryError):
        legendre_P(mpf("0.2"), 1, 6, -1)
    with pytest.raises(DomainError):
        legendre_P(mpf("0.7"), 1, 6, mpf("0.3"))


@given(st.floats(min_value=0, max_value=0.5), st.integers(min_value=0, max_value=12),
       st.floats(min_value=1.5, max_value=20), st.floats(min_value=-0.95, max_value=0.95))
def test_legendre_n_minus_n_symmetry(nu, n, kappa, x):
    assert legendre_P(nu, n, kappa, x) == legendre_P(nu, -n, kappa, x)


@given(st.floats(min_value=0, max_value=0.5), st.integers(min_value=0, max_value=8),
       st.floats(min_value=1.5, max_value=20), st.floats(min_value=-0.9, max_value=0.9))
def test_legendre_imaginary_part_negligible(nu, n, kappa, x):
    v = legendre_P_complex(nu, n, kappa, x)
    assert abs(mpc(v).imag) < mpf(10) ** -45 * max(1, abs(v))
    assert abs(mpc(v).real - legendre_P(nu, n, kappa, x)) < mpf(10) ** -44 * max(1, abs(v))


@given(st.floats(min_value=0, max_value=0.5), st.floats(min_value=1.5, max_value=20),
       st.floats(min_value=-0.9, max_value=0.9))
def test_legendre_many_matches_single(nu, kappa, x):
    many = legendre_P_many(nu, range(5), kappa, x)
    for n, v in enumerate(many):
        assert rel(v, legendre_P(nu, n, kappa, x)) < mpf(10) ** -48


@given(st.floats(min_value=0.01, max_value=0.5), st.integers(min_value=0, max_value=6),
       st.floats(min_value=2, max_value=10), st.floats(min_value=0.2, max_value=2.5))
def test_legendre_matches_mpmath(nu, n, kappa, theta):
    x = mp.cos(theta)
    ref = mp.legenp(derive_mu(n, kappa), -mpf(nu), x, type=2)
    assert rel(legendre_P(nu, n, kappa, x), ref.real) < mpf(10) ** -40


# --- K-Bessel ---------------------------------------------------------------

def k_half(x):
    return mp.sqrt(mp.pi / (2 * x)) * mp.exp(-x)


def test_bessel_k_half_examples():
    assert abs(bessel_K(mpf(1) / 2, 1) - mpf("0.4610685044")) < 1e-10
    assert rel(bessel_K(mpf(1) / 2, 2) / bessel_K(mpf(1) / 2, 1), mp.exp(-1) / mp.sqrt(2)) < TOL


def test_bessel_k_frozen_value():
    nu = mpf("0.767052417") - mpf(1) / 2
    assert rel(bessel_K(nu, 2 * mp.pi), mpf(K_NU_2PI)) < mpf(10) ** -45


def test_bessel_k_domain():
    with pytest.raises(DomainError):
        bessel_K(mpf("0.3"), 0)
    with pytest.raises(DomainError):
        bessel_K(mpf("0.7"), 1)


@pytest.mark.parametrize("digits", [20, 50, 80])
def test_bessel_k_half_closed_form_on_range(digits):
    with mp.workdps(digits):
        tol = mpf(10) ** -(digits - 1)
        for k in range(60):
            x = mpf("0.1") + (mpf(30) - mpf("0.1")) * k / 59
            assert rel(bessel_K(mpf(1) / 2, x), k_half(x)) < tol


@given(st.floats(min_value=0, max_value=0.5), st.floats(min_value=0.01, max_value=60))
def test_bessel_k_matches_mpmath(nu, x):
    with mp.workdps(80):
        ref = mp.besselk(mpf(nu), mpf(x))
    assert rel(bessel_K(nu, x), ref) < mpf(10) ** -47


@given(st.floats(min_value=0, max_value=0.5))
def test_bessel_k_positive_and_decreasing(nu):
    xs = [mpf(k) / 4 for k in range(1, 120)]
    vals = [bessel_K(nu, x) for x in xs]
    assert all(v > 0 for v in vals)
    assert all(a > b for a, b in zip(vals, vals[1:]))
