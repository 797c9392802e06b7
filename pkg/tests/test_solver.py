from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp, mpc, mpf

from flaremaass.errors import ConditioningError, ConfigurationError, CoverageError
from flaremaass.geometry import HPoint
from flaremaass.groups import Expansion, hecke_new, make_group
from flaremaass.solver import (
    REJECT,
    AdmissibilityConfig,
    TestPoint,
    build_system,
    classify,
    default_settings,
    gen_horocycle_points,
    gen_ray_points,
    make_test_points,
    planted_rhs,
    point_set,
    ray_points_h,
    solve_ls,
)
from planting import planted_vector, rel_err

CUSP = Expansion("cusp", 0)
FLARE = Expansion("flare", 0)


@pytest.fixture(scope="module")
def hecke():
    return hecke_new("0.35", 30)


@pytest.fixture(scope="module")
def hecke_setup(hecke):
    with mp.workdps(30):
        st_ = default_settings(hecke)
        return hecke, st_, point_set(hecke, st_, 0)


def float_word_length(z, r):
    """Independent double-precision Hecke reduction counting generator moves."""
    if 0 <= z.real <= 1 and abs(z) >= r and abs(z - 1) >= r:
        return 0
    m = 0
    while True:
        k = int((z.real + 0.5) // 1)
        if k:
            z -= k
            m += abs(k)
        if abs(z) < r:
            z = -r * r / z
            m += 1
        else:
            break
    if z.real < 0:
        z += 1
        m += 1
    return m


# --- point generators -------------------------------------------------------

def test_horocycle_single_point(hecke):
    assert gen_horocycle_points(hecke, "0.3", 1) == [HPoint("0.25", "0.3")]


@given(st.integers(min_value=1, max_value=60), st.floats(min_value=0.01, max_value=3))
def test_horocycle_points_share_height(count, y):
    pts = gen_horocycle_points(None, y, count)
    assert len(pts) == count
    assert all(p.y == mpf(y) for p in pts)
    assert all(0 < p.x < mpf(1) / 2 for p in pts)


def test_horocycle_rejects_bad_input(hecke):
    with pytest.raises(ConfigurationError):
        gen_horocycle_points(hecke, 0, 5)
    with pytest.raises(ConfigurationError):
        gen_horocycle_points(hecke, "0.3", 0)


def test_horocycle_word_lengths_match_float_oracle(hecke):
    with mp.workdps(30):
        pts = gen_horocycle_points(hecke, "0.3", 100)
        got = Counter(hecke.pullback_raw(p.z)[1] for p in pts)
    want = Counter(float_word_length(complex(p.z), 0.35) for p in pts)
    assert got == want
    # at this height a point is either in the domain already or one inversion
    # plus one translation away from it
    assert got == Counter({0: 64, 2: 36})


def test_low_horocycles_spread_over_more_words(hecke):
    distinct = []
    with mp.workdps(30):
        for y in ("0.3", "0.1", "0.03", "0.01"):
            pts = gen_horocycle_points(hecke, y, 100)
            distinct.append(len({hecke.pullback_raw(p.z)[1] for p in pts}))
    assert distinct == sorted(distinct)
    assert distinct[-1] >= 7


def test_ray_single_point_and_log_spacing():
    kappa = mpf(6)
    (p,) = gen_ray_points(kappa, "2.2", 1)
    assert abs(p.r - mp.sqrt(kappa)) < mpf(10) ** -45 and p.theta == mpf("2.2")
    pts = gen_ray_points(kappa, "2.2", 7)
    gaps = [mp.log(b.r) - mp.log(a.r) for a, b in zip(pts, pts[1:])]
    assert all(abs(gap - mp.log(kappa) / 14) < mpf(10) ** -45 for gap in gaps)
    assert mp.log(pts[0].r) - mp.log(kappa) / 14 < mpf(10) ** -45


def test_ray_rejects_bad_angle():
    with pytest.raises(ConfigurationError):
        gen_ray_points(6, mp.pi, 3)
    with pytest.raises(ConfigurationError):
        gen_ray_points(6, 1, 0)


def test_schottky_ray_word_lengths():
    g = make_group("schottky", 90, 30)
    with mp.workdps(30):
        near = {g.pullback_raw(z.z)[1] for z in ray_points_h(g, 9 * mp.pi / 10, 100)}
        steep = {g.pullback_raw(z.z)[1]
                 for z in ray_points_h(g, mpf(9999) * mp.pi / 10000, 100)}
    assert near == {1, 3}
    assert len(steep) >= 5


# --- classification ---------------------------------------------------------

def test_classification_rules(hecke):
    cfg = AdmissibilityConfig("0.28", "2.3")
    with mp.workdps(30):
        assert classify(mpc("0.5", "2"), hecke, cfg) == CUSP
        assert classify(mpc("0.5", "0.3"), hecke, cfg) == FLARE
        assert classify(mpc("0.05", "0.05"), hecke, cfg) is REJECT


def test_admissibility_config_validation():
    with pytest.raises(ConfigurationError):
        AdmissibilityConfig(0, 1)
    with pytest.raises(ConfigurationError):
        AdmissibilityConfig(1, mp.pi)


def test_test_points_are_deterministic_and_well_formed(hecke_setup):
    g, st_, pts = hecke_setup
    with mp.workdps(30):
        again = point_set(g, st_, 0)
    assert pts == again
    for tp in pts:
        assert tp.side_z is not REJECT and tp.side_pullback is not REJECT
        if tp.interior:
            assert tp.side_z != tp.side_pullback and tp.z == tp.z_pullback
        else:
            assert tp.word_length > 0


# --- linear system ----------------------------------------------------------

def test_build_system_without_points(hecke):
    cfg = AdmissibilityConfig("0.28", "2.3")
    with pytest.raises(CoverageError):
        build_system(hecke, [], "0.7", cfg, 3, 3)


def test_build_system_underdetermined(hecke_setup):
    g, st_, pts = hecke_setup
    with pytest.raises(ConfigurationError):
        build_system(g, pts[:5], "0.7", st_.adm, st_.M_C, st_.M_F)


def test_build_system_missing_expansion(hecke):
    cfg = AdmissibilityConfig("0.28", "2.3")
    with mp.workdps(30):
        zs = [HPoint(mpf(j) / 40, 3) for j in range(1, 30)]
        pts = [TestPoint(z, z, CUSP, CUSP, True) for z in zs]
        with pytest.raises(CoverageError):
            build_system(hecke, pts, "0.7", cfg, 3, 3)


def test_schottky_system_has_folded_unknowns():
    g = make_group("schottky", 100, 30)
    with mp.workdps(30):
        st_ = default_settings(g)
        sysm = build_system(g, point_set(g, st_, 0), "0.6", st_.adm, st_.M_C, st_.M_F)
    assert sysm.n_cols == st_.M_F + 1
    assert sysm.anchor == 0


def test_degenerate_row_is_zero(hecke):
    cfg = AdmissibilityConfig("0.28", "2.3")
    with mp.workdps(30):
        z = HPoint("0.5", "0.4")
        same = TestPoint(z, z, FLARE, FLARE, True)
        cross = [TestPoint(HPoint(mpf(j) / 20, "0.4"), HPoint(mpf(j) / 20, "0.4"), CUSP, FLARE, True)
                 for j in range(1, 19)]
        sysm = build_system(hecke, [same] + cross, "0.7", cfg, 3, 3)
    assert all(v == 0 for v in sysm.rows[0])


# --- least squares -------------------------------------------------------------

@pytest.mark.parametrize("kind,param", [("hecke", "0.35"), ("schottky", 100)])
def test_planted_coefficients_recovered(kind, param):
    digits = 30
    g = make_group(kind, param, digits)
    with mp.workdps(digits):
        st_ = default_settings(g)
        pts = point_set(g, st_, 0)
        base = build_system(g, pts, "0.7", st_.adm, st_.M_C, st_.M_F)
        x = planted_vector(base)
        sysm = build_system(g, pts, "0.7", st_.adm, st_.M_C, st_.M_F, rhs=planted_rhs(base, x))
        out = solve_ls(sysm)
        assert out.vector()[base.anchor] == 1
        assert rel_err(out.vector(), x) < mpf(10) ** (-mpf(digits) / 2)
        assert out.residual < mpf(10) ** -(digits - 8)


def test_duplicate_rows_leave_solution_unchanged(hecke_setup):
    g, st_, pts = hecke_setup
    with mp.workdps(30):
        a = solve_ls(build_system(g, pts, "0.75", st_.adm, st_.M_C, st_.M_F))
        b = solve_ls(build_system(g, pts + pts, "0.75", st_.adm, st_.M_C, st_.M_F))
        assert rel_err(b.vector(), a.vector()) < mpf(10) ** -15
        assert a.cusp_coeffs[0][0] == 1 and b.cusp_coeffs[0][0] == 1


@settings(max_examples=8)
@given(st.floats(min_value=0.55, max_value=0.95))
def test_residual_is_residual_of_returned_vector(hecke_setup, s):
    g, st_, pts = hecke_setup
    with mp.workdps(30):
        sysm = build_system(g, pts, s, st_.adm, st_.M_C, st_.M_F)
        out = solve_ls(sysm)
        x = out.vector()
        r = mp.norm([mp.fdot(row, x) for row in sysm.rows])
        assert out.residual >= 0
        assert abs(r - out.residual) <= mpf(10) ** -20 * max(1, r)
        assert out.coefficient(CUSP, 0) == 1


def test_rank_deficient_system():
    g = hecke_new("0.35", 30)
    cfg = AdmissibilityConfig("0.28", "2.3")
    with mp.workdps(30):
        z = HPoint("0.3", "1")
        pts = [TestPoint(z, z, CUSP, FLARE, True)] * 20
        with pytest.raises(ConditioningError):
            solve_ls(build_system(g, pts, "0.7", cfg, 3, 3))
