import math

import mpmath as mp
import pytest

from mlrhp import curve as cv


def test_preset_geometry(quarter):
    c, p, cs = quarter
    assert abs(c.x0 - mp.mpf("3.5650323971815167666889")) < 1e-20
    assert abs(c.xi_star + mp.mpf("1.0650323971815167666889")) < 1e-20
    k, roots = c.branch_points()
    assert k >= 1
    assert cv.validate_curve(c)
    sym = cv.load_preset("laguerre_symmetric")
    assert sym.x0 == mp.mpf(27) / 8 and sym.symmetric


def test_cubic_is_satisfied_by_every_branch(quarter):
    c = quarter[0]
    for z in (mp.mpc(1, 1), mp.mpc(-2, 0.3), mp.mpc(5, -0.1)):
        for t in cv.branches_at(c, z):
            assert abs(c.F(t, z)) < mp.mpf(10) ** -60


def test_sheet_labels_at_infinity(quarter):
    c = quarter[0]
    z = mp.mpc(0, 10 ** 6)
    t = cv.branches_at(c, z)
    assert abs(t[0] / z - 1) < 1e-5 and abs(t[1] - c.af) < 1e-5 and abs(t[2] - c.bf) < 1e-5


def test_monodromy(quarter):
    c = quarter[0]
    assert cv.monodromy(c, 0, 0.05) == (2, 0, 1)
    assert cv.monodromy(c, c.x0, 0.05) == (2, 1, 0)
    assert cv.monodromy(c, c.xi_star, 0.05) == (0, 2, 1)


def test_phase_structure_on_conductors(quarter):
    c, p, _ = quarter
    for x in (mp.mpf("0.7"), mp.mpf(2)):
        a, b = p.phi("Gamma", x, "+"), p.phi("Gamma", x, "-")
        assert abs(mp.re(a)) < 1e-60 and abs(a + b) < 1e-60
    x = mp.mpf("-0.5")
    a, b = p.phi("Delta", x, "+"), p.phi("Delta", x, "-")
    assert abs(mp.re(a)) < 1e-60 and abs(a + b) < 1e-60
    assert mp.re(p.phi("Gamma", c.x0 + 1)) < 0
    assert mp.re(p.phi("Delta", c.xi_star - 1)) < 0


def test_sign_chart(quarter):
    _, p, cs = quarter
    r = cv.sign_chart_check(p, cs, 20)
    assert r["pass"] and r["lip_min_re_phi"] > 0


def test_contour_regions(quarter):
    c, p, cs = quarter
    assert cs.region(complex(c.x0) + 0.1j) == "Ux0"
    assert cs.region(0.05j) == "U0"
    assert cs.region(5 + 5j) == "outer"
    with pytest.raises(ValueError):
        cv.build_contours(p, radius_x0=3.5)


def test_soft_coordinate_is_conformal(quarter):
    c, p, _ = quarter
    f = lambda z: cv.conf_coord_soft(p, z, "x0")
    h = mp.mpf(10) ** -6
    d1 = (f(c.x0 + h) - f(c.x0 - h)) / (2 * h)
    d2 = (f(c.x0 + 1j * h) - f(c.x0 - 1j * h)) / (2j * h)
    assert abs(d1) > 0.1 and abs(d1 - d2) < 1e-5
    v = f(c.x0 + mp.mpf("0.1"))
    assert mp.im(v) == 0 and mp.re(v) > 0


def test_hard_edge_coordinate_is_not_conformal(quarter):
    _, p, _ = quarter
    with pytest.raises(cv.ConformalityError):
        cv.conf_coord_hard(p, mp.mpc("0.1", "0.1"))


def test_density_mass_and_support():
    c = cv.load_preset("laguerre_symmetric")
    assert abs(cv.density_cdf(c, c.x0) - 1) < 1e-8
    assert cv.density(c, 4.0) == 0.0 and cv.density(c, 1.0) > 0
