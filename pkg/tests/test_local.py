import mpmath as mp
import pytest

from mlrhp.local import (SectorError, airy_model, airy_model_normalised, bessel_model, bessel_model_normalised,
                         build_P0, build_Px0, embed_channel, global_P, matching_sup)
from mlrhp.curve import ConformalityError
from mlrhp.outer import outer_N
from conftest import quarter_model
from mlrhp.outer import build_sheet_matrix

D = mp.mpf(10) ** -50


def _ray(r, ang):
    return r * mp.expj(ang - D), r * mp.expj(ang + D)


def test_airy_jumps():
    for r in (mp.mpf("0.8"), mp.mpf(6)):
        lo, hi = _ray(r, 0)
        assert mp.mnorm(airy_model(hi) - airy_model(lo) * mp.matrix([[1, 1], [0, 1]]), 1) < 1e-40
        lo, hi = _ray(r, 2 * mp.pi / 3)
        assert mp.mnorm(airy_model(lo) - airy_model(hi) * mp.matrix([[1, 0], [1, 1]]), 1) < 1e-40
        lo, hi = mp.mpc(-r, -D), mp.mpc(-r, D)
        assert mp.mnorm(airy_model(hi) - airy_model(lo) * mp.matrix([[0, 1], [-1, 0]]), 1) < 1e-40
        assert abs(mp.det(airy_model(mp.mpc(r, 1))) - 1) < 1e-60


def test_airy_asymptotics():
    for z in (mp.mpc(300, 40), mp.mpc(-200, 150), mp.mpc(50, -280)):
        dev = mp.mnorm(airy_model_normalised(z) - mp.eye(2), 1)
        assert dev < 0.3 * abs(z) ** -1.5
    with pytest.raises(SectorError):
        airy_model(0)


def test_bessel_jumps_and_asymptotics():
    al = mp.mpf("0.75")
    for r in (mp.mpf("0.7"), mp.mpf(5)):
        lo, hi = _ray(r, 2 * mp.pi / 3)
        J = mp.matrix([[1, 0], [mp.expjpi(al), 1]])
        assert mp.mnorm(bessel_model(lo, al) - bessel_model(hi, al) * J, 1) < 1e-40
        lo, hi = _ray(r, -2 * mp.pi / 3)
        J = mp.matrix([[1, 0], [mp.expjpi(-al), 1]])
        assert mp.mnorm(bessel_model(lo, al) - bessel_model(hi, al) * J, 1) < 1e-40
        assert mp.mnorm(bessel_model(mp.mpc(-r, D), al) - bessel_model(mp.mpc(-r, -D), al)
                        * mp.matrix([[0, 1], [-1, 0]]), 1) < 1e-40
        assert abs(mp.det(bessel_model(mp.mpc(r, 1), al)) - 1) < 1e-60
    for z in (mp.mpc(1e4, 1e3), mp.mpc(-1e4, 1e3)):
        assert mp.mnorm(bessel_model_normalised(z, al) - mp.eye(2), 1) < 0.02


def test_embedding():
    B = mp.matrix([[1, 2], [3, 7]])
    E = embed_channel(B, (3, 2))
    assert E[2, 2] == 1 and E[2, 1] == 2 and E[1, 2] == 3 and E[1, 1] == 7 and E[0, 0] == 1


@pytest.mark.parametrize("edge", ["x0", "xi"])
def test_soft_parametrix_matching_and_analytic_prefactor(quarter, edge):
    c, p, cs = quarter
    sups = []
    for n in (8, 16):
        m = quarter_model(n)
        sm = build_sheet_matrix(c, m)
        P = build_Px0(sm, p, n, edge)
        d = cs.disk("Ux0" if edge == "x0" else "Uxi")
        sups.append(matching_sup(P, sm, d.center, d.radius, 24))
    assert sups[1] < 0.75 * sups[0] and sups[0] < 1
    # E has no jump across the axis inside the disk
    ctr = c.x0 if edge == "x0" else c.xi_star
    for x in (ctr - mp.mpf("0.1"), ctr + mp.mpf("0.1")):
        assert mp.mnorm(P.E(x, "+") - P.E(x, "-"), 1) < 1e-40


def test_hard_parametrix_unavailable(quarter, sheet8):
    c, p, cs = quarter
    m, sm = sheet8
    with pytest.raises(ConformalityError):
        build_P0(sm, p, 8)
    with pytest.raises(KeyError):
        global_P(sm, cs, {}, 0.01j)
    assert global_P(sm, cs, {}, mp.mpc(5, 5)) == outer_N(sm, mp.mpc(5, 5))
