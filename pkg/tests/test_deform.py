import mpmath as mp
import pytest

from mlrhp.deform import (factor_jumps, jump_T, jump_T_phase, jump_X, jump_Y, lens_decay_fit, lens_factor,
                          lens_region, nikishin_factor, to_T)
from mlrhp.model import full_Y
from conftest import quarter_model


@pytest.mark.parametrize("x", ["0.4", "2.5", "-0.3", "-0.9", "5.0", "-2.0"])
def test_T_jumps_take_phase_form(quarter, x):
    c, p, _ = quarter
    m = quarter_model(8)
    x = mp.mpf(x)
    A, B = jump_T(p, m, 8, x), jump_T_phase(p, m, 8, x)
    assert mp.mnorm(A - B, 1) / mp.mnorm(B, 1) < 1e-60


@pytest.mark.parametrize("x", ["0.4", "2.5", "-0.3", "-0.9"])
def test_factorisation_reassembles(quarter, x):
    _, p, _ = quarter
    m = quarter_model(8)
    x = mp.mpf(x)
    F = factor_jumps(p, m, 8, x)
    assert mp.mnorm(F.assemble() - jump_T_phase(p, m, 8, x), 1) < 1e-60


def test_nikishin_step_changes_the_jump_support():
    m = quarter_model(8)
    x = mp.mpf(2)
    X = mp.inverse(nikishin_factor(m, x, "-")) * jump_Y(m, x) * nikishin_factor(m, x, "+")
    assert mp.mnorm(X - jump_X(m, x), 1) < 1e-60
    with pytest.raises(ValueError):
        jump_Y(m, -1)


def test_T_tends_to_identity(quarter):
    c, p, _ = quarter
    m = quarter_model(8)
    T = to_T(lambda z, h=None: full_Y(m, z), p, m, 8)
    z = mp.mpc(0, 10 ** 4)
    Tz = T(z)
    assert mp.mnorm(Tz - mp.eye(3), 1) < 1e-2
    assert abs(mp.det(Tz) - 1) < 1e-40


def test_lens_regions(quarter):
    c, p, cs = quarter
    assert lens_region(cs, p, 1.5 + 0.05j) == ("Gamma", 1)
    assert lens_region(cs, p, -0.2 - 0.01j) == ("Delta", -1)
    assert lens_region(cs, p, 1.5 + 2j) is None
    m = quarter_model(8)
    z = mp.mpc("1.5", "0.05")
    assert mp.det(lens_factor(p, m, 8, "Gamma", z)) == 1


def test_lens_decay(quarter):
    c, p, cs = quarter
    r = lens_decay_fit(p, quarter_model, [8, 16, 24, 32], cs, 6)
    assert r["slope"] < 0 and r["r2"] > 0.99 and r["pass"]
