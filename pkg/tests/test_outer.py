import mpmath as mp

from mlrhp.outer import (axis_continuity, build_sheet_matrix, central_jump, jump_residual, outer_N,
                         permutation_jump)
from conftest import quarter_model


def test_jump_relations(quarter, sheet8):
    c = quarter[0]
    m, sm = sheet8
    N = lambda z, h=None: outer_N(sm, z, h)
    r = jump_residual(N, c, m, 26)
    assert r["nodes"] >= 50 and r["max_residual"] < 1e-20
    assert jump_residual(N, c, m, 3, expected="perm")["max_residual"] > 1e-3
    assert axis_continuity(N, c) < 1e-20


def test_normalisation_and_determinant(quarter, sheet8):
    m, sm = sheet8
    z = mp.mpc(3000, 9500)
    assert mp.mnorm(outer_N(sm, z) - mp.eye(3), 1) < 1e-3
    for z in (mp.mpc(1, 1), mp.mpc(-0.5, -0.2), mp.mpc(4, 0.01)):
        assert abs(mp.det(outer_N(sm, z)) - 1) < 1e-45   # C is accurate to O(R^-2), R = 2^(prec/3)


def test_kappa_depends_only_on_exponents(quarter):
    c = quarter[0]
    a = build_sheet_matrix(c, quarter_model(8))
    b = build_sheet_matrix(c, quarter_model(16))
    assert max(abs(a.kappa[k] - b.kappa[k]) for k in a.kappa) < 1e-60


def test_central_jump_has_unit_determinant(sheet8):
    m, _ = sheet8
    J = central_jump("Delta", m, mp.mpf("-0.4"))
    assert abs(mp.det(J) - 1) < 1e-70
    assert mp.det(permutation_jump("Gamma")) == -1
