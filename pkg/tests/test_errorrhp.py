import numpy as np
import pytest

from mlrhp.errorrhp import (DivergenceError, JumpData, ParametrixUnavailable, assemble_WR, constant_jump_problem,
                            extract_R1, integral_equation_residual, reconstruct_R, solve_Rminus)
from mlrhp.local import build_Px0
from mlrhp.numerics import OrientedArc


@pytest.mark.parametrize("cw", [False, True])
def test_constant_jump_circle(cw):
    jd = constant_jump_problem(0.2, cw)
    Rm = solve_Rminus(jd)
    exact = np.eye(3, dtype=complex)
    if cw:
        exact[0, 2] = -0.2
    assert np.max(np.abs(Rm - exact)) < 1e-13
    assert np.max(np.abs(solve_Rminus(jd, "neumann") - Rm)) < 1e-13
    inside = np.eye(3, dtype=complex)
    inside[0, 2] = -0.2 if cw else 0.2
    assert np.max(np.abs(reconstruct_R(Rm, jd, 0.1 - 0.4j) - inside)) < 1e-13
    assert np.max(np.abs(reconstruct_R(Rm, jd, 3j) - np.eye(3))) < 1e-13
    assert np.max(np.abs(extract_R1(Rm, jd))) < 1e-13
    assert integral_equation_residual(jd, Rm) < 1e-13


def test_nonconstant_jump_dense_matches_neumann():
    arc = OrientedArc.circle(0, 1, panels=6)
    W = np.zeros((len(arc), 3, 3), dtype=complex)
    W[:, 0, 1] = 0.1 / (arc.nodes - 2.5)
    W[:, 1, 0] = 0.1 * arc.nodes
    W[:, 2, 2] = 0.05 / arc.nodes
    jd = JumpData([arc], [W], ["circle:test"])
    Rd, Rn = solve_Rminus(jd), solve_Rminus(jd, "neumann")
    assert np.max(np.abs(Rd - Rn)) < 1e-11
    assert integral_equation_residual(jd, Rd) < 1e-12


def test_neumann_divergence_is_reported():
    jd = constant_jump_problem(0.0)
    jd.W[0][:, 0, 0] = 3.0 / jd.arcs[0].nodes      # C_- acts as -1 on s^-k: the series grows like 3^k
    with pytest.raises(DivergenceError):
        solve_Rminus(jd, "neumann", maxiter=30)
    with pytest.raises(ValueError):
        solve_Rminus(jd, "gmres")


def test_missing_hard_edge_parametrix_raises(quarter, sheet8):
    c, p, cs = quarter
    m, sm = sheet8
    par = {"Ux0": build_Px0(sm, p, 8, "x0"), "Uxi": build_Px0(sm, p, 8, "xi")}
    with pytest.raises(ParametrixUnavailable):
        assemble_WR(sm, p, m, 8, cs, par)


def test_omit_mode_assembles_small_jumps(quarter, sheet8):
    c, p, cs = quarter
    m, sm = sheet8
    par = {"Ux0": build_Px0(sm, p, 8, "x0"), "Uxi": build_Px0(sm, p, 8, "xi")}
    jd = assemble_WR(sm, p, m, 8, cs, par, panels=4, hard_edge="omit")
    tags = jd.sup_by_tag()
    assert set(tags) == {"circle", "lip", "axis"}
    assert max(tags.values()) < 1.0
    assert len(jd.drop_dead(1e300).arcs) == 0
