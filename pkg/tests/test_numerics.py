import mpmath as mp
import numpy as np
import pytest

from mlrhp.numerics import (BranchError, NearContourError, OrientedArc, PoleError, PrecisionContext, airy,
                            bessel_mod, bessel_mod_derivative, bits_for_degree, cauchy_matrix, cauchy_minus,
                            cauchy_plus, cauchy_transform, gamma, precision)


def test_precision_context_and_policy():
    assert PrecisionContext().significand_bits == 256
    with pytest.raises(ValueError):
        PrecisionContext(32)
    with precision(300) as pc:
        assert mp.mp.prec == 300 and pc.tolerance < 1e-80
    assert bits_for_degree(16) == 256
    assert bits_for_degree(64) >= 512
    assert bits_for_degree(40, 100) == 320


def test_gamma_values_and_poles():
    assert abs(gamma(mp.mpf(1) / 2) - mp.sqrt(mp.pi)) < mp.mpf(10) ** -70
    with pytest.raises(PoleError):
        gamma(-3)


@pytest.mark.parametrize("nu", [mp.mpf("0.75"), mp.mpf(0), mp.mpf(1), mp.mpf("-0.25")])
@pytest.mark.parametrize("z", [mp.mpc("0.3", "0.1"), mp.mpc(4, -2), mp.mpc(70, 30), mp.mpc(-5, 3)])
def test_bessel_against_reference(nu, z):
    assert abs(bessel_mod("I", nu, z) - mp.besseli(nu, z)) <= mp.mpf(10) ** -65 * (1 + abs(mp.besseli(nu, z)))
    assert abs(bessel_mod("K", nu, z) - mp.besselk(nu, z)) <= mp.mpf(10) ** -65 * (1 + abs(mp.besselk(nu, z)))


def test_bessel_derivative_and_cut():
    z = mp.mpc(2, 1)
    d = mp.diff(lambda x: mp.besselk(mp.mpf("0.3"), x), z)
    assert abs(bessel_mod_derivative("K", mp.mpf("0.3"), z) - d) < mp.mpf(10) ** -40
    with pytest.raises(BranchError):
        bessel_mod("K", 0.5, -1)


@pytest.mark.parametrize("z", [mp.mpc(0.5, 0.2), mp.mpc(-3, 1), mp.mpc(12, -5), mp.mpc(-20, 0.5), mp.mpc(-9, -14)])
def test_airy_against_reference(z):
    a, d = airy(z)
    assert abs(a - mp.airyai(z)) <= mp.mpf(10) ** -60 * (1 + abs(mp.airyai(z)))
    assert abs(d - mp.airyai(z, 1)) <= mp.mpf(10) ** -60 * (1 + abs(mp.airyai(z, 1)))


def test_arc_quadrature_length():
    arc = OrientedArc.circle(1, 2, panels=4)
    assert abs(arc.arclength_weights.sum() - 4 * np.pi) < 1e-12
    seg = OrientedArc.segment(0, 3j, panels=3)
    assert abs(seg.weights.sum() - 3j) < 1e-13
    assert len(seg.refined()) == 2 * len(seg)


def test_cauchy_transform_closed_forms():
    arc = OrientedArc.circle(0, 1, panels=8)
    f = 1 / (arc.nodes - 3)              # analytic inside: C f = f inside, 0 outside
    assert abs(cauchy_transform(arc, f, 0.2 + 0.1j) - 1 / (0.2 + 0.1j - 3)) < 1e-13
    assert abs(cauchy_transform(arc, f, 2.0)) < 1e-13
    # near field
    z = 0.999 * np.exp(0.3j)
    assert abs(cauchy_transform(arc, f, z) - 1 / (z - 3)) < 1e-11
    with pytest.raises(NearContourError):
        cauchy_transform(arc, f, 0.9999, near_field=False)


def test_cauchy_boundary_values_plemelj():
    arc = OrientedArc.segment(-1, 1, panels=6)
    f = np.exp(arc.nodes) * (1 - arc.nodes ** 2)
    cp, cm = cauchy_plus(arc, f), cauchy_minus(arc, f)
    assert np.max(np.abs(cp - cm - f)) < 1e-12
    K = cauchy_matrix(arc, side=-1)
    assert np.allclose(K @ f, cm)
