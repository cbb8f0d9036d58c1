import json

import mpmath as mp
import pytest

from mlrhp.model import (ModelDescriptor, MonicPolynomial, closed_form_coefficients, export_json, first_row_Y,
                         full_Y, import_json, moment, orthogonality_residuals, poly_eval, poly_zeros, solve_mop)


def test_descriptor_validation():
    with pytest.raises(ValueError):
        ModelDescriptor(-1.5, 0.2, 2, 2)
    with pytest.raises(ValueError):
        ModelDescriptor(0.1, 0.2, -1, 2)
    m = ModelDescriptor(0.1, 0.2, 3, 5)
    assert m.n == 8 and m.Lambda == (8, -3, -5) and m.a == mp.mpf(3) / 8


def test_moment_closed_form():
    m = ModelDescriptor(0.5, 1.0, 2, 2)
    assert abs(moment(1, 2, m) - mp.quad(lambda x: x ** 2.5 * mp.exp(-4 * x), [0, mp.inf])) < mp.mpf(10) ** -60


def test_gram_solution_matches_closed_form():
    m = ModelDescriptor(0.3, 1.7, 4, 6)
    P = solve_mop(m)
    ref = closed_form_coefficients(m)
    assert max(abs(u - v) / (1 + abs(v)) for u, v in zip(P.coefficients, ref)) < mp.mpf(10) ** -50
    assert max(orthogonality_residuals(P, m)) < mp.mpf(10) ** -40


def test_zeros_real_positive_and_certified():
    m = ModelDescriptor(-0.3, 0.8, 5, 7)
    zs = poly_zeros(solve_mop(m))
    assert len(zs) == 12 and all(isinstance(z, mp.mpf) and z > 0 for z in zs)
    assert all(b > a for a, b in zip(zs[:-1], zs[1:]))


def test_monic_contract_and_json_roundtrip():
    with pytest.raises(ValueError):
        MonicPolynomial(1, [mp.mpf(1), mp.mpf(2)])
    P = solve_mop(ModelDescriptor(0.5, 1.25, 2, 3))
    Q = import_json(export_json(P))
    assert Q.degree == P.degree
    assert max(abs(a - b) for a, b in zip(P.coefficients, Q.coefficients)) < mp.mpf(10) ** -70
    assert json.loads(export_json(P))["degree"] == 5


def test_full_Y_normalisation_and_first_row():
    m = ModelDescriptor(0.5, 1.25, 1, 3, 0.25)
    z = mp.mpc(0, 10 ** 6)
    Y = full_Y(m, z)
    Yn = Y * mp.diag([z ** -m.n, z ** m.n1, z ** m.n2])
    assert mp.mnorm(Yn - mp.eye(3), 1) < 0.05
    P = solve_mop(m)
    row = first_row_Y(P, m, z)
    assert abs(row[0, 0] - poly_eval(P, z)) == 0 and abs(row[0, 1] - Y[0, 1]) < mp.mpf(10) ** -60
