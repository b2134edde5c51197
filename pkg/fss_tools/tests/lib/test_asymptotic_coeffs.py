from pathlib import Path

import numpy as np
import pytest
import yaml

from birkhoff_fss.asymptotic_coeffs import (
    beta_table,
    expansion_residual,
    g_table,
    param_coeffs,
    system_recurrence_residual,
)
from birkhoff_fss.errors import SmoothnessError, SpecError
from birkhoff_fss.problems import ProblemSpecN, spec_from_dict
from birkhoff_fss.reduction import companion_reduce, diagonalize

DATA_DIR = Path(__file__).parents[3] / "data"
FIXTURES = Path(__file__).parents[1] / "fixtures" / "specs"

X = np.linspace(0.0, 1.0, 21)


def load(path: Path):
    with path.open() as f:
        return spec_from_dict(yaml.safe_load(f))


@pytest.mark.parametrize("c", [1.0, -3.0, 2.0 + 1.0j])
def test_constant_potential_betas(c):
    # exp((s - rho) x) with s = sqrt(rho^2 - c) = 1 - c x / (2 rho) + c^2 x^2 / (8 rho^2) + ...
    tables = beta_table(ProblemSpecN.constant(2, 1.0, [c], N=1), levels=2)
    assert tables.levels == 2
    np.testing.assert_allclose(tables.beta[0].eval(X), 1.0)
    np.testing.assert_allclose(tables.beta[1].eval(X), -c * X / 2, atol=1e-14)
    np.testing.assert_allclose(tables.beta[2].eval(X), c**2 * X**2 / 8, atol=1e-14)
    # beta_{s nu} = sum_r C(nu, r) beta_{s-r}^(r)
    np.testing.assert_allclose(tables.beta_nu[1][1].eval(X), -c * X / 2, atol=1e-14)
    np.testing.assert_allclose(tables.beta_nu[2][1].eval(X), c**2 * X**2 / 8 - c / 2, atol=1e-14)
    np.testing.assert_allclose(tables.beta2_anchored.eval(X), c**2 * X**2 / 8 + c / 4, atol=1e-14)


def test_betas_vanish_at_the_anchor():
    spec = load(FIXTURES / "anchored_at_03.json")
    tables = beta_table(spec, levels=3)
    for s in range(1, 4):
        assert abs(tables.beta[s].eval(0.3)) < 1e-14
    # p = 1 + i x / 2: beta_1' = -p / 2
    np.testing.assert_allclose(tables.beta[1].derivative().eval(X), -(1.0 + 0.5j * X) / 2, atol=1e-14)


@pytest.mark.parametrize("name", ["free.yaml", "constant_potential.yaml", "smooth_n3.yaml"])
def test_expansion_residual_vanishes(name):
    spec = load(DATA_DIR / name)
    tables = beta_table(spec, levels=3)
    assert np.max(np.abs(expansion_residual(spec, tables, X))) < 1e-12


def test_free_equation_betas():
    tables = beta_table(ProblemSpecN.constant(4, 2.0, [0, 0, 0]), levels=2)
    for s in (1, 2):
        assert tables.beta[s].is_zero


def test_default_levels():
    assert beta_table(load(DATA_DIR / "smooth_n3.yaml")).levels == 2
    assert beta_table(load(DATA_DIR / "free.yaml")).levels == 1
    assert beta_table(load(DATA_DIR / "free.yaml")).beta2_anchored is None


def test_levels_must_be_positive():
    with pytest.raises(SpecError):
        beta_table(load(DATA_DIR / "free.yaml"), levels=0)


def test_missing_smoothness():
    jump = {"breakpoints": [0.0, 0.5, 1.0], "pieces": [[0.0], [1.0]]}
    spec = spec_from_dict({"n": 2, "T": 1.0, "p": [jump]})
    assert beta_table(spec).levels == 1
    # beta_2 needs beta_1'' and beta_1 = -∫ p_0 / 2 is only W_1
    with pytest.raises(SmoothnessError):
        beta_table(spec, levels=2)


def test_g_table_diagonal_system():
    spec = load(DATA_DIR / "diagonal_system.yaml")
    tables = g_table(spec)
    assert tables.levels == 1
    np.testing.assert_array_equal(tables.roots, [1.0, -1.0])
    assert all(q.is_zero for q in tables.q)
    # branch R = 1
    np.testing.assert_allclose(tables.g_values(0, 0, X), np.stack([np.ones_like(X), 0 * X], axis=-1))
    np.testing.assert_allclose(tables.g_values(0, 1, X), np.stack([0.25 * X, 0.25 + 0 * X], axis=-1), atol=1e-14)
    # branch R = -1
    np.testing.assert_allclose(tables.g_values(1, 1, X), np.stack([-0.5 + 0 * X, -0.25 * X], axis=-1), atol=1e-14)
    assert np.max(system_recurrence_residual(spec, tables, X)) < 1e-12


def test_g_table_with_diagonal_first_order_term():
    spec = spec_from_dict(
        {
            "kind": "system",
            "n": 2,
            "T": 1.0,
            "N": 2,
            "A0": [[2.0, 0.0], [0.0, -1.0]],
            "A": [
                [[{"breakpoints": [0.0, 1.0], "pieces": [[0.0, 1.0]]}, 1.0], [0.5, [0.0, 1.0]]],
                [[0.0, {"breakpoints": [0.0, 1.0], "pieces": [[1.0, 0.0, 1.0]]}], [0.0, 0.0]],
            ],
        }
    )
    tables = g_table(spec)
    # Q_0 = exp(∫_0^x t dt)
    np.testing.assert_allclose(tables.Q_values(0, X), np.exp(X**2 / 2), rtol=1e-14)
    np.testing.assert_allclose(tables.Q_values(1, X), np.exp(1j * X), rtol=1e-14)
    assert np.max(system_recurrence_residual(spec, tables, X)) < 1e-11


def test_g_table_needs_diagonal():
    spec = load(FIXTURES / "free_system.json")
    with pytest.raises(SpecError):
        g_table(spec)
    diag, _, _ = diagonalize(spec)
    tables = g_table(diag, levels=2)
    for k in range(2):
        for mu in (1, 2):
            np.testing.assert_allclose(tables.g_values(k, mu, X), 0.0)


def test_parameterized_coefficients():
    ell = load(FIXTURES / "param_first_order.json")
    tables = param_coeffs(ell)
    # roots 1, -1 with F'(R) = 2R; omega_k = -(p_01 + p_12 R_k) / F'(R_k)
    np.testing.assert_allclose(tables.omega[0].eval(X), -(X + 0.5) / 2, atol=1e-14)
    np.testing.assert_allclose(tables.omega[1].eval(X), (X - 0.5) / 2, atol=1e-14)
    diag, _, _ = diagonalize(companion_reduce(ell))
    for k in range(2):
        np.testing.assert_allclose(diag.a(1)[k][k].eval(X), tables.omega[k].eval(X), atol=1e-13)
        expected = np.exp(tables.omega[k].antiderivative(0.0).eval(X))
        for nu in range(2):
            np.testing.assert_allclose(tables.G_values(k, 0, nu, X), expected, atol=1e-12)


@pytest.mark.parametrize("levels", [1, 2])
def test_parameterized_derivative_relation(levels):
    # G_(mu)1k = G_(mu)0k + R_k^-1 G'_(mu-1)0k, derivative by central differences
    tables = param_coeffs(load(FIXTURES / "param_first_order.json"), levels=levels)
    x = np.linspace(0.1, 0.9, 17)
    h = 1e-5
    for k in range(2):
        rk = tables.roots[k]
        for mu in range(1, levels + 1):
            dG = (tables.G_values(k, mu - 1, 0, x + h) - tables.G_values(k, mu - 1, 0, x - h)) / (2 * h)
            expected = tables.G_values(k, mu, 0, x) + dG / rk
            np.testing.assert_allclose(tables.G_values(k, mu, 1, x), expected, atol=1e-8)
            if mu == 1:
                # omega_k != 0: the derivative term is not negligible
                assert np.max(np.abs(dG)) > 0.1
