from pathlib import Path

import numpy as np
import pytest
import yaml

from birkhoff_fss.asymptotic_coeffs import g_table
from birkhoff_fss.birkhoff_system import (
    build_uv,
    certify_rho,
    leading_kernel_diagnostics,
    solve_general_A0,
    solve_system_fss,
    system_frame,
)
from birkhoff_fss.errors import SectorError, SpecError
from birkhoff_fss.funcspace import Grid
from birkhoff_fss.problems import SystemSpec, spec_from_dict
from birkhoff_fss.verify import system_oracle_error

DATA_DIR = Path(__file__).parents[3] / "data"
FIXTURES = Path(__file__).parents[1] / "fixtures" / "specs"


def load(path: Path) -> SystemSpec:
    with path.open() as f:
        return spec_from_dict(yaml.safe_load(f))


@pytest.fixture
def diagonal_system() -> SystemSpec:
    return load(DATA_DIR / "diagonal_system.yaml")


def test_free_system_is_exact():
    spec = load(FIXTURES / "free_system.json")
    assert certify_rho(spec, 0, 1.0) == (1.0, 0.0)
    for sector in (0, 1):
        for k in range(2):
            grid = Grid.uniform(0.0, 1.0, 32)
            res = solve_general_A0(spec, sector, k, system_frame(spec, sector).ray(3.0), grid=grid)
            np.testing.assert_array_equal(res.remainder, 0.0)
            np.testing.assert_allclose(spec.A0 @ res.W[0], res.root * res.W[0], atol=1e-14)
            np.testing.assert_allclose(res.W, np.broadcast_to(res.W[0], res.W.shape))
            np.testing.assert_allclose(res.Y[-1], np.exp(res.rho * res.root) * res.W[-1])


def test_uv_frame(diagonal_system):
    tables = g_table(diagonal_system)
    frame = system_frame(diagonal_system, 0)
    x = np.linspace(0.0, 1.0, 33)
    uv = build_uv(diagonal_system, tables, frame.ray(16.0), x)
    assert uv.U.shape == (33, 2, 2)
    np.testing.assert_allclose(uv.U @ uv.V, np.broadcast_to(np.eye(2), uv.U.shape), atol=1e-12)
    np.testing.assert_allclose(uv.LstarV @ uv.U + uv.V @ uv.LU, 0.0, atol=1e-12)
    # N = 1: LU = (g_(1)' - A_(1) g_(1)) / rho^2, for R = 1 that is (0, -x / 8)
    for m in (16.0, 32.0):
        rho = frame.ray(m)
        lu = build_uv(diagonal_system, tables, rho, x).LU * rho**2
        np.testing.assert_allclose(lu[:, :, 0], np.stack([0 * x, -x / 8], axis=-1), atol=1e-11)


def test_uv_frame_without_perturbation():
    spec = spec_from_dict({"kind": "system", "n": 2, "T": 1.0, "A0": [[1.0, 0.0], [0.0, -1.0]]})
    x = np.linspace(0.0, 1.0, 9)
    uv = build_uv(spec, g_table(spec), system_frame(spec, 0).ray(4.0), x)
    np.testing.assert_array_equal(uv.U, np.broadcast_to(np.eye(2), uv.U.shape))
    np.testing.assert_array_equal(uv.V, uv.U)
    np.testing.assert_array_equal(uv.LU, 0.0)
    np.testing.assert_array_equal(uv.LstarV, 0.0)


def test_zero_order_uv_frame():
    # a_(1)00 = x, a_(1)11 = 2: Q_0 = exp(x^2 / 2), Q_1 = exp(2 x)
    ramp = {"breakpoints": [0.0, 1.0], "pieces": [[0.0, 1.0]]}
    spec = spec_from_dict(
        {"kind": "system", "n": 2, "T": 1.0, "A0": [[1.0, 0.0], [0.0, -1.0]], "A": [[[ramp, 1.0], [0.5, 2.0]]]}
    )
    x = np.linspace(0.0, 1.0, 9)
    uv = build_uv(spec, g_table(spec, levels=0), system_frame(spec, 0).ray(8.0), x)
    q = np.stack([np.exp(x**2 / 2), np.exp(2 * x)], axis=-1)
    np.testing.assert_allclose(np.diagonal(uv.U, axis1=1, axis2=2), q, rtol=1e-13)
    np.testing.assert_allclose(np.diagonal(uv.V, axis1=1, axis2=2), 1 / q, rtol=1e-13)
    np.testing.assert_array_equal(uv.U[:, 0, 1], 0.0)
    np.testing.assert_array_equal(uv.U[:, 1, 0], 0.0)
    with pytest.raises(SpecError):
        build_uv(load(FIXTURES / "free_system.json"), g_table(spec), 4.0, x)


def test_certified_rho(diagonal_system):
    grid = Grid.uniform(0.0, 1.0, 128)
    modulus, value = certify_rho(diagonal_system, 0, 0.25, grid=grid)
    assert value <= 0.5
    assert np.log2(modulus / 0.25) == int(np.log2(modulus / 0.25))
    with pytest.raises(SpecError):
        certify_rho(diagonal_system, 0, 0.0, grid=grid)


@pytest.mark.parametrize("k", [0, 1])
def test_diagonal_system_against_oracle(diagonal_system, k):
    frame = system_frame(diagonal_system, 0)
    assert system_oracle_error(diagonal_system, 0, k, frame.ray(16.0), cells=256) < 1e-6


def test_remainder_decreases(diagonal_system):
    frame = system_frame(diagonal_system, 0)
    grid = Grid.uniform(0.0, 1.0, 256)
    errors = [
        max(
            float(np.max(np.abs(solve_general_A0(diagonal_system, 0, k, frame.ray(m), grid=grid).remainder)))
            for k in range(2)
        )
        for m in (8.0, 16.0, 32.0, 64.0)
    ]
    assert all(b < a for a, b in zip(errors, errors[1:]))
    # N = 1: remainders fall off like |rho|^-2
    assert errors[-2] / errors[-1] > 2.5


def test_diagonal_system_branches(diagonal_system):
    frame = system_frame(diagonal_system, 0)
    assert frame.ordering == (1, 0)
    res = solve_system_fss(diagonal_system, frame, 1, frame.ray(16.0), grid=Grid.uniform(0.0, 1.0, 128))
    assert res.root == 1
    # W0 = g_(0) + g_(1) / rho for the branch R = 1
    x = res.x
    expected = np.stack([1.0 + 0.25 * x / res.rho, 0.25 / res.rho + 0 * x], axis=-1)
    np.testing.assert_allclose(res.W0, expected, atol=1e-14)
    assert res.contraction_estimate <= 0.5


def test_leading_kernel(diagonal_system):
    tables = g_table(diagonal_system)
    x = np.linspace(0.0, 1.0, 33)
    rho = system_frame(diagonal_system, 0).ray(64.0)
    lk = leading_kernel_diagnostics(diagonal_system, tables, 0, rho, x)
    # (g_(1)' - A_(1) g_(1)) for R = 1 is (0, -x / 8): its own entry vanishes
    assert abs(lk.off_diagonal - 0.125) < 0.02
    assert lk.diagonal < 0.02


def test_zero_order_tables(diagonal_system):
    frame = system_frame(diagonal_system, 0)
    res = solve_system_fss(diagonal_system, frame, 0, frame.ray(16.0), N=0, grid=Grid.uniform(0.0, 1.0, 128))
    np.testing.assert_array_equal(res.W0, np.broadcast_to([0.0, 1.0], res.W0.shape))
    assert 0.0 <= res.observed_ratio < 1.0


def test_solver_errors(diagonal_system):
    frame = system_frame(diagonal_system, 0)
    grid = Grid.uniform(0.0, 1.0, 16)
    with pytest.raises(SpecError):
        solve_system_fss(load(FIXTURES / "free_system.json"), frame, 0, frame.ray(4.0), grid=grid)
    with pytest.raises(SectorError):
        solve_system_fss(diagonal_system, frame, 2, frame.ray(4.0), grid=grid)
    with pytest.raises(SectorError):
        solve_system_fss(diagonal_system, frame, 0, 4.0, grid=grid)
    with pytest.raises(SectorError):
        solve_general_A0(diagonal_system, 4, 0, frame.ray(4.0), grid=grid)
