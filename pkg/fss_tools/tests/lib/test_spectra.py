import numpy as np
import pytest

from birkhoff_fss.errors import DegenerateRootsError, SectorError, SpecError
from birkhoff_fss.spectra import (
    char_poly_roots,
    companion_matrix,
    eigen_system,
    ray_ordering,
    roots_of_unity,
    sector_ordering,
)


def test_roots_of_unity():
    np.testing.assert_allclose(roots_of_unity(2), [1.0, -1.0], atol=1e-15)
    np.testing.assert_allclose(roots_of_unity(4), [1.0, 1j, -1.0, -1j], atol=1e-15)
    with pytest.raises(SpecError):
        roots_of_unity(1)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 8])
def test_sector_ordering_is_strict_in_every_sector(n):
    roots = roots_of_unity(n)
    for mu in range(2 * n):
        frame = sector_ordering(roots, mu)
        assert sorted(frame.ordering) == list(range(n))
        rho = frame.ray(10.0, 0.3 * np.pi / (2 * n))
        assert np.all(np.diff(np.real(rho * frame.roots)) > 0)
        frame.check_rho(rho)


def test_sector_zero_for_second_order():
    frame = sector_ordering(roots_of_unity(2), 0)
    assert frame.ordering == (1, 0)
    np.testing.assert_allclose(frame.roots, [-1.0, 1.0], atol=1e-15)
    assert abs(frame.ray_angle - np.pi / 4) < 1e-15
    rho = frame.ray(3.0)
    assert abs(abs(rho) - 3.0) < 1e-14
    assert frame.to_dict()["ordering"] == [1, 0]


@pytest.mark.parametrize("rho", [0, 1.0, -1.0, 2j, -1.0 - 1.0j])
def test_check_rho_outside_sector(rho):
    frame = sector_ordering(roots_of_unity(2), 0)
    with pytest.raises(SectorError):
        frame.check_rho(rho)


@pytest.mark.parametrize("index", [-1, 4, 7])
def test_sector_index_range(index):
    with pytest.raises(SectorError):
        sector_ordering(roots_of_unity(2), index)


def test_ray_ordering_tie():
    # on the imaginary axis Re(rho) = Re(-rho) = 0
    with pytest.raises(SectorError):
        ray_ordering([1.0, -1.0], np.pi / 2)


def test_char_poly_roots():
    rs = char_poly_roots([-1.0, 0.0])
    np.testing.assert_allclose(rs.roots, [1.0, -1.0], atol=1e-14)
    np.testing.assert_allclose(rs.derivative_values, [2.0, -2.0], atol=1e-14)
    # R^3 - 2 R^2 - R + 2 = (R - 1)(R + 1)(R - 2)
    rs = char_poly_roots([2.0, -1.0, -2.0])
    np.testing.assert_allclose(sorted(rs.roots.real), [-1.0, 1.0, 2.0], atol=1e-13)
    np.testing.assert_allclose(rs.roots.imag, 0.0, atol=1e-13)
    assert rs.n == 3


def test_char_poly_errors():
    with pytest.raises(SpecError) as exc:
        char_poly_roots([0.0, 1.0])
    assert exc.value.path == "p_diag[0]"


def test_companion_matrix():
    a = companion_matrix([-1.0, 0.0])
    np.testing.assert_array_equal(a, [[0, 1], [1, 0]])
    a = companion_matrix([2.0, -1.0, -2.0])
    rs = char_poly_roots([2.0, -1.0, -2.0])
    np.testing.assert_allclose(sorted(np.linalg.eigvals(a).real), sorted(rs.roots.real), atol=1e-12)


@pytest.mark.parametrize(
    "a0",
    [
        [[1.0, 0.0], [0.0, -1.0]],
        [[0.0, 1.0], [1.0, 0.0]],
        [[2.0, 1.0, 0.0], [0.0, 1j, 0.0], [1.0, 0.0, -3.0]],
    ],
)
def test_eigen_system(a0):
    a = np.array(a0, dtype=complex)
    rs = eigen_system(a)
    np.testing.assert_allclose(a @ rs.eigenvectors, rs.eigenvectors * rs.roots, atol=1e-12)
    np.testing.assert_allclose(np.max(np.abs(rs.eigenvectors), axis=0), 1.0, atol=1e-14)


@pytest.mark.parametrize(
    "a0, error",
    [
        ([[1.0, 0.0], [0.0, 0.0]], SpecError),
        ([[1.0, 1.0], [0.0, 1.0]], DegenerateRootsError),
        ([[1.0, 0.0], [0.0, 1.0]], DegenerateRootsError),
        ([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], SpecError),
    ],
)
def test_eigen_system_errors(a0, error):
    with pytest.raises(error):
        eigen_system(np.array(a0))


def test_reordered_root_system():
    rs = eigen_system(np.array([[0.0, 1.0], [1.0, 0.0]]))
    frame = sector_ordering(rs.roots, 0)
    moved = rs.for_sector(frame)
    np.testing.assert_allclose(moved.roots, frame.roots)
    np.testing.assert_allclose(moved.eigenvectors[:, 0], rs.eigenvectors[:, frame.ordering[0]])
