import numpy as np
import pytest

from birkhoff_fss.errors import SmoothnessError, SpecError
from birkhoff_fss.funcspace import MAX_SMOOTHNESS, Grid, PiecewisePoly, function_from_spec


def kink() -> PiecewisePoly:
    # 1 on [0, 1/2], 1/2 + x on [1/2, 1]
    return PiecewisePoly([0.0, 0.5, 1.0], [[1.0], [0.5, 1.0]])


@pytest.mark.parametrize(
    "breakpoints, pieces",
    [
        # a single breakpoint does not define an interval
        ([0.0], []),
        # breakpoints must increase strictly
        ([0.0, 0.7, 0.4, 1.0], [[1.0], [1.0], [1.0]]),
        ([0.0, 0.5, 0.5, 1.0], [[1.0], [1.0], [1.0]]),
        # one piece per interval
        ([0.0, 0.5, 1.0], [[1.0]]),
        ([0.0, float("inf")], [[1.0]]),
    ],
)
def test_invalid_construction(breakpoints, pieces):
    with pytest.raises(SpecError):
        PiecewisePoly(breakpoints, pieces)


@pytest.mark.parametrize(
    "breakpoints, pieces, expected",
    [
        # jump
        ([0.0, 0.5, 1.0], [[0.0], [1.0]], 0),
        # continuous with a kink
        ([0.0, 0.5, 1.0], [[1.0], [0.5, 1.0]], 1),
        # x^2 joined to 2x - 1 at x = 1: value and slope agree
        ([0.0, 1.0, 2.0], [[0.0, 0.0, 1.0], [-1.0, 2.0]], 2),
        # one piece
        ([0.0, 1.0], [[1.0, 2.0, 3.0]], MAX_SMOOTHNESS),
    ],
)
def test_smoothness_inference(breakpoints, pieces, expected):
    assert PiecewisePoly(breakpoints, pieces).smoothness_class == expected


def test_declared_smoothness():
    assert PiecewisePoly([0.0, 0.5, 1.0], [[1.0], [0.5, 1.0]], 0).smoothness_class == 0
    with pytest.raises(SmoothnessError):
        PiecewisePoly([0.0, 0.5, 1.0], [[1.0], [0.5, 1.0]], 2)


def test_eval():
    f = kink()
    assert f.eval(0.25) == 1.0
    # the right piece is used at an interior breakpoint, the last one at the right end
    assert f.eval(0.5) == 1.0
    assert f.eval(1.0) == 1.5
    np.testing.assert_allclose(f(np.array([0.0, 0.75])), [1.0, 1.25])
    with pytest.raises(SpecError):
        f.eval(1.5)


def test_derivative_lowers_class():
    f = kink()
    d = f.derivative()
    assert d.smoothness_class == 0
    np.testing.assert_allclose(d.eval(np.array([0.25, 0.75])), [0.0, 1.0])
    with pytest.raises(SmoothnessError):
        f.derivative(2)


def test_antiderivative():
    f = kink()
    F = f.antiderivative(0.5)
    assert F.smoothness_class == 2
    assert abs(F.eval(0.5)) < 1e-15
    # ∫_0.5^1 (0.5 + x) dx = 0.625, ∫_0.5^0 1 dx = -0.5
    assert abs(F.eval(1.0) - 0.625) < 1e-14
    assert abs(F.eval(0.0) + 0.5) < 1e-14
    x = np.linspace(0.0, 1.0, 11)
    np.testing.assert_allclose(F.derivative().eval(x), f.eval(x), atol=1e-14)


@pytest.mark.parametrize(
    "f, a, b, expected",
    [
        (PiecewisePoly.polynomial([-0.5, 1.0], 0.0, 1.0), None, None, 0.25),
        (PiecewisePoly.constant(-2.0, 0.0, 3.0), None, None, 6.0),
        (PiecewisePoly.constant(1j, 0.0, 3.0), 1.0, 2.0, 1.0),
        (kink(), 0.25, 0.75, 0.25 + 0.28125),
    ],
)
def test_l1_norm(f, a, b, expected):
    assert abs(f.l1_norm(a, b) - expected) < 1e-10


def test_arithmetic_merges_breakpoints():
    f = kink()
    g = PiecewisePoly([0.0, 0.25, 1.0], [[2.0], [0.0, 0.0, 1.0]])
    x = np.linspace(0.0, 1.0, 41)
    np.testing.assert_allclose((f + g).eval(x), f.eval(x) + g.eval(x), atol=1e-14)
    np.testing.assert_allclose((f * g).eval(x), f.eval(x) * g.eval(x), atol=1e-14)
    np.testing.assert_allclose((f - 2.0).eval(x), f.eval(x) - 2.0, atol=1e-14)
    np.testing.assert_allclose((3j * f / 2).eval(x), 1.5j * f.eval(x), atol=1e-14)
    assert list((f + g).breakpoints) == [0.0, 0.25, 0.5, 1.0]
    assert (f * g).smoothness_class == 0


def test_zero():
    z = PiecewisePoly.zero(0.0, 2.0)
    assert z.is_zero
    assert not (z + 1.0).is_zero
    assert (kink() - kink()).is_zero


def test_dict_round_trip():
    f = PiecewisePoly([0.0, 0.5, 1.0], [[1.0, 1j], [0.5 + 0.5j, 1.0]], 0)
    g = PiecewisePoly.from_dict(f.to_dict())
    assert g.equals(f)
    assert "smoothness" not in PiecewisePoly.constant(1.0, 0.0, 1.0).to_dict()


@pytest.mark.parametrize(
    "value, expected_message",
    [
        ({"breakpoints": [0.0, 1.0]}, "missing 'pieces'"),
        ({"breakpoints": [0.0, 1.0], "pieces": [["a"]]}, "expected a number"),
        ({"breakpoints": [0.0, 0.5], "pieces": [[1.0]]}, "must span"),
        ([1.0, 2.0, 3.0], "expected a number"),
    ],
)
def test_function_from_spec_errors(value, expected_message):
    with pytest.raises(SpecError) as exc:
        function_from_spec(value, 0.0, 1.0, "p[0]")
    assert expected_message in str(exc.value)
    assert str(exc.value).startswith("p[0]")


def test_function_from_spec_constant():
    f = function_from_spec([1.0, -2.0], 0.0, 3.0)
    assert f.eval(2.0) == 1.0 - 2.0j
    assert f.domain == (0.0, 3.0)


def test_grid():
    grid = Grid.uniform(0.0, 2.0, 8)
    assert grid.cells == 8
    assert grid.edges[0] == 0.0 and grid.edges[-1] == 2.0
    assert grid.nodes.size == 32
    assert abs(grid.weights.sum() - 2.0) < 1e-14
    # 4-point Gauss-Legendre is exact for degree 7
    assert abs(grid.weights @ grid.nodes**7 - 2.0**8 / 8) < 1e-11
    assert grid.refined().cells == 16
    assert grid.edge_index(1.01) == 4
    with pytest.raises(SpecError):
        Grid.uniform(1.0, 0.0)
