from pathlib import Path

import numpy as np
import pytest
import yaml

from birkhoff_fss.errors import DegenerateRootsError, SmoothnessError, SpecError
from birkhoff_fss.funcspace import PiecewisePoly
from birkhoff_fss.problems import ParamSpec, ProblemSpecN, SystemSpec, spec_from_dict
from birkhoff_fss.types import SpecKind

DATA_DIR = Path(__file__).parents[3] / "data"
FIXTURES = Path(__file__).parents[1] / "fixtures" / "specs"


def read(path: Path):
    with path.open() as f:
        return yaml.safe_load(f)


@pytest.mark.parametrize(
    "name, kind, n",
    [
        ("free.yaml", SpecKind.nth_order, 2),
        ("constant_potential.yaml", SpecKind.nth_order, 2),
        ("smooth_n3.yaml", SpecKind.nth_order, 3),
        ("diagonal_system.yaml", SpecKind.system, 2),
        ("sturm_liouville.yaml", SpecKind.nth_order_param, 2),
    ],
)
def test_shipped_specs(name, kind, n):
    spec = spec_from_dict(read(DATA_DIR / name))
    assert spec.kind == kind
    assert spec.n == n
    again = spec_from_dict(spec.to_dict())
    assert again.to_dict() == spec.to_dict()


def test_sturm_liouville_coefficient():
    spec = spec_from_dict(read(DATA_DIR / "sturm_liouville.yaml"))
    assert isinstance(spec, ParamSpec)
    q = spec.coefficient(0, 2)
    assert q.smoothness_class == 1
    assert q.eval(0.75) == 1.25
    assert spec.coefficient(0, 1).is_zero


@pytest.mark.parametrize(
    "d, path",
    [
        ({"kind": "pde", "n": 2, "T": 1.0}, "kind"),
        ({"T": 1.0, "p": [0]}, ""),
        ({"n": 2.5, "T": 1.0, "p": [0]}, "n"),
        ({"n": 2, "T": "one", "p": [0]}, "T"),
        ({"n": 2, "T": 1.0, "p": [0, 0]}, "p"),
        ({"n": 1, "T": 1.0, "p": []}, "n"),
        ({"n": 2, "T": -1.0, "p": [0]}, "T"),
        ({"n": 2, "T": 1.0, "alpha": 1.0, "p": [0]}, "alpha"),
        ({"n": 2, "T": 1.0, "N": -1, "p": [0]}, "N"),
        ({"n": 2, "T": 1.0, "p": [{"breakpoints": [0.0, 2.0], "pieces": [[1.0]]}]}, "p[0]"),
        ({"kind": "system", "n": 2, "T": 1.0, "A0": [[1.0, 0.0]]}, "A0"),
        ({"kind": "system", "n": 2, "T": 1.0, "A0": [[1.0, 0.0], [0.0, 0.0]]}, "A0"),
        ({"kind": "system", "n": 2, "T": 1.0, "A0": [[1.0, 0.0], [0.0, -1.0]], "A": [[[0.0]]]}, "A[0]"),
        (
            {"kind": "system", "n": 2, "T": 1.0, "A0": [[0.0, 1.0], [1.0, 0.0]], "omega": [[1.0, 0.0], [0.0, 1.0]]},
            "omega",
        ),
        ({"kind": "nth_order_param", "n": 2, "T": 1.0, "p_diag": [-1.0]}, "p_diag"),
        ({"kind": "nth_order_param", "n": 2, "T": 1.0, "p_diag": [0.0, 1.0]}, "p_diag[0]"),
        ({"kind": "nth_order_param", "n": 2, "T": 1.0, "p_diag": [-1.0, 0.0], "p": {"a,b": 1.0}}, "p"),
        ({"kind": "nth_order_param", "n": 2, "T": 1.0, "p_diag": [-1.0, 0.0], "p": {"2,1": 1.0}}, "p[2,1]"),
    ],
)
def test_invalid_specs(d, path):
    with pytest.raises(SpecError) as exc:
        spec_from_dict(d)
    assert exc.value.path == path


def test_not_a_mapping():
    with pytest.raises(SpecError):
        spec_from_dict(["n", 2])


@pytest.mark.parametrize(
    "N, ok",
    [
        (0, True),
        # a jump in p_0 of a second order equation allows N = 0 only
        (1, False),
        (2, False),
    ],
)
def test_coefficient_class_requirement(N, ok):
    jump = {"breakpoints": [0.0, 0.5, 1.0], "pieces": [[0.0], [1.0]]}
    d = {"n": 2, "T": 1.0, "N": N, "p": [jump]}
    if ok:
        assert spec_from_dict(d).N == N
    else:
        with pytest.raises(SmoothnessError):
            spec_from_dict(d)


def test_param_class_requirement():
    kink = {"breakpoints": [0.0, 0.5, 1.0], "pieces": [[1.0], [0.5, 1.0]]}
    base = {"kind": "nth_order_param", "n": 2, "T": 1.0, "p_diag": [-1.0, 0.0]}
    # p_{0,1} needs class N, p_{0,2} class N - 1
    assert spec_from_dict(dict(base, N=1, p={"0,1": kink})).N == 1
    assert spec_from_dict(dict(base, N=2, p={"0,2": kink})).N == 2
    with pytest.raises(SmoothnessError):
        spec_from_dict(dict(base, N=2, p={"0,1": kink}))


def test_system_roots_keep_diagonal_order():
    spec = spec_from_dict(read(DATA_DIR / "diagonal_system.yaml"))
    assert isinstance(spec, SystemSpec)
    rs = spec.roots()
    np.testing.assert_array_equal(rs.roots, [1.0, -1.0])
    np.testing.assert_array_equal(rs.eigenvectors, np.eye(2))
    assert spec.M == 1
    assert spec.a(2)[0][0].is_zero


def test_system_with_omega():
    omega = [[1.0, 1.0], [1.0, -1.0]]
    spec = spec_from_dict({"kind": "system", "n": 2, "T": 1.0, "A0": [[0.0, 1.0], [1.0, 0.0]], "omega": omega})
    rs = spec.roots()
    np.testing.assert_allclose(rs.roots, [1.0, -1.0])
    np.testing.assert_array_equal(rs.eigenvectors, omega)


def test_repeated_eigenvalues():
    with pytest.raises(DegenerateRootsError):
        spec_from_dict({"kind": "system", "n": 2, "T": 1.0, "A0": [[1.0, 0.0], [0.0, 1.0]]})


def test_problem_spec_helpers():
    spec = ProblemSpecN.constant(3, 2.0, [1.0, 0.0], alpha=0.5, N=1)
    assert not spec.is_free
    assert spec.coefficient(1).is_zero
    assert spec.coefficient(5).is_zero
    assert spec.with_alpha(0.0).alpha == 0.0
    assert spec.with_N(0).N == 0 and spec.N == 1
    np.testing.assert_allclose(spec.roots().roots ** 3, 1.0, atol=1e-14)
    np.testing.assert_allclose(spec.roots().derivative_values, 3 * spec.roots().roots ** 2)
    assert ProblemSpecN.constant(2, 1.0, [0]).is_free


def test_complex_coefficients():
    spec = spec_from_dict(read(FIXTURES / "anchored_at_03.json"))
    assert isinstance(spec, ProblemSpecN)
    assert spec.alpha == 0.3
    assert spec.p[0].eval(1.0) == 1.0 + 0.5j
    assert isinstance(spec.p[0], PiecewisePoly)
