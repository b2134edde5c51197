import logging
from dataclasses import dataclass, field, replace
from typing import Any, ClassVar, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import SmoothnessError, SpecError
from .funcspace import PiecewisePoly, complex_from_pair, complex_to_pair, function_from_spec
from .spectra import RootSystem, char_poly_roots, eigen_system, roots_of_unity
from .types import SpecKind

log = logging.getLogger("problems")

FunctionMatrix = Tuple[Tuple[PiecewisePoly, ...], ...]


def _require(d: Dict[str, Any], key: str, path: str) -> Any:
    if key not in d:
        raise SpecError(f"missing '{key}'", path)
    return d[key]


def _as_int(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SpecError(f"expected an integer, got {value!r}", path)
    return value


def _as_float(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SpecError(f"expected a real number, got {value!r}", path)
    return float(value)


def _check_domain(f: PiecewisePoly, T: float, path: str) -> None:
    a, b = f.domain
    if abs(a) > 1e-12 * max(1.0, T) or abs(b - T) > 1e-12 * max(1.0, T):
        raise SpecError(f"function must be defined on [0, {T}], got [{a}, {b}]", path)


def _check_class(f: PiecewisePoly, required: int, path: str) -> None:
    if f.smoothness_class < required:
        raise SmoothnessError(f"smoothness class {f.smoothness_class} < required W_{required}", path)


def matrix_from_spec(value: Any, n: int, path: str) -> np.ndarray:
    if not isinstance(value, list) or len(value) != n or not all(isinstance(r, list) and len(r) == n for r in value):
        raise SpecError(f"expected a {n}x{n} matrix", path)
    return np.array(
        [[complex_from_pair(v, f"{path}[{i}][{j}]") for j, v in enumerate(row)] for i, row in enumerate(value)],
        dtype=complex,
    )


def matrix_to_spec(m: np.ndarray) -> List[List[List[float]]]:
    return [[complex_to_pair(v) for v in row] for row in np.asarray(m)]


def function_matrix_from_spec(value: Any, n: int, T: float, path: str) -> FunctionMatrix:
    if not isinstance(value, list) or len(value) != n or not all(isinstance(r, list) and len(r) == n for r in value):
        raise SpecError(f"expected a {n}x{n} matrix of functions", path)
    return tuple(
        tuple(function_from_spec(v, 0.0, T, f"{path}[{i}][{j}]") for j, v in enumerate(row))
        for i, row in enumerate(value)
    )


def function_matrix_to_spec(m: FunctionMatrix) -> List[List[Dict[str, Any]]]:
    return [[f.to_dict() for f in row] for row in m]


def zero_function_matrix(n: int, T: float) -> FunctionMatrix:
    z = PiecewisePoly.zero(0.0, T)
    return tuple(tuple(z for _ in range(n)) for _ in range(n))


def evaluate_matrix(m: FunctionMatrix, x: np.ndarray) -> np.ndarray:
    """Values of a matrix of functions at the points x, shape (len(x), n, n)"""
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    n = len(m)
    out = np.zeros((xs.size, n, n), dtype=complex)
    for i, row in enumerate(m):
        for j, f in enumerate(row):
            if not f.is_zero:
                out[:, i, j] = f.eval(xs)
    return out


@dataclass(frozen=True, eq=False)
class ProblemSpecN:
    """y^(n) + sum_{m=0}^{n-2} p_m(x) y^(m) = rho^n y on [0, T], expansions anchored at alpha"""

    kind: ClassVar[SpecKind] = SpecKind.nth_order

    n: int
    T: float
    p: Tuple[PiecewisePoly, ...]
    alpha: float = 0.0
    N: int = 0
    name: str = ""

    def __post_init__(self) -> None:
        if self.n < 2:
            raise SpecError(f"order must be at least 2, got {self.n}", "n")
        if not (np.isfinite(self.T) and self.T > 0):
            raise SpecError(f"interval length must be positive and finite, got {self.T}", "T")
        if not 0.0 <= self.alpha < self.T:
            raise SpecError(f"anchor must satisfy 0 <= alpha < T, got {self.alpha}", "alpha")
        if self.N < 0:
            raise SpecError(f"N must be non-negative, got {self.N}", "N")
        if len(self.p) != self.n - 1:
            raise SpecError(f"expected {self.n - 1} coefficients p_0..p_{self.n - 2}, got {len(self.p)}", "p")
        for m, f in enumerate(self.p):
            _check_domain(f, self.T, f"p[{m}]")
            _check_class(f, max(0, self.N + m - self.n + 2), f"p[{m}]")

    @classmethod
    def constant(
        cls, n: int, T: float, values: Sequence[complex], alpha: float = 0.0, N: int = 0, name: str = ""
    ) -> "ProblemSpecN":
        return cls(
            n=n, T=T, p=tuple(PiecewisePoly.constant(v, 0.0, T) for v in values), alpha=alpha, N=N, name=name
        )

    @property
    def is_free(self) -> bool:
        return all(f.is_zero for f in self.p)

    def roots(self) -> RootSystem:
        r = roots_of_unity(self.n)
        return RootSystem(roots=r, derivative_values=self.n * r ** (self.n - 1))

    def coefficient(self, m: int) -> PiecewisePoly:
        """p_m, zero for m outside 0..n-2"""
        if 0 <= m <= self.n - 2:
            return self.p[m]
        return PiecewisePoly.zero(0.0, self.T)

    def with_alpha(self, alpha: float) -> "ProblemSpecN":
        return replace(self, alpha=alpha)

    def with_N(self, N: int) -> "ProblemSpecN":
        return replace(self, N=N)

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "ProblemSpecN":
        n = _as_int(_require(d, "n", ""), "n")
        T = _as_float(_require(d, "T", ""), "T")
        p = _require(d, "p", "")
        if not isinstance(p, list):
            raise SpecError("expected a list of coefficient functions", "p")
        return cls(
            n=n,
            T=T,
            p=tuple(function_from_spec(v, 0.0, T, f"p[{m}]") for m, v in enumerate(p)),
            alpha=_as_float(d.get("alpha", 0.0), "alpha"),
            N=_as_int(d.get("N", 0), "N"),
            name=str(d.get("name", "")),
        )

    def to_dict(self) -> Dict[str, Any]:
        d: Dict[str, Any] = dict(kind=self.kind.to_dict())
        if self.name:
            d["name"] = self.name
        d.update(n=self.n, T=self.T, alpha=self.alpha, N=self.N, p=[f.to_dict() for f in self.p])
        return d


@dataclass(frozen=True, eq=False)
class SystemSpec:
    """
    Y' = rho A(x, rho) Y on [0, T] with A(x, rho) = A0 + sum_{mu>=1} A_(mu)(x) / rho^mu.

    The supplied series A_(1)..A_(M) is the whole system; terms beyond M are zero. `omega`, when
    present, is the eigenvector matrix to use for A0 instead of the computed one.
    """

    kind: ClassVar[SpecKind] = SpecKind.system

    n: int
    T: float
    A0: np.ndarray
    A_series: Tuple[FunctionMatrix, ...] = field(default_factory=tuple)
    N: int = 0
    omega: Optional[np.ndarray] = None
    name: str = ""

    def __post_init__(self) -> None:
        if self.n < 2:
            raise SpecError(f"dimension must be at least 2, got {self.n}", "n")
        if not (np.isfinite(self.T) and self.T > 0):
            raise SpecError(f"interval length must be positive and finite, got {self.T}", "T")
        if self.N < 0:
            raise SpecError(f"N must be non-negative, got {self.N}", "N")
        a0 = np.asarray(self.A0, dtype=complex)
        if a0.shape != (self.n, self.n):
            raise SpecError(f"A0 must be {self.n}x{self.n}, got {a0.shape}", "A0")
        object.__setattr__(self, "A0", a0)
        for mu, am in enumerate(self.A_series, start=1):
            if len(am) != self.n or any(len(row) != self.n for row in am):
                raise SpecError(f"A_({mu}) must be {self.n}x{self.n}", f"A[{mu - 1}]")
            required = self.N - mu + 1 if mu <= self.N else 0
            for i, row in enumerate(am):
                for j, f in enumerate(row):
                    _check_domain(f, self.T, f"A[{mu - 1}][{i}][{j}]")
                    _check_class(f, required, f"A[{mu - 1}][{i}][{j}]")
        # raises on zero, repeated or defective eigenvalues
        self.roots()

    @property
    def M(self) -> int:
        return len(self.A_series)

    @property
    def is_diagonal(self) -> bool:
        return bool(np.all(self.A0 == np.diag(np.diag(self.A0))))

    def a(self, mu: int) -> FunctionMatrix:
        """A_(mu), zero beyond the supplied series"""
        if 1 <= mu <= self.M:
            return self.A_series[mu - 1]
        return zero_function_matrix(self.n, self.T)

    def roots(self) -> RootSystem:
        if self.omega is None:
            computed = eigen_system(self.A0)
            if self.is_diagonal:
                # keep the diagonal order and the identity as eigenvector matrix
                return RootSystem(roots=np.diag(self.A0).copy(), eigenvectors=np.eye(self.n, dtype=complex))
            return computed
        omega = np.asarray(self.omega, dtype=complex)
        if omega.shape != (self.n, self.n):
            raise SpecError(f"omega must be {self.n}x{self.n}", "omega")
        conj = np.linalg.solve(omega, self.A0 @ omega)
        d = np.diag(conj).copy()
        if np.max(np.abs(conj - np.diag(d))) > 1e-10 * max(1.0, float(np.max(np.abs(d)))):
            raise SpecError("omega does not diagonalize A0", "omega")
        eigen_system(self.A0)
        return RootSystem(roots=d, eigenvectors=omega)

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "SystemSpec":
        n = _as_int(_require(d, "n", ""), "n")
        T = _as_float(_require(d, "T", ""), "T")
        series = d.get("A", [])
        if not isinstance(series, list):
            raise SpecError("expected a list of matrices of functions", "A")
        omega = d.get("omega")
        return cls(
            n=n,
            T=T,
            A0=matrix_from_spec(_require(d, "A0", ""), n, "A0"),
            A_series=tuple(function_matrix_from_spec(v, n, T, f"A[{i}]") for i, v in enumerate(series)),
            N=_as_int(d.get("N", 0), "N"),
            omega=None if omega is None else matrix_from_spec(omega, n, "omega"),
            name=str(d.get("name", "")),
        )

    def to_dict(self) -> Dict[str, Any]:
        d: Dict[str, Any] = dict(kind=self.kind.to_dict())
        if self.name:
            d["name"] = self.name
        d.update(
            n=self.n,
            T=self.T,
            N=self.N,
            A0=matrix_to_spec(self.A0),
            A=[function_matrix_to_spec(m) for m in self.A_series],
        )
        if self.omega is not None:
            d["omega"] = matrix_to_spec(self.omega)
        return d


@dataclass(frozen=True, eq=False)
class ParamSpec:
    """
    y^(n) + sum_{k=0}^{n-1} P_k(x, rho) y^(k) = 0 with
    P_k = rho^(n-k) p_kk + rho^(n-k-1) p_{k,k+1}(x) + ... + p_{k,n}(x).

    p_diag holds the constants p_00..p_{n-1,n-1}; p maps (k, l), l > k, to the function p_{k,l}.
    """

    kind: ClassVar[SpecKind] = SpecKind.nth_order_param

    n: int
    T: float
    p_diag: Tuple[complex, ...]
    p: Dict[Tuple[int, int], PiecewisePoly] = field(default_factory=dict)
    N: int = 0
    name: str = ""

    def __post_init__(self) -> None:
        if self.n < 2:
            raise SpecError(f"order must be at least 2, got {self.n}", "n")
        if not (np.isfinite(self.T) and self.T > 0):
            raise SpecError(f"interval length must be positive and finite, got {self.T}", "T")
        if self.N < 0:
            raise SpecError(f"N must be non-negative, got {self.N}", "N")
        if len(self.p_diag) != self.n:
            raise SpecError(f"expected {self.n} constants p_00..p_{self.n - 1},{self.n - 1}", "p_diag")
        for (k, l), f in self.p.items():
            key = f"p[{k},{l}]"
            if not (0 <= k < self.n and k < l <= self.n):
                raise SpecError(f"index ({k},{l}) outside 0 <= k < l <= {self.n}", key)
            _check_domain(f, self.T, key)
            j = l - k
            _check_class(f, self.N - j + 1 if j <= self.N else 0, key)
        # raises for p_00 = 0 and for multiple roots
        self.roots()

    def roots(self) -> RootSystem:
        return char_poly_roots(self.p_diag)

    def coefficient(self, k: int, l: int) -> PiecewisePoly:
        return self.p.get((k, l), PiecewisePoly.zero(0.0, self.T))

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "ParamSpec":
        n = _as_int(_require(d, "n", ""), "n")
        T = _as_float(_require(d, "T", ""), "T")
        diag = _require(d, "p_diag", "")
        if not isinstance(diag, list):
            raise SpecError("expected a list of constants", "p_diag")
        raw = d.get("p", {})
        if not isinstance(raw, dict):
            raise SpecError("expected a mapping 'k,l' -> function", "p")
        p: Dict[Tuple[int, int], PiecewisePoly] = {}
        for key, v in raw.items():
            try:
                k, l = (int(s) for s in str(key).split(","))
            except ValueError:
                raise SpecError(f"invalid index '{key}' (expected 'k,l')", "p") from None
            p[(k, l)] = function_from_spec(v, 0.0, T, f"p[{key}]")
        return cls(
            n=n,
            T=T,
            p_diag=tuple(complex_from_pair(v, f"p_diag[{i}]") for i, v in enumerate(diag)),
            p=p,
            N=_as_int(d.get("N", 0), "N"),
            name=str(d.get("name", "")),
        )

    def to_dict(self) -> Dict[str, Any]:
        d: Dict[str, Any] = dict(kind=self.kind.to_dict())
        if self.name:
            d["name"] = self.name
        d.update(
            n=self.n,
            T=self.T,
            N=self.N,
            p_diag=[complex_to_pair(v) for v in self.p_diag],
            p={f"{k},{l}": f.to_dict() for (k, l), f in sorted(self.p.items())},
        )
        return d


AnySpec = Union[ProblemSpecN, SystemSpec, ParamSpec]

_SPEC_CLASSES = {cls.kind: cls for cls in (ProblemSpecN, SystemSpec, ParamSpec)}


def spec_from_dict(d: Any) -> AnySpec:
    if not isinstance(d, dict):
        raise SpecError("problem specification must be a mapping")
    raw_kind = d.get("kind", SpecKind.nth_order.value)
    try:
        kind = SpecKind.from_dict(raw_kind)
    except ValueError:
        valid = ", ".join(k.value for k in SpecKind)
        raise SpecError(f"unknown kind '{raw_kind}' (valid: {valid})", "kind") from None
    spec = _SPEC_CLASSES[kind].from_dict(d)  # type: ignore
    log.debug("loaded %s spec '%s' (n: %d)", kind.value, spec.name, spec.n)
    return spec
