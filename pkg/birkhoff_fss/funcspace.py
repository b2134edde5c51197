import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import legendre
from numpy.polynomial import polynomial as P
from scipy.integrate import simpson

from .errors import SmoothnessError, SpecError

log = logging.getLogger("funcspace")

# class assigned to functions whose pieces are a single polynomial (all derivatives continuous)
MAX_SMOOTHNESS = 1 << 16
CONTINUITY_TOL = 1e-12
L1_SAMPLES = 1024
_DOMAIN_TOL = 1e-12

Number = Union[int, float, complex]


def complex_from_pair(value: Any, path: str = "") -> complex:
    if isinstance(value, bool):
        raise SpecError(f"expected a number or [re, im] pair, got {value!r}", path)
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
            return complex(value[0], value[1])
    raise SpecError(f"expected a number or [re, im] pair, got {value!r}", path)


def complex_to_pair(value: Number) -> List[float]:
    c = complex(value)
    return [float(c.real), float(c.imag)]


def _trim(coef: np.ndarray) -> np.ndarray:
    c = np.atleast_1d(np.asarray(coef, dtype=complex))
    if c.ndim != 1 or c.size == 0:
        raise SpecError("polynomial coefficients must be a non-empty sequence")
    return P.polytrim(c, tol=0).astype(complex)


class PiecewisePoly:
    """
    Complex piecewise polynomial on [breakpoints[0], breakpoints[-1]].

    Piece coefficients are in ascending powers of the global variable x. The smoothness class N means
    that the derivatives of order 0..N-1 are continuous at every interior breakpoint, i.e. membership
    in W_N. Instances are immutable.
    """

    __slots__ = ("_breakpoints", "_pieces", "_smoothness")

    def __init__(
        self,
        breakpoints: Sequence[float],
        pieces: Sequence[Sequence[Number]],
        smoothness_class: Optional[int] = None,
    ) -> None:
        bp = np.asarray(breakpoints, dtype=float)
        if bp.ndim != 1 or bp.size < 2:
            raise SpecError("at least two breakpoints are required", "breakpoints")
        if not np.all(np.isfinite(bp)):
            raise SpecError("breakpoints must be finite", "breakpoints")
        if np.any(np.diff(bp) <= 0):
            raise SpecError("breakpoints must be strictly increasing", "breakpoints")
        if len(pieces) != bp.size - 1:
            raise SpecError(f"expected {bp.size - 1} pieces, got {len(pieces)}", "pieces")
        self._breakpoints = bp
        self._pieces: Tuple[np.ndarray, ...] = tuple(_trim(np.asarray(c, dtype=complex)) for c in pieces)
        inferred = self._continuity_order()
        if smoothness_class is None:
            self._smoothness = inferred
        else:
            if smoothness_class < 0:
                raise SmoothnessError("smoothness class must be non-negative", "smoothness")
            if smoothness_class > inferred:
                raise SmoothnessError(
                    f"declared smoothness class {smoothness_class} exceeds the continuity of the pieces ({inferred})",
                    "smoothness",
                )
            self._smoothness = int(smoothness_class)

    @classmethod
    def _build(cls, breakpoints: np.ndarray, pieces: Sequence[np.ndarray], smoothness_class: int) -> "PiecewisePoly":
        # calculus results are trusted; skips re-inference
        inst = cls.__new__(cls)
        inst._breakpoints = np.asarray(breakpoints, dtype=float)
        inst._pieces = tuple(_trim(c) for c in pieces)
        inst._smoothness = min(MAX_SMOOTHNESS, max(0, int(smoothness_class)))
        return inst

    @classmethod
    def constant(cls, value: Number, a: float, b: float) -> "PiecewisePoly":
        return cls._build(np.array([a, b], dtype=float), [np.array([value], dtype=complex)], MAX_SMOOTHNESS)

    @classmethod
    def polynomial(cls, coef: Sequence[Number], a: float, b: float) -> "PiecewisePoly":
        return cls._build(np.array([a, b], dtype=float), [np.asarray(coef, dtype=complex)], MAX_SMOOTHNESS)

    @classmethod
    def zero(cls, a: float, b: float) -> "PiecewisePoly":
        return cls.constant(0.0, a, b)

    @property
    def breakpoints(self) -> np.ndarray:
        return self._breakpoints.copy()

    @property
    def pieces(self) -> Tuple[np.ndarray, ...]:
        return tuple(c.copy() for c in self._pieces)

    @property
    def smoothness_class(self) -> int:
        return self._smoothness

    @property
    def domain(self) -> Tuple[float, float]:
        return float(self._breakpoints[0]), float(self._breakpoints[-1])

    @property
    def degree(self) -> int:
        return max(c.size for c in self._pieces) - 1

    @property
    def is_zero(self) -> bool:
        return all(c.size == 1 and c[0] == 0 for c in self._pieces)

    def _continuity_order(self) -> int:
        order = MAX_SMOOTHNESS
        for i in range(1, len(self._pieces)):
            left, right = self._pieces[i - 1], self._pieces[i]
            x = self._breakpoints[i]
            top = max(left.size, right.size)
            d = 0
            while d < top:
                lv = P.polyval(x, P.polyder(left, d)) if d < left.size else 0.0
                rv = P.polyval(x, P.polyder(right, d)) if d < right.size else 0.0
                if not np.isclose(lv, rv, rtol=CONTINUITY_TOL, atol=CONTINUITY_TOL):
                    break
                d += 1
            if d < top:
                order = min(order, d)
        return order

    def _piece_index(self, x: np.ndarray) -> np.ndarray:
        a, b = self.domain
        tol = _DOMAIN_TOL * max(1.0, b - a)
        if np.any(x < a - tol) or np.any(x > b + tol):
            bad = x[(x < a - tol) | (x > b + tol)]
            raise SpecError(f"x={bad.flat[0]!r} outside the domain [{a}, {b}]")
        idx = np.searchsorted(self._breakpoints, x, side="right") - 1
        return np.clip(idx, 0, len(self._pieces) - 1)

    def eval(self, x: Union[float, np.ndarray]) -> Union[complex, np.ndarray]:
        """Value at x; at an interior breakpoint the right piece is used, at the right end the last one"""
        xa = np.asarray(x, dtype=float)
        scalar = xa.ndim == 0
        xa = np.atleast_1d(xa)
        idx = self._piece_index(xa)
        out = np.empty(xa.shape, dtype=complex)
        for i in np.unique(idx):
            mask = idx == i
            out[mask] = P.polyval(xa[mask], self._pieces[i])
        if scalar:
            return complex(out[0])
        return out

    __call__ = eval

    def derivative(self, order: int = 1) -> "PiecewisePoly":
        if order == 0:
            return self
        if self._smoothness < order:
            raise SmoothnessError(
                f"cannot take derivative of order {order} of a function of smoothness class {self._smoothness}"
            )
        pieces = [P.polyder(c, order) if c.size > order else np.zeros(1, dtype=complex) for c in self._pieces]
        return PiecewisePoly._build(self._breakpoints, pieces, self._smoothness - order)

    def antiderivative(self, base: float) -> "PiecewisePoly":
        """F with F' = f and F(base) = 0"""
        integrals = [P.polyint(c) for c in self._pieces]
        consts = np.zeros(len(integrals), dtype=complex)
        for i in range(1, len(integrals)):
            x = self._breakpoints[i]
            consts[i] = consts[i - 1] + P.polyval(x, integrals[i - 1]) - P.polyval(x, integrals[i])
        shifted = []
        for c, k in zip(integrals, consts):
            c = c.copy()
            c[0] += k
            shifted.append(c)
        out = PiecewisePoly._build(self._breakpoints, shifted, self._smoothness + 1)
        offset = out.eval(base)
        if offset != 0:
            out = out - offset
        return out

    def l1_norm(self, a: Optional[float] = None, b: Optional[float] = None) -> float:
        """
        ∫_a^b |f|: each piece is split at its real zeros and integrated with composite Simpson
        on L1_SAMPLES intervals per segment.
        """
        lo_dom, hi_dom = self.domain
        a = lo_dom if a is None else float(a)
        b = hi_dom if b is None else float(b)
        if b < a:
            raise SpecError(f"invalid interval [{a}, {b}]")
        total = 0.0
        for i, c in enumerate(self._pieces):
            lo = max(a, self._breakpoints[i])
            hi = min(b, self._breakpoints[i + 1])
            if hi <= lo:
                continue
            splits = [lo]
            if c.size > 1:
                for r in np.sort_complex(P.polyroots(c)):
                    if abs(r.imag) <= 1e-10 * max(1.0, abs(r)) and lo < r.real < hi:
                        splits.append(float(r.real))
            splits.append(hi)
            splits = sorted(set(splits))
            for s0, s1 in zip(splits[:-1], splits[1:]):
                xs = np.linspace(s0, s1, L1_SAMPLES + 1)
                total += float(simpson(np.abs(P.polyval(xs, c)), x=xs))
        return total

    def _merged(self, other: "PiecewisePoly") -> Tuple[np.ndarray, List[int], List[int]]:
        a0, b0 = self.domain
        a1, b1 = other.domain
        tol = _DOMAIN_TOL * max(1.0, b0 - a0)
        if abs(a0 - a1) > tol or abs(b0 - b1) > tol:
            raise SpecError(f"incompatible domains [{a0}, {b0}] and [{a1}, {b1}]")
        merged = np.union1d(self._breakpoints, other._breakpoints)
        keep = np.concatenate([[True], np.diff(merged) > tol])
        merged = merged[keep]
        merged[-1] = b0
        mids = 0.5 * (merged[:-1] + merged[1:])
        left = list(np.clip(np.searchsorted(self._breakpoints, mids, side="right") - 1, 0, len(self._pieces) - 1))
        right = list(np.clip(np.searchsorted(other._breakpoints, mids, side="right") - 1, 0, len(other._pieces) - 1))
        return merged, left, right

    def _coerce(self, other: Any) -> "PiecewisePoly":
        if isinstance(other, PiecewisePoly):
            return other
        if isinstance(other, (int, float, complex, np.number)):
            a, b = self.domain
            return PiecewisePoly.constant(complex(other), a, b)
        return NotImplemented  # type: ignore

    def __add__(self, other: Any) -> "PiecewisePoly":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        bp, li, ri = self._merged(o)
        pieces = [P.polyadd(self._pieces[i], o._pieces[j]) for i, j in zip(li, ri)]
        return PiecewisePoly._build(bp, pieces, min(self._smoothness, o._smoothness))

    __radd__ = __add__

    def __neg__(self) -> "PiecewisePoly":
        return PiecewisePoly._build(self._breakpoints, [-c for c in self._pieces], self._smoothness)

    def __sub__(self, other: Any) -> "PiecewisePoly":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: Any) -> "PiecewisePoly":
        return (-self) + other

    def __mul__(self, other: Any) -> "PiecewisePoly":
        if isinstance(other, (int, float, complex, np.number)):
            return PiecewisePoly._build(self._breakpoints, [c * complex(other) for c in self._pieces], self._smoothness)
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        bp, li, ri = self._merged(o)
        pieces = [P.polymul(self._pieces[i], o._pieces[j]) for i, j in zip(li, ri)]
        return PiecewisePoly._build(bp, pieces, min(self._smoothness, o._smoothness))

    __rmul__ = __mul__

    def __truediv__(self, other: Number) -> "PiecewisePoly":
        return self * (1.0 / complex(other))

    def __repr__(self) -> str:
        return (
            f"PiecewisePoly(breakpoints={list(self._breakpoints)}, pieces={[list(c) for c in self._pieces]}, "
            f"smoothness_class={self._smoothness})"
        )

    def equals(self, other: "PiecewisePoly") -> bool:
        if not np.array_equal(self._breakpoints, other._breakpoints) or len(self._pieces) != len(other._pieces):
            return False
        return self._smoothness == other._smoothness and all(
            np.array_equal(c0, c1) for c0, c1 in zip(self._pieces, other._pieces)
        )

    def to_dict(self) -> Dict[str, Any]:
        d: Dict[str, Any] = dict(
            breakpoints=[float(x) for x in self._breakpoints],
            pieces=[[complex_to_pair(v) for v in c] for c in self._pieces],
        )
        if self._smoothness < MAX_SMOOTHNESS:
            d["smoothness"] = self._smoothness
        return d

    @classmethod
    def from_dict(cls, d: Any, path: str = "") -> "PiecewisePoly":
        if not isinstance(d, dict):
            raise SpecError(f"expected a function object, got {type(d).__name__}", path)
        for key in ("breakpoints", "pieces"):
            if key not in d:
                raise SpecError(f"missing '{key}'", path)
        if not isinstance(d["pieces"], list) or not all(isinstance(p, list) for p in d["pieces"]):
            raise SpecError("'pieces' must be a list of coefficient lists", f"{path}.pieces")
        pieces = [
            [complex_from_pair(v, f"{path}.pieces[{i}][{j}]") for j, v in enumerate(p)]
            for i, p in enumerate(d["pieces"])
        ]
        try:
            return cls(d["breakpoints"], pieces, d.get("smoothness"))
        except SpecError as exc:
            raise type(exc)(str(exc), path) from None


def function_from_spec(value: Any, a: float, b: float, path: str = "") -> PiecewisePoly:
    """A function entry may be a function object or a bare (complex) constant"""
    if isinstance(value, dict):
        f = PiecewisePoly.from_dict(value, path)
        lo, hi = f.domain
        tol = _DOMAIN_TOL * max(1.0, b - a)
        if abs(lo - a) > tol or abs(hi - b) > tol:
            raise SpecError(f"breakpoints must span [{a}, {b}], got [{lo}, {hi}]", path)
        return f
    return PiecewisePoly.constant(complex_from_pair(value, path), a, b)


@dataclass(frozen=True, eq=False)
class Grid:
    """Composite Gauss-Legendre rule on equal cells of [a, b]; nodes and weights are flat, cell-major"""

    edges: np.ndarray
    nodes: np.ndarray
    weights: np.ndarray
    points_per_cell: int = 4

    @classmethod
    def uniform(cls, a: float, b: float, cells: int = 512, points_per_cell: int = 4) -> "Grid":
        if cells < 1:
            raise SpecError(f"number of grid cells must be positive, got {cells}")
        if not b > a:
            raise SpecError(f"invalid grid interval [{a}, {b}]")
        tau, w = legendre.leggauss(points_per_cell)
        edges = np.linspace(a, b, cells + 1)
        edges[-1] = b
        half = 0.5 * np.diff(edges)
        nodes = (edges[:-1, None] + half[:, None] * (tau[None, :] + 1.0)).ravel()
        weights = (half[:, None] * w[None, :]).ravel()
        log.debug("grid: [%s, %s] cells: %d points: %d", a, b, cells, nodes.size)
        return cls(edges=edges, nodes=nodes, weights=weights, points_per_cell=points_per_cell)

    @property
    def cells(self) -> int:
        return self.edges.size - 1

    @property
    def a(self) -> float:
        return float(self.edges[0])

    @property
    def b(self) -> float:
        return float(self.edges[-1])

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.cells

    @property
    def cell_nodes(self) -> np.ndarray:
        return self.nodes.reshape(self.cells, self.points_per_cell)

    def refined(self) -> "Grid":
        return Grid.uniform(self.a, self.b, 2 * self.cells, self.points_per_cell)

    def edge_index(self, x: float) -> int:
        return int(np.argmin(np.abs(self.edges - x)))
