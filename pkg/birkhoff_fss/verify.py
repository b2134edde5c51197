import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, TypeVar, Union

import numpy as np
from scipy.integrate import solve_ivp

from .asymptotic_coeffs import beta_table, expansion_residual, g_table, param_coeffs, system_recurrence_residual
from .birkhoff_nth import (
    AnchorConfig,
    FSSResult,
    kernel_norm,
    renormalized_rhs,
    rho_threshold,
    solve_branches,
    solve_z,
    wronskian,
)
from .birkhoff_system import certify_rho, solve_general_A0
from .errors import FSSError, SpecError, VerificationError
from .funcspace import Grid
from .problems import AnySpec, ParamSpec, ProblemSpecN, SystemSpec, evaluate_matrix
from .reduction import as_nth_order, companion_reduce, diagonalize, embed_nth_order
from .spectra import roots_of_unity, sector_ordering

log = logging.getLogger("verify")

ORACLE_RTOL = 1e-10
ORACLE_ATOL = 1e-12
ORACLE_TOLERANCE = 1e-6
MIN_FIT_POINTS = 5
INTERIOR_MARGIN = 0.1
# keeps |rho| T max|Re R| inside the double-precision exponent range
EXPONENT_CAP = 700.0
# largest growth exp(SEGMENT_GROWTH) of any mode across one oracle segment of a middle branch
SEGMENT_GROWTH = 2.0

FIRST_ORDER_BOUND = -1.8
SHARPENED_BOUND = -2.5
WRONSKIAN_BOUND = -0.8
SYSTEM_BOUND = -1.7
CONSISTENCY_TOLERANCE = 1e-8
# sweep errors at or below this are double-precision noise around an exact identity
ROUNDOFF_FLOOR = 1e-13
COEFFICIENT_TOLERANCE = 1e-10

_In = TypeVar("_In")
_Out = TypeVar("_Out")


@dataclass(frozen=True)
class SweepConfig:
    rho_min: Optional[float] = None
    factor: float = 2.0
    count: int = 6
    angle_offset: float = 0.0
    cells: int = 512
    workers: int = 1

    def __post_init__(self) -> None:
        if not self.factor > 1:
            raise SpecError(f"sweep factor must be > 1, got {self.factor}", "factor")
        if self.count < 2:
            raise SpecError(f"sweep needs at least 2 points, got {self.count}", "count")
        if self.rho_min is not None and not self.rho_min > 0:
            raise SpecError(f"rho_min must be positive, got {self.rho_min}", "rho_min")
        if self.cells < 1:
            raise SpecError(f"grid cells must be positive, got {self.cells}", "cells")

    def moduli(self, default_min: float) -> List[float]:
        start = self.rho_min if self.rho_min is not None else default_min
        return [start * self.factor**i for i in range(self.count)]


@dataclass
class SweepReport:
    claim: str
    rho_moduli: List[float]
    errors: List[float]
    bound: float
    fitted_slope: float = float("nan")
    fit_residual: float = float("nan")
    passed: bool = False
    trivial: bool = False

    def partial_slopes(self) -> List[float]:
        out = [float("nan")]
        for (r0, e0), (r1, e1) in zip(zip(self.rho_moduli, self.errors), zip(self.rho_moduli[1:], self.errors[1:])):
            if e0 > 0 and e1 > 0:
                out.append(float(np.log(e1 / e0) / np.log(r1 / r0)))
            else:
                out.append(float("nan"))
        return out


@dataclass
class ClaimResult:
    claim: str
    passed: bool
    detail: str
    report: Optional[SweepReport] = None
    data: List[float] = field(default_factory=list)


def map_workers(fn: Callable[[_In], _Out], items: Sequence[_In], workers: int = 1) -> List[_Out]:
    """Apply fn to every item, in parallel for workers > 1; results keep the order of items"""
    if workers <= 1 or len(items) <= 1:
        return [fn(i) for i in items]
    log.debug("running %d tasks on %d workers", len(items), workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def interior_mask(x: np.ndarray, a: float, b: float) -> np.ndarray:
    margin = INTERIOR_MARGIN * (b - a)
    return (x >= a + margin) & (x <= b - margin)


def _cap(moduli: List[float], roots: np.ndarray, length: float) -> List[float]:
    limit = EXPONENT_CAP / (max(float(np.max(np.abs(roots.real))), 1e-300) * length)
    kept = [m for m in moduli if m <= limit]
    if len(kept) < len(moduli):
        log.warning("sweep capped at |rho| <= %.6g (%d points dropped)", limit, len(moduli) - len(kept))
    return kept


def slope_fit(claim: str, rho_moduli: Sequence[float], errors: Sequence[float], bound: float) -> SweepReport:
    """Least-squares slope of log(error) against log|rho|; passes when slope <= bound"""
    rm = [float(r) for r in rho_moduli]
    er = [float(e) for e in errors]
    if len(rm) != len(er):
        raise VerificationError(f"{claim}: {len(rm)} moduli but {len(er)} errors")
    if len(set(rm)) < MIN_FIT_POINTS:
        raise VerificationError(f"{claim}: need at least {MIN_FIT_POINTS} distinct |rho|, got {len(set(rm))}")
    if any(not np.isfinite(e) for e in er):
        return SweepReport(claim, rm, er, bound, passed=False)
    if any(e <= 0 for e in er) or max(er) <= ROUNDOFF_FLOOR:
        log.warning("%s: errors exact or at roundoff level (max %.3e), fit trivially passes", claim, max(er))
        return SweepReport(
            claim, rm, er, bound, fitted_slope=float("-inf"), fit_residual=0.0, passed=True, trivial=True
        )
    lx, ly = np.log(rm), np.log(er)
    coef, residuals, *_ = np.polyfit(lx, ly, 1, full=True)
    slope = float(coef[0])
    residual = float(np.sqrt(residuals[0] / len(lx))) if residuals.size else 0.0
    log.info("%s: fitted slope %.3f (bound %.2f)", claim, slope, bound)
    return SweepReport(claim, rm, er, bound, fitted_slope=slope, fit_residual=residual, passed=slope <= bound)


def fit_or_raw(claim: str, rho_moduli: Sequence[float], errors: Sequence[float], bound: float) -> SweepReport:
    """slope_fit when the sweep is long enough, otherwise the raw data with no verdict"""
    if len(set(rho_moduli)) >= MIN_FIT_POINTS:
        return slope_fit(claim, rho_moduli, errors, bound)
    log.warning("%s: %d points, no slope fitted", claim, len(rho_moduli))
    return SweepReport(claim, list(rho_moduli), list(errors), bound)


def root_sum(roots: np.ndarray, k: int, nu: int) -> complex:
    """sum_{j != k} R_j^(nu+1) R_k^-nu / (R_k - R_j)"""
    rk = roots[k]
    others = np.delete(roots, k)
    return complex(np.sum(others ** (nu + 1) * rk ** (-nu) / (rk - others)))


@dataclass
class IdentityReport:
    n_max: int
    max_deviation: float
    rows: List[tuple]

    @property
    def passed(self) -> bool:
        return self.max_deviation <= 1e-12


def identity_suite(n_max: int = 8) -> IdentityReport:
    """The root sum equals nu - (n-1)/2 for every n <= n_max, k and nu"""
    if n_max < 2:
        raise SpecError(f"n_max must be at least 2, got {n_max}")
    rows = []
    worst = 0.0
    for n in range(2, n_max + 1):
        roots = roots_of_unity(n)
        for k in range(n):
            for nu in range(n):
                value = root_sum(roots, k, nu)
                expected = nu - (n - 1) / 2
                worst = max(worst, abs(value - expected))
                rows.append((n, k, nu, value, expected))
    return IdentityReport(n_max=n_max, max_deviation=worst, rows=rows)


def _solve_ivp(fun, x0: float, seed: np.ndarray, x_eval: np.ndarray) -> np.ndarray:
    out = np.zeros((seed.size, x_eval.size), dtype=complex)
    fwd = x_eval >= x0
    bwd = ~fwd
    for mask, end in ((fwd, x_eval.max(initial=x0)), (bwd, x_eval.min(initial=x0))):
        if not mask.any():
            continue
        pts = x_eval[mask]
        order = np.argsort(pts) if end >= x0 else np.argsort(-pts)
        if end == x0:
            out[:, mask] = seed[:, None]
            continue
        sol = solve_ivp(
            fun,
            (x0, end),
            seed.astype(complex),
            method="DOP853",
            t_eval=pts[order],
            rtol=ORACLE_RTOL,
            atol=ORACLE_ATOL,
        )
        if not sol.success:
            raise VerificationError(f"oracle integration failed: {sol.message}")
        vals = np.empty((seed.size, pts.size), dtype=complex)
        vals[:, order] = sol.y
        out[:, mask] = vals
    return out


def ivp_oracle(
    spec: Union[ProblemSpecN, SystemSpec],
    rho: complex,
    x0: float,
    seed: Sequence[complex],
    x_eval: np.ndarray,
    root: Optional[complex] = None,
) -> np.ndarray:
    """
    Trajectory of the equation through seed at x0, sampled at x_eval (forward and backward from x0).
    With root=None the raw unknowns are integrated ((y, y', .., y^(n-1)) or Y); with a root R the
    renormalized ones (z_nu = (rho R)^-nu exp(-rho R x) y^(nu), or W = exp(-rho R x) Y).
    """
    rho = complex(rho)
    s = np.asarray(seed, dtype=complex)
    xs = np.atleast_1d(np.asarray(x_eval, dtype=float))
    if not np.all(np.isfinite(s)):
        raise VerificationError("oracle seed values must be finite")
    if isinstance(spec, ProblemSpecN):
        if root is not None:
            fun = renormalized_rhs(spec, rho, root)
        else:
            n = spec.n
            rn = rho**n

            def fun(x: float, y: np.ndarray) -> np.ndarray:
                dy = np.empty_like(y)
                dy[:-1] = y[1:]
                pv = np.array([0j if f.is_zero else f.eval(x) for f in spec.p])
                dy[-1] = rn * y[0] - np.sum(pv * y[: n - 1])
                return dy

    else:
        shift = 0.0 if root is None else complex(root)
        eye = np.eye(spec.n)

        def fun(x: float, w: np.ndarray) -> np.ndarray:
            a = spec.A0.astype(complex)
            for mu in range(1, spec.M + 1):
                a = a + evaluate_matrix(spec.a(mu), np.array([x]))[0] / rho**mu
            return rho * ((a - shift * eye) @ w)

    return _solve_ivp(fun, float(x0), s, xs)


def _segments(x: np.ndarray, k: int, n: int, rate: float) -> List[Tuple[int, int]]:
    """
    (seed index, far index) pairs covering x. The dominant branch runs forward from the left end and the
    recessive one backward from the right end; a middle branch is cut into forward segments over which no
    mode grows by more than exp(SEGMENT_GROWTH).
    """
    last = x.size - 1
    if k == n - 1:
        return [(0, last)]
    if k == 0:
        return [(last, 0)]
    length = SEGMENT_GROWTH / rate if rate > 0 else np.inf
    out = []
    start = 0
    while start < last:
        stop = int(np.searchsorted(x, x[start] + length, side="right")) - 1
        stop = min(max(stop, start + 1), last)
        out.append((start, stop))
        start = stop
    return out


def _trajectory_error(
    trajectory: Callable[[float, np.ndarray, np.ndarray], np.ndarray],
    x: np.ndarray,
    values: np.ndarray,
    segments: Sequence[Tuple[int, int]],
) -> float:
    """values has shape (m, len(x)); trajectory(x0, seed, x_eval) integrates the equation through seed"""
    worst = 0.0
    for i0, i1 in segments:
        lo, hi = min(i0, i1), max(i0, i1)
        traj = trajectory(float(x[i0]), values[:, i0], x[lo : hi + 1])
        worst = max(worst, float(np.max(np.abs(traj - values[:, lo : hi + 1]))))
    return worst / max(1.0, float(np.max(np.abs(values))))


def _growth_rate(rho: complex, roots: np.ndarray, root: complex) -> float:
    return float(np.max(np.abs(np.real(rho * (roots - root)))))


def oracle_error(spec: ProblemSpecN, result: FSSResult) -> float:
    """Max renormalized deviation between the solver's z and the oracle seeded from it"""
    segments = _segments(result.x, result.k, spec.n, _growth_rate(result.rho, result.roots, result.root))
    return _trajectory_error(
        lambda x0, seed, xs: ivp_oracle(spec, result.rho, x0, seed, xs, root=result.root),
        result.x,
        result.z,
        segments,
    )


def _default_base(spec: ProblemSpecN) -> float:
    rho_alpha = rho_threshold(spec)
    return rho_alpha if rho_alpha > 0 else 1.0


def oracle_check(
    spec: ProblemSpecN, sector_index: int = 0, multipliers: Sequence[float] = (4, 8, 16), cells: int = 512
) -> ClaimResult:
    frame = sector_ordering(roots_of_unity(spec.n), sector_index)
    grid = Grid.uniform(spec.alpha, spec.T, cells)
    base = _default_base(spec)
    worst = 0.0
    errors = []
    for m in multipliers:
        rho = frame.ray(m * base)
        err = max(oracle_error(spec, r) for r in solve_branches(spec, frame, rho, grid))
        errors.append(err)
        worst = max(worst, err)
    return ClaimResult(
        "oracle",
        worst <= ORACLE_TOLERANCE,
        f"max trajectory error {worst:.3e} at |rho| = {', '.join(f'{m * base:.4g}' for m in multipliers)}",
        data=errors,
    )


def contraction_check(
    spec: ProblemSpecN, sector_index: int = 0, multipliers: Sequence[float] = (1, 2, 4, 8), cells: int = 512
) -> ClaimResult:
    rho_alpha = rho_threshold(spec)
    if rho_alpha == 0:
        return ClaimResult("contraction", True, "free equation: kernel vanishes")
    frame = sector_ordering(roots_of_unity(spec.n), sector_index)
    grid = Grid.uniform(spec.alpha, spec.T, cells)
    norms = [
        max(kernel_norm(spec, frame, k, frame.ray(m * rho_alpha), grid) for k in range(spec.n)) for m in multipliers
    ]
    decreasing = all(b < a for a, b in zip(norms, norms[1:]))
    passed = norms[0] <= 0.5 + 1e-3 and decreasing
    return ClaimResult(
        "contraction",
        passed,
        "kernel norms {} at |rho|/rho_alpha = {}".format(
            ", ".join(f"{v:.4f}" for v in norms), ", ".join(f"{m:g}" for m in multipliers)
        ),
        data=norms,
    )


def _sweep_moduli(spec: ProblemSpecN, config: SweepConfig) -> List[float]:
    moduli = config.moduli(max(8.0, 4.0 * rho_threshold(spec)))
    return _cap(moduli, roots_of_unity(spec.n), spec.T - spec.alpha)


def first_order_sweep(spec: ProblemSpecN, sector_index: int = 0, config: SweepConfig = SweepConfig()) -> SweepReport:
    """max over the interior window of |z_{nu k} - 1 - beta_1/(rho R_k)|"""
    frame = sector_ordering(roots_of_unity(spec.n), sector_index)
    grid = Grid.uniform(spec.alpha, spec.T, config.cells)
    mask = interior_mask(grid.edges, spec.alpha, spec.T)
    beta1 = beta_table(spec, levels=1).beta[1].eval(grid.edges[mask])

    def point(modulus: float) -> float:
        rho = frame.ray(modulus, config.angle_offset)
        err = 0.0
        for r in solve_branches(spec, frame, rho, grid):
            approx = 1.0 + beta1 / (rho * r.root)
            err = max(err, float(np.max(np.abs(r.z[:, mask] - approx[None, :]))))
        return err

    moduli = _sweep_moduli(spec, config)
    return fit_or_raw("first_order", moduli, map_workers(point, moduli, config.workers), FIRST_ORDER_BOUND)


def sharpened_sweep(spec: ProblemSpecN, sector_index: int = 0, config: SweepConfig = SweepConfig()) -> SweepReport:
    """Anchored solves against 1 + beta_1/u + (beta_2 + nu beta_1')/u^2, u = rho R_k, on the interior window"""
    frame = sector_ordering(roots_of_unity(spec.n), sector_index)
    grid = Grid.uniform(spec.alpha, spec.T, config.cells)
    mask = interior_mask(grid.edges, spec.alpha, spec.T)
    xs = grid.edges[mask]
    tables = beta_table(spec, levels=2)
    beta1 = tables.beta[1].eval(xs)
    dbeta1 = tables.beta[1].derivative().eval(xs)
    beta2 = tables.beta2_anchored.eval(xs)
    nu = np.arange(spec.n)[:, None]

    def point(modulus: float) -> float:
        rho = frame.ray(modulus, config.angle_offset)
        err = 0.0
        for r in solve_branches(spec, frame, rho, grid, AnchorConfig.anchored()):
            u = rho * r.root
            approx = 1.0 + beta1[None, :] / u + (beta2[None, :] + nu * dbeta1[None, :]) / u**2
            err = max(err, float(np.max(np.abs(r.z[:, mask] - approx))))
        return err

    moduli = _sweep_moduli(spec, config)
    return fit_or_raw("sharpened", moduli, map_workers(point, moduli, config.workers), SHARPENED_BOUND)


def wronskian_sweep(spec: ProblemSpecN, sector_index: int = 0, config: SweepConfig = SweepConfig()) -> SweepReport:
    """|det[y_k^(nu)] / (rho^(n(n-1)/2) det[R_k^nu]) - 1| maximized over the grid"""
    frame = sector_ordering(roots_of_unity(spec.n), sector_index)
    grid = Grid.uniform(spec.alpha, spec.T, config.cells)

    def point(modulus: float) -> float:
        results = solve_branches(spec, frame, frame.ray(modulus, config.angle_offset), grid)
        return max(abs(wronskian(results, i).ratio - 1.0) for i in range(grid.edges.size))

    moduli = _sweep_moduli(spec, config)
    return fit_or_raw("wronskian", moduli, map_workers(point, moduli, config.workers), WRONSKIAN_BOUND)


def recurrence_check(spec: ProblemSpecN, cells: int = 64) -> ClaimResult:
    x = np.linspace(0.0, spec.T, cells + 1)
    tables = beta_table(spec)
    worst = float(np.max(np.abs(expansion_residual(spec, tables, x))))
    return ClaimResult("recurrence", worst <= COEFFICIENT_TOLERANCE, f"max collected-power residual {worst:.3e}")


def system_oracle_error(spec: SystemSpec, sector_index: int, k: int, rho: complex, cells: int = 512) -> float:
    grid = Grid.uniform(0.0, spec.T, cells)
    res = solve_general_A0(spec, sector_index, k, rho, grid=grid)
    segments = _segments(res.x, k, spec.n, _growth_rate(res.rho, spec.roots().roots, res.root))
    return _trajectory_error(
        lambda x0, seed, xs: ivp_oracle(spec, res.rho, x0, seed, xs, root=res.root), res.x, res.W.T, segments
    )


def system_oracle_check(
    spec: SystemSpec, sector_index: int = 0, multipliers: Sequence[float] = (1, 2, 4), cells: int = 512
) -> ClaimResult:
    rho_star, _ = certify_rho(spec, sector_index, 1.0, grid=Grid.uniform(0.0, spec.T, cells))
    _, _, rs = diagonalize(spec)
    frame = sector_ordering(rs.roots, sector_index)
    errors = [
        max(system_oracle_error(spec, sector_index, k, frame.ray(m * rho_star), cells) for k in range(spec.n))
        for m in multipliers
    ]
    worst = max(errors)
    return ClaimResult("system_oracle", worst <= ORACLE_TOLERANCE, f"max trajectory error {worst:.3e}", data=errors)


def system_remainder_sweep(spec: SystemSpec, sector_index: int = 0, config: SweepConfig = SweepConfig()) -> ClaimResult:
    """
    max_x |W_k - W0_k| over a sweep. N >= 1: fitted slope <= -(N + 0.7). N = 0: bounded and non-increasing.
    """
    grid = Grid.uniform(0.0, spec.T, config.cells)
    if config.rho_min is None:
        start, _ = certify_rho(spec, sector_index, 1.0, grid=grid)
    else:
        start = config.rho_min
    _, _, rs = diagonalize(spec)
    frame = sector_ordering(rs.roots, sector_index)
    moduli = _cap([start * config.factor**i for i in range(config.count)], rs.roots, spec.T)

    def point(modulus: float) -> float:
        rho = frame.ray(modulus, config.angle_offset)
        return max(
            float(np.max(np.abs(solve_general_A0(spec, sector_index, k, rho, grid=grid).remainder)))
            for k in range(spec.n)
        )

    errors = map_workers(point, moduli, config.workers)
    if spec.N >= 1:
        report = fit_or_raw("system_remainder", moduli, errors, SYSTEM_BOUND - (spec.N - 1))
        return ClaimResult("system_remainder", report.passed, f"fitted slope {report.fitted_slope:.3f}", report=report)
    bounded = all(np.isfinite(e) for e in errors)
    monotone = all(b <= a * (1 + 1e-9) for a, b in zip(errors, errors[1:]))
    report = SweepReport("system_remainder", moduli, errors, float("nan"), passed=bounded and monotone)
    return ClaimResult(
        "system_remainder",
        report.passed,
        "N=0: remainders {} ({}monotone)".format(", ".join(f"{e:.3e}" for e in errors), "" if monotone else "not "),
        report=report,
    )


def system_recurrence_check(spec: SystemSpec, cells: int = 64) -> ClaimResult:
    diag, _, _ = diagonalize(spec)
    x = np.linspace(0.0, spec.T, cells + 1)
    worst = float(np.max(system_recurrence_residual(diag, g_table(diag), x)))
    return ClaimResult("system_recurrence", worst <= COEFFICIENT_TOLERANCE, f"max row residual {worst:.3e}")


def parameterized_check(ell: ParamSpec, cells: int = 64) -> ClaimResult:
    """omega_k against the diagonal of the conjugated A_(1), and G_(0) against exp(∫ omega_k)"""
    x = np.linspace(0.0, ell.T, cells + 1)
    tables = param_coeffs(ell)
    diag, _, _ = diagonalize(companion_reduce(ell))
    a1 = evaluate_matrix(diag.a(1), x)
    worst_omega = max(float(np.max(np.abs(tables.omega[k].eval(x) - a1[:, k, k]))) for k in range(ell.n))
    worst_g = 0.0
    for k in range(ell.n):
        expected = np.exp(tables.omega[k].antiderivative(0.0).eval(x))
        for nu in range(ell.n):
            worst_g = max(worst_g, float(np.max(np.abs(tables.G_values(k, 0, nu, x) - expected))))
    worst = max(worst_omega, worst_g)
    return ClaimResult(
        "parameterized_coefficients",
        worst <= COEFFICIENT_TOLERANCE,
        f"omega deviation {worst_omega:.3e}, G_(0) deviation {worst_g:.3e}",
    )


def companion_consistency(
    spec: ProblemSpecN, sector_index: int = 0, rho: Optional[complex] = None, cells: int = 512
) -> ClaimResult:
    """First component of the companion-reduced system (N=0) against the n-th order solve anchored at 0"""
    base = spec.with_alpha(0.0).with_N(0) if spec.alpha != 0 or spec.N != 0 else spec
    system = companion_reduce(embed_nth_order(base))
    diag, _, rs = diagonalize(system)
    frame_sys = sector_ordering(rs.roots, sector_index)
    frame = sector_ordering(roots_of_unity(spec.n), sector_index)
    if rho is None:
        rho = frame.ray(4.0 * _default_base(base))
    grid = Grid.uniform(0.0, spec.T, cells)
    worst = 0.0
    for k in range(spec.n):
        nth = solve_z(base, frame, k, rho, grid)
        # the system orders its roots on the same ray; match branches by root value
        ks = int(np.argmin(np.abs(frame_sys.roots - nth.root)))
        res = solve_general_A0(system, sector_index, ks, rho, N=0, grid=grid)
        worst = max(worst, float(np.max(np.abs(res.W[:, 0] - nth.z[0]))))
    return ClaimResult(
        "companion_consistency", worst <= CONSISTENCY_TOLERANCE, f"max first-component deviation {worst:.3e}"
    )


def identity_claim(n_max: int = 8) -> ClaimResult:
    report = identity_suite(n_max)
    return ClaimResult("root_sum_identity", report.passed, f"max deviation {report.max_deviation:.3e} for n <= {n_max}")


def _guard(name: str, fn: Callable[[], Union[ClaimResult, SweepReport]]) -> ClaimResult:
    try:
        out = fn()
    except FSSError as exc:
        log.error("%s: %s", name, exc)
        return ClaimResult(name, False, str(exc))
    if isinstance(out, SweepReport):
        return ClaimResult(
            out.claim, out.passed, f"fitted slope {out.fitted_slope:.3f} (bound {out.bound})", report=out
        )
    return out


def run_suite(spec: AnySpec, sector_index: int = 0, config: SweepConfig = SweepConfig()) -> List[ClaimResult]:
    claims: List[tuple] = [("root_sum_identity", lambda: identity_claim())]
    if isinstance(spec, ProblemSpecN):
        claims += [
            ("recurrence", lambda: recurrence_check(spec)),
            ("contraction", lambda: contraction_check(spec, sector_index, cells=config.cells)),
            ("oracle", lambda: oracle_check(spec, sector_index, cells=config.cells)),
            ("first_order", lambda: first_order_sweep(spec, sector_index, config)),
            ("wronskian", lambda: wronskian_sweep(spec, sector_index, config)),
            ("companion_consistency", lambda: companion_consistency(spec, sector_index, cells=config.cells)),
        ]
        if spec.coefficient(spec.n - 2).smoothness_class >= 1:
            claims.append(("sharpened", lambda: sharpened_sweep(spec, sector_index, config)))
    elif isinstance(spec, SystemSpec):
        claims += [
            ("system_recurrence", lambda: system_recurrence_check(spec)),
            ("system_oracle", lambda: system_oracle_check(spec, sector_index, cells=config.cells)),
            ("system_remainder", lambda: system_remainder_sweep(spec, sector_index, config)),
        ]
    else:
        reduced = companion_reduce(spec)
        claims += [
            ("parameterized_coefficients", lambda: parameterized_check(spec)),
            ("system_recurrence", lambda: system_recurrence_check(reduced)),
            ("system_oracle", lambda: system_oracle_check(reduced, sector_index, cells=config.cells)),
        ]
        nth = as_nth_order(spec)
        if nth is not None:
            claims.append(
                ("companion_consistency", lambda: companion_consistency(nth, sector_index, cells=config.cells))
            )
    results = []
    for name, fn in claims:
        log.info("checking %s", name)
        results.append(_guard(name, fn))
    return results


def failed(results: Iterable[ClaimResult]) -> List[ClaimResult]:
    return [r for r in results if not r.passed]
