import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from .errors import ConvergenceError, FSSError, RhoThresholdError, SectorError, SingularMatrixError
from .funcspace import Grid
from .problems import ProblemSpecN
from .quadrature import ExponentialSweep
from .spectra import SectorFrame
from .types import AnchorMode, SweepDirection

log = logging.getLogger("birkhoff_nth")

DEFAULT_CELLS = 512
DEFAULT_TOL = 1e-13
DEFAULT_MAX_ITER = 200
FORCED_CONTRACTION_LIMIT = 0.95
KERNEL_NORM_SAMPLES = 129
WRONSKIAN_COND_LIMIT = 1e14


def rho_threshold(spec: ProblemSpecN, alpha: Optional[float] = None) -> float:
    """max_m (2 ∫_alpha^T |p_m|)^(1/(n-1-m)); 0 for the free equation"""
    a = spec.alpha if alpha is None else alpha
    value = 0.0
    for m, f in enumerate(spec.p):
        if f.is_zero:
            continue
        norm = f.l1_norm(a, spec.T)
        value = max(value, (2.0 * norm) ** (1.0 / (spec.n - 1 - m)))
    return value


@dataclass(frozen=True)
class AnchorConfig:
    """
    Inhomogeneous part of the integral equation. Plain: C_j = delta_jk. Anchored: C_j for j != k cancel the
    endpoint exponential layers, with gamma_j = alpha below k and T above.
    """

    mode: AnchorMode = AnchorMode.plain

    @classmethod
    def plain(cls) -> "AnchorConfig":
        return cls(AnchorMode.plain)

    @classmethod
    def anchored(cls) -> "AnchorConfig":
        return cls(AnchorMode.anchored)

    def gammas(self, spec: ProblemSpecN, n: int, k: int) -> np.ndarray:
        return np.array([spec.alpha if j <= k else spec.T for j in range(n)])

    def constants(self, spec: ProblemSpecN, roots: np.ndarray, k: int, rho: complex) -> np.ndarray:
        """c_j of the inhomogeneous term sum_j c_j (R_j/R_k)^nu exp(rho (R_j - R_k)(x - gamma_j))"""
        n = roots.size
        c = np.zeros(n, dtype=complex)
        c[k] = 1.0
        if self.mode == AnchorMode.plain:
            return c
        p = spec.coefficient(spec.n - 2)
        gam = self.gammas(spec, n, k)
        rk = roots[k]
        for j in range(n):
            if j == k:
                continue
            c[j] = -p.eval(gam[j]) * roots[j] / (spec.n * (rho * rk) ** 2 * (rk - roots[j]))
        return c

    def inhomogeneous(self, spec: ProblemSpecN, roots: np.ndarray, k: int, rho: complex, x: np.ndarray) -> np.ndarray:
        """Shape (n, len(x)) for nu = 0..n-1"""
        n = roots.size
        xs = np.atleast_1d(x)
        out = np.ones((n, xs.size), dtype=complex)
        if self.mode == AnchorMode.plain:
            return out
        c = self.constants(spec, roots, k, rho)
        gam = self.gammas(spec, n, k)
        nu = np.arange(n)[:, None]
        for j in range(n):
            if j == k or c[j] == 0:
                continue
            lam = rho * (roots[j] - roots[k])
            out += c[j] * (roots[j] / roots[k]) ** nu * np.exp(lam * (xs - gam[j]))[None, :]
        return out


def _branch_coefficients(roots: np.ndarray, k: int) -> np.ndarray:
    """s_j R_j^(nu+1) R_k^-nu with s_j = -1 for j <= k and +1 for j > k; shape (n_nu, n_j)"""
    n = roots.size
    nu = np.arange(n)[:, None]
    sign = np.where(np.arange(n) <= k, -1.0, 1.0)[None, :]
    return sign * roots[None, :] ** (nu + 1) * roots[k] ** (-nu)


def _source_coefficients(spec: ProblemSpecN, roots: np.ndarray, k: int, rho: complex) -> np.ndarray:
    """(rho R_k)^m / (n rho^(n-1)) for m = 0..n-2"""
    m = np.arange(spec.n - 1)
    return (rho * roots[k]) ** m / (spec.n * rho ** (spec.n - 1))


def kernel_A(
    spec: ProblemSpecN,
    sector: SectorFrame,
    k: int,
    nu: int,
    m: int,
    x: np.ndarray,
    t: np.ndarray,
    rho: complex,
) -> np.ndarray:
    """
    Kernel of the integral system at (x, t) (broadcast): for x >= t the branches j <= k enter with
    factor -1, for x < t the branches j > k with factor +1.
    """
    roots = sector.roots
    xs, ts = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(t, dtype=float))
    coef = _branch_coefficients(roots, k)[nu]
    d = xs - ts
    lower = d >= 0
    out = np.zeros(xs.shape, dtype=complex)
    for j in range(roots.size):
        mask = lower if j <= k else ~lower
        lam = rho * (roots[j] - roots[k])
        out += np.where(mask, coef[j] * np.exp(np.where(mask, lam * d, 0.0)), 0.0)
    scale = _source_coefficients(spec, roots, k, rho)[m]
    return out * scale * spec.p[m].eval(ts.ravel()).reshape(ts.shape)


def kernel_norm(spec: ProblemSpecN, sector: SectorFrame, k: int, rho: complex, grid: Grid) -> float:
    """Discretized max_nu sum_m max_x ∫ |A_{nu m k}(x, t)| dt, x on a subset of the cell edges"""
    if spec.is_free:
        return 0.0
    step = max(1, grid.cells // (KERNEL_NORM_SAMPLES - 1))
    xs = grid.edges[::step]
    if xs[-1] != grid.edges[-1]:
        xs = np.append(xs, grid.edges[-1])
    X = xs[:, None]
    T = grid.nodes[None, :]
    best = 0.0
    for nu in range(spec.n):
        total = 0.0
        for m in range(spec.n - 1):
            if spec.p[m].is_zero:
                continue
            a = np.abs(kernel_A(spec, sector, k, nu, m, X, T, rho))
            total += float(np.max(a @ grid.weights))
        best = max(best, total)
    return best


@dataclass
class FSSResult:
    """z_{nu k} on the cell edges x, with y_k^(nu) = (rho R_k)^nu exp(rho R_k x) z_{nu k}"""

    rho: complex
    k: int
    root: complex
    sector_index: int
    roots: np.ndarray
    x: np.ndarray
    z: np.ndarray
    iterations: int
    final_update_norm: float
    contraction_estimate: float
    anchor_mode: AnchorMode = AnchorMode.plain
    alpha: float = 0.0
    extended: bool = field(default=False)
    # sup-norm of inhom + K z - z over the quadrature nodes for the returned z
    residual: float = 0.0

    @property
    def n(self) -> int:
        return self.z.shape[0]

    @property
    def y(self) -> np.ndarray:
        u = self.rho * self.root
        nu = np.arange(self.n)[:, None]
        return u**nu * np.exp(u * self.x)[None, :] * self.z


def renormalized_rhs(spec: ProblemSpecN, rho: complex, root: complex) -> Callable[[float, np.ndarray], np.ndarray]:
    """
    Right-hand side of the equation for z_nu = (rho R)^-nu exp(-rho R x) y^(nu):
    z_nu' = u (z_{nu+1} - z_nu), z_{n-1}' = -u z_{n-1} + u^-(n-1) (rho^n z_0 - sum_m p_m u^m z_m), u = rho R.
    """
    n = spec.n
    u = rho * root
    um = u ** np.arange(n - 1)
    rn = rho**n
    scale = u ** (-(n - 1))
    coeffs = [f for f in spec.p]

    def rhs(x: float, z: np.ndarray) -> np.ndarray:
        dz = np.empty_like(z)
        dz[:-1] = u * (z[1:] - z[:-1])
        pv = np.array([0j if f.is_zero else f.eval(x) for f in coeffs])
        dz[-1] = -u * z[-1] + scale * (rn * z[0] - np.sum(pv * um * z[: n - 1], axis=0))
        return dz

    return rhs


def solve_z(
    spec: ProblemSpecN,
    sector: SectorFrame,
    k: int,
    rho: complex,
    grid: Optional[Grid] = None,
    anchors: Optional[AnchorConfig] = None,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    force: bool = False,
) -> FSSResult:
    """
    Successive approximations for z_{nu k}, nu = 0..n-1, on [alpha, T]. Raises RhoThresholdError below
    rho_alpha unless forced, ConvergenceError when the updates do not drop below tol.
    """
    rho = complex(rho)
    anchors = anchors or AnchorConfig.plain()
    n = spec.n
    if sector.n != n:
        raise SectorError(f"sector frame is for n={sector.n}, equation has n={n}")
    if not 0 <= k < n:
        raise SectorError(f"branch index must be in [0, {n - 1}], got {k}")
    sector.check_rho(rho)
    grid = grid or Grid.uniform(spec.alpha, spec.T, DEFAULT_CELLS)
    roots = sector.roots
    threshold = rho_threshold(spec)
    contraction = kernel_norm(spec, sector, k, rho, grid)
    if abs(rho) < threshold:
        if not force:
            raise RhoThresholdError(f"|rho|={abs(rho):.6g} below the threshold {threshold:.6g}")
        log.warning("|rho|=%.6g below the threshold %.6g; measured contraction %.4f", abs(rho), threshold, contraction)
        if contraction > FORCED_CONTRACTION_LIMIT:
            raise RhoThresholdError(
                f"measured contraction estimate {contraction:.4f} exceeds {FORCED_CONTRACTION_LIMIT} "
                f"at |rho|={abs(rho):.6g}"
            )

    inhom_nodes = anchors.inhomogeneous(spec, roots, k, rho, grid.nodes)
    inhom_edges = anchors.inhomogeneous(spec, roots, k, rho, grid.edges)

    def result(z_edges: np.ndarray, iterations: int, update: float, residual: float = 0.0) -> FSSResult:
        return FSSResult(
            rho=rho,
            k=k,
            root=complex(roots[k]),
            sector_index=sector.sector_index,
            roots=roots.copy(),
            x=grid.edges.copy(),
            z=z_edges,
            iterations=iterations,
            final_update_norm=update,
            contraction_estimate=contraction,
            anchor_mode=anchors.mode,
            alpha=spec.alpha,
            residual=residual,
        )

    if spec.is_free:
        log.debug("free equation: z is the inhomogeneous term")
        return result(inhom_edges, 1, 0.0)

    coef = _branch_coefficients(roots, k)
    src = _source_coefficients(spec, roots, k, rho)
    p_nodes = np.array([f.eval(grid.nodes) for f in spec.p])
    sweeps = [
        ExponentialSweep(
            grid,
            rho * (roots[j] - roots[k]),
            SweepDirection.forward if j <= k else SweepDirection.backward,
        )
        for j in range(n)
    ]

    def apply(z_nodes: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        f = np.sum((src[:, None] * p_nodes) * z_nodes[: n - 1], axis=0)
        e_parts, n_parts = zip(*(s.apply(f) for s in sweeps))
        return coef @ np.array(e_parts), coef @ np.array(n_parts)

    z = inhom_nodes.copy()
    update = np.inf
    iterations = 0
    while iterations < max_iter:
        iterations += 1
        _, kz = apply(z)
        z_new = inhom_nodes + kz
        update = float(np.max(np.abs(z_new - z)))
        z = z_new
        if not np.isfinite(update) or update > 1e100:
            raise ConvergenceError("successive approximations diverge", iterations, update)
        log.debug("k=%d iteration %d update %.3e", k, iterations, update)
        if update < tol * max(1.0, float(np.max(np.abs(z)))):
            break
    else:
        raise ConvergenceError(f"no convergence at |rho|={abs(rho):.6g}", iterations, update)

    kz_edges, kz_nodes = apply(z)
    residual = float(np.max(np.abs(inhom_nodes + kz_nodes - z)))
    log.info("k=%d |rho|=%.6g converged in %d iterations (residual %.3e)", k, abs(rho), iterations, residual)
    return result(inhom_edges + kz_edges, iterations, update, residual)


def solve_branches(
    spec: ProblemSpecN,
    sector: SectorFrame,
    rho: complex,
    grid: Optional[Grid] = None,
    anchors: Optional[AnchorConfig] = None,
    **kwargs,
) -> List[FSSResult]:
    grid = grid or Grid.uniform(spec.alpha, spec.T, DEFAULT_CELLS)
    return [solve_z(spec, sector, k, rho, grid, anchors, **kwargs) for k in range(spec.n)]


def _check_compatible(results: Sequence[FSSResult]) -> None:
    if not results:
        raise FSSError("no branch solutions given")
    first = results[0]
    for r in results[1:]:
        if r.rho != first.rho:
            raise FSSError(f"branch solutions at different rho: {first.rho} and {r.rho}")
        if r.sector_index != first.sector_index or not np.array_equal(r.roots, first.roots):
            raise FSSError("branch solutions from different sectors")
        if not np.array_equal(r.x, first.x):
            raise FSSError("branch solutions on different grids")
    if sorted(r.k for r in results) != list(range(first.roots.size)):
        raise FSSError("need exactly one solution per branch k = 0..n-1")


def assemble_fss(results: Sequence[FSSResult]) -> np.ndarray:
    """y_k^(nu)(x_i) as an array of shape (len(x), n_nu, n_k)"""
    _check_compatible(results)
    ordered = sorted(results, key=lambda r: r.k)
    return np.stack([r.y for r in ordered], axis=-1).transpose(1, 0, 2)


@dataclass(frozen=True)
class WronskianValue:
    value: complex
    reference: complex
    ratio: complex


def wronskian(results: Sequence[FSSResult], index: int = 0) -> WronskianValue:
    """
    det[y_k^(nu)] at x = x[index], against rho^(n(n-1)/2) det[R_k^nu] exp(rho x sum R_k).
    The exponentials are factored out, so the ratio never overflows.
    """
    _check_compatible(results)
    ordered = sorted(results, key=lambda r: r.k)
    first = ordered[0]
    roots = first.roots
    n = roots.size
    x = float(first.x[index])
    rho = first.rho
    vander = roots[None, :] ** np.arange(n)[:, None]
    zmat = vander * np.array([r.z[:, index] for r in ordered]).T
    if np.linalg.cond(zmat) > WRONSKIAN_COND_LIMIT:
        raise SingularMatrixError("fundamental matrix is singular", node=x, rho_modulus=abs(rho))
    prefactor = rho ** (n * (n - 1) // 2) * np.exp(rho * x * np.sum(roots))
    ref_det = np.linalg.det(vander)
    det = np.linalg.det(zmat)
    return WronskianValue(
        value=complex(prefactor * det), reference=complex(prefactor * ref_det), ratio=complex(det / ref_det)
    )


def extend_to_origin(result: FSSResult, spec: ProblemSpecN) -> FSSResult:
    """Continue z from x = alpha down to 0 by integrating the equation itself; spacing follows the grid"""
    if result.alpha <= 0 or result.extended:
        return result
    h = float(result.x[1] - result.x[0])
    count = max(1, int(np.ceil(result.alpha / h)))
    left = np.linspace(0.0, result.alpha, count + 1)[:-1]
    sol = solve_ivp(
        renormalized_rhs(spec, result.rho, result.root),
        (result.alpha, 0.0),
        result.z[:, 0],
        method="DOP853",
        t_eval=left[::-1],
        rtol=1e-10,
        atol=1e-12,
    )
    if not sol.success:
        raise ConvergenceError(f"continuation to the origin failed: {sol.message}")
    z_left = sol.y[:, ::-1]
    log.debug("k=%d continued to the origin over %d points", result.k, count)
    return FSSResult(
        rho=result.rho,
        k=result.k,
        root=result.root,
        sector_index=result.sector_index,
        roots=result.roots,
        x=np.concatenate([left, result.x]),
        z=np.concatenate([z_left, result.z], axis=1),
        iterations=result.iterations,
        final_update_norm=result.final_update_norm,
        contraction_estimate=result.contraction_estimate,
        anchor_mode=result.anchor_mode,
        alpha=result.alpha,
        extended=True,
    )
