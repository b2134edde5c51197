import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .asymptotic_coeffs import ExpansionTables, g_table
from .errors import ConvergenceError, RhoThresholdError, SectorError, SingularMatrixError, SpecError
from .funcspace import Grid
from .problems import SystemSpec, evaluate_matrix
from .quadrature import ExponentialSweep
from .reduction import diagonalize
from .spectra import SectorFrame, sector_ordering
from .types import SweepDirection

log = logging.getLogger("birkhoff_system")

DEFAULT_CELLS = 512
DEFAULT_TOL = 1e-13
DEFAULT_MAX_ITER = 200
CONTRACTION_LIMIT = 0.5
FORCED_CONTRACTION_LIMIT = 0.95
SINGULAR_COND = 1e12
KERNEL_NORM_SAMPLES = 65


@dataclass(frozen=True, eq=False)
class UVFrame:
    """
    Per-point tables with the exponential prefactors stripped (diagonal-system indices):
    U = [W0_1 .. W0_n], W0_k = sum_mu g_(mu)k / rho^mu, V = U^-1, LU_k = R_k U_k + U_k'/rho - A(x, rho) U_k,
    LstarV = -V LU V. Shapes (len(x), n, n).
    """

    x: np.ndarray
    U: np.ndarray
    Uprime: np.ndarray
    V: np.ndarray
    LU: np.ndarray
    LstarV: np.ndarray


def _a_values(spec: SystemSpec, rho: complex, x: np.ndarray) -> np.ndarray:
    a = np.broadcast_to(spec.A0, (x.size, spec.n, spec.n)).astype(complex)
    for mu in range(1, spec.M + 1):
        a = a + evaluate_matrix(spec.a(mu), x) / rho**mu
    return a


def build_uv(spec: SystemSpec, tables: ExpansionTables, rho: complex, x: np.ndarray) -> UVFrame:
    if not spec.is_diagonal:
        raise SpecError("the UV frame is built for a diagonal A0", "A0")
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    n = spec.n
    R = tables.roots
    U = np.zeros((xs.size, n, n), dtype=complex)
    Up = np.zeros((xs.size, n, n), dtype=complex)
    for k in range(n):
        for mu in range(tables.levels + 1):
            U[:, :, k] += tables.g_values(k, mu, xs) / rho**mu
            Up[:, :, k] += tables.g_derivative_values(k, mu, xs) / rho**mu
    cond = np.linalg.cond(U)
    bad = np.argmax(cond)
    if not np.isfinite(cond[bad]) or cond[bad] > SINGULAR_COND:
        raise SingularMatrixError("U is singular", node=float(xs[bad]), rho_modulus=abs(rho))
    V = np.linalg.inv(U)
    LU = U * R[None, None, :] + Up / rho - _a_values(spec, rho, xs) @ U
    LstarV = -V @ LU @ V
    return UVFrame(x=xs, U=U, Uprime=Up, V=V, LU=LU, LstarV=LstarV)


@dataclass
class SystemFSSResult:
    """W_k on the cell edges in the original coordinates, Y_k = exp(rho R_k x) W_k"""

    rho: complex
    k: int
    root: complex
    sector_index: int
    x: np.ndarray
    W: np.ndarray
    W0: np.ndarray
    iterations: int
    final_update_norm: float
    contraction_estimate: float
    observed_ratio: float
    omega: np.ndarray

    @property
    def Y(self) -> np.ndarray:
        return np.exp(self.rho * self.root * self.x)[:, None] * self.W

    @property
    def remainder(self) -> np.ndarray:
        return self.W - self.W0


def _observed_ratio(updates: List[float]) -> float:
    ratios = [b / a for a, b in zip(updates[:-1], updates[1:]) if a > 0 and b > 0]
    return float(np.median(ratios)) if ratios else 0.0


def _branch_tables(uv: UVFrame, sector: SectorFrame, k: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    perm = list(sector.ordering)
    signs = np.where(np.arange(len(perm)) <= k, 1.0, -1.0)
    # columns W0_j and rows of LstarV in sector order
    return uv.U[:, :, perm] * signs[None, None, :], uv.LstarV[:, perm, :], np.array(perm)


def kernel_norm(
    spec: SystemSpec, tables: ExpansionTables, sector: SectorFrame, k: int, rho: complex, grid: Grid
) -> float:
    """Discretized max_x max_nu sum_b ∫ |rho sum_j W0_{nu j}(x) exp(rho (R_j - R_k)(x - t)) LstarV_{jb}(t)| dt"""
    step = max(1, grid.cells // (KERNEL_NORM_SAMPLES - 1))
    xs = grid.edges[::step]
    if xs[-1] != grid.edges[-1]:
        xs = np.append(xs, grid.edges[-1])
    ux = build_uv(spec, tables, rho, xs)
    ut = build_uv(spec, tables, rho, grid.nodes)
    w0, _, _ = _branch_tables(ux, sector, k)
    _, lsv, _ = _branch_tables(ut, sector, k)
    R = sector.roots
    d = xs[:, None] - grid.nodes[None, :]
    n = spec.n
    K = np.zeros((xs.size, grid.nodes.size, n, n), dtype=complex)
    for j in range(n):
        mask = d >= 0 if j <= k else d < 0
        lam = rho * (R[j] - R[k])
        e = np.where(mask, np.exp(np.where(mask, lam * d, 0.0)), 0.0)
        K += e[:, :, None, None] * w0[:, None, :, j, None] * lsv[None, :, j, None, :]
    K *= rho
    integrals = np.einsum("xtvb,t->xvb", np.abs(K), grid.weights)
    return float(np.max(np.sum(integrals, axis=-1)))


def solve_system_fss(
    spec: SystemSpec,
    sector: SectorFrame,
    k: int,
    rho: complex,
    N: Optional[int] = None,
    grid: Optional[Grid] = None,
    tables: Optional[ExpansionTables] = None,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    force: bool = False,
) -> SystemFSSResult:
    """
    Successive approximations for W_k = W0_k + rho sum_{j<=k} W0_j(x) ∫_0^x exp(rho(R_j-R_k)(x-t)) LstarV_j W_k dt
    - rho sum_{j>k} W0_j(x) ∫_x^T ... for a system with diagonal A0.
    """
    rho = complex(rho)
    if not spec.is_diagonal:
        raise SpecError("A0 is not diagonal; use solve_general_A0", "A0")
    n = spec.n
    if sector.n != n:
        raise SectorError(f"sector frame is for n={sector.n}, system has n={n}")
    if not 0 <= k < n:
        raise SectorError(f"branch index must be in [0, {n - 1}], got {k}")
    sector.check_rho(rho)
    levels = spec.N if N is None else N
    tables = tables or g_table(spec, levels)
    grid = grid or Grid.uniform(0.0, spec.T, DEFAULT_CELLS)

    norm = kernel_norm(spec, tables, sector, k, rho, grid)
    if norm > CONTRACTION_LIMIT:
        if levels == 0:
            log.warning(
                "kernel norm %.4f above %.1f for N=0; relying on the observed contraction", norm, CONTRACTION_LIMIT
            )
        elif not force:
            raise RhoThresholdError(f"kernel norm {norm:.4f} exceeds {CONTRACTION_LIMIT} at |rho|={abs(rho):.6g}")
        elif norm > FORCED_CONTRACTION_LIMIT:
            raise RhoThresholdError(
                f"kernel norm {norm:.4f} exceeds {FORCED_CONTRACTION_LIMIT} at |rho|={abs(rho):.6g}"
            )

    uv_nodes = build_uv(spec, tables, rho, grid.nodes)
    uv_edges = build_uv(spec, tables, rho, grid.edges)
    w0n, lsv, perm = _branch_tables(uv_nodes, sector, k)
    w0e, _, _ = _branch_tables(uv_edges, sector, k)
    own = perm[k]
    R = sector.roots
    sweeps = [
        ExponentialSweep(grid, rho * (R[j] - R[k]), SweepDirection.forward if j <= k else SweepDirection.backward)
        for j in range(n)
    ]

    def apply(w: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        phi = np.einsum("xjb,xb->jx", lsv, w)
        e_parts, n_parts = zip(*(s.apply(phi[j]) for j, s in enumerate(sweeps)))
        ie, inn = np.array(e_parts), np.array(n_parts)
        return rho * np.einsum("xvj,jx->xv", w0e, ie), rho * np.einsum("xvj,jx->xv", w0n, inn)

    base_nodes = uv_nodes.U[:, :, own]
    base_edges = uv_edges.U[:, :, own]
    w = base_nodes.copy()
    updates: List[float] = []
    update = np.inf
    iterations = 0
    while iterations < max_iter:
        iterations += 1
        _, kw = apply(w)
        w_new = base_nodes + kw
        update = float(np.max(np.abs(w_new - w)))
        w = w_new
        updates.append(update)
        if not np.isfinite(update) or update > 1e100:
            raise ConvergenceError("successive approximations diverge", iterations, update)
        if update < tol * max(1.0, float(np.max(np.abs(w)))):
            break
    else:
        raise ConvergenceError(f"no convergence at |rho|={abs(rho):.6g}", iterations, update)

    kw_edges, _ = apply(w)
    log.info("system k=%d |rho|=%.6g converged in %d iterations (kernel norm %.4f)", k, abs(rho), iterations, norm)
    eye = np.eye(n, dtype=complex)
    return SystemFSSResult(
        rho=rho,
        k=k,
        root=complex(R[k]),
        sector_index=sector.sector_index,
        x=grid.edges.copy(),
        W=base_edges + kw_edges,
        W0=base_edges.copy(),
        iterations=iterations,
        final_update_norm=update,
        contraction_estimate=norm,
        observed_ratio=_observed_ratio(updates),
        omega=eye,
    )


def system_frame(spec: SystemSpec, sector_index: int) -> SectorFrame:
    return sector_ordering(spec.roots().roots, sector_index)


def solve_general_A0(
    spec: SystemSpec,
    sector_index: int,
    k: int,
    rho: complex,
    N: Optional[int] = None,
    grid: Optional[Grid] = None,
    **kwargs,
) -> SystemFSSResult:
    """Solve the conjugated diagonal system and map back with Y = omega Y~"""
    diag, omega, rs = diagonalize(spec)
    sector = sector_ordering(rs.roots, sector_index)
    res = solve_system_fss(diag, sector, k, rho, N=N, grid=grid, **kwargs)
    if diag is spec:
        return res
    res.W = res.W @ omega.T
    res.W0 = res.W0 @ omega.T
    res.omega = omega
    return res


def certify_rho(
    spec: SystemSpec,
    sector_index: int,
    rho_seed: float,
    N: Optional[int] = None,
    grid: Optional[Grid] = None,
    max_doublings: int = 24,
) -> Tuple[float, float]:
    """
    Smallest |rho| = rho_seed * 2^i on the sector's ray with every branch contracting: kernel norm <= 1/2 for
    N >= 1, observed ratio of successive updates <= 1/2 for N = 0. Returns (|rho|, measured value).
    """
    diag, _, rs = diagonalize(spec)
    sector = sector_ordering(rs.roots, sector_index)
    levels = diag.N if N is None else N
    tables = g_table(diag, levels)
    grid = grid or Grid.uniform(0.0, diag.T, DEFAULT_CELLS)
    modulus = float(rho_seed)
    if modulus <= 0:
        raise SpecError(f"seed modulus must be positive, got {rho_seed}")
    for _ in range(max_doublings + 1):
        rho = sector.ray(modulus)
        try:
            if levels >= 1:
                value = max(kernel_norm(diag, tables, sector, k, rho, grid) for k in range(diag.n))
            else:
                value = max(
                    solve_system_fss(diag, sector, k, rho, N=0, grid=grid, tables=tables).observed_ratio
                    for k in range(diag.n)
                )
        except (SingularMatrixError, ConvergenceError) as exc:
            log.debug("|rho|=%.6g not certified (%s)", modulus, exc)
            value = np.inf
        log.debug("certify: |rho|=%.6g measured %.4f", modulus, value)
        if value <= CONTRACTION_LIMIT:
            log.info("certified rho_* = %.6g (measured %.4f)", modulus, value)
            return modulus, float(value)
        modulus *= 2.0
    raise RhoThresholdError(f"no certified |rho| up to {modulus / 2:.6g}")


@dataclass(frozen=True)
class LeadingKernel:
    diagonal: float
    off_diagonal: float


def leading_kernel_diagnostics(
    spec: SystemSpec, tables: ExpansionTables, k: int, rho: complex, x: np.ndarray
) -> LeadingKernel:
    """
    Sup-norms of rho^(N+1) (LstarV g_(0)k): its k-th entry vanishes to leading order, the others do not.
    Indices refer to the diagonal system.
    """
    uv = build_uv(spec, tables, rho, x)
    g0 = tables.g_values(k, 0, uv.x)
    v = rho ** (tables.levels + 1) * np.einsum("xjb,xb->xj", uv.LstarV, g0)
    others = np.delete(v, k, axis=1)
    return LeadingKernel(
        diagonal=float(np.max(np.abs(v[:, k]))),
        off_diagonal=float(np.max(np.abs(others))) if others.size else 0.0,
    )
