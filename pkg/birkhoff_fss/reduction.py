import logging
from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import SpecError
from .funcspace import PiecewisePoly
from .problems import FunctionMatrix, ParamSpec, ProblemSpecN, SystemSpec
from .spectra import RootSystem, companion_matrix

log = logging.getLogger("reduction")


def embed_nth_order(spec: ProblemSpecN) -> ParamSpec:
    """Rewrite y^(n) + sum p_m y^(m) = rho^n y as the parameterized form with p_00 = -1 and p_{m,n} = p_m"""
    p_diag = tuple([-1.0 + 0j] + [0j] * (spec.n - 1))
    p: Dict[Tuple[int, int], PiecewisePoly] = {(m, spec.n): f for m, f in enumerate(spec.p) if not f.is_zero}
    return ParamSpec(n=spec.n, T=spec.T, p_diag=p_diag, p=p, N=spec.N, name=spec.name)


def companion_reduce(ell: ParamSpec) -> SystemSpec:
    """
    First-order system for Y = [y, y'/rho, ..., y^(n-1)/rho^(n-1)]: A0 is the companion matrix of F and
    A_(mu) carries -p_{k,k+mu}(x) in column k of its last row. omega is the Vandermonde matrix [R_k^nu].
    """
    n, T = ell.n, ell.T
    roots = ell.roots().roots
    zero = PiecewisePoly.zero(0.0, T)
    series: List[FunctionMatrix] = []
    for mu in range(1, n + 1):
        rows: List[Tuple[PiecewisePoly, ...]] = [tuple(zero for _ in range(n)) for _ in range(n - 1)]
        rows.append(tuple(-ell.coefficient(k, k + mu) if k + mu <= n else zero for k in range(n)))
        series.append(tuple(rows))
    omega = np.vander(roots, n, increasing=True).T
    log.debug("companion reduction: n=%d roots=%s", n, roots)
    return SystemSpec(
        n=n,
        T=T,
        A0=companion_matrix(ell.p_diag),
        A_series=tuple(series),
        N=ell.N,
        omega=omega,
        name=ell.name,
    )


def conjugate(m: FunctionMatrix, omega: np.ndarray, omega_inv: np.ndarray) -> FunctionMatrix:
    """omega^-1 M omega with function entries"""
    n = len(m)
    T = m[0][0].domain[1]
    out: List[Tuple[PiecewisePoly, ...]] = []
    for a in range(n):
        row: List[PiecewisePoly] = []
        for b in range(n):
            acc = PiecewisePoly.zero(0.0, T)
            for i in range(n):
                if omega_inv[a, i] == 0:
                    continue
                for j in range(n):
                    if omega[j, b] == 0 or m[i][j].is_zero:
                        continue
                    acc = acc + m[i][j] * complex(omega_inv[a, i] * omega[j, b])
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def diagonalize(spec: SystemSpec) -> Tuple[SystemSpec, np.ndarray, RootSystem]:
    """
    Conjugate the system by the eigenvector matrix of A0: Y = omega Y~, A~_(mu) = omega^-1 A_(mu) omega.
    Returns the diagonal system, omega and the root system (roots in the order of the diagonal).
    """
    rs = spec.roots()
    omega = rs.eigenvectors
    if omega is None:
        raise SpecError("no eigenvectors available for A0", "A0")
    if spec.is_diagonal and spec.omega is None:
        return spec, omega, rs
    omega_inv = np.linalg.inv(omega)
    series = tuple(conjugate(m, omega, omega_inv) for m in spec.A_series)
    diag = SystemSpec(n=spec.n, T=spec.T, A0=np.diag(rs.roots), A_series=series, N=spec.N, name=spec.name)
    return diag, omega, rs


def as_nth_order(ell: ParamSpec) -> Optional[ProblemSpecN]:
    """The equation y^(n) + sum p_m y^(m) = rho^n y (N = 0) that ell embeds, or None if ell is not of that form"""
    n = ell.n
    if complex(ell.p_diag[0]) != -1 or any(complex(v) != 0 for v in ell.p_diag[1:]):
        return None
    if any(l != n for (_, l), f in ell.p.items() if not f.is_zero):
        return None
    if not ell.coefficient(n - 1, n).is_zero:
        return None
    p = tuple(ell.coefficient(m, n) for m in range(n - 1))
    return ProblemSpecN(n=n, T=ell.T, p=p, name=ell.name)
