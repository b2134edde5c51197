import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import DegenerateRootsError, SectorError, SpecError

log = logging.getLogger("spectra")

SIMPLE_ROOT_RTOL = 1e-8
TIE_RTOL = 1e-9
DEFECTIVE_COND = 1e12


def roots_of_unity(n: int) -> np.ndarray:
    """exp(2 pi i k / n), k = 0..n-1"""
    if n < 2:
        raise SpecError(f"order must be at least 2, got {n}")
    return np.exp(2j * np.pi * np.arange(n) / n)


def _canonical_order(roots: np.ndarray) -> np.ndarray:
    angle = np.mod(np.angle(roots), 2 * np.pi)
    angle[angle > 2 * np.pi - 1e-12] = 0.0
    return np.lexsort((np.abs(roots), np.round(angle, 12)))


def _check_simple(roots: np.ndarray, what: str) -> None:
    scale = float(np.max(np.abs(roots)))
    d = np.abs(roots[:, None] - roots[None, :])
    np.fill_diagonal(d, np.inf)
    if d.min() < SIMPLE_ROOT_RTOL * scale:
        raise DegenerateRootsError(f"{what} are not simple (minimum separation {d.min():.3e})")


def ray_ordering(roots: Sequence[complex], angle: float) -> Tuple[int, ...]:
    """Permutation sorting Re(exp(i angle) R) ascending; ties raise SectorError"""
    r = np.asarray(roots, dtype=complex)
    values = np.real(np.exp(1j * angle) * r)
    perm = np.argsort(values, kind="stable")
    gaps = np.diff(values[perm])
    if gaps.size and gaps.min() <= TIE_RTOL * max(1.0, float(np.max(np.abs(r)))):
        raise SectorError(f"real parts of rho*R tie on the ray arg(rho)={angle:.6g}: not inside a sector")
    return tuple(int(i) for i in perm)


@dataclass(frozen=True, eq=False)
class SectorFrame:
    """
    Open sector mu*pi/n < arg(rho) < (mu+1)*pi/n of the rho-plane with the roots ordered so that
    Re(rho R_0) < ... < Re(rho R_{n-1}) on it. `ordering` indexes the roots passed to sector_ordering.
    """

    n: int
    sector_index: int
    ray_angle: float
    ordering: Tuple[int, ...]
    roots: np.ndarray

    @property
    def lower_angle(self) -> float:
        return self.sector_index * np.pi / self.n

    @property
    def upper_angle(self) -> float:
        return (self.sector_index + 1) * np.pi / self.n

    def ray(self, modulus: float, offset: float = 0.0) -> complex:
        """Point of modulus |rho| on the ray at ray_angle + offset"""
        return complex(modulus * np.exp(1j * (self.ray_angle + offset)))

    def contains(self, rho: complex) -> bool:
        angle = float(np.mod(np.angle(rho), 2 * np.pi))
        eps = 1e-12
        if self.lower_angle + eps < angle < self.upper_angle - eps:
            return True
        # rho on the positive real axis belongs to no open sector
        return False

    def check_rho(self, rho: complex) -> None:
        if rho == 0:
            raise SectorError("rho must be nonzero")
        if not self.contains(rho):
            raise SectorError(
                f"arg(rho)={float(np.angle(rho)):.6g} outside sector {self.sector_index} "
                f"({self.lower_angle:.6g}, {self.upper_angle:.6g})"
            )
        values = np.real(rho * self.roots)
        if np.any(np.diff(values) <= 0):
            raise SectorError(f"roots are not strictly ordered at rho={rho}")

    def to_dict(self) -> dict:
        return dict(
            n=self.n,
            sector=self.sector_index,
            ray_angle=self.ray_angle,
            ordering=list(self.ordering),
        )


def sector_ordering(roots: Sequence[complex], sector_index: int) -> SectorFrame:
    r = np.asarray(roots, dtype=complex)
    n = r.size
    if n < 2:
        raise SpecError(f"need at least two roots, got {n}")
    if not 0 <= sector_index < 2 * n:
        raise SectorError(f"sector index must be in [0, {2 * n - 1}], got {sector_index}")
    angle = (sector_index + 0.5) * np.pi / n
    perm = ray_ordering(r, angle)
    log.debug("sector %d: ray angle %.6g ordering %s", sector_index, angle, perm)
    return SectorFrame(n=n, sector_index=sector_index, ray_angle=angle, ordering=perm, roots=r[list(perm)])


@dataclass(frozen=True, eq=False)
class RootSystem:
    roots: np.ndarray
    derivative_values: Optional[np.ndarray] = None
    eigenvectors: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return self.roots.size

    def reordered(self, perm: Sequence[int]) -> "RootSystem":
        idx = list(perm)
        return RootSystem(
            roots=self.roots[idx],
            derivative_values=None if self.derivative_values is None else self.derivative_values[idx],
            eigenvectors=None if self.eigenvectors is None else self.eigenvectors[:, idx],
        )

    def for_sector(self, frame: SectorFrame) -> "RootSystem":
        return self.reordered(frame.ordering)


def char_poly_roots(p_diag: Sequence[complex]) -> RootSystem:
    """Roots of F(R) = sum_k p_kk R^k + R^n, with F'(R_k)"""
    p = np.asarray(p_diag, dtype=complex)
    if p.size < 2:
        raise SpecError(f"characteristic polynomial must have degree at least 2, got {p.size}")
    if p[0] == 0:
        raise SpecError("p_00 must be nonzero (R=0 would be a characteristic root)", "p_diag[0]")
    coef = np.concatenate([p, [1.0 + 0j]])
    dcoef = P.polyder(coef)
    roots = np.linalg.eigvals(P.polycompanion(coef))
    # one Newton step polishes the eigenvalue estimates
    slope = P.polyval(roots, dcoef)
    step = np.divide(P.polyval(roots, coef), slope, out=np.zeros_like(roots), where=slope != 0)
    roots = roots - step
    roots = roots[_canonical_order(roots)]
    _check_simple(roots, "characteristic roots")
    return RootSystem(roots=roots, derivative_values=P.polyval(roots, dcoef))


def companion_matrix(p_diag: Sequence[complex]) -> np.ndarray:
    """Shift rows with 1 on the superdiagonal, last row -p_00..-p_{n-1,n-1}"""
    p = np.asarray(p_diag, dtype=complex)
    n = p.size
    a = np.zeros((n, n), dtype=complex)
    a[np.arange(n - 1), np.arange(1, n)] = 1.0
    a[-1, :] = -p
    return a


def eigen_system(a0: np.ndarray) -> RootSystem:
    a = np.asarray(a0, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise SpecError(f"A0 must be a square matrix, got shape {a.shape}", "A0")
    w, v = np.linalg.eig(a)
    scale = max(1.0, float(np.linalg.norm(a)))
    if np.min(np.abs(w)) < 1e-12 * scale:
        raise SpecError("A0 has a zero eigenvalue", "A0")
    _check_simple(w, "eigenvalues of A0")
    if np.linalg.cond(v) > DEFECTIVE_COND:
        raise DegenerateRootsError("A0 is defective (eigenvector matrix is singular)", "A0")
    idx = np.argmax(np.abs(v), axis=0)
    v = v / v[idx, np.arange(v.shape[1])]
    order = _canonical_order(w)
    return RootSystem(roots=w[order], eigenvectors=v[:, order])
