import logging
from typing import Tuple

import numpy as np
from numpy.polynomial import legendre
from numpy.polynomial import polynomial as P
from scipy.signal import lfilter

from .funcspace import Grid
from .types import SweepDirection

log = logging.getLogger("quadrature")

# resolution of the auxiliary rule used to integrate exp(kappa * s) against the interpolation basis
_MOMENT_POINTS = 32
_MOMENT_POINTS_MAX = 1024


def _lagrange_basis(tau: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Values ell_p(s_r) of the Lagrange basis on the nodes tau, shape (len(s), len(tau))"""
    deg = tau.size - 1
    return P.polyvander(s, deg) @ np.linalg.inv(P.polyvander(tau, deg))


def _exp_moments(kappa: complex, lo: float, hi: float, center: float, tau: np.ndarray) -> np.ndarray:
    """
    ∫_lo^hi exp(kappa * (center - s)) ell_p(s) ds for every basis polynomial ell_p.
    The exponent is non-positive on [lo, hi] for the sweeps that call this.
    """
    points = min(_MOMENT_POINTS_MAX, _MOMENT_POINTS + int(2 * abs(kappa) * (hi - lo)))
    sigma, w = legendre.leggauss(points)
    s = lo + 0.5 * (hi - lo) * (sigma + 1.0)
    ws = 0.5 * (hi - lo) * w
    return (ws * np.exp(kappa * (center - s))) @ _lagrange_basis(tau, s)


class ExponentialSweep:
    """
    Discrete Volterra operators with an exponential kernel on a Grid:

        forward:  F(x) = ∫_a^x exp(lam (x - t)) f(t) dt    (Re lam <= 0)
        backward: B(x) = ∫_x^b exp(lam (x - t)) f(t) dt    (Re lam >= 0)

    f is given by its values at the grid quadrature nodes and is interpolated by a cubic (for the default 4
    points per cell) inside every cell. The exponential is integrated exactly up to rounding, so the
    weights stay accurate for |lam h| >> 1. Results are returned both at cell edges and at the nodes.
    """

    def __init__(self, grid: Grid, lam: complex, direction: SweepDirection) -> None:
        self.grid = grid
        self.lam = complex(lam)
        self.direction = direction
        h = grid.h
        kappa = 0.5 * h * self.lam
        tau, _ = legendre.leggauss(grid.points_per_cell)
        if direction == SweepDirection.forward:
            if self.lam.real * (grid.b - grid.a) > 1e-9 * max(1.0, abs(self.lam)):
                log.debug("forward sweep with growing kernel: lam=%s", self.lam)
            self._decay = np.exp(self.lam * h)
            self._cell = 0.5 * h * _exp_moments(kappa, -1.0, 1.0, 1.0, tau)
            self._node_factor = np.exp(kappa * (tau + 1.0))
            self._node = 0.5 * h * np.array([_exp_moments(kappa, -1.0, t, t, tau) for t in tau])
        else:
            if self.lam.real * (grid.b - grid.a) < -1e-9 * max(1.0, abs(self.lam)):
                log.debug("backward sweep with growing kernel: lam=%s", self.lam)
            self._decay = np.exp(-self.lam * h)
            self._cell = 0.5 * h * _exp_moments(kappa, -1.0, 1.0, -1.0, tau)
            self._node_factor = np.exp(kappa * (tau - 1.0))
            self._node = 0.5 * h * np.array([_exp_moments(kappa, t, 1.0, t, tau) for t in tau])

    def apply(self, f_nodes: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        f_nodes: (..., cells * points_per_cell) values at the nodes.
        Returns (values at the edges (..., cells + 1), values at the nodes (..., cells * points_per_cell)).
        """
        grid = self.grid
        f = np.asarray(f_nodes, dtype=complex)
        lead = f.shape[:-1]
        fc = f.reshape(lead + (grid.cells, grid.points_per_cell))
        contrib = fc @ self._cell
        inner = fc @ self._node.T
        zero = np.zeros(lead + (1,), dtype=complex)
        if self.direction == SweepDirection.forward:
            acc = lfilter([1.0], [1.0, -self._decay], contrib, axis=-1)
            edges = np.concatenate([zero, acc], axis=-1)
            nodes = edges[..., :-1, None] * self._node_factor + inner
        else:
            acc = lfilter([1.0], [1.0, -self._decay], contrib[..., ::-1], axis=-1)[..., ::-1]
            edges = np.concatenate([acc, zero], axis=-1)
            nodes = edges[..., 1:, None] * self._node_factor + inner
        return edges, nodes.reshape(lead + (grid.cells * grid.points_per_cell,))
