import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import comb

from .errors import SpecError
from .funcspace import PiecewisePoly
from .problems import ParamSpec, ProblemSpecN, SystemSpec, evaluate_matrix
from .reduction import companion_reduce, diagonalize

log = logging.getLogger("asymptotic_coeffs")

Vector = Tuple[PiecewisePoly, ...]


def binomial(n: int, r: int) -> int:
    return int(comb(n, r, exact=True))


@dataclass(frozen=True, eq=False)
class ExpansionTables:
    """
    Coefficients of the asymptotic expansions.

    n-th order equations: beta[s] for s = 0..S (beta[0] == 1) and beta_nu[s][nu].
    Systems with diagonal A0: g_(mu)k = exp(q[k]) * h[k][mu], with q[k] = ∫_0^x a_(1)kk.
    Parameterized equations: omega[k] and G_(mu)nu k = exp(log_G0[k]) * G[k][mu][nu].
    """

    beta: Tuple[PiecewisePoly, ...] = ()
    beta_nu: Tuple[Tuple[PiecewisePoly, ...], ...] = ()
    beta2_anchored: Optional[PiecewisePoly] = None
    roots: Optional[np.ndarray] = None
    a1_diag: Tuple[PiecewisePoly, ...] = ()
    q: Tuple[PiecewisePoly, ...] = ()
    h: Tuple[Tuple[Vector, ...], ...] = ()
    omega: Tuple[PiecewisePoly, ...] = ()
    log_G0: Tuple[PiecewisePoly, ...] = ()
    G: Tuple[Tuple[Vector, ...], ...] = ()

    @property
    def levels(self) -> int:
        """Number of computed beta_s beyond beta_0, or of g_(mu) beyond g_(0)"""
        if self.beta:
            return len(self.beta) - 1
        if self.h:
            return len(self.h[0]) - 1
        return 0

    def Q_values(self, k: int, x: np.ndarray) -> np.ndarray:
        return np.exp(self.q[k].eval(np.atleast_1d(x)))

    def g_values(self, k: int, mu: int, x: np.ndarray) -> np.ndarray:
        """g_(mu)k at x, shape (len(x), n)"""
        xs = np.atleast_1d(x)
        hv = np.stack([f.eval(xs) for f in self.h[k][mu]], axis=-1)
        return self.Q_values(k, xs)[:, None] * hv

    def g_derivative_values(self, k: int, mu: int, x: np.ndarray) -> np.ndarray:
        """g'_(mu)k = Q_k (h' + a_(1)kk h)"""
        xs = np.atleast_1d(x)
        hv = np.stack([f.eval(xs) for f in self.h[k][mu]], axis=-1)
        dh = np.stack([f.derivative().eval(xs) for f in self.h[k][mu]], axis=-1)
        return self.Q_values(k, xs)[:, None] * (dh + self.a1_diag[k].eval(xs)[:, None] * hv)

    def G_values(self, k: int, mu: int, nu: int, x: np.ndarray) -> np.ndarray:
        xs = np.atleast_1d(x)
        return np.exp(self.log_G0[k].eval(xs)) * self.G[k][mu][nu].eval(xs)


def _beta_derivative(beta: Sequence[PiecewisePoly], s: int, r: int) -> Optional[PiecewisePoly]:
    # beta_s = 0 for s < 0 and beta_0 = 1 has vanishing derivatives
    if s < 0 or (s == 0 and r > 0):
        return None
    return beta[s].derivative(r)


def _beta_nu(beta: Sequence[PiecewisePoly], s: int, nu: int, zero: PiecewisePoly) -> PiecewisePoly:
    acc = zero
    for r in range(nu + 1):
        term = _beta_derivative(beta, s - r, r)
        if term is not None:
            acc = acc + term * binomial(nu, r)
    return acc


def _beta_prime(spec: ProblemSpecN, beta: Sequence[PiecewisePoly], s: int, zero: PiecewisePoly) -> PiecewisePoly:
    n = spec.n
    acc = zero
    for r in range(2, n + 1):
        term = _beta_derivative(beta, s + 1 - r, r)
        if term is not None:
            acc = acc + term * binomial(n, r)
    for m in range(n - 1):
        idx = s - n + m + 1
        if idx < 0 or spec.p[m].is_zero:
            continue
        acc = acc + spec.p[m] * _beta_nu(beta, idx, m, zero)
    return acc * (-1.0 / n)


def beta_table(spec: ProblemSpecN, levels: Optional[int] = None) -> ExpansionTables:
    """
    beta_1..beta_S (S = N + 1 unless given) from the recurrence for beta'_s, each integrated from alpha
    with beta_s(alpha) = 0, together with beta_{s nu} = sum_r C(nu, r) beta_{s-r}^(r).
    A coefficient lacking the smoothness for a required derivative raises SmoothnessError.
    """
    S = spec.N + 1 if levels is None else levels
    if S < 1:
        raise SpecError(f"number of levels must be positive, got {S}")
    zero = PiecewisePoly.zero(0.0, spec.T)
    beta: List[PiecewisePoly] = [PiecewisePoly.constant(1.0, 0.0, spec.T)]
    for s in range(1, S + 1):
        beta.append(_beta_prime(spec, beta, s, zero).antiderivative(spec.alpha))
        log.debug("beta_%d: smoothness class %d", s, beta[-1].smoothness_class)
    beta_nu = tuple(tuple(_beta_nu(beta, s, nu, zero) for nu in range(spec.n)) for s in range(S + 1))
    beta2 = None
    if S >= 2:
        shift = 0.5 * (spec.n - 1) * beta[1].derivative().eval(spec.alpha)
        beta2 = beta[2] - shift
    log.info("beta table: n=%d levels=%d alpha=%s", spec.n, S, spec.alpha)
    return ExpansionTables(beta=tuple(beta), beta_nu=beta_nu, beta2_anchored=beta2)


def expansion_residual(spec: ProblemSpecN, tables: ExpansionTables, x: np.ndarray) -> np.ndarray:
    """
    Coefficients of u^(n-1-s), s = 0..S, in exp(-u x) (l - u^n) applied to exp(u x) sum_s beta_s u^-s with
    u = rho R_k (R_k^n = 1). They vanish identically when the betas solve the recurrence.
    Shape (S + 1, len(x)).
    """
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    n = spec.n
    beta = tables.beta
    S = len(beta) - 1
    out = np.zeros((S + 1, xs.size), dtype=complex)
    for s in range(S + 1):
        val = np.zeros(xs.size, dtype=complex)
        for r in range(1, n + 1):
            term = _beta_derivative(beta, s + 1 - r, r)
            if term is not None:
                val += binomial(n, r) * term.eval(xs)
        for m in range(n - 1):
            q = s - n + m + 1
            if q < 0:
                continue
            for r in range(m + 1):
                term = _beta_derivative(beta, q - r, r)
                if term is not None:
                    val += binomial(m, r) * spec.p[m].eval(xs) * term.eval(xs)
        out[s] = val
    return out


def _matvec(m, vec: Vector, row: int) -> Optional[PiecewisePoly]:
    acc = None
    for j, f in enumerate(vec):
        if m[row][j].is_zero or f.is_zero:
            continue
        term = m[row][j] * f
        acc = term if acc is None else acc + term
    return acc


def g_table(spec: SystemSpec, levels: Optional[int] = None) -> ExpansionTables:
    """
    g_(0)k .. g_(N)k for a system with diagonal A0 = diag(R), stored as g_(mu)k = Q_k h_(mu)k.
    Off-diagonal components are algebraic, (R_nu - R_k) h_(mu)nu = h'_(mu-1)nu + a_(1)kk h_(mu-1)nu
    - (sum_i A_(i) h_(mu-i))_nu; the k-th component integrates the next level's k-th row from 0 with
    h_(mu)k(0) = 0. Missing A_(mu) count as zero.
    """
    if not spec.is_diagonal:
        raise SpecError("g tables need a diagonal A0; diagonalize the system first", "A0")
    L = spec.N if levels is None else levels
    n, T = spec.n, spec.T
    R = np.diag(spec.A0).copy()
    zero = PiecewisePoly.zero(0.0, T)
    a1 = spec.a(1)
    qs: List[PiecewisePoly] = []
    hs: List[Tuple[Vector, ...]] = []
    for k in range(n):
        akk = a1[k][k]
        qs.append(akk.antiderivative(0.0))
        h: List[List[PiecewisePoly]] = [[PiecewisePoly.constant(1.0 if v == k else 0.0, 0.0, T) for v in range(n)]]
        for mu in range(1, L + 1):
            cur: List[PiecewisePoly] = [zero] * n
            for v in range(n):
                if v == k:
                    continue
                acc = h[mu - 1][v].derivative() + akk * h[mu - 1][v]
                for i in range(1, mu + 1):
                    t = _matvec(spec.a(i), tuple(h[mu - i]), v)
                    if t is not None:
                        acc = acc - t
                cur[v] = acc * (1.0 / (R[v] - R[k]))
            rhs = zero
            for v in range(n):
                if v != k and not a1[k][v].is_zero:
                    rhs = rhs + a1[k][v] * cur[v]
            for i in range(2, mu + 2):
                t = _matvec(spec.a(i), tuple(h[mu + 1 - i]), k)
                if t is not None:
                    rhs = rhs + t
            cur[k] = rhs.antiderivative(0.0)
            h.append(cur)
        hs.append(tuple(tuple(v) for v in h))
    log.info("g table: n=%d levels=%d", n, L)
    return ExpansionTables(
        roots=R, a1_diag=tuple(a1[k][k] for k in range(n)), q=tuple(qs), h=tuple(hs)
    )


def system_recurrence_residual(spec: SystemSpec, tables: ExpansionTables, x: np.ndarray) -> np.ndarray:
    """
    Sup-norm over x of (A0 - R_k) g_(mu)k - g'_(mu-1)k + sum_{i=1}^{mu} A_(i) g_(mu-i)k for mu = 0..L and of
    the k-th row of the same expression at mu = L + 1. Shape (n, L + 2).
    """
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    n = spec.n
    L = tables.levels
    A = [spec.A0[None, :, :]] + [evaluate_matrix(spec.a(i), xs) for i in range(1, L + 2)]
    out = np.zeros((n, L + 2))
    for k in range(n):
        R = tables.roots[k]
        g = [tables.g_values(k, mu, xs) for mu in range(L + 1)]
        dg = [tables.g_derivative_values(k, mu, xs) for mu in range(L + 1)]
        for mu in range(L + 2):
            res = np.zeros((xs.size, n), dtype=complex)
            if mu <= L:
                res += ((A[0] - R * np.eye(n)) @ g[mu][..., None])[..., 0]
            if mu >= 1:
                res -= dg[mu - 1]
            for i in range(1, mu + 1):
                if mu - i <= L:
                    res += (A[i] @ g[mu - i][..., None])[..., 0]
            if mu == L + 1:
                out[k, mu] = float(np.max(np.abs(res[:, k])))
            else:
                out[k, mu] = float(np.max(np.abs(res)))
    return out


def param_coeffs(ell: ParamSpec, levels: Optional[int] = None) -> ExpansionTables:
    """
    omega_k = -(1/F'(R_k)) sum_j p_{j,j+1} R_k^j and G_(mu)nu k for nu = 0..n-1 (derivative order),
    obtained from the companion-reduced system: G_(mu)nu k = R_k^-nu (omega_matrix g~_(mu)k)_nu.
    """
    rs = ell.roots()
    R, Fp = rs.roots, rs.derivative_values
    n, T = ell.n, ell.T
    omega: List[PiecewisePoly] = []
    for k in range(n):
        acc = PiecewisePoly.zero(0.0, T)
        for j in range(n):
            f = ell.coefficient(j, j + 1)
            if not f.is_zero:
                acc = acc + f * complex(R[k] ** j)
        omega.append(acc * complex(-1.0 / Fp[k]))
    system, om, _ = diagonalize(companion_reduce(ell))
    gt = g_table(system, levels)
    G: List[Tuple[Vector, ...]] = []
    for k in range(n):
        per_mu: List[Vector] = []
        for h_mu in gt.h[k]:
            comps = []
            for v in range(n):
                acc = PiecewisePoly.zero(0.0, T)
                for b in range(n):
                    if om[v, b] != 0 and not h_mu[b].is_zero:
                        acc = acc + h_mu[b] * complex(om[v, b])
                comps.append(acc * complex(R[k] ** (-v)))
            per_mu.append(tuple(comps))
        G.append(tuple(per_mu))
    log.info("parameterized coefficients: n=%d levels=%d", n, gt.levels)
    return ExpansionTables(
        roots=R,
        a1_diag=gt.a1_diag,
        q=gt.q,
        h=gt.h,
        omega=tuple(omega),
        log_G0=gt.q,
        G=tuple(G),
    )
