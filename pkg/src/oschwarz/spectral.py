"""Interface iteration matrix of the strip-decomposed Schwarz method.

One parallel Schwarz sweep maps the vector of interface Robin traces

    [R+(b_1), R-(a_2), R+(b_2), ..., R+(b_{J-1}), R-(a_J)]

linearly onto its next iterate; the matrix T of that map (order 2(J-1),
the two identically vanishing outer traces removed) decides convergence:
the method contracts like max_k rho(T(k)) over the transverse modes.

All coefficient formulas are evaluated in the rescaled form obtained by
multiplying numerator and denominator with exp(-lambda*(L+delta)), so
every exponential decays and nothing overflows at high frequency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .symbol import (ProblemParams, Robin1, Robin2, Ventcell1, Ventcell2,
                     effective_pq, lambda_array, lambda_symbol, subdomain_set)

__all__ = [
    "InterfaceCoefficients",
    "IterationMatrix",
    "SpectrumCurve",
    "SymbolKernel",
    "SingularDenominatorError",
    "EigensolverError",
    "interface_coeffs",
    "assemble_iteration_matrix",
    "spectral_radius",
    "convergence_curve",
    "rho_highfreq",
    "limiting_bound",
    "rho_values",
]

_DENOM_FLOOR = 1e-300


class SingularDenominatorError(ZeroDivisionError):
    pass


class EigensolverError(RuntimeError):
    """Eigenvalue iteration failed; carries the matrix norm for diagnosis."""

    def __init__(self, norm):
        super().__init__(f"eigensolver did not converge (matrix 1-norm {norm:.3e})")
        self.norm = norm


@dataclass(frozen=True)
class InterfaceCoefficients:
    """Trace-recurrence coefficients of subdomain j at one frequency.

    alpha couples traces across a full subdomain, beta across the overlap
    only.  The minus pair exists for j >= 2, the plus pair for j <= J-1;
    missing entries are None.
    """

    alpha_minus: complex | None
    alpha_plus: complex | None
    beta_minus: complex | None
    beta_plus: complex | None


@dataclass(frozen=True)
class IterationMatrix:
    order: int
    entries: np.ndarray
    k: float


@dataclass(frozen=True)
class SpectrumCurve:
    ks: np.ndarray
    rhos: np.ndarray

    @property
    def points(self):
        return list(zip(self.ks.tolist(), self.rhos.tolist()))


def _effective_sets(tp, ks):
    """Effective (frequency-dependent) coefficient arrays for sets 1 and 2."""
    k2 = np.asarray(ks, dtype=float) ** 2
    (p1, q1), (p2, q2) = effective_pq(tp, "plus"), effective_pq(tp, "minus")
    return p1 + k2 * q1, p2 + k2 * q2


def _subdomain_p(tp, J, ks):
    """Per-subdomain effective p arrays; subdomain j carries set 1 iff j odd."""
    s1, s2 = _effective_sets(tp, ks)
    return {j: (s1 if j % 2 == 1 else s2) for j in range(1, J + 1)}


class SymbolKernel:
    """Frequency-dependent factors shared by every parameter evaluation.

    Caches lambda(k) and the decayed exponentials for one (grid, problem)
    pair so that optimizers can sweep transmission parameters cheaply.
    """

    def __init__(self, ks, pp: ProblemParams):
        self.ks = np.atleast_1d(np.asarray(ks, dtype=float))
        self.pp = pp
        la = lambda_array(self.ks, pp.eta, pp.epsilon)
        self.la = la
        self.eL = np.exp(-la * pp.L)                      # e^{-la L}
        self.ed = np.exp(-la * pp.delta)                  # e^{-la delta}
        self.eLdd = self.eL * self.ed * self.ed           # e^{-la (L+2delta)}
        self.eLLd = self.eL * self.eL * self.ed           # e^{-la (2L+delta)}
        e_Ld = self.eL * self.ed
        self.e2Ld = e_Ld * e_Ld                           # e^{-2 la (L+delta)}

    def coeffs(self, p_minus, p_plus):
        return _CoeffBatch(self, p_minus, p_plus)

    def rho(self, tp):
        """rho(T(k)) over the cached batch for a transmission family."""
        p = _subdomain_p(tp, self.pp.J, self.ks)
        T = self.coeffs(p, p).matrices()
        return np.max(np.abs(np.linalg.eigvals(T)), axis=1)


class _CoeffBatch:
    """Trace-recurrence coefficients over a batch of frequencies.

    p_minus / p_plus map subdomain index to an effective-coefficient array
    (complex allowed); the outer Robin parameters replace p_minus[1] and
    p_plus[J], or the analytic p -> infinity limits are used for a
    Dirichlet outer boundary.
    """

    def __init__(self, kernel: SymbolKernel, p_minus, p_plus):
        pp = kernel.pp
        self.ks = kernel.ks
        self.J = pp.J
        self.outer = pp.outer_bc.kind
        self.la = kernel.la
        self.eL = kernel.eL
        self.ed = kernel.ed
        self.eLdd = kernel.eLdd
        self.eLLd = kernel.eLLd
        self.e2Ld = kernel.e2Ld
        shape = self.ks.shape
        self.pm = {j: np.broadcast_to(np.asarray(p_minus[j], dtype=complex), shape)
                   for j in p_minus}
        self.pp_ = {j: np.broadcast_to(np.asarray(p_plus[j], dtype=complex), shape)
                    for j in p_plus}
        if self.outer == "robin":
            self.pm[1] = np.broadcast_to(complex(pp.outer_bc.p_a), shape)
            self.pp_[self.J] = np.broadcast_to(complex(pp.outer_bc.p_b), shape)
        self._D = {}

    def D(self, j):
        """Rescaled denominator; divided by the outer parameter in the
        Dirichlet limit at the boundary subdomains."""
        if j not in self._D:
            la = self.la
            if self.outer == "dirichlet" and j == 1:
                val = (la + self.pp_[1]) + (la - self.pp_[1]) * self.e2Ld
            elif self.outer == "dirichlet" and j == self.J:
                val = (la + self.pm[self.J]) + (la - self.pm[self.J]) * self.e2Ld
            else:
                val = ((la + self.pp_[j]) * (la + self.pm[j])
                       - (la - self.pp_[j]) * (la - self.pm[j]) * self.e2Ld)
            if np.any(np.abs(val) < _DENOM_FLOOR):
                raise SingularDenominatorError(f"singular denominator at subdomain {j}")
            self._D[j] = val
        return self._D[j]

    def alpha_minus(self, j):
        if self.outer == "dirichlet" and j == 2:
            return np.zeros_like(self.la)
        la = self.la
        num = ((la + self.pp_[j - 1]) * (la + self.pm[j]) * self.eL
               - (la - self.pp_[j - 1]) * (la - self.pm[j]) * self.eLdd)
        return num / self.D(j - 1)

    def alpha_plus(self, j):
        if self.outer == "dirichlet" and j == self.J - 1:
            return np.zeros_like(self.la)
        la = self.la
        num = ((la + self.pm[j + 1]) * (la + self.pp_[j]) * self.eL
               - (la - self.pm[j + 1]) * (la - self.pp_[j]) * self.eLdd)
        return num / self.D(j + 1)

    def beta_minus(self, j):
        la = self.la
        if self.outer == "dirichlet" and j == 2:
            num = -((la + self.pm[j]) * self.eLLd + (la - self.pm[j]) * self.ed)
        else:
            num = ((la + self.pm[j]) * (la - self.pm[j - 1]) * self.eLLd
                   - (la - self.pm[j]) * (la + self.pm[j - 1]) * self.ed)
        return num / self.D(j - 1)

    def beta_plus(self, j):
        la = self.la
        if self.outer == "dirichlet" and j == self.J - 1:
            num = -((la + self.pp_[j]) * self.eLLd + (la - self.pp_[j]) * self.ed)
        else:
            num = ((la + self.pp_[j]) * (la - self.pp_[j + 1]) * self.eLLd
                   - (la - self.pp_[j]) * (la + self.pp_[j + 1]) * self.ed)
        return num / self.D(j + 1)

    def matrices(self):
        """Stacked reduced iteration matrices, shape (nk, 2(J-1), 2(J-1)).

        Row 2(i-1) propagates R+(b_i), row 2i-1 propagates R-(a_{i+1});
        couplings to the removed outer traces are dropped.
        """
        J = self.J
        n = 2 * (J - 1)
        T = np.zeros((self.ks.size, n, n), dtype=complex)
        for i in range(1, J):
            r = 2 * (i - 1)
            T[:, r, 2 * i - 1] = self.beta_plus(i)
            if i <= J - 2:
                T[:, r, 2 * i] = self.alpha_plus(i)
            r = 2 * i - 1
            T[:, r, 2 * i - 2] = self.beta_minus(i + 1)
            if i >= 2:
                T[:, r, 2 * i - 3] = self.alpha_minus(i + 1)
        return T


def _batch_for(ks, pp, tp):
    kernel = SymbolKernel(ks, pp)
    p = _subdomain_p(tp, pp.J, kernel.ks)
    return kernel.coeffs(p, p)


def interface_coeffs(j, k, pp, tp):
    """Trace-recurrence coefficients of subdomain j at frequency k.

    At the boundary subdomains the outer Robin parameters (or their
    Dirichlet limits) enter the denominators and the overlap couplings.
    """
    if not 1 <= j <= pp.J:
        raise ValueError(f"subdomain index {j} outside 1..{pp.J}")
    batch = _batch_for(np.array([k]), pp, tp)
    am = complex(batch.alpha_minus(j)[0]) if j >= 2 else None
    bm = complex(batch.beta_minus(j)[0]) if j >= 2 else None
    ap = complex(batch.alpha_plus(j)[0]) if j <= pp.J - 1 else None
    bp = complex(batch.beta_plus(j)[0]) if j <= pp.J - 1 else None
    return InterfaceCoefficients(alpha_minus=am, alpha_plus=ap,
                                 beta_minus=bm, beta_plus=bp)


def assemble_iteration_matrix(k, pp, tp):
    """Reduced interface iteration matrix T(k), order 2(J-1)."""
    batch = _batch_for(np.array([k]), pp, tp)
    T = batch.matrices()[0]
    return IterationMatrix(order=T.shape[0], entries=T, k=float(k))


def spectral_radius(M):
    """Largest eigenvalue modulus of a dense complex matrix.

    Accepts an IterationMatrix or a raw array; uses the LAPACK dense
    eigensolver (Hessenberg reduction plus shifted QR).
    """
    A = M.entries if isinstance(M, IterationMatrix) else np.asarray(M)
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    try:
        ev = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(np.linalg.norm(A, 1)) from exc
    return float(np.max(np.abs(ev)))


def rho_values(ks, pp, tp):
    """rho(T(k)) for a whole frequency batch (vectorized eigensolves)."""
    batch = _batch_for(ks, pp, tp)
    T = batch.matrices()
    try:
        ev = np.linalg.eigvals(T)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(max(np.linalg.norm(t, 1) for t in T)) from exc
    return np.max(np.abs(ev), axis=1)


def convergence_curve(pp, tp, grid):
    """Sampled map k -> rho(T(k)) over the analysis grid."""
    ks = grid.samples
    if ks.size == 0:
        raise ValueError("empty frequency grid")
    return SpectrumCurve(ks=ks, rhos=rho_values(ks, pp, tp))


def rho_highfreq(k, pp, tp):
    """High-frequency approximation of the convergence factor.

    One-sided families: |(lambda - p)/(lambda + p)| * exp(-Re(lambda) delta)
    with the effective p at k.  Two-sided families: the square root of the
    analogous two-factor product.
    """
    la = lambda_symbol(k, pp)
    (a1, b1), (a2, b2) = effective_pq(tp, "plus"), effective_pq(tp, "minus")
    p1 = a1 + k * k * b1
    p2 = a2 + k * k * b2
    damp = math.exp(-la.real * pp.delta)
    if isinstance(tp, (Robin1, Ventcell1)):
        return abs((la - p1) / (la + p1)) * damp
    prod = abs((la - p1) * (la - p2) / ((la + p1) * (la + p2)))
    return math.sqrt(prod * damp * damp)


def limiting_bound(k, pp, p_minus, p_plus):
    """Bound on rho(T) in the limit of infinitely many subdomains.

    Evaluates max(|alpha - sqrt(beta_- beta_+)|, |alpha + sqrt(beta_- beta_+)|)
    for Robin parameters p_minus, p_plus (equal values give the one-sided
    case).  Strictly below 1 for delta > 0.
    """
    if p_minus <= 0 or p_plus <= 0:
        raise ValueError("Robin parameters must be positive")
    la = lambda_symbol(k, pp)
    L, d = pp.L, pp.delta
    eL = np.exp(-la * L)
    ed = np.exp(-la * d)
    e2Ld = (eL * ed) ** 2
    D = (la + p_plus) * (la + p_minus) - (la - p_plus) * (la - p_minus) * e2Ld
    if abs(D) < _DENOM_FLOOR:
        raise SingularDenominatorError("singular denominator")
    alpha = ((la + p_plus) * (la + p_minus) * eL
             - (la - p_plus) * (la - p_minus) * eL * ed * ed) / D
    beta_m = (la * la - p_plus ** 2) * (eL * eL * ed - ed) / D
    beta_p = (la * la - p_minus ** 2) * (eL * eL * ed - ed) / D
    root = np.sqrt(beta_m * beta_p)
    return float(max(abs(alpha - root), abs(alpha + root)))
