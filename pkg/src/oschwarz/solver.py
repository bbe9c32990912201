"""Finite-difference Schwarz solvers on overlapping strip decompositions.

The global problem is the 5-point discretization of

    -lap(u) + (eta - i*eps) u = b     on (0, J*L) x (0, Lhat)

with homogeneous Dirichlet walls, b = -f.  Each strip owns the mesh
columns of its partition cell [(j-1)L, jL); its overlapping column range
reaches delta/2 + h beyond the cuts, where the local matrix either keeps
the truncated global rows (Dirichlet transmission, classical restricted
additive Schwarz) or carries Robin/Ventcell rows obtained by eliminating
the ghost column against a second-order centered normal derivative.  With
Boolean partition-of-unity weights the preconditioner

    M^{-1} = sum_j R_j^T D_j Atilde_j^{-1} R_j

applied as u <- u + M^{-1}(b - A u) reproduces the parallel Schwarz
iteration whose transmission interfaces sit delta + 2h apart; the same
M^{-1} right-preconditions GMRES.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import optimize
from .symbol import ProblemParams, frequency_grid, subdomain_set

__all__ = [
    "DiscreteProblem",
    "Subdomain",
    "SolveReport",
    "GridAlignmentError",
    "DEFAULT_SEED",
    "discretize",
    "strip_partition",
    "effective_overlap",
    "transmission_for",
    "predicted_contraction",
    "ras_iterate",
    "apply_preconditioner",
    "stationary_solve",
    "gmres_solve",
    "run_case",
    "sweep_mesh",
    "sweep_subdomains",
]

DEFAULT_SEED = 0x5EED

STATIONARY_ITMAX = 3000
GMRES_ITMAX = 500


class GridAlignmentError(ValueError):
    pass


@dataclass(frozen=True)
class DiscreteProblem:
    h: float
    nx: int
    ny: int
    operator: sp.csr_matrix
    rhs: np.ndarray
    pp: ProblemParams


@dataclass
class Subdomain:
    index: int
    x_index_range: tuple          # first/last interior mesh column (1-based)
    restriction: np.ndarray       # global dof indices of the local block
    partition_weights: np.ndarray # Boolean ownership weights per local dof
    local_operator: sp.csc_matrix
    local_factorization: object = field(repr=False, default=None)


@dataclass
class SolveReport:
    iterations: int
    error_history: list
    converged: bool
    contraction_estimate: float
    wall_time: float
    diverged: bool = False
    breakdown: bool = False
    seed: int | None = None
    final_true_residual: float | None = None


def _check_int(x, what):
    n = int(round(x))
    if abs(x - n) > 1e-9 * max(1.0, abs(x)):
        raise GridAlignmentError(f"grid misalignment: {what} = {x} is not an integer")
    return n


def discretize(pp, h, f=None):
    """Assemble the global 5-point operator and right-hand side.

    f may be None (zero source), a callable f(x, y), or an array over the
    interior nodes; the equation solved is A u = -f with
    A = -lap_h + (eta - i*eps) I and eliminated Dirichlet boundary.
    """
    if h > pp.L / 4 + 1e-12:
        raise GridAlignmentError(f"mesh too coarse: h = {h} > L/4 = {pp.L / 4}")
    nx = _check_int(pp.J * pp.L / h, "J*L/h") - 1
    ny = _check_int(pp.Lhat / h, "Lhat/h") - 1
    sigma = complex(pp.eta, -pp.epsilon)
    ex = np.ones(nx)
    ey = np.ones(ny)
    Tx = sp.diags([-ex[:-1], 2 * ex, -ex[:-1]], (-1, 0, 1))
    Ty = sp.diags([-ey[:-1], 2 * ey, -ey[:-1]], (-1, 0, 1))
    A = (sp.kron(sp.eye(ny), Tx) + sp.kron(Ty, sp.eye(nx))) / h**2 \
        + sigma * sp.eye(nx * ny)
    if f is None:
        rhs = np.zeros(nx * ny, dtype=complex)
    elif callable(f):
        x = np.arange(1, nx + 1) * h
        y = np.arange(1, ny + 1) * h
        X, Y = np.meshgrid(x, y)           # row-major: dof = iy*nx + ix
        rhs = -np.asarray(f(X, Y), dtype=complex).ravel()
    else:
        rhs = -np.asarray(f, dtype=complex).ravel()
        if rhs.size != nx * ny:
            raise ValueError(f"forcing array has {rhs.size} entries, expected {nx * ny}")
    return DiscreteProblem(h=h, nx=nx, ny=ny, operator=sp.csr_matrix(A),
                           rhs=rhs, pp=pp)


def effective_overlap(pp, h):
    """Distance between the realized transmission interfaces of neighbours.

    The local blocks extend one column past delta/2 so that the centered
    interface rows read their data entirely from the neighbour's owned
    columns; Dirichlet truncation lands on the same ghost ring.
    """
    return pp.delta + 2 * h


def _cut_columns(pp, h):
    return [int(round(j * pp.L / h)) for j in range(pp.J + 1)]


def _local_matrix(dp, cols, left_if, right_if, pq):
    """Local operator on the given columns.

    Restriction of the global matrix (truncation = Dirichlet transmission);
    when pq=(p, q) is given, the first/last interface columns are replaced
    by ghost-eliminated Robin/Ventcell rows."""
    nx, ny, h = dp.nx, dp.ny, dp.h
    sigma = complex(dp.pp.eta, -dp.pp.epsilon)
    gidx = (np.arange(ny)[:, None] * nx + (cols - 1)[None, :]).ravel()
    A = dp.operator[gidx][:, gidx]
    if pq is not None:
        A = A.tolil()
        p, q = pq
        ncols = cols.size
        diag = (4 + 2 * h * p + 4 * q / h) / h**2 + sigma
        offx = -2 / h**2
        offy = -(1 + 2 * q / h) / h**2
        for ic, inn, active in ((0, 1, left_if), (ncols - 1, ncols - 2, right_if)):
            if not active:
                continue
            for iy in range(ny):
                i = iy * ncols + ic
                A.rows[i] = []
                A.data[i] = []
                A[i, i] = diag
                A[i, iy * ncols + inn] = offx
                if iy > 0:
                    A[i, (iy - 1) * ncols + ic] = offy
                if iy < ny - 1:
                    A[i, (iy + 1) * ncols + ic] = offy
    return gidx, sp.csc_matrix(A)


def strip_partition(dp, pp, tp=None):
    """Overlapping strip subdomains with factorized local matrices.

    tp is a transmission-parameter family for the optimized method or None
    for Dirichlet transmission (classical restricted additive Schwarz).
    Requires delta to be an even multiple of h.
    """
    h = dp.h
    ov = pp.delta / (2 * h)
    ov = _check_int(ov, "delta/(2h)")
    if ov < 1:
        raise GridAlignmentError("overlap must be at least 2h")
    cuts = _cut_columns(pp, h)
    ove = ov if tp is None else ov + 1
    subs = []
    for j in range(1, pp.J + 1):
        lo = 1 if j == 1 else cuts[j - 1] - ove
        hi = dp.nx if j == pp.J else cuts[j] + ove
        if lo < 1 or hi > dp.nx:
            raise GridAlignmentError("subdomain range leaves the grid; overlap too large")
        cols = np.arange(lo, hi + 1)
        pq = subdomain_set(tp, j) if tp is not None else None
        gidx, Aloc = _local_matrix(dp, cols, j > 1, j < pp.J, pq)
        lu = spla.splu(Aloc)
        own = np.searchsorted(np.asarray(cuts[1:-1]), cols, side="right") + 1
        D = np.tile((own == j).astype(float), dp.ny)
        subs.append(Subdomain(index=j, x_index_range=(lo, hi), restriction=gidx,
                              partition_weights=D, local_operator=Aloc,
                              local_factorization=lu))
    return subs


def apply_preconditioner(subdomains, r):
    """z = sum_j R_j^T D_j Atilde_j^{-1} R_j r."""
    z = np.zeros_like(r)
    for sd in subdomains:
        loc = sd.local_factorization.solve(r[sd.restriction])
        if not np.all(np.isfinite(loc)):
            raise RuntimeError(f"singular local solve in subdomain {sd.index}")
        z[sd.restriction] += sd.partition_weights * loc
    return z


def ras_iterate(dp, subdomains, u):
    """One stationary sweep u <- u + M^{-1}(b - A u)."""
    r = dp.rhs - dp.operator @ u
    return u + apply_preconditioner(subdomains, r)


def _contraction(history):
    ratios = [history[-i] / history[-i - 1]
              for i in range(1, min(6, len(history)))
              if history[-i - 1] > 0]
    if not ratios:
        return float("nan")
    return float(np.exp(np.mean(np.log(ratios))))


def _random_complex(rng, n):
    return rng.random(n) + 1j * rng.random(n)


def stationary_solve(dp, subdomains, u0=None, tol=1e-6, itmax=STATIONARY_ITMAX,
                     seed=DEFAULT_SEED):
    """Stationary Schwarz iteration driven to a relative error reduction.

    Intended for zero-source problems (the exact solution is 0, so the
    iterate's norm is the error); u0 defaults to uniform complex entries in
    the unit square from the given seed.
    """
    if u0 is None:
        rng = np.random.default_rng(seed)
        u0 = _random_complex(rng, dp.nx * dp.ny)
    t0 = time.perf_counter()
    u = u0.copy()
    norm0 = np.linalg.norm(u0)
    history = [1.0]
    converged = False
    diverged = False
    it = 0
    for it in range(1, itmax + 1):
        u = ras_iterate(dp, subdomains, u)
        err = float(np.linalg.norm(u) / norm0)
        history.append(err)
        if err < tol:
            converged = True
            break
        if err > 1e6 or not math.isfinite(err):
            diverged = True
            break
    return SolveReport(iterations=it if (converged or diverged) else itmax,
                       error_history=history, converged=converged,
                       contraction_estimate=_contraction(history),
                       wall_time=time.perf_counter() - t0,
                       diverged=diverged, seed=seed)


def gmres_solve(dp, subdomains, rhs=None, tol=1e-6, itmax=GMRES_ITMAX,
                seed=DEFAULT_SEED):
    """Right-preconditioned GMRES on A M^{-1}, modified Gram-Schmidt, no restart.

    Starts from a zero initial guess; the recorded history is the
    preconditioned-system relative residual, which for right
    preconditioning equals the true relative residual up to roundoff.
    """
    if rhs is None:
        rng = np.random.default_rng(seed)
        rhs = _random_complex(rng, dp.nx * dp.ny)
    t0 = time.perf_counter()
    A = dp.operator
    n = rhs.size
    norm_b = float(np.linalg.norm(rhs))
    history = [1.0]
    if norm_b == 0.0:
        return SolveReport(iterations=0, error_history=history, converged=True,
                           contraction_estimate=float("nan"),
                           wall_time=time.perf_counter() - t0, seed=seed,
                           final_true_residual=0.0)
    V = [rhs / norm_b]
    H = np.zeros((itmax + 1, itmax), dtype=complex)
    cs = np.zeros(itmax, dtype=complex)
    sn = np.zeros(itmax, dtype=complex)
    g = np.zeros(itmax + 1, dtype=complex)
    g[0] = norm_b
    converged = False
    breakdown = False
    it = 0
    for j in range(itmax):
        w = A @ apply_preconditioner(subdomains, V[j])
        for i in range(j + 1):
            H[i, j] = np.vdot(V[i], w)
            w -= H[i, j] * V[i]
        hnorm = float(np.linalg.norm(w))
        H[j + 1, j] = hnorm
        if hnorm < 1e-14:
            breakdown = True
        else:
            V.append(w / hnorm)
        # Givens rotation G_i = [[conj(c), conj(s)], [-s, c]] annihilates the
        # subdiagonal; apply the previous rotations, then form a new one
        for i in range(j):
            t = np.conj(cs[i]) * H[i, j] + np.conj(sn[i]) * H[i + 1, j]
            H[i + 1, j] = -sn[i] * H[i, j] + cs[i] * H[i + 1, j]
            H[i, j] = t
        d = math.hypot(abs(H[j, j]), abs(H[j + 1, j]))
        if d == 0.0:
            cs[j], sn[j] = 1.0, 0.0
        else:
            cs[j] = H[j, j] / d
            sn[j] = H[j + 1, j] / d
        H[j, j] = np.conj(cs[j]) * H[j, j] + np.conj(sn[j]) * H[j + 1, j]
        H[j + 1, j] = 0.0
        g[j + 1] = -sn[j] * g[j]
        g[j] = np.conj(cs[j]) * g[j]
        it = j + 1
        rel = abs(g[j + 1]) / norm_b
        history.append(float(rel))
        if rel < tol or breakdown:
            converged = True
            break
    y = np.linalg.solve(np.triu(H[:it, :it]), g[:it])
    u = apply_preconditioner(subdomains, np.column_stack(V[:it]) @ y)
    true_res = float(np.linalg.norm(rhs - A @ u) / norm_b)
    return SolveReport(iterations=it, error_history=history, converged=converged,
                       contraction_estimate=_contraction(history),
                       wall_time=time.perf_counter() - t0,
                       breakdown=breakdown, seed=seed,
                       final_true_residual=true_res)


# ---------------------------------------------------------------------------
# parameter selection and sweeps

FAMILY_TAGS = ("ras", "robin1", "robin2", "ventcell1", "ventcell2")


def transmission_for(pp_eff, family, params="asymptotic"):
    """Transmission parameters for a solver run, optimized at the effective
    overlap; tp is None for plain RAS (Dirichlet transmission)."""
    if family == "ras":
        return None
    scope = optimize.OptimizationScope.finite(pp_eff.J)
    if params == "asymptotic":
        return optimize.asymptotic_params(family, scope, pp_eff, pp_eff.delta).params
    if params == "numeric":
        grid = frequency_grid(pp_eff, pp_eff.delta / 2)
        return optimize.numeric_minmax(family, pp_eff, grid).params
    raise ValueError(f"unknown parameter mode {params!r}")


def predicted_contraction(pp_eff, tp, h):
    """max_k rho(T(k)) at the effective overlap over the mesh-limited modes.

    Dirichlet transmission (RAS) is evaluated through the analytic large-p
    limit of the Robin family.
    """
    from .optimize import _subsample_modes
    from .spectral import SymbolKernel
    from .symbol import Robin1 as _R1

    if tp is None:
        tp = _R1(p=1e9)
    M = max(int(round(pp_eff.Lhat / h)), 1)
    ks = _subsample_modes(M, pp_eff.Lhat, 160)
    return float(SymbolKernel(ks, pp_eff).rho(tp).max())


def run_case(pp, h, family, mode="stationary", params="asymptotic", tol=1e-6,
             seed=DEFAULT_SEED):
    """One discrete solve; returns the sweep-row dict for the CSV schema."""
    dp = discretize(pp, h)
    pp_eff = pp.with_delta(effective_overlap(pp, h))
    tp = transmission_for(pp_eff, family, params)
    rho = predicted_contraction(pp_eff, tp, h)
    subs = strip_partition(dp, pp, tp)
    if mode == "stationary":
        rep = stationary_solve(dp, subs, tol=tol, seed=seed)
    elif mode == "gmres":
        rep = gmres_solve(dp, subs, tol=tol, seed=seed)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return {"h": h, "J": pp.J, "family": family, "iterations": rep.iterations,
            "contraction": rep.contraction_estimate, "predicted_rho": rho,
            "seconds": rep.wall_time, "converged": rep.converged,
            "diverged": rep.diverged}


def sweep_mesh(pp, family, h_list, mode="stationary", params="asymptotic",
               tol=1e-6, seed=DEFAULT_SEED):
    """One row per mesh size; delta = 2h and re-optimized parameters per h."""
    rows = []
    for h in h_list:
        pp_h = pp.with_delta(2 * h)
        rows.append(run_case(pp_h, h, family, mode, params, tol, seed))
    return rows


def sweep_subdomains(pp, family, J_list, mode_geom="fixed_width", h=None,
                     solver_mode="stationary", params="asymptotic", tol=1e-6,
                     seed=DEFAULT_SEED):
    """One row per subdomain count.

    fixed_width keeps the strip width L (the global domain grows with J);
    fixed_global keeps the global width J*L fixed so strips thin out.
    """
    if h is None:
        h = pp.delta / 2
    rows = []
    width_total = pp.J * pp.L
    for J in J_list:
        if mode_geom == "fixed_width":
            L = pp.L
        elif mode_geom == "fixed_global":
            L = width_total / J
        else:
            raise ValueError(f"unknown sweep mode {mode_geom!r}")
        pp_j = ProblemParams(eta=pp.eta, epsilon=pp.epsilon, L=L, Lhat=pp.Lhat,
                             J=int(J), delta=2 * h, outer_bc=pp.outer_bc)
        rows.append(run_case(pp_j, h, family, solver_mode, params, tol, seed))
    return rows
