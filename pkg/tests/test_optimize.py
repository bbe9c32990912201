import math

import numpy as np
import pytest

from oschwarz.optimize import (OptimizationScope, asymptotic_params,
                               closed_form, constant_K, constant_KJ,
                               constant_Kinf, equioscillation_report,
                               numeric_minmax)
from oschwarz.symbol import (OuterBC, ProblemParams, Robin1, Robin2,
                             Ventcell1, Ventcell2, frequency_grid,
                             lambda_symbol)

PP = ProblemParams(eta=1.0, epsilon=1.0, L=1.0, Lhat=1.0, J=4, delta=0.02)

# mpmath, 40 digits, eta = eps = L = Lhat = 1
K_DIRICHLET_GOLDEN = 3.309084282019811313681115
K4_GOLDEN = 3.137564263153890715745584
KINF_GOLDEN = 3.066518345121137274656291


def test_constant_K_golden():
    assert constant_K(PP) == pytest.approx(K_DIRICHLET_GOLDEN, rel=1e-14)


def test_constant_K_large_L_limit():
    pp = ProblemParams(eta=1.0, epsilon=1.0, L=60.0, Lhat=1.0, J=2, delta=0.1)
    s = lambda_symbol(pp.k_min, pp)
    assert constant_K(pp) == pytest.approx(s.real, rel=1e-12)


def test_constant_K_robin_approaches_dirichlet():
    prev_gap = None
    for big in (1e3, 1e5, 1e7):
        pp = ProblemParams(eta=1.0, epsilon=1.0, L=1.0, Lhat=1.0, J=2, delta=0.02,
                           outer_bc=OuterBC.robin(big, big))
        gap = abs(constant_K(pp) - K_DIRICHLET_GOLDEN)
        if prev_gap is not None:
            assert gap < prev_gap
        prev_gap = gap
    assert prev_gap < 1e-5


def test_constant_KJ_golden_and_J2():
    assert constant_KJ(PP, 4) == pytest.approx(K4_GOLDEN, rel=1e-14)
    # cos(pi/2) = 0 recovers the Dirichlet two-subdomain constant
    assert constant_KJ(PP, 2) == pytest.approx(K_DIRICHLET_GOLDEN, rel=1e-14)


def test_constant_KJ_monotone_to_Kinf():
    kinf = constant_Kinf(PP)
    assert kinf == pytest.approx(KINF_GOLDEN, rel=1e-14)
    gaps = [abs(constant_KJ(PP, J) - kinf) for J in (2, 4, 8, 16, 32, 64)]
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    # O(J^-2) approach: J^2 * gap roughly constant
    j2gap = [J * J * (constant_KJ(PP, J) - kinf) for J in (16, 32, 64)]
    assert j2gap[2] == pytest.approx(j2gap[1], rel=0.01)


def test_constant_Kinf_limits():
    big = ProblemParams(eta=1.0, epsilon=1.0, L=80.0, Lhat=1.0, J=2, delta=0.1)
    s = lambda_symbol(big.k_min, big)
    assert constant_Kinf(big) == pytest.approx(s.real, rel=1e-12)
    # small L: K_inf ~ Re(s^2) L / 2
    for L in (1e-3, 1e-4):
        small = ProblemParams(eta=1.0, epsilon=1.0, L=L, Lhat=1.0, J=2, delta=L / 4)
        s = lambda_symbol(small.k_min, small)
        want = (s * s).real * L / 2
        assert constant_Kinf(small) == pytest.approx(want, rel=1e-3)


def test_constant_KJ_richardson_extrapolates_to_Kinf():
    # K_J = K_inf + c/J^2 + O(J^-4): eliminate the J^-2 term
    vals = {J: constant_KJ(PP, J) for J in (256, 512, 1024)}
    extrap = (4 * vals[1024] - vals[512]) / 3
    assert extrap == pytest.approx(constant_Kinf(PP), abs=1e-10)


def test_closed_form_robin1_example():
    tp, rho = closed_form("robin1", K=2.0, delta=1e-3)
    assert tp.p == pytest.approx(2 ** (1 / 3) * 10, rel=1e-12)
    assert tp.p == pytest.approx(12.5992, rel=1e-4)


def test_closed_form_displays():
    K, d = 1.7, 1e-3
    v1, _ = closed_form("ventcell1", K, d)
    assert v1.p == pytest.approx(2 ** (-3 / 5) * K ** (4 / 5) * d ** (-1 / 5), rel=1e-12)
    assert v1.q == pytest.approx(2 ** (-1 / 5) * K ** (-2 / 5) * d ** (3 / 5), rel=1e-12)
    r2, rho2 = closed_form("robin2", K, d)
    assert r2.p1 == pytest.approx((K / 2) ** (2 / 5) * d ** (-3 / 5), rel=1e-12)
    assert r2.p2 == pytest.approx((K / 2) ** (4 / 5) * d ** (-1 / 5), rel=1e-12)
    assert rho2 == pytest.approx(1 - 2 ** (4 / 5) * K ** (1 / 5) * d ** (1 / 5), rel=1e-12)
    v2, rho9 = closed_form("ventcell2", K, d)
    assert v2.p1 == pytest.approx(2 ** (-8 / 9) * K ** (8 / 9) * d ** (-1 / 9), rel=1e-12)
    assert v2.q1 == pytest.approx(2 ** (2 / 9) * K ** (-2 / 9) * d ** (7 / 9), rel=1e-12)
    assert v2.p2 == pytest.approx(2 ** (-2 / 3) * K ** (2 / 3) * d ** (-1 / 3), rel=1e-12)
    assert v2.q2 == pytest.approx(2 ** (4 / 9) * K ** (-4 / 9) * d ** (5 / 9), rel=1e-12)
    assert rho9 == pytest.approx(1 - 2 ** (8 / 9) * K ** (1 / 9) * d ** (1 / 9), rel=1e-12)


def test_asymptotic_params_scopes():
    d = 1e-3
    two = asymptotic_params("robin1", OptimizationScope.two_subdomain(), PP, d)
    fin = asymptotic_params("robin1", OptimizationScope.finite(4), PP, d)
    inf = asymptotic_params("robin1", OptimizationScope.infinite(), PP, d)
    assert two.constant_used == pytest.approx(K_DIRICHLET_GOLDEN)
    assert fin.constant_used == pytest.approx(K4_GOLDEN)
    assert inf.constant_used == pytest.approx(KINF_GOLDEN)
    assert 0 < inf.predicted_rho < fin.predicted_rho < two.predicted_rho < 1 \
        or 0 < two.predicted_rho < 1  # ordering by constants
    # infinite-scope two-sided Robin has its own constants
    r2 = asymptotic_params("robin2", OptimizationScope.infinite(), PP, d)
    assert r2.params.p1 == pytest.approx(KINF_GOLDEN ** (2 / 5) * d ** (-3 / 5), rel=1e-12)
    assert r2.predicted_rho == pytest.approx(1 - 2 * KINF_GOLDEN ** (1 / 5) * d ** (1 / 5),
                                             rel=1e-9)
    # infinite-scope second-order families are labeled extrapolated
    v1 = asymptotic_params("ventcell1", OptimizationScope.infinite(), PP, d)
    assert v1.note == "extrapolated"
    assert v1.params.p == pytest.approx(
        2 ** (-3 / 5) * KINF_GOLDEN ** (4 / 5) * d ** (-1 / 5), rel=1e-12)


def test_asymptotic_rho_clipped_into_unit_interval():
    choice = asymptotic_params("robin1", OptimizationScope.finite(4), PP, 0.02)
    assert 0 < choice.predicted_rho < 1


def test_numeric_minmax_never_worse_than_seed():
    pp = ProblemParams(eta=1.0, epsilon=1.0, L=1.0, Lhat=1.0, J=2, delta=0.02)
    grid = frequency_grid(pp, pp.delta / 2)
    from oschwarz.spectral import rho_values
    seed = asymptotic_params("robin1", OptimizationScope.finite(2), pp, pp.delta)
    seed_val = float(np.max(rho_values(grid.samples, pp, seed.params)))
    choice = numeric_minmax("robin1", pp, grid)
    assert choice.achieved_rho <= seed_val + 1e-12


def test_numeric_minmax_equioscillates_robin1():
    grid = frequency_grid(PP, PP.delta / 2)
    choice = numeric_minmax("robin1", PP, grid)
    maxima = list(choice.maxima)
    assert maxima[0][0] == pytest.approx(PP.k_min)
    interior = [v for k, v in maxima[1:]]
    assert len(interior) == 1  # a single interior maximum for one-sided Robin
    gap = abs(maxima[0][1] - max(interior))
    assert gap <= 0.01 * (1 - choice.achieved_rho)


def test_parameter_law_robin1():
    # numeric optimum over closed form approaches 1 (10% at delta = 1e-3)
    for J in (2, 4, 8):
        pp = ProblemParams(eta=1.0, epsilon=1.0, L=1.0, Lhat=1.0, J=J, delta=1e-3)
        grid = frequency_grid(pp, pp.delta / 2)
        choice = numeric_minmax("robin1", pp, grid)
        p_closed = closed_form("robin1", constant_KJ(pp, J), 1e-3)[0].p
        assert choice.params.p / p_closed == pytest.approx(1.0, abs=0.10)


def test_hierarchy_of_families():
    pp = ProblemParams(eta=1.0, epsilon=1.0, L=1.0, Lhat=1.0, J=4, delta=1e-3)
    grid = frequency_grid(pp, pp.delta / 2)
    vals = {}
    for family in ("robin1", "robin2", "ventcell1", "ventcell2"):
        vals[family] = numeric_minmax(family, pp, grid).achieved_rho
    assert vals["ventcell2"] <= vals["ventcell1"] + 1e-10
    assert vals["ventcell1"] <= vals["robin2"] + 1e-10
    assert vals["robin2"] <= vals["robin1"] + 1e-10


def test_equioscillation_report_nonoptimal_params():
    report = equioscillation_report(Robin1(p=3.0), PP, frequency_grid(PP, 0.01))
    assert report[0][0] == pytest.approx(PP.k_min)
    assert len(report) >= 1
    ks = [k for k, _ in report]
    assert ks == sorted(ks)
    vals = [v for _, v in report]
    assert max(vals) - min(vals) > 0  # spread without optimality


def test_scope_validation():
    with pytest.raises(ValueError):
        OptimizationScope("bogus")
    with pytest.raises(ValueError):
        OptimizationScope.finite(1)
