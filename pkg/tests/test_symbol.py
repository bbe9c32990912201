import json
import math

import numpy as np
import pytest

from oschwarz.symbol import (DegenerateSymbolWarning, FrequencyGrid, OuterBC,
                             ProblemParams, Robin1, Robin2, Ventcell1,
                             Ventcell2, effective_p, frequency_grid,
                             lambda_symbol, problem_from_json, problem_to_json,
                             transmission_from_json, transmission_to_json)

PP = ProblemParams(eta=1.0, epsilon=1.0, L=1.0, Lhat=1.0, J=4, delta=0.02)

# mpmath, 40 digits: sqrt(pi^2 + 1 - 1j)
LAMBDA_PI_GOLDEN = 3.300387228126336073424074 - 0.1514973745319742876448842j


def test_lambda_real_case():
    pp = ProblemParams(eta=1.0, epsilon=0.0, L=1.0, Lhat=1.0, J=2, delta=0.1)
    assert lambda_symbol(0.0, pp) == pytest.approx(1.0 + 0.0j)


def test_lambda_pure_imaginary_shift():
    # (1 - i)^2 = -2i, and the root with positive real part is 1 - i
    pp = ProblemParams(eta=0.0, epsilon=2.0, L=1.0, Lhat=1.0, J=2, delta=0.1)
    assert lambda_symbol(0.0, pp) == pytest.approx(1.0 - 1.0j)


def test_lambda_golden_value():
    val = lambda_symbol(math.pi, PP)
    assert val == pytest.approx(LAMBDA_PI_GOLDEN, rel=1e-15)
    assert val.real > 0 and val.imag < 0
    assert abs(val) ** 2 == pytest.approx(math.sqrt((math.pi**2 + 1) ** 2 + 1), rel=1e-14)


def test_lambda_square_and_monotonicity():
    ks = np.linspace(0.0, 50.0, 201)
    prev = -1.0
    for k in ks:
        lam = lambda_symbol(float(k), PP)
        assert lam.real > 0.0
        assert lam * lam == pytest.approx(complex(k * k + 1.0, -1.0), rel=1e-14)
        assert lam.real > prev
        prev = lam.real


def test_lambda_degenerate_warns():
    pp = ProblemParams(eta=0.0, epsilon=0.0, L=1.0, Lhat=1.0, J=2, delta=0.1)
    with pytest.warns(DegenerateSymbolWarning):
        assert lambda_symbol(0.0, pp) == 0j


def test_effective_p_examples():
    assert effective_p(Ventcell1(p=2.0, q=0.5), "plus", 2.0) == pytest.approx(4.0)
    assert effective_p(Robin1(p=3.0), "minus", 10.0) == pytest.approx(3.0)
    # minus side carries set 2 under the alternation convention
    assert effective_p(Ventcell2(p1=1, q1=1, p2=2, q2=0), "minus", 1.0) == pytest.approx(2.0)


def test_effective_p_nondecreasing_in_k():
    rng = np.random.default_rng(7)
    fams = [Robin1(p=2.0), Robin2(p1=1.0, p2=5.0), Ventcell1(p=1.0, q=0.3),
            Ventcell2(p1=1, q1=0.2, p2=3, q2=0.8)]
    for tp in fams:
        ks = np.sort(rng.uniform(0, 30, size=20))
        for side in ("plus", "minus"):
            vals = [effective_p(tp, side, float(k)) for k in ks]
            assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_frequency_grid_examples():
    g = frequency_grid(PP, 1 / 100)
    assert g.M == 100
    assert g.k_min == pytest.approx(math.pi)
    assert g.k_max == pytest.approx(100 * math.pi)

    pp2 = ProblemParams(eta=1, epsilon=1, L=1.0, Lhat=2.0, J=2, delta=0.1)
    g2 = frequency_grid(pp2, 0.5)
    assert g2.M == 4
    np.testing.assert_allclose(g2.samples,
                               [math.pi / 2, math.pi, 3 * math.pi / 2, 2 * math.pi])

    g3 = frequency_grid(PP, 1 / 50)
    assert g3.M == 50 and g3.k_max == pytest.approx(50 * math.pi)


def test_frequency_grid_spacing_uniform():
    g = frequency_grid(PP, 1 / 37)
    diffs = np.diff(g.samples)
    np.testing.assert_allclose(diffs, math.pi / PP.Lhat, rtol=1e-12)
    assert g.samples[0] == pytest.approx(g.k_min)
    assert g.samples[-1] == pytest.approx(g.k_max)


def test_frequency_grid_too_coarse():
    with pytest.raises(ValueError, match="coarser"):
        frequency_grid(PP, 2.0)


def test_problem_json_round_trip():
    text = ('{"eta":1.0,"epsilon":1.0,"L":1.0,"Lhat":1.0,"J":4,"delta":0.02,'
            '"outer_bc":{"type":"dirichlet"}}')
    pp = problem_from_json(text)
    assert pp == PP
    assert problem_from_json(problem_to_json(pp)) == pp
    doc = json.loads(problem_to_json(pp))
    assert set(doc) == {"eta", "epsilon", "L", "Lhat", "J", "delta", "outer_bc"}

    ppr = ProblemParams(eta=0.5, epsilon=2.0, L=2.0, Lhat=3.0, J=3, delta=0.25,
                        outer_bc=OuterBC.robin(1.5, 2.5))
    back = problem_from_json(problem_to_json(ppr))
    assert back == ppr


def test_transmission_json_round_trip():
    fams = [Robin1(p=3.0), Robin2(p1=1.0, p2=2.0), Ventcell1(p=2.0, q=0.5),
            Ventcell2(p1=1.0, q1=1.0, p2=2.0, q2=0.0)]
    for tp in fams:
        back = transmission_from_json(transmission_to_json(tp))
        assert back == tp
    doc = json.loads(transmission_to_json(fams[2]))
    assert doc == {"family": "ventcell1", "p": 2.0, "q": 0.5}


def test_validation_errors():
    with pytest.raises(ValueError):
        ProblemParams(eta=1, epsilon=1, L=1, Lhat=1, J=1, delta=0.02)
    with pytest.raises(ValueError):
        ProblemParams(eta=1, epsilon=1, L=1, Lhat=1, J=2, delta=1.5)
    with pytest.raises(ValueError):
        Robin1(p=0.0)
    with pytest.raises(ValueError):
        Ventcell1(p=1.0, q=-0.1)
    with pytest.raises(ValueError):
        OuterBC.robin(-1.0, 2.0)
    with pytest.raises(ValueError):
        FrequencyGrid(Lhat=1.0, M=0)
