import numpy as np
import pytest

from oucp.dp import Objective, detect_known_m
from oucp.errors import InfeasibleError, OracleCapError, SingularStatisticsError
from oucp.oracle import design_row_list, exhaustive_search, ols_direct
from oucp.stats import DesignRow, accumulate, segment_mle

from conftest import noiseless_two_regime, random_walk, small_case


def test_noiseless_single_split():
    s = noiseless_two_regime(n=20, split=8, dt=0.1, x0=0.0)
    seg, cost = exhaustive_search(s, s_basis(), 1)
    assert seg.change_indices == (8,)
    assert cost <= 1e-18


def s_basis():
    from oucp.basis import make_constant_basis
    return make_constant_basis()


def test_frozen_values():
    # Frozen from the brute-force search (case 1, T = 2, dt = 0.05, seed 7).
    s, b = small_case(1, 7, n=40)
    seg, cost = exhaustive_search(s, b, 2, 0.05, Objective("lsse"))
    assert seg.change_indices == (14, 30)
    assert cost == pytest.approx(0.03902684262850796, rel=1e-12)
    seg, cost = exhaustive_search(s, b, 2, 0.05, Objective("mll", 0.2))
    assert seg.change_indices == (14, 30)
    assert cost == pytest.approx(12.452926271907796, rel=1e-12)
    s2, b2 = small_case(2, 11, n=40)
    seg, cost = exhaustive_search(s2, b2, 2, 0.1)
    assert seg.change_indices == (15, 28)
    assert cost == pytest.approx(0.026789080543100287, rel=1e-12)


def test_dp_agrees_n40_m2():
    for seed in range(20):
        s, b = small_case(1 + seed % 2, 100 + seed, n=40)
        seg_o, cost_o = exhaustive_search(s, b, 2)
        seg_d, cost_d = detect_known_m(s, b, 2)
        assert seg_d.change_indices == seg_o.change_indices
        assert cost_d == pytest.approx(cost_o, rel=1e-9, abs=1e-15)


def test_caps_and_infeasible():
    s = random_walk(121, 0.01, 0.2, 0)
    with pytest.raises(OracleCapError):
        exhaustive_search(s, s_basis(), 1)
    s = random_walk(40, 0.01, 0.2, 0)
    with pytest.raises(OracleCapError):
        exhaustive_search(s, s_basis(), 4)
    with pytest.raises(InfeasibleError):
        exhaustive_search(s, s_basis(), 1, h_abs=21)


def test_ols_direct_exact_fit():
    theta = np.array([0.3, -0.2, 0.7])
    rng = np.random.default_rng(1)
    rows = [DesignRow(z, float(z @ theta)) for z in rng.standard_normal((10, 3))]
    fit = ols_direct(rows)
    np.testing.assert_allclose(fit.theta, theta, atol=1e-10)


def test_ols_direct_rank_errors():
    rows = [DesignRow(np.array([1.0, 2.0]), 0.5)]
    with pytest.raises(SingularStatisticsError):
        ols_direct(rows)
    rows = [DesignRow(np.array([1.0, 2.0]), 0.5), DesignRow(np.array([2.0, 4.0]), 1.0)]
    with pytest.raises(SingularStatisticsError):
        ols_direct(rows)


def test_ols_direct_matches_segment_mle():
    rng = np.random.default_rng(5)
    for k in range(50):
        s, b = small_case(1 + k % 2, k, n=60, T=3.0)
        lo = int(rng.integers(0, 40))
        hi = lo + int(rng.integers(b.p + 4, 20))
        ref = ols_direct(design_row_list(s, b, lo, hi)).theta
        got = segment_mle(accumulate(s, b, lo, hi)).theta
        np.testing.assert_allclose(got, ref, rtol=1e-8, atol=1e-12)
