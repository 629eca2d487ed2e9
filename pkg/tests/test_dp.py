import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oucp.basis import make_constant_basis
from oucp.dp import (
    CostCache,
    Objective,
    Segmentation,
    build_table,
    detect_known_m,
    detect_known_m_all_prefixes,
    min_segment_rows,
)
from oucp.errors import InfeasibleError
from oucp.oracle import exhaustive_search
from oucp.simulate import study_scenario, simulate
from oucp.stats import PrefixStats, realized_volatility, segment_sse

from conftest import noiseless_two_regime, small_case


def test_min_segment_rows():
    assert min_segment_rows(1000, 1) == 50
    assert min_segment_rows(40, 1) == 3
    assert min_segment_rows(40, 2) == 4
    assert min_segment_rows(1000, 1, h_abs=63) == 63
    assert min_segment_rows(1000, 2, h_abs=1) == 4
    with pytest.raises(ValueError):
        min_segment_rows(100, 1, h_frac=1.2)


def test_segmentation_validation():
    seg = Segmentation((30, 70), 100, 20)
    assert seg.fractions == (0.3, 0.7)
    assert seg.segments() == [(0, 30), (30, 70), (70, 100)]
    with pytest.raises(ValueError):
        Segmentation((30, 40), 100, 20)
    with pytest.raises(ValueError):
        Segmentation((10,), 100, 20)


def test_objective_validation():
    with pytest.raises(ValueError):
        Objective("mll")
    with pytest.raises(ValueError):
        Objective("l1")
    assert Objective("mll", 0.2).better(2.0, 1.0)
    assert Objective("lsse").better(1.0, 2.0)


def test_noiseless_exact_split():
    s = noiseless_two_regime(n=200, split=70)
    b = make_constant_basis()
    seg, cost = detect_known_m(s, b, 1)
    assert seg.change_indices == (70,)
    # Residual SSE is exact; the DP cost carries the round-off of yy - dt r.theta.
    assert sum(segment_sse(s, b, a, c) for a, c in seg.segments()) <= 1e-18
    yy = float(np.sum(np.diff(s.values) ** 2))
    assert abs(cost) <= 1e-14 * yy


def test_infeasible_reports_required_n():
    s, b = small_case(1, 0, n=40)
    with pytest.raises(InfeasibleError) as info:
        detect_known_m(s, b, 3, h_abs=11)
    assert info.value.required_n == 44
    with pytest.raises(ValueError):
        detect_known_m(s, b, 0)


@pytest.mark.parametrize("case", [1, 2])
@pytest.mark.parametrize("kind", ["lsse", "mll"])
def test_dp_matches_oracle(case, kind):
    for seed in range(6):
        s, b = small_case(case, seed, n=36, T=1.8)
        obj = Objective(kind, 0.2 if kind == "mll" else None)
        for m in (1, 2, 3):
            seg_o, cost_o = exhaustive_search(s, b, m, 0.05, obj)
            seg_d, cost_d = detect_known_m(s, b, m, 0.05, obj)
            assert seg_d.change_indices == seg_o.change_indices
            assert cost_d == pytest.approx(cost_o, rel=1e-9, abs=1e-15)


def test_all_prefixes_match_oracle_n60():
    s, b = small_case(1, 3, n=60, T=3.0)
    table = detect_known_m_all_prefixes(s, b, 3)
    for r in (1, 2, 3):
        _, cost_o = exhaustive_search(s, b, r)
        assert table.H1(r, 60) == pytest.approx(cost_o, rel=1e-9)
        seg, cost = detect_known_m(s, b, r)
        assert table.segmentation(r).change_indices == seg.change_indices


def test_all_prefixes_noiseless_zero_once_split_admissible():
    s = noiseless_two_regime(n=200, split=70)
    table = detect_known_m_all_prefixes(s, make_constant_basis(), 1)
    h = table.h_idx
    yy = float(np.sum(np.diff(s.values) ** 2))
    for T in range(70 + h, 201, 17):
        assert abs(table.H1(1, T)) <= 1e-14 * yy


def test_lazy_and_eager_bit_identical():
    s, b = small_case(2, 4, n=200, T=2.0)
    pre = PrefixStats(s, b)
    for kind in ("lsse", "mll"):
        obj = Objective(kind, 0.2 if kind == "mll" else None)
        lazy = build_table(pre, 3, 10, obj, "lazy")
        eager = build_table(pre, 3, 10, obj, "eager")
        assert np.array_equal(lazy.cost, eager.cost, equal_nan=True)
        assert np.array_equal(lazy.argopt, eager.argopt)


def test_cache_values_match_fresh_evaluation():
    s, b = small_case(1, 6, n=120, T=6.0)
    cache = CostCache(PrefixStats(s, b), Objective("lsse"), 6)
    for a, bb in [(0, 30), (6, 50), (40, 120)]:
        assert cache[a, bb] == pytest.approx(segment_sse(s, b, a, bb), rel=1e-8)
    with pytest.raises(KeyError):
        cache[2, 30]
    assert cache.evaluations > 0


def test_lsse_and_mll_agree():
    sc = study_scenario(2, 2, 5.0)
    from oucp.basis import make_case2_basis

    b = make_case2_basis(sc.delta_t)
    for seed in range(10):
        s = simulate(sc, b, seed)
        a, _ = detect_known_m(s, b, 2, objective=Objective("lsse"))
        m, _ = detect_known_m(s, b, 2, objective=Objective("mll", realized_volatility(s)))
        assert a.change_indices == m.change_indices


def test_sse_non_increasing_in_m():
    s, b = small_case(1, 2, n=200, T=5.0)
    table = detect_known_m_all_prefixes(s, b, 4)
    costs = [table.H1(r, s.n) for r in range(5)]
    assert all(b_ <= a_ + 1e-15 for a_, b_ in zip(costs, costs[1:]))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 3), st.data())
def test_dp_beats_any_admissible_segmentation(seed, m, data):
    s, b = small_case(1, seed, n=80, T=4.0)
    seg, cost = detect_known_m(s, b, m)
    h = seg.h_idx
    ks, lo = [], h
    for j in range(m):
        hi = s.n - (m - j) * h
        k = data.draw(st.integers(lo, hi))
        ks.append(k)
        lo = k + h
    other = Segmentation(tuple(ks), s.n, h)
    total = sum(segment_sse(s, b, a, c) for a, c in other.segments())
    assert cost <= total * (1 + 1e-9) + 1e-15
