import numpy as np
import pytest

from oucp.basis import make_case2_basis, make_constant_basis
from oucp.errors import MonteCarloError
from oucp.montecarlo import (
    nearest_rank,
    run_count_experiment,
    run_rate_experiment,
    run_rate_experiments,
    summarize_rates,
)
from oucp.simulate import RegimeScenario, study_scenario


def noiseless(scenario):
    return RegimeScenario(scenario.regimes, scenario.change_fractions, 0.0, scenario.T,
                          scenario.delta_t, x0=0.0)


def test_nearest_rank():
    v = np.arange(1, 101, dtype=float)
    assert nearest_rank(v, 2.5) == 3.0
    assert nearest_rank(v, 97.5) == 98.0
    assert nearest_rank(np.array([5.0]), 2.5) == 5.0
    v = np.sort(np.random.default_rng(0).uniform(size=500))
    assert nearest_rank(v, 2.5) == v[12] and nearest_rank(v, 97.5) == v[487]


def test_summary_formulas():
    est = np.array([[0.3, 0.7], [0.4, 0.7], [0.35, 0.8]])
    mean, lo, hi, mse = summarize_rates(est, (0.35, 0.7))
    np.testing.assert_allclose(mean, [0.35, 0.7333333333333334])
    np.testing.assert_allclose(mse, [(0.05**2 * 2) / 3, 0.1**2 / 3])
    assert lo == [0.3, 0.7] and hi == [0.4, 0.8]


def test_zero_noise_rates_exact():
    sc = noiseless(study_scenario(1, 2, 5.0))
    r = run_rate_experiment(sc, make_constant_basis(), "lsse", iterations=3)
    assert r.mean == pytest.approx([0.35, 0.7], abs=1e-12)
    assert r.mse == pytest.approx([0.0, 0.0], abs=1e-24)
    assert r.ci_low == r.ci_high == pytest.approx([0.35, 0.7])


def test_determinism_and_seeds():
    sc = study_scenario(2, 2, 5.0)
    b = make_case2_basis(sc.delta_t)
    a = run_rate_experiment(sc, b, "lsse", iterations=10, seed0=7)
    c = run_rate_experiment(sc, b, "lsse", iterations=10, seed0=7)
    assert a.mean == c.mean and a.mse == c.mse
    assert np.array_equal(a.estimates, c.estimates)
    assert a.seeds == list(range(7, 17))


def test_methods_agree_per_iteration():
    sc = study_scenario(2, 2, 5.0)
    b = make_case2_basis(sc.delta_t)
    out = run_rate_experiments(sc, b, ("lsse", "mll"), iterations=20)
    assert np.array_equal(out["lsse"].estimates, out["mll"].estimates)
    assert [r["method"] for r in out["mll"].rows()] == ["MLL", "MLL"]


def test_summary_invariants():
    sc = study_scenario(2, 2, 5.0)
    r = run_rate_experiment(sc, make_case2_basis(sc.delta_t), "mll", iterations=30)
    assert r.iterations == r.completed == 30
    for j in range(2):
        assert r.ci_low[j] <= r.mean[j] <= r.ci_high[j]
        assert r.mse[j] >= 0


def test_count_noiseless():
    sc = noiseless(study_scenario(1, 2, 5.0))
    for alg in ("sns", "pelt"):
        c = run_count_experiment(sc, make_constant_basis(), alg, iterations=5)
        assert c.cf == 5 and c.rf == 100.0


def test_rf_formula():
    sc = study_scenario(2, 2, 5.0)
    c = run_count_experiment(sc, make_case2_basis(sc.delta_t), "pelt", iterations=7)
    assert c.rf == 100.0 * c.cf / 7
    assert 0 <= c.cf <= 7 and len(c.m_hat) == 7


def test_worker_pool_matches_serial():
    sc = study_scenario(2, 2, 5.0)
    b = make_case2_basis(sc.delta_t)
    serial = run_rate_experiment(sc, b, "lsse", iterations=6)
    pooled = run_rate_experiment(sc, b, "lsse", iterations=6, workers=2)
    assert np.array_equal(serial.estimates, pooled.estimates)


def test_error_budget(monkeypatch):
    import oucp.montecarlo as mc
    from oucp.errors import SingularStatisticsError

    real = mc.detect_known_m
    calls = {"n": 0}

    def flaky(*args, **kwargs):
        calls["n"] += 1
        if calls["n"] == 1:
            raise SingularStatisticsError(0, 3)
        return real(*args, **kwargs)

    monkeypatch.setattr(mc, "detect_known_m", flaky)
    sc = study_scenario(2, 2, 5.0)
    b = make_case2_basis(sc.delta_t)
    r = run_rate_experiment(sc, b, "lsse", iterations=101)
    assert len(r.errors) == 1 and r.completed == 100
    calls["n"] = 0
    with pytest.raises(MonteCarloError):
        run_rate_experiment(sc, b, "lsse", iterations=50)


def test_bad_arguments():
    sc = study_scenario(1, 2, 5.0)
    b = make_constant_basis()
    with pytest.raises(ValueError):
        run_rate_experiment(sc, b, "lsse", iterations=0)
    with pytest.raises(ValueError):
        run_count_experiment(sc, b, "binseg", iterations=1)
