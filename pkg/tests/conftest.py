import functools

import numpy as np
import pytest

from oucp.basis import make_case2_basis, make_constant_basis
from oucp.montecarlo import run_count_experiment, run_rate_experiments
from oucp.simulate import (
    DriftParams,
    RegimeScenario,
    TimeSeries,
    study_basis,
    study_scenario,
    simulate,
)


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: Monte-Carlo runs taking minutes")
    config.addinivalue_line("markers", "acceptance: acceptance criteria")


@pytest.fixture
def const_basis():
    return make_constant_basis()


def noiseless_two_regime(n=200, split=70, dt=0.01, first=(0.08, 0.1), second=(2.5, 1.0),
                         x0=0.0):
    """sigma = 0 path with one change at row ``split``."""
    sc = RegimeScenario(
        (DriftParams((first[0],), first[1]), DriftParams((second[0],), second[1])),
        (split / n,), sigma=0.0, T=n * dt, delta_t=dt, x0=x0,
    )
    return simulate(sc, make_constant_basis(), 0)


def random_walk(n, dt, sigma, seed, x0=0.0):
    rng = np.random.default_rng(seed)
    steps = sigma * np.sqrt(dt) * rng.standard_normal(n)
    return TimeSeries(dt, np.concatenate([[x0], x0 + np.cumsum(steps)]))


def small_case(case, seed, n=40, T=2.0):
    """A short simulated path from the coefficient table with m = 2."""
    dt = T / n
    sc = study_scenario(case, 2, T, delta_t=dt)
    basis = make_constant_basis() if case == 1 else make_case2_basis(dt)
    return simulate(sc, basis, seed), basis


# Monte-Carlo runs shared across test modules within one session.
MC_ITERATIONS = 500


@functools.lru_cache(maxsize=None)
def mc_rates(case, T):
    sc = study_scenario(case, 2, T)
    return run_rate_experiments(sc, study_basis(case, sc.delta_t), ("lsse", "mll"), MC_ITERATIONS)


@functools.lru_cache(maxsize=None)
def mc_count(case, T, algorithm):
    sc = study_scenario(case, 2, T)
    return run_count_experiment(sc, study_basis(case, sc.delta_t), algorithm,
                                iterations=MC_ITERATIONS)
