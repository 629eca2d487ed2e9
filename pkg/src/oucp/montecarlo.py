"""Repeated simulate-and-detect experiments.

Iteration ``i`` always simulates with seed ``seed0 + i``, so a run is fully
determined by its configuration whatever the worker count. Iterations whose
detection raises a package error are recorded and left out of the summaries;
more than ``MAX_ERROR_RATE`` of them fails the run.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Literal

import numpy as np
from numpy.typing import NDArray

from .basis import BasisSet
from .dp import Objective, detect_known_m
from .errors import MonteCarloError, OUCPError
from .pelt import detect_pelt
from .simulate import RegimeScenario, simulate
from .sns import detect_unknown_m_sns
from .stats import PrefixStats, realized_volatility

MAX_ERROR_RATE = 0.01

Method = Literal["lsse", "mll"]
Algorithm = Literal["sns", "pelt"]


def nearest_rank(sorted_values: NDArray, pct: float) -> float:
    """Nearest-rank percentile: the ``ceil(pct/100 * N)``-th smallest value."""
    n = len(sorted_values)
    if n == 0:
        return math.nan
    rank = max(1, math.ceil(pct / 100.0 * n))
    return float(sorted_values[rank - 1])


@dataclass
class McRateSummary:
    """Location estimates of a known number of change points."""

    method: str
    iterations: int
    true_fractions: tuple[float, ...]
    mean: list[float]
    ci_low: list[float]
    ci_high: list[float]
    mse: list[float]
    estimates: NDArray[np.float64] = field(repr=False)
    seeds: list[int] = field(repr=False)
    errors: list[tuple[int, str]] = field(default_factory=list)

    @property
    def completed(self) -> int:
        return len(self.estimates)

    def rows(self) -> list[dict[str, Any]]:
        """One table row per change point, in the layout of the simulation-study tables."""
        return [
            {"j": j + 1, "method": self.method.upper(), "true": s,
             "mean": self.mean[j], "ci_low": self.ci_low[j],
             "ci_high": self.ci_high[j], "mse": self.mse[j]}
            for j, s in enumerate(self.true_fractions)
        ]


@dataclass
class McCountSummary:
    """How often the selected number of change points equals the truth."""

    algorithm: str
    iterations: int
    m0: int
    cf: int
    m_hat: list[int] = field(repr=False)
    seeds: list[int] = field(repr=False)
    errors: list[tuple[int, str]] = field(default_factory=list)
    label: str = ""

    @property
    def rf(self) -> float:
        """Relative frequency in percent, ``100 * CF / iterations``."""
        return 100.0 * self.cf / self.iterations

    def rows(self) -> list[dict[str, Any]]:
        return [{"case": self.label, "algorithm": self.algorithm.upper(),
                 "iterations": self.iterations, "CF": self.cf, "RF": self.rf}]


def summarize_rates(estimates: NDArray, truth: Sequence[float]) -> tuple[list, list, list, list]:
    """Mean, nearest-rank 2.5/97.5 percentiles and MSE per column."""
    truth = np.asarray(truth, dtype=float)
    m = len(truth)
    est = np.asarray(estimates, dtype=float).reshape(-1, m)
    if est.shape[0] == 0:
        nan = [math.nan] * m
        return nan, nan, nan, nan
    srt = np.sort(est, axis=0)
    mean = est.mean(axis=0).tolist()
    lo = [nearest_rank(srt[:, j], 2.5) for j in range(m)]
    hi = [nearest_rank(srt[:, j], 97.5) for j in range(m)]
    mse = ((est - truth) ** 2).mean(axis=0).tolist()
    return mean, lo, hi, mse


def _map(fn: Callable, items: Iterable, workers: int) -> list:
    items = list(items)
    if workers <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


def _check_errors(errors: list, iterations: int) -> None:
    if len(errors) > MAX_ERROR_RATE * iterations:
        seed, msg = errors[0]
        raise MonteCarloError(
            f"{len(errors)} of {iterations} iterations failed "
            f"(limit {MAX_ERROR_RATE:.0%}); first failure at seed {seed}: {msg}"
        )


@dataclass(frozen=True)
class _RateJob:
    scenario: RegimeScenario
    basis: BasisSet
    methods: tuple[str, ...]
    h_frac: float
    sigma: float | None
    seed: int


def _rate_iteration(job: _RateJob) -> tuple[int, dict[str, tuple[float, ...]] | str]:
    series = simulate(job.scenario, job.basis, job.seed)
    try:
        prefix = PrefixStats(series, job.basis)
        out = {}
        for method in job.methods:
            if method == "mll":
                sigma = job.sigma if job.sigma is not None else realized_volatility(series)
                objective = Objective("mll", sigma)
            else:
                objective = Objective("lsse")
            seg, _ = detect_known_m(series, job.basis, job.scenario.m, job.h_frac,
                                    objective, prefix=prefix)
            out[method] = seg.fractions
        return job.seed, out
    except OUCPError as exc:
        return job.seed, str(exc)


def run_rate_experiments(scenario: RegimeScenario, basis: BasisSet,
                         methods: Sequence[Method] = ("lsse", "mll"),
                         iterations: int = 500, seed0: int = 0,
                         h_frac: float = 0.05, sigma: float | None = None,
                         workers: int = 1) -> dict[str, McRateSummary]:
    """Rate experiments for several objectives on the same simulated paths.

    ``sigma=None`` gives the MLL objective each path's realised volatility.
    """
    if iterations < 1:
        raise ValueError("iterations must be at least 1")
    for method in methods:
        if method not in ("lsse", "mll"):
            raise ValueError(f"unknown method {method!r}")
    jobs = [_RateJob(scenario, basis, tuple(methods), h_frac, sigma, seed0 + i)
            for i in range(iterations)]
    results = _map(_rate_iteration, jobs, workers)
    errors = [(seed, res) for seed, res in results if isinstance(res, str)]
    _check_errors(errors, iterations)
    good = [(seed, res) for seed, res in results if not isinstance(res, str)]
    seeds = [seed for seed, _ in good]
    out = {}
    for method in methods:
        est = np.array([res[method] for _, res in good], dtype=float)
        est = est.reshape(len(good), scenario.m)
        mean, lo, hi, mse = summarize_rates(est, scenario.change_fractions)
        out[method] = McRateSummary(method, iterations, scenario.change_fractions,
                                    mean, lo, hi, mse, est, seeds, errors)
    return out


def run_rate_experiment(scenario: RegimeScenario, basis: BasisSet,
                        method: Method = "lsse", iterations: int = 500,
                        seed0: int = 0, h_frac: float = 0.05,
                        sigma: float | None = None, workers: int = 1) -> McRateSummary:
    """Known-``m`` detection on ``iterations`` simulated paths."""
    return run_rate_experiments(scenario, basis, (method,), iterations, seed0,
                                h_frac, sigma, workers)[method]


@dataclass(frozen=True)
class _CountJob:
    scenario: RegimeScenario
    basis: BasisSet
    algorithm: str
    m_max: int
    h_frac: float
    sigma: float | None
    seed: int


def _count_iteration(job: _CountJob) -> tuple[int, int | str]:
    series = simulate(job.scenario, job.basis, job.seed)
    try:
        if job.algorithm == "sns":
            res = detect_unknown_m_sns(series, job.basis, job.m_max, job.h_frac, job.sigma)
        else:
            res = detect_pelt(series, job.basis, job.h_frac, job.sigma)
        return job.seed, res.m
    except OUCPError as exc:
        return job.seed, str(exc)


def run_count_experiment(scenario: RegimeScenario, basis: BasisSet,
                         algorithm: Algorithm = "sns", m_max: int = 5,
                         iterations: int = 500, seed0: int = 0,
                         h_frac: float = 0.05, sigma: float | None = None,
                         workers: int = 1, label: str = "") -> McCountSummary:
    """Unknown-``m`` detection; counts iterations with ``m_hat == m0``.

    ``m_max`` only applies to SNS. Failed iterations count as incorrect.
    """
    if iterations < 1:
        raise ValueError("iterations must be at least 1")
    if algorithm not in ("sns", "pelt"):
        raise ValueError(f"unknown algorithm {algorithm!r}")
    jobs = [_CountJob(scenario, basis, algorithm, m_max, h_frac, sigma, seed0 + i)
            for i in range(iterations)]
    results = _map(_count_iteration, jobs, workers)
    errors = [(seed, res) for seed, res in results if isinstance(res, str)]
    _check_errors(errors, iterations)
    m_hat = [res for _, res in results if not isinstance(res, str)]
    seeds = [seed for seed, res in results if not isinstance(res, str)]
    cf = sum(1 for m in m_hat if m == scenario.m)
    return McCountSummary(algorithm, iterations, scenario.m, cf, m_hat, seeds,
                          errors, label)
