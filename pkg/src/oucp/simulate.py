"""Euler-Maruyama simulation of regime-switching generalised OU processes."""

from __future__ import annotations

import math
import warnings
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .basis import BasisSet, make_case2_basis, make_constant_basis
from .errors import DataError


@dataclass(frozen=True)
class DriftParams:
    """Drift coefficients of one regime.

    ``mu`` holds the basis weights and ``a`` the mean-reversion rate, stored
    with a positive sign; the regressor carries the minus sign as ``-x``.
    """

    mu: tuple[float, ...]
    a: float

    def __post_init__(self) -> None:
        mu = tuple(float(v) for v in np.atleast_1d(self.mu))
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "a", float(self.a))
        if not all(math.isfinite(v) for v in (*mu, self.a)):
            raise ValueError("drift parameters must be finite")
        if self.a <= 0:
            warnings.warn(
                f"mean-reversion rate a={self.a} <= 0: the regime is not stationary",
                RuntimeWarning,
                stacklevel=3,
            )

    @property
    def p(self) -> int:
        return len(self.mu)

    @property
    def theta(self) -> NDArray[np.float64]:
        """Coefficients ``(mu_1, ..., mu_p, a)`` of the regressor ``(phi, -x)``."""
        return np.array([*self.mu, self.a])

    @classmethod
    def from_theta(cls, theta: ArrayLike) -> DriftParams:
        theta = np.asarray(theta, dtype=float)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            return cls(tuple(theta[:-1]), float(theta[-1]))


@dataclass(frozen=True)
class TimeSeries:
    """Path ``x_0 .. x_n`` sampled every ``delta_t`` starting at ``t = 0``."""

    delta_t: float
    values: NDArray[np.float64]
    metadata: dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        values = np.ascontiguousarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.ndim != 1 or values.size < 3:
            raise DataError("a time series needs at least 3 observations (n >= 2)")
        if not math.isfinite(self.delta_t) or self.delta_t <= 0:
            raise DataError(f"delta_t must be positive, got {self.delta_t!r}")
        if not np.all(np.isfinite(values)):
            raise DataError("time series values must be finite")

    @property
    def n(self) -> int:
        """Number of increments (rows)."""
        return self.values.size - 1

    @property
    def T(self) -> float:
        return self.n * self.delta_t

    @property
    def times(self) -> NDArray[np.float64]:
        return np.arange(self.values.size) * self.delta_t


@dataclass(frozen=True)
class RegimeScenario:
    """Ground-truth configuration for a simulated path.

    ``x0=None`` starts the path at the first regime's long-run level
    ``mu_1 / a``.
    """

    regimes: tuple[DriftParams, ...]
    change_fractions: tuple[float, ...]
    sigma: float
    T: float
    delta_t: float
    x0: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "regimes", tuple(self.regimes))
        object.__setattr__(
            self, "change_fractions", tuple(float(s) for s in self.change_fractions)
        )
        s = self.change_fractions
        if len(self.regimes) != len(s) + 1:
            raise ValueError("need exactly one more regime than change fractions")
        if any(not 0.0 < v < 1.0 for v in s) or any(b <= a for a, b in zip(s, s[1:])):
            raise ValueError("change fractions must be strictly increasing in (0, 1)")
        if self.sigma < 0:
            raise ValueError("sigma must be non-negative")
        if self.delta_t <= 0:
            raise ValueError("delta_t must be positive")
        n = self.T / self.delta_t
        if abs(n - round(n)) > 1e-9 * max(1.0, n) or round(n) < 2:
            raise ValueError(f"T/delta_t must be an integer >= 2, got {n}")
        k = self.change_indices
        bounds = (0, *k, self.n)
        if any(b <= a for a, b in zip(bounds, bounds[1:])):
            raise ValueError("every regime must span at least one step")
        if len({r.p for r in self.regimes}) != 1:
            raise ValueError("all regimes must use the same number of basis weights")

    @property
    def m(self) -> int:
        return len(self.change_fractions)

    @property
    def n(self) -> int:
        return int(round(self.T / self.delta_t))

    @property
    def change_indices(self) -> tuple[int, ...]:
        """Grid indices ``k_j = round(s_j n)``, rounding halves up."""
        return tuple(int(math.floor(s * self.n + 0.5)) for s in self.change_fractions)

    @property
    def initial_value(self) -> float:
        if self.x0 is not None:
            return float(self.x0)
        first = self.regimes[0]
        if first.a == 0:
            raise ValueError("x0 must be given when the first regime has a = 0")
        return first.mu[0] / first.a


def drift(theta: DriftParams, basis: BasisSet, t: float, x: float) -> float:
    """``S(theta, t, x) = sum_k mu_k phi_k(t) - a x``."""
    phi = basis.evaluate(t)
    return float(np.dot(theta.mu, phi)) - theta.a * x


def regime_of_rows(change_indices: Sequence[int], n: int) -> NDArray[np.intp]:
    """Regime label of each row ``i``: regime ``j`` owns ``k_{j-1} <= i < k_j``."""
    return np.searchsorted(np.asarray(change_indices, dtype=np.intp),
                           np.arange(n), side="right")


def simulate(scenario: RegimeScenario, basis: BasisSet, seed: int) -> TimeSeries:
    """Simulate one path with the Euler-Maruyama scheme.

    Step ``i`` uses the drift of the regime owning row ``i`` evaluated at
    ``(t_i, x_i)``. Normal draws come from ``numpy.random.default_rng(seed)``
    (PCG64), so a fixed seed reproduces the path bit for bit.
    """
    if any(r.p != basis.p for r in scenario.regimes):
        raise ValueError(
            f"basis has p={basis.p} functions but regimes carry "
            f"{scenario.regimes[0].p} weights"
        )
    n, dt = scenario.n, scenario.delta_t
    t = np.arange(n) * dt
    phi = basis.evaluate_grid(t)
    labels = regime_of_rows(scenario.change_indices, n)
    mu = np.array([r.mu for r in scenario.regimes])
    a = np.array([r.a for r in scenario.regimes])
    level = np.einsum("ik,ik->i", phi, mu[labels]).tolist()
    rate = a[labels].tolist()

    rng = np.random.default_rng(seed)
    shocks = (scenario.sigma * math.sqrt(dt) * rng.standard_normal(n)).tolist()

    x = np.empty(n + 1)
    xi = scenario.initial_value
    x[0] = xi
    for i in range(n):
        xi = xi + (level[i] - rate[i] * xi) * dt + shocks[i]
        x[i + 1] = xi

    meta = {
        "seed": int(seed),
        "generator": "numpy.random.PCG64",
        "sigma": scenario.sigma,
        "x0": scenario.initial_value,
        "change_indices": list(scenario.change_indices),
        "basis": basis.name,
    }
    return TimeSeries(dt, x, meta)


# Pre-assigned coefficients of the simulation study, indexed by number of
# change points. Case 1 uses the constant basis, case 2 adds the cosine weight.
_STUDY_MU1 = {2: (0.08, 2.50, 0.08), 3: (0.08, 2.50, 0.08, 2.50)}
_STUDY_MU2 = {2: (0.02, 1.20, 0.02), 3: (0.02, 1.20, 0.02, 1.20)}
_STUDY_A = {2: (0.10, 1.00, 0.50), 3: (0.10, 1.00, 0.50, 1.00)}
_STUDY_S = {2: (0.35, 0.70), 3: (0.25, 0.50, 0.75)}


def study_scenario(case: int, m: int, T: float, delta_t: float | None = None,
                   sigma: float = 0.2, x0: float | None = None) -> RegimeScenario:
    """Simulation-study scenario for ``case`` in {1, 2} and ``m`` in {2, 3}.

    ``delta_t`` defaults to ``T / 1000``.
    """
    if case not in (1, 2) or m not in (2, 3):
        raise ValueError("case must be 1 or 2 and m must be 2 or 3")
    dt = T / 1000.0 if delta_t is None else delta_t
    if case == 1:
        regimes = tuple(DriftParams((u,), a) for u, a in zip(_STUDY_MU1[m], _STUDY_A[m]))
    else:
        regimes = tuple(
            DriftParams((u1, u2), a)
            for u1, u2, a in zip(_STUDY_MU1[m], _STUDY_MU2[m], _STUDY_A[m])
        )
    return RegimeScenario(regimes, _STUDY_S[m], sigma=sigma, T=T, delta_t=dt, x0=x0)


def study_basis(case: int, delta_t: float) -> BasisSet:
    return make_constant_basis() if case == 1 else make_case2_basis(delta_t)
