"""Dynamic programming for a known number of change points.

``H2(a, b)`` is the cost of one regime over rows ``[a, b)`` (its SSE, or its
Riemann log-likelihood at the segment MLE) and ``H1(r, T)`` the optimal total
over rows ``[0, T)`` split by ``r`` change points with every regime at least
``h`` rows long. The recursion is
``H1(r, T) = opt_{a in [r h, T - h]} H1(r - 1, a) + H2(a, T)`` with
``H1(0, T) = H2(0, T)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from numpy.typing import NDArray

from .basis import BasisSet
from .errors import InfeasibleError
from .simulate import TimeSeries
from .stats import PrefixStats

Kind = Literal["lsse", "mll"]


@dataclass(frozen=True)
class Objective:
    """Segmentation objective: minimise SSE or maximise the log-likelihood."""

    kind: Kind = "lsse"
    sigma: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("lsse", "mll"):
            raise ValueError(f"objective must be 'lsse' or 'mll', got {self.kind!r}")
        if self.kind == "mll" and not (self.sigma is not None and self.sigma > 0):
            raise ValueError("the MLL objective needs a positive sigma")

    @property
    def maximise(self) -> bool:
        return self.kind == "mll"

    def better(self, new: float, old: float) -> bool:
        """Strict improvement test used for deterministic tie-breaking."""
        return new > old if self.maximise else new < old


@dataclass(frozen=True)
class Segmentation:
    """Interior change indices; regime ``j`` covers rows ``[k_{j-1}, k_j)``."""

    change_indices: tuple[int, ...]
    n: int
    h_idx: int

    def __post_init__(self) -> None:
        k = tuple(int(v) for v in self.change_indices)
        object.__setattr__(self, "change_indices", k)
        bounds = (0, *k, self.n)
        if any(b - a < self.h_idx for a, b in zip(bounds, bounds[1:])):
            raise ValueError(f"segmentation {k} violates minimum length {self.h_idx}")

    @property
    def m(self) -> int:
        return len(self.change_indices)

    @property
    def fractions(self) -> tuple[float, ...]:
        return tuple(k / self.n for k in self.change_indices)

    @property
    def bounds(self) -> tuple[int, ...]:
        return (0, *self.change_indices, self.n)

    def segments(self) -> list[tuple[int, int]]:
        b = self.bounds
        return list(zip(b[:-1], b[1:]))


def min_segment_rows(n: int, p: int, h_frac: float | None = 0.05,
                     h_abs: int | None = None) -> int:
    """Minimum regime length in rows.

    ``h_abs`` overrides ``h_frac``; either way the result is at least
    ``p + 2`` so every admissible segment has more rows than parameters.
    """
    if h_abs is not None:
        h = int(h_abs)
    else:
        if h_frac is None or not 0 <= h_frac < 1:
            raise ValueError(f"h_frac must lie in [0, 1), got {h_frac!r}")
        h = math.ceil(h_frac * n - 1e-9)
    return max(h, p + 2)


class CostCache:
    """Lookup of segment costs ``H2(a, b)`` for ``b - a >= h``.

    ``policy="lazy"`` computes the column ``H2(., b)`` the first time it is
    requested; ``policy="eager"`` evaluates every admissible pair up front.
    Both paths run the same elementwise arithmetic, so values are identical.
    Only ``a = 0`` and ``h <= a <= b - h`` are admissible starts; other
    entries of a column are NaN.
    """

    def __init__(self, prefix: PrefixStats, objective: Objective, h_idx: int,
                 policy: Literal["lazy", "eager"] = "lazy"):
        if policy not in ("lazy", "eager"):
            raise ValueError("policy must be 'lazy' or 'eager'")
        self.prefix = prefix
        self.objective = objective
        self.h = h_idx
        self.n = prefix.n
        self.policy = policy
        self._columns: dict[int, NDArray[np.float64]] = {}
        self.evaluations = 0
        if policy == "eager":
            self._fill_all()

    def _starts(self, b: int) -> NDArray[np.intp]:
        return np.concatenate(([0], np.arange(self.h, b - self.h + 1))).astype(np.intp)

    def _cost(self, starts: NDArray, stops: NDArray) -> NDArray[np.float64]:
        self.evaluations += len(starts)
        if self.objective.kind == "lsse":
            return self.prefix.sse(starts, stops)
        return self.prefix.loglik(starts, stops, self.objective.sigma)

    def _fill_all(self) -> None:
        bs = np.arange(self.h, self.n + 1)
        starts = [self._starts(int(b)) for b in bs]
        sizes = [len(s) for s in starts]
        values = self._cost(np.concatenate(starts), np.repeat(bs, sizes))
        offset = 0
        for b, s, size in zip(bs, starts, sizes):
            col = np.full(int(b) + 1, np.nan)
            col[s] = values[offset:offset + size]
            offset += size
            self._columns[int(b)] = col

    def column(self, b: int) -> NDArray[np.float64]:
        """Costs ``H2(a, b)`` indexed by ``a`` in ``0..b``."""
        col = self._columns.get(b)
        if col is None:
            if b < self.h:
                raise ValueError(f"no admissible segment ends at {b}")
            s = self._starts(b)
            col = np.full(b + 1, np.nan)
            col[s] = self._cost(s, np.full(len(s), b))
            self._columns[b] = col
        return col

    def __getitem__(self, key: tuple[int, int]) -> float:
        a, b = key
        value = self.column(b)[a]
        if np.isnan(value):
            raise KeyError(f"segment ({a}, {b}] is not admissible")
        return float(value)


@dataclass
class DPTable:
    """Optimal prefix costs ``H1(r, T)`` and back-pointers for ``r <= m_max``."""

    cost: NDArray[np.float64]
    argopt: NDArray[np.intp]
    n: int
    h_idx: int
    objective: Objective
    cache: CostCache = field(repr=False)

    @property
    def m_max(self) -> int:
        return self.cost.shape[0] - 1

    def H1(self, r: int, T: int) -> float:
        return float(self.cost[r, T])

    def segmentation(self, m: int, end: int | None = None) -> Segmentation:
        """Backtrack the optimal ``m``-change segmentation of rows ``[0, end)``."""
        end = self.n if end is None else end
        if np.isnan(self.cost[m, end]):
            raise InfeasibleError(f"no admissible {m}-change segmentation of [0, {end})")
        ks = []
        t = end
        for r in range(m, 0, -1):
            t = int(self.argopt[r, t])
            ks.append(t)
        return Segmentation(tuple(reversed(ks)), self.n, self.h_idx)


def _check_feasible(n: int, m: int, h: int) -> None:
    if m < 0:
        raise ValueError("the number of change points must be non-negative")
    if n < (m + 1) * h:
        raise InfeasibleError(
            f"{m} change points with minimum regime length {h} rows need n >= "
            f"{(m + 1) * h}, but the series has n = {n}",
            required_n=(m + 1) * h,
        )


def build_table(prefix: PrefixStats, m_max: int, h_idx: int, objective: Objective,
                policy: Literal["lazy", "eager"] = "lazy",
                target_m: int | None = None) -> DPTable:
    """Fill ``H1(r, T)`` for ``r = 0..m_max``.

    With ``target_m`` set, each level ``r`` is only filled for
    ``T <= n - (target_m - r) h``, the prefix ends a ``target_m``-change
    solution can reach; otherwise every ``T`` up to ``n`` is filled.
    """
    n, h = prefix.n, h_idx
    _check_feasible(n, m_max if target_m is None else target_m, h)
    cache = CostCache(prefix, objective, h, policy)
    cost = np.full((m_max + 1, n + 1), np.nan)
    argopt = np.full((m_max + 1, n + 1), -1, dtype=np.intp)
    pick = np.argmax if objective.maximise else np.argmin

    def upper(r: int) -> int:
        return n if target_m is None else n - (target_m - r) * h

    for T in range(h, n + 1):
        col = cache.column(T)
        if T <= upper(0):
            cost[0, T] = col[0]
            argopt[0, T] = 0
        for r in range(1, m_max + 1):
            if T < (r + 1) * h or T > upper(r):
                continue
            lo, hi = r * h, T - h
            vals = cost[r - 1, lo:hi + 1] + col[lo:hi + 1]
            j = int(pick(vals))
            cost[r, T] = vals[j]
            argopt[r, T] = lo + j
    return DPTable(cost, argopt, n, h, objective, cache)


def detect_known_m(series: TimeSeries, basis: BasisSet, m: int,
                   h_frac: float = 0.05, objective: Objective | None = None,
                   h_abs: int | None = None,
                   policy: Literal["lazy", "eager"] = "lazy",
                   prefix: PrefixStats | None = None) -> tuple[Segmentation, float]:
    """Globally optimal segmentation with exactly ``m`` change points.

    Ties resolve to the smallest change index at each backtracking step.
    """
    objective = objective or Objective("lsse")
    if m < 1:
        raise ValueError("detect_known_m needs m >= 1")
    h = min_segment_rows(series.n, basis.p, h_frac, h_abs)
    prefix = prefix or PrefixStats(series, basis)
    table = build_table(prefix, m, h, objective, policy, target_m=m)
    return table.segmentation(m), table.H1(m, series.n)


def detect_known_m_all_prefixes(series: TimeSeries, basis: BasisSet, m_max: int,
                                h_frac: float = 0.05,
                                objective: Objective | None = None,
                                h_abs: int | None = None,
                                policy: Literal["lazy", "eager"] = "lazy",
                                prefix: PrefixStats | None = None) -> DPTable:
    """Full table ``H1(r, T)`` for every ``r <= m_max`` and prefix end ``T``."""
    objective = objective or Objective("lsse")
    h = min_segment_rows(series.n, basis.p, h_frac, h_abs)
    prefix = prefix or PrefixStats(series, basis)
    return build_table(prefix, m_max, h, objective, policy)
