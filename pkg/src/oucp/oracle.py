"""Brute-force reference solutions for small problems.

Nothing here touches the prefix sums or the DP cost cache: every segment is
refitted from its raw rows by a dense solve of the normal equations. The
enumeration is exponential in ``m`` and refuses problems beyond a small cap.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .basis import BasisSet
from .dp import Objective, Segmentation, min_segment_rows
from .errors import InfeasibleError, OracleCapError, SingularStatisticsError
from .simulate import DriftParams, TimeSeries
from .stats import DesignRow

MAX_N = 120
MAX_M = 3


def design_row_list(series: TimeSeries, basis: BasisSet, start: int,
                    stop: int) -> list[DesignRow]:
    """Rows ``[start, stop)`` built one at a time from the raw path."""
    dt = series.delta_t
    x = series.values
    rows = []
    for i in range(start, stop):
        phi = basis.evaluate(i * dt)
        z = np.append(phi, -x[i]) * dt
        rows.append(DesignRow(z, float(x[i + 1] - x[i])))
    return rows


def _solve_rows(rows: list[DesignRow]) -> np.ndarray:
    if not rows:
        raise ValueError("no rows to fit")
    z = np.array([r.z for r in rows])
    y = np.array([r.y for r in rows])
    d = z.shape[1]
    if len(rows) < d or np.linalg.matrix_rank(z) < d:
        raise SingularStatisticsError(0, len(rows), "design has rank below p + 1")
    return np.linalg.solve(z.T @ z, z.T @ y)


def ols_direct(rows: list[DesignRow]) -> DriftParams:
    """Least-squares drift fit from explicit rows via ``numpy.linalg.solve``."""
    return DriftParams.from_theta(_solve_rows(rows))


def _segment_cost(rows: list[DesignRow], objective: Objective, dt: float) -> float:
    theta = _solve_rows(rows)
    z = np.array([r.z for r in rows])
    y = np.array([r.y for r in rows])
    if objective.kind == "lsse":
        resid = y - z @ theta
        return float(resid @ resid)
    s = z @ theta / dt
    s2 = objective.sigma ** 2
    return float(s @ y) / s2 - 0.5 * float(s @ s) * dt / s2


def exhaustive_search(series: TimeSeries, basis: BasisSet, m: int,
                      h_frac: float = 0.05, objective: Objective | None = None,
                      h_abs: int | None = None) -> tuple[Segmentation, float]:
    """Optimal ``m``-change segmentation by enumerating every admissible vector.

    Among exact ties the winner has the smallest last change index, then the
    smallest second-to-last and so on, which is the order the DP backtracking
    settles ties in.
    """
    objective = objective or Objective("lsse")
    n = series.n
    if n > MAX_N or m > MAX_M:
        raise OracleCapError(f"oracle is capped at n <= {MAX_N}, m <= {MAX_M}; "
                             f"got n = {n}, m = {m}")
    if m < 1:
        raise ValueError("exhaustive_search needs m >= 1")
    h = min_segment_rows(n, basis.p, h_frac, h_abs)
    if n < (m + 1) * h:
        raise InfeasibleError(f"no admissible {m}-change segmentation with h = {h}",
                              required_n=(m + 1) * h)

    # One direct fit per admissible segment; each vector then sums m + 1 of them.
    costs = {}
    for a in range(0, n - h + 1):
        for b in range(a + h, n + 1):
            costs[a, b] = _segment_cost(
                design_row_list(series, basis, a, b), objective, series.delta_t
            )

    best_key, best_cost = None, math.nan
    for ks in itertools.combinations(range(h, n - h + 1), m):
        bounds = (0, *ks, n)
        if any(b - a < h for a, b in zip(bounds, bounds[1:])):
            continue
        total = sum(costs[a, b] for a, b in zip(bounds, bounds[1:]))
        key = ks[::-1]
        if (best_key is None or objective.better(total, best_cost)
                or (total == best_cost and key < best_key)):
            best_key, best_cost = key, total
    return Segmentation(best_key[::-1], n, h), best_cost
