"""Pruned optimal partitioning with a minimum regime length.

The recursion runs over row indices ``i`` with ``t_h`` the minimum regime
length in rows and ``beta = (p + 1) log n``:

* ``F(i) = 0`` for ``i < t_h``;
* ``F(i) = -2 loglik[0, i) + beta`` for ``t_h <= i < 2 t_h``;
* ``F(i) = min_{c in SS_i} F(c) - 2 loglik[c, i) + beta`` for ``i >= 2 t_h``,
  starting from ``SS_{2 t_h} = {0}``;
* ``SS_{i+1} = {0} | {c in SS_i | {i - t_h + 1} : F(c) - 2 loglik[c, i) <= F(i)}``.

Change points are recovered by following the arg-min pointers back from ``n``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import NDArray

from .basis import BasisSet
from .dp import Segmentation, min_segment_rows
from .errors import InfeasibleError
from .results import DetectionResult, build_result
from .simulate import TimeSeries
from .sns import Penalty, penalty_weight
from .stats import PrefixStats, realized_volatility

# Offset of the candidate admitted after step i: "printed" admits i - t_h + 1,
# "shifted" admits i - t_h.
Admission = Literal["printed", "shifted"]


@dataclass
class PeltState:
    F: NDArray[np.float64]
    tau: NDArray[np.intp]
    t_h: int
    candidates: list[int]
    candidate_sizes: list[int]

    def change_points(self) -> list[int]:
        """Follow back-pointers from ``n`` until the pointer is 0."""
        out = []
        t = len(self.F) - 1
        while self.tau[t] != 0:
            t = int(self.tau[t])
            out.append(t)
        return out[::-1]


def run_pelt(prefix: PrefixStats, t_h: int, sigma: float, beta: float,
             prune: bool = True, admission: Admission = "printed") -> PeltState:
    """Fill ``F`` and the back-pointers for rows ``0..n``."""
    n = prefix.n
    if n < 2 * t_h:
        raise InfeasibleError(
            f"PELT needs n >= 2 t_h = {2 * t_h} rows, got n = {n}", required_n=2 * t_h
        )
    if admission not in ("printed", "shifted"):
        raise ValueError("admission must be 'printed' or 'shifted'")
    shift = 1 if admission == "printed" else 0
    scale = 1.0 / (sigma * sigma)

    def neg2ll(starts: NDArray, stop: int) -> NDArray:
        # -2 loglik = -r.theta / sigma^2
        _, rt, _ = prefix.solve(starts, np.full(len(starts), stop))
        return -rt * scale

    F = np.zeros(n + 1)
    tau = np.zeros(n + 1, dtype=np.intp)
    head = np.arange(t_h, 2 * t_h)
    _, rt, _ = prefix.solve(np.zeros(len(head), dtype=np.intp), head)
    F[head] = -rt * scale + beta

    cands = np.array([0], dtype=np.intp)
    sizes = []
    for i in range(2 * t_h, n + 1):
        seg = neg2ll(cands, i)
        partial = F[cands] + seg
        j = int(np.argmin(partial))
        F[i] = partial[j] + beta
        tau[i] = cands[j]
        sizes.append(len(cands))
        if i == n:
            break
        new = i - t_h + shift
        if prune:
            # F(c) - 2 loglik[c, i) for the old candidates is ``partial``.
            keep = cands[(partial <= F[i]) | (cands == 0)]
            if F[new] + neg2ll(np.array([new]), i)[0] <= F[i]:
                keep = np.append(keep, new)
        else:
            keep = np.append(cands, new)
        cands = np.unique(keep)
    return PeltState(F, tau, t_h, cands.tolist(), sizes)


def detect_pelt(series: TimeSeries, basis: BasisSet, h_frac: float = 0.05,
                sigma: float | None = None, penalty: Penalty = "sic",
                h_abs: int | None = None, prune: bool = True,
                admission: Admission = "printed") -> DetectionResult:
    """Estimate the number and location of change points in one pass.

    ``sigma=None`` plugs in the realised volatility. ``F(n)`` is returned as
    ``total_cost``; it equals the information criterion of the selected
    segmentation.
    """
    sigma = realized_volatility(series) if sigma is None else float(sigma)
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    t_h = min_segment_rows(series.n, basis.p, h_frac, h_abs)
    prefix = PrefixStats(series, basis)
    beta = penalty_weight(series.n, basis.p, penalty)
    state = run_pelt(prefix, t_h, sigma, beta, prune, admission)
    seg = Segmentation(tuple(state.change_points()), series.n, t_h)
    sizes = np.asarray(state.candidate_sizes, dtype=float)
    return build_result(
        series, basis, seg, method="mll", algorithm="pelt", sigma=sigma,
        total_cost=float(state.F[-1]),
        selected_m=seg.m,
        pruning_stats={
            "candidates_mean": float(sizes.mean()),
            "candidates_max": float(sizes.max()),
        },
        config={"h_idx": t_h, "penalty": penalty, "prune": prune,
                "admission": admission, "basis": basis.name},
    )
