"""Segment neighbourhood search with a Schwarz-type information criterion.

``IC(m) = -2 loglik(m) + (m + 1)(p + 1) phi(n)`` where ``loglik(m)`` is the
Riemann log-likelihood of the best ``m``-change segmentation and
``phi(n) = log(n)`` (SIC) or ``2`` (AIC).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .basis import BasisSet
from .dp import Objective, Segmentation, build_table, min_segment_rows
from .errors import InfeasibleError
from .results import DetectionResult, IcEntry, build_result
from .simulate import TimeSeries
from .stats import PrefixStats, realized_volatility

Penalty = Literal["sic", "aic"]


def penalty_weight(n: int, p: int, penalty: Penalty = "sic") -> float:
    """Per-regime penalty ``(p + 1) phi(n)``."""
    if penalty == "sic":
        return (p + 1) * math.log(n)
    if penalty == "aic":
        return (p + 1) * 2.0
    raise ValueError(f"penalty must be 'sic' or 'aic', got {penalty!r}")


@dataclass
class IcTrace:
    segmentations: list[Segmentation]
    loglik: list[float]
    ic: list[float]
    penalty_per_regime: float

    @property
    def selected_m(self) -> int:
        # np.argmin returns the first minimiser, so ties go to the smaller m.
        return int(np.argmin(self.ic))

    def entries(self) -> list[IcEntry]:
        return [
            IcEntry(m, list(s.change_indices), ll, ic)
            for m, (s, ll, ic) in enumerate(zip(self.segmentations, self.loglik, self.ic))
        ]


def clip_m_max(n: int, h_idx: int, m_max: int) -> int:
    cap = n // h_idx - 1
    if cap < 0:
        raise InfeasibleError(
            f"series with n = {n} rows is shorter than one regime of {h_idx} rows",
            required_n=h_idx,
        )
    if m_max > cap:
        warnings.warn(
            f"m_max={m_max} clipped to {cap}: n={n} rows fit at most {cap + 1} "
            f"regimes of {h_idx} rows",
            RuntimeWarning,
            stacklevel=3,
        )
        return cap
    return m_max


def ic_trace(series: TimeSeries, basis: BasisSet, m_max: int, h_idx: int,
             sigma: float, kind: Literal["lsse", "mll"] = "mll",
             penalty: Penalty = "sic", prefix: PrefixStats | None = None,
             policy: Literal["lazy", "eager"] = "lazy") -> IcTrace:
    """Run the DP once up to ``m_max`` and evaluate ``IC(m)`` for every ``m``."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    prefix = prefix or PrefixStats(series, basis)
    n = series.n
    objective = Objective(kind, sigma if kind == "mll" else None)
    table = build_table(prefix, m_max, h_idx, objective, policy)
    yy_total = float(prefix.stats(0, n).yy)
    pen = penalty_weight(n, basis.p, penalty)
    segs, lls, ics = [], [], []
    for m in range(m_max + 1):
        segs.append(table.segmentation(m))
        best = table.H1(m, n)
        if kind == "mll":
            ll = best
        else:
            ll = (yy_total - best) / (2.0 * series.delta_t * sigma * sigma)
        lls.append(ll)
        ics.append(-2.0 * ll + (m + 1) * pen)
    return IcTrace(segs, lls, ics, pen)


def detect_unknown_m_sns(series: TimeSeries, basis: BasisSet, m_max: int = 10,
                         h_frac: float = 0.05, sigma: float | None = None,
                         kind: Literal["lsse", "mll"] = "mll",
                         penalty: Penalty = "sic", h_abs: int | None = None,
                         policy: Literal["lazy", "eager"] = "lazy") -> DetectionResult:
    """Select the number of change points by minimising the information criterion.

    ``sigma=None`` plugs in the realised volatility of the series.
    """
    if m_max < 0:
        raise ValueError("m_max must be non-negative")
    sigma = realized_volatility(series) if sigma is None else float(sigma)
    h = min_segment_rows(series.n, basis.p, h_frac, h_abs)
    m_max = clip_m_max(series.n, h, m_max)
    trace = ic_trace(series, basis, m_max, h, sigma, kind, penalty, policy=policy)
    m_hat = trace.selected_m
    return build_result(
        series, basis, trace.segmentations[m_hat],
        method=kind, algorithm="sns", sigma=sigma,
        total_cost=trace.ic[m_hat],
        ic_trace=trace.entries(), selected_m=m_hat,
        config={"m_max": m_max, "h_idx": h, "penalty": penalty, "basis": basis.name},
    )
