"""Detection result container and per-segment summaries."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any

from .dp import Segmentation
from .simulate import TimeSeries
from .stats import accumulate, segment_loglik, segment_mle, segment_sse

SCHEMA_VERSION = "1.0"


@dataclass
class SegmentSummary:
    start: int
    stop: int
    mu: list[float]
    a: float
    sse: float
    loglik: float
    long_run_mean: float | None = None
    long_run_var: float | None = None


@dataclass
class IcEntry:
    m: int
    change_indices: list[int]
    loglik: float
    ic: float


@dataclass
class DetectionResult:
    """Everything reported about one detection run."""

    method: str
    algorithm: str
    m: int
    change_indices: list[int]
    change_times: list[float]
    change_fractions: list[float]
    per_segment: list[SegmentSummary]
    sigma_used: float | None
    total_cost: float
    n: int
    delta_t: float
    ic_trace: list[IcEntry] | None = None
    selected_m: int | None = None
    pruning_stats: dict[str, float] | None = None
    config: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        out = asdict(self)
        out["schema_version"] = SCHEMA_VERSION
        for key in ("ic_trace", "selected_m", "pruning_stats"):
            if out[key] is None:
                del out[key]
        return out


def summarize_segments(series: TimeSeries, basis, segmentation: Segmentation,
                       sigma: float | None) -> list[SegmentSummary]:
    """Refit each regime of ``segmentation`` and collect its statistics.

    Long-run statistics are only reported for mean-reverting fits
    (``a > 0``); the long-run mean additionally needs ``p = 1``.
    """
    out = []
    for start, stop in segmentation.segments():
        theta = segment_mle(accumulate(series, basis, start, stop))
        sse = segment_sse(series, basis, start, stop)
        ll = segment_loglik(series, basis, start, stop, sigma) if sigma else math.nan
        summary = SegmentSummary(start, stop, list(theta.mu), theta.a, sse, ll)
        if theta.a > 0:
            if basis.p == 1:
                summary.long_run_mean = theta.mu[0] / theta.a
            if sigma:
                summary.long_run_var = sigma * sigma / (2.0 * theta.a)
        out.append(summary)
    return out


def build_result(series: TimeSeries, basis, segmentation: Segmentation, *,
                 method: str, algorithm: str, sigma: float | None,
                 total_cost: float, **extra: Any) -> DetectionResult:
    k = list(segmentation.change_indices)
    return DetectionResult(
        method=method,
        algorithm=algorithm,
        m=len(k),
        change_indices=k,
        change_times=[i * series.delta_t for i in k],
        change_fractions=[i / series.n for i in k],
        per_segment=summarize_segments(series, basis, segmentation, sigma),
        sigma_used=sigma,
        total_cost=total_cost,
        n=series.n,
        delta_t=series.delta_t,
        **extra,
    )
