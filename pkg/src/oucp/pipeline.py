"""End-to-end detection on one series: sigma, dispatch, result, outputs."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Literal

from .basis import BasisSet, from_name
from .dp import Objective, detect_known_m, min_segment_rows
from .errors import OUCPError
from .io import write_json
from .pelt import detect_pelt
from .results import DetectionResult, build_result
from .simulate import TimeSeries
from .sns import detect_unknown_m_sns
from .stats import realized_volatility


@dataclass
class PipelineConfig:
    """Detection settings.

    ``sigma`` is a positive number or ``"realized"``. ``h_abs`` (rows) takes
    precedence over ``h_frac``. ``m`` is required for ``algorithm="dp"``.
    """

    algorithm: Literal["dp", "sns", "pelt"] = "pelt"
    basis: str = "constant"
    period: float = 1.0
    harmonics: int = 1
    m: int | None = None
    m_max: int = 10
    h_frac: float = 0.05
    h_abs: int | None = None
    sigma: float | str = "realized"
    objective: Literal["lsse", "mll"] = "mll"
    penalty: Literal["sic", "aic"] = "sic"
    out_json: str | None = None
    plot_dir: str | None = None

    def resolve_sigma(self, series: TimeSeries) -> float:
        if self.sigma == "realized":
            return realized_volatility(series)
        try:
            sigma = float(self.sigma)
        except (TypeError, ValueError):
            raise ValueError(f"sigma must be a number or 'realized', got {self.sigma!r}") from None
        if not sigma > 0:
            raise ValueError(f"sigma must be positive, got {sigma}")
        return sigma

    def make_basis(self, series: TimeSeries) -> BasisSet:
        return from_name(self.basis, series.delta_t, self.period, self.harmonics)


def full_pipeline(series: TimeSeries, config: PipelineConfig) -> DetectionResult:
    """Estimate sigma if asked, run the chosen detector and write outputs."""
    basis = config.make_basis(series)
    sigma = config.resolve_sigma(series)
    try:
        if config.algorithm == "dp":
            if config.m is None:
                raise ValueError("algorithm 'dp' needs the number of change points m")
            objective = Objective(config.objective,
                                  sigma if config.objective == "mll" else None)
            seg, cost = detect_known_m(series, basis, config.m, config.h_frac,
                                       objective, config.h_abs)
            result = build_result(
                series, basis, seg, method=config.objective, algorithm="dp",
                sigma=sigma, total_cost=cost,
                config={"h_idx": seg.h_idx, "basis": basis.name},
            )
        elif config.algorithm == "sns":
            result = detect_unknown_m_sns(series, basis, config.m_max, config.h_frac,
                                          sigma, config.objective, config.penalty,
                                          config.h_abs)
        elif config.algorithm == "pelt":
            result = detect_pelt(series, basis, config.h_frac, sigma, config.penalty,
                                 config.h_abs)
        else:
            raise ValueError(f"unknown algorithm {config.algorithm!r}")
    except OUCPError as exc:
        h = min_segment_rows(series.n, basis.p, config.h_frac, config.h_abs)
        exc.args = (f"{config.algorithm} on n = {series.n} rows, h = {h}: {exc}",)
        raise
    result.config = {**asdict(config), **result.config,
                     "sigma_source": "realized" if config.sigma == "realized" else "given"}
    if series.metadata:
        result.config["series"] = dict(series.metadata)
    if config.out_json:
        write_json(result.to_dict(), config.out_json)
    if config.plot_dir:
        from .plots import plot_series

        plot_series(series, result, config.plot_dir)
    return result
