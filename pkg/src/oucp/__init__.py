"""Offline change-point detection for generalised Ornstein-Uhlenbeck processes."""

from .basis import BasisSet, from_name, gram_matrix, make_case2_basis, make_constant_basis
from .dp import (
    Objective,
    Segmentation,
    detect_known_m,
    detect_known_m_all_prefixes,
    min_segment_rows,
)
from .errors import (
    DataError,
    InfeasibleError,
    MonteCarloError,
    OracleCapError,
    OUCPError,
    SingularStatisticsError,
)
from .pelt import detect_pelt
from .results import DetectionResult
from .simulate import DriftParams, RegimeScenario, TimeSeries, study_scenario, simulate
from .sns import detect_unknown_m_sns
from .stats import (
    PrefixStats,
    accumulate,
    realized_volatility,
    segment_loglik,
    segment_mle,
    segment_sse,
)

__version__ = "0.1.0"

__all__ = [
    "BasisSet", "from_name", "gram_matrix", "make_case2_basis", "make_constant_basis",
    "Objective", "Segmentation", "detect_known_m", "detect_known_m_all_prefixes",
    "min_segment_rows", "DataError", "InfeasibleError", "MonteCarloError",
    "OracleCapError", "OUCPError", "SingularStatisticsError", "detect_pelt",
    "DetectionResult", "DriftParams", "RegimeScenario", "TimeSeries", "study_scenario",
    "simulate", "detect_unknown_m_sns", "PrefixStats", "accumulate",
    "realized_volatility", "segment_loglik", "segment_mle", "segment_sse",
]
