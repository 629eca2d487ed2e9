"""Per-segment sufficient statistics, drift MLEs, SSE and log-likelihood.

Row ``i`` of the Euler regression pairs the increment ``y_i = x_{i+1} - x_i``
with ``z_i = (phi_1(t_i), ..., phi_p(t_i), -x_i) * delta_t``. A segment
``[a, b)`` owns rows ``a <= i < b``. With
``q = sum z_i^T z_i / delta_t`` and ``r = sum z_i^T y_i / delta_t`` the drift
MLE is ``q^{-1} r`` and it coincides with ordinary least squares.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .basis import BasisSet
from .errors import SingularStatisticsError
from .simulate import DriftParams, TimeSeries

# Relative pivot floor for the Cholesky factorisation: a pivot below this
# fraction of its diagonal entry is treated as a rank deficiency.
PIVOT_RTOL = 1e-12
LOGLIK_RTOL = 1e-9


def regressors(series: TimeSeries, basis: BasisSet) -> tuple[NDArray, NDArray]:
    """Return ``V`` with rows ``(phi(t_i), -x_i)`` and increments ``y``.

    ``z_i = V_i * delta_t``; keeping ``V`` unscaled avoids carrying
    ``delta_t`` twice through the prefix sums.
    """
    x = series.values
    n = series.n
    v = np.empty((n, basis.p + 1))
    v[:, :-1] = basis.evaluate_grid(np.arange(n) * series.delta_t)
    v[:, -1] = -x[:-1]
    return v, np.diff(x)


def design_rows(series: TimeSeries, basis: BasisSet, start: int,
                stop: int) -> tuple[NDArray, NDArray]:
    """Design matrix ``Z`` (rows ``z_i``) and responses ``y`` for rows ``[start, stop)``."""
    _check_range(series, start, stop)
    v, y = regressors(series, basis)
    return v[start:stop] * series.delta_t, y[start:stop]


@dataclass(frozen=True)
class DesignRow:
    """One Euler regression row: ``y = z . theta + noise``."""

    z: NDArray[np.float64]
    y: float


@dataclass(frozen=True)
class SegmentStatistics:
    """Sufficient statistics of one segment.

    ``q`` and ``r`` are the discretised Q matrix and r-tilde vector, ``yy``
    the sum of squared increments and ``count`` the number of rows.
    """

    q: NDArray[np.float64]
    r: NDArray[np.float64]
    yy: float
    count: int
    delta_t: float
    start: int = 0
    stop: int = 0

    def __add__(self, other: SegmentStatistics) -> SegmentStatistics:
        if self.delta_t != other.delta_t:
            raise ValueError("cannot combine statistics with different delta_t")
        lo, hi = sorted((self, other), key=lambda s: s.start)
        return SegmentStatistics(
            self.q + other.q,
            self.r + other.r,
            self.yy + other.yy,
            self.count + other.count,
            self.delta_t,
            lo.start,
            hi.stop,
        )


def _check_range(series: TimeSeries, start: int, stop: int) -> None:
    if not 0 <= start < stop <= series.n:
        raise ValueError(
            f"segment [{start}, {stop}) is empty or outside rows [0, {series.n})"
        )


def accumulate(series: TimeSeries, basis: BasisSet, start: int,
               stop: int) -> SegmentStatistics:
    """Sum the statistics of rows ``[start, stop)`` directly."""
    _check_range(series, start, stop)
    v, y = regressors(series, basis)
    v, y = v[start:stop], y[start:stop]
    dt = series.delta_t
    q = dt * (v.T @ v)
    return SegmentStatistics(
        0.5 * (q + q.T), v.T @ y, float(y @ y), stop - start, dt, start, stop
    )


def segment_mle(stats: SegmentStatistics) -> DriftParams:
    """Solve ``q theta = r`` by Cholesky; ``theta = (mu, a)`` since the regressor carries ``-x``."""
    return DriftParams.from_theta(_solve_one(stats))


def _solve_one(stats: SegmentStatistics) -> NDArray[np.float64]:
    theta, ok = batched_cholesky_solve(stats.q[None], stats.r[None])
    if not ok[0]:
        raise SingularStatisticsError(stats.start, stats.stop)
    return theta[0]


def segment_sse(series: TimeSeries, basis: BasisSet, start: int, stop: int) -> float:
    """Residual sum of squares of the segment's least-squares drift fit."""
    z, y = design_rows(series, basis, start, stop)
    theta = _solve_one(accumulate(series, basis, start, stop))
    resid = y - z @ theta
    return float(resid @ resid)


def sse_normal_equations(stats: SegmentStatistics) -> float:
    """SSE via ``yy - delta_t * r^T theta`` (cross-check of :func:`segment_sse`)."""
    theta = _solve_one(stats)
    return stats.yy - stats.delta_t * float(stats.r @ theta)


def segment_loglik(series: TimeSeries, basis: BasisSet, start: int, stop: int,
                   sigma: float) -> float:
    """Riemann-sum log-likelihood of the segment at its drift MLE.

    The sum is ``(1/sigma^2) sum (theta.V_i) y_i
    - (1/(2 sigma^2)) sum (theta.V_i)^2 delta_t``. It must agree with
    ``(yy - SSE) / (2 delta_t sigma^2)``; a disagreement beyond
    ``LOGLIK_RTOL`` raises ``ArithmeticError``.
    """
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma!r}")
    stats = accumulate(series, basis, start, stop)
    theta = _solve_one(stats)
    v, y = regressors(series, basis)
    drift = v[start:stop] @ theta
    s2 = sigma * sigma
    riemann = float(drift @ y[start:stop]) / s2 - 0.5 * float(drift @ drift) * series.delta_t / s2

    resid = y[start:stop] - drift * series.delta_t
    identity = (stats.yy - float(resid @ resid)) / (2.0 * series.delta_t * s2)
    if abs(riemann - identity) > LOGLIK_RTOL * max(abs(riemann), abs(identity), 1e-300):
        raise ArithmeticError(
            f"log-likelihood forms disagree on [{start}, {stop}): "
            f"{riemann!r} vs {identity!r}"
        )
    return riemann


def loglik_identity(series: TimeSeries, basis: BasisSet, start: int, stop: int,
                    sigma: float) -> float:
    """``(yy - SSE) / (2 delta_t sigma^2)`` for the segment."""
    stats = accumulate(series, basis, start, stop)
    return (stats.yy - segment_sse(series, basis, start, stop)) / (
        2.0 * series.delta_t * sigma * sigma
    )


def realized_volatility(series: TimeSeries) -> float:
    """``sqrt(sum (x_{i+1} - x_i)^2 / T)``."""
    y = np.diff(series.values)
    return math.sqrt(float(y @ y) / series.T)


def batched_cholesky_solve(q: NDArray, r: NDArray) -> tuple[NDArray, NDArray]:
    """Solve a stack of small SPD systems ``q[k] theta[k] = r[k]``.

    Returns ``(theta, ok)``; ``ok[k]`` is False where the factorisation met a
    non-positive (relative to ``PIVOT_RTOL``) pivot, and ``theta[k]`` is then
    meaningless. Only elementwise arithmetic is used, so each system's result
    does not depend on how many others share the batch.
    """
    d = q.shape[1]
    qc = [[q[:, i, j] for j in range(d)] for i in range(d)]
    rc = [r[:, i] for i in range(d)]
    theta, ok = _cholesky_solve_components(qc, rc)
    return np.stack(theta, axis=1), ok


def _cholesky_solve_components(qc, rc):
    # qc[i][j] (i >= j used) and rc[i] are 1-D arrays over the batch.
    d = len(rc)
    low = [[None] * d for _ in range(d)]
    ok = np.ones(rc[0].shape, dtype=bool)
    for j in range(d):
        s = qc[j][j]
        for m in range(j):
            s = s - low[j][m] * low[j][m]
        good = s > PIVOT_RTOL * np.abs(qc[j][j])
        ok &= good
        piv = np.sqrt(np.where(good, s, 1.0))
        low[j][j] = piv
        for i in range(j + 1, d):
            acc = qc[i][j]
            for m in range(j):
                acc = acc - low[i][m] * low[j][m]
            low[i][j] = acc / piv
    w = [None] * d
    for i in range(d):
        acc = rc[i]
        for m in range(i):
            acc = acc - low[i][m] * w[m]
        w[i] = acc / low[i][i]
    theta = [None] * d
    for i in range(d - 1, -1, -1):
        acc = w[i]
        for m in range(i + 1, d):
            acc = acc - low[m][i] * theta[m]
        theta[i] = acc / low[i][i]
    return theta, ok


class PrefixStats:
    """Cumulative sums giving O(p^2) access to any segment's statistics.

    Built once per (series, basis) in O(n p^2); immutable afterwards. Arrays
    are stored component-major so batched range queries stay contiguous.
    """

    def __init__(self, series: TimeSeries, basis: BasisSet):
        self.series = series
        self.basis = basis
        self.n = series.n
        self.d = basis.p + 1
        self.delta_t = series.delta_t
        v, y = regressors(series, basis)
        n, d = self.n, self.d
        self._q = np.zeros((d, d, n + 1))
        for i in range(d):
            for j in range(i + 1):
                np.cumsum(self.delta_t * v[:, i] * v[:, j], out=self._q[i, j, 1:])
                self._q[j, i] = self._q[i, j]
        self._r = np.zeros((d, n + 1))
        for i in range(d):
            np.cumsum(v[:, i] * y, out=self._r[i, 1:])
        self._yy = np.zeros(n + 1)
        np.cumsum(y * y, out=self._yy[1:])

    def stats(self, start: int, stop: int) -> SegmentStatistics:
        _check_range(self.series, start, stop)
        return SegmentStatistics(
            self._q[:, :, stop] - self._q[:, :, start],
            self._r[:, stop] - self._r[:, start],
            float(self._yy[stop] - self._yy[start]), stop - start,
            self.delta_t, start, stop,
        )

    def solve(self, starts: NDArray, stops: NDArray) -> tuple[NDArray, NDArray, NDArray]:
        """Batched MLEs for segments ``[starts[k], stops[k])``.

        Returns ``(theta, r_dot_theta, yy)`` with ``theta`` of shape
        ``(d, k)``; raises :class:`SingularStatisticsError` naming the first
        singular segment.
        """
        starts = np.asarray(starts, dtype=np.intp)
        stops = np.broadcast_to(np.asarray(stops, dtype=np.intp), starts.shape)
        d = self.d
        qc = [[None] * d for _ in range(d)]
        for i in range(d):
            for j in range(i + 1):
                row = self._q[i, j]
                qc[i][j] = row[stops] - row[starts]
        rc = [self._r[i][stops] - self._r[i][starts] for i in range(d)]
        theta, ok = _cholesky_solve_components(qc, rc)
        if not ok.all():
            bad = int(np.flatnonzero(~ok)[0])
            raise SingularStatisticsError(int(starts[bad]), int(stops[bad]))
        rt = rc[0] * theta[0]
        for i in range(1, d):
            rt = rt + rc[i] * theta[i]
        return np.array(theta), rt, self._yy[stops] - self._yy[starts]

    def sse(self, starts: NDArray, stops: NDArray) -> NDArray[np.float64]:
        """Segment SSEs via the normal-equation identity ``yy - delta_t r.theta``."""
        _, rt, yy = self.solve(starts, stops)
        return yy - self.delta_t * rt

    def loglik(self, starts: NDArray, stops: NDArray, sigma: float) -> NDArray[np.float64]:
        """Segment log-likelihoods ``r.theta / (2 sigma^2)`` at the MLE."""
        _, rt, _ = self.solve(starts, stops)
        return rt / (2.0 * sigma * sigma)
