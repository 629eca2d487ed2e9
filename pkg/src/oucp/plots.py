"""Static figures: a series with its change points, and MC histograms."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .montecarlo import McRateSummary  # noqa: E402
from .results import DetectionResult  # noqa: E402
from .simulate import TimeSeries  # noqa: E402


def _out_dir(out_dir: str | Path) -> Path:
    if not str(out_dir).strip():
        raise ValueError("an output directory is required for plots")
    path = Path(out_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def plot_series(series: TimeSeries, result: DetectionResult | None,
                out_dir: str | Path, name: str = "series.png") -> Path:
    """Line plot of the path with a dashed vertical line per change point."""
    path = _out_dir(out_dir) / name
    fig, ax = plt.subplots(figsize=(10, 3.5))
    ax.plot(series.times, series.values, lw=0.8, color="k")
    if result is not None:
        for t in result.change_times:
            ax.axvline(t, color="tab:red", ls="--", lw=1.0)
        ax.set_title(f"{result.algorithm.upper()} ({result.method.upper()}): "
                     f"m = {result.m}")
    ax.set_xlabel("t")
    ax.set_ylabel("x")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_rate_histograms(summary: McRateSummary, out_dir: str | Path,
                         name: str | None = None, bins: int = 30) -> Path:
    """One histogram panel per change point, true fraction marked."""
    name = name or f"rates_{summary.method}.png"
    path = _out_dir(out_dir) / name
    m = len(summary.true_fractions)
    fig, axes = plt.subplots(1, m, figsize=(4 * m, 3.2), squeeze=False)
    for j, ax in enumerate(axes[0]):
        ax.hist(summary.estimates[:, j], bins=bins, color="tab:blue", alpha=0.8)
        ax.axvline(summary.true_fractions[j], color="tab:red", ls="--")
        ax.set_title(f"s{j + 1} ({summary.method.upper()})")
        ax.set_xlabel("estimated fraction")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
