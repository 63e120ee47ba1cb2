"""Report figures: the curve coloured by curvature and the curvature profile."""
from __future__ import annotations

from pathlib import Path

import numpy as np


def _figure_backend():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def plot_curve(ax, samples, data=None, cmap="viridis"):
    """Curve as coloured segments (first two coordinates) with optional data markers."""
    from matplotlib.collections import LineCollection

    pts = samples.points[:, :2]
    if samples.closed:
        pts = np.vstack([pts, pts[:1]])
        k = np.append(samples.curvature, samples.curvature[:1])
    else:
        k = samples.curvature
    k = np.nan_to_num(np.asarray(k, dtype=float), nan=0.0)
    segs = np.stack([pts[:-1], pts[1:]], axis=1)
    lc = LineCollection(segs, cmap=cmap, linewidths=2.0)
    lc.set_array(0.5 * (k[:-1] + k[1:]))
    ax.add_collection(lc)
    if data is not None:
        d = np.asarray(data)[:, :2]
        ax.plot(d[:, 0], d[:, 1], "o", color="black", ms=3.5, zorder=3)
    ax.autoscale()
    ax.set_aspect("equal", adjustable="datalim")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    return lc


def plot_curvature(ax, samples, knots=None):
    ax.plot(samples.t, samples.curvature, lw=1.2, color="C0")
    if knots is not None:
        for t in knots:
            ax.axvline(t, color="0.85", lw=0.6, zorder=0)
    ax.set_xlabel("t")
    ax.set_ylabel("curvature")
    ax.set_yscale("symlog", linthresh=1e-3)


def plot_result(result, path) -> Path:
    """Two-panel PNG for a pipeline result."""
    plt = _figure_backend()
    fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(10, 4.2))
    lc = plot_curve(ax0, result.samples, result.cloud.knots())
    fig.colorbar(lc, ax=ax0, label="curvature")
    ax0.set_title(f"{result.cloud.n_spans} spans, {result.blend.family} blend")
    plot_curvature(ax1, result.samples, np.arange(result.cloud.n_spans + 1))
    ax1.set_title("passed" if result.report.passed else "failed: " + ", ".join(
        k for k, v in result.report.checks.items() if not v))
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
