"""Figures for the command-line reports.

Figures are drawn on an Agg canvas without touching pyplot's global state,
and PNG metadata is fixed so that repeated runs write identical bytes.
"""

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

PNG_METADATA = {"Software": None}


def _new_figure(size=(6.4, 4.2)):
    fig = Figure(figsize=size, dpi=100)
    FigureCanvasAgg(fig)
    return fig


def _save(fig, path):
    fig.savefig(path, format="png", metadata=PNG_METADATA)
    return path


def soliton_contour(js, ts, absQ, path, title=None, levels=30):
    """Filled contour of |Q_j(t)| with sites on x and time on y.

    Sites j < -1 (the mirror side) are shaded and the boundary at j = -1 is
    marked with a dashed line.
    """
    fig = _new_figure()
    ax = fig.add_subplot()
    J, T = np.meshgrid(js, ts)
    cs = ax.contourf(J, T, absQ, levels=levels, cmap="viridis")
    fig.colorbar(cs, ax=ax, label="|Q_j(t)|")
    if np.min(js) < -1:
        ax.axvspan(np.min(js), -1, color="white", alpha=0.15, lw=0)
    ax.axvline(-1, color="white", ls="--", lw=0.8)
    ax.set_xlabel("site j")
    ax.set_ylabel("t")
    if title:
        ax.set_title(title)
    return _save(fig, path)


def field_heatmap(times, absq, path, title=None):
    """|q_j(t)| of a simulated chain as an image (sites on x, time on y)."""
    fig = _new_figure()
    ax = fig.add_subplot()
    n = absq.shape[1]
    im = ax.imshow(absq, aspect="auto", origin="lower", cmap="magma",
                   extent=(-0.5, n - 0.5, times[0], times[-1]))
    fig.colorbar(im, ax=ax, label="|q_j(t)|")
    ax.set_xlabel("site j")
    ax.set_ylabel("t")
    if title:
        ax.set_title(title)
    return _save(fig, path)


def monitor_plot(times, monitors, path, floor=1e-17):
    """Relative drift |M(t) - M(0)| / |M(0)| of each monitor on a log axis."""
    fig = _new_figure((6.4, 3.6))
    ax = fig.add_subplot()
    for name in sorted(monitors):
        v = np.asarray(monitors[name])
        ref = abs(v[0]) if abs(v[0]) > 0 else 1.0
        ax.semilogy(times, np.maximum(np.abs(v - v[0]) / ref, floor), label=name)
    ax.set_xlabel("t")
    ax.set_ylabel("relative drift")
    if monitors:
        ax.legend(frameon=False)
    return _save(fig, path)


def residual_bars(names, residuals, tols, path):
    """Measured residual against tolerance for each check of a verify run."""
    fig = _new_figure((7.0, max(3.0, 0.22 * len(names) + 1.0)))
    ax = fig.add_subplot()
    y = np.arange(len(names))
    r = np.maximum(np.asarray(residuals, dtype=float), 1e-18)
    ax.barh(y, r, color="tab:blue", height=0.6)
    ax.scatter(tols, y, marker="|", color="tab:red", s=80, zorder=3)
    ax.set_xscale("log")
    ax.set_yticks(y)
    ax.set_yticklabels(names, fontsize=6)
    ax.invert_yaxis()
    ax.set_xlabel("residual (red mark: tolerance)")
    fig.tight_layout()
    return _save(fig, path)


__all__ = ["field_heatmap", "monitor_plot", "residual_bars", "soliton_contour"]
