"""Figures for the command-line reports.

Everything is drawn with the Agg backend and saved as SVG with text kept as
text.  The plotted numbers are also written into the SVG description at six
significant digits, so a figure can be checked against its CSV without
parsing paths.
"""

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .geom_core import Geometry  # noqa: E402

golden_mean = (math.sqrt(5) - 1.0) / 2.0
fig_width = 5.0
fig_size = [fig_width, fig_width * golden_mean]

params = {
    "font.family": "sans-serif",
    "font.size": 9,
    "axes.labelsize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "lines.linewidth": 1.2,
    "lines.markersize": 4,
    "figure.figsize": fig_size,
    "svg.fonttype": "none",
    # stable element ids so repeated runs give identical files
    "svg.hashsalt": "curvdev",
    "path.simplify": False,
}

colors = ["#1b4f72", "#c0392b", "#27ae60", "#7d3c98"]


def fmt6(x) -> str:
    return f"{float(x):.6g}"


def data_block(columns: dict) -> str:
    """Comma-separated table of the plotted columns at 6 significant digits."""
    names = list(columns)
    rows = zip(*(columns[k] for k in names))
    lines = [",".join(names)] + [",".join(fmt6(v) for v in row) for row in rows]
    return "\n".join(lines)


def _save(fig, path, data: str):
    fig.savefig(path, format="svg", metadata={"Date": None, "Creator": "curvdev",
                                              "Description": data})
    plt.close(fig)


def line_plot(path, x, ys: dict, xlabel: str, ylabel: str, title: str = "",
              mark=None, logscale: bool = False):
    """One or more curves sharing an x-axis; ``mark`` is an optional
    ``(x, y, label)`` point highlighted on top."""
    with plt.rc_context(params):
        fig, ax = plt.subplots()
        for (label, y), c in zip(ys.items(), colors):
            ax.plot(x, y, color=c, label=label)
        if mark is not None:
            mx, my, mlabel = mark
            ax.plot([mx], [my], "o", color=colors[1], label=mlabel)
        if logscale:
            ax.set_xscale("log")
            ax.set_yscale("log")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        if len(ys) > 1 or mark is not None:
            ax.legend(frameon=False)
        fig.tight_layout()
        cols = {xlabel: x}
        cols.update(ys)
        data = data_block(cols)
        if mark is not None:
            data += "\n\n" + mlabel + "\n" + data_block({xlabel: [mx], ylabel: [my]})
        _save(fig, path, data)


def loglog_series(path, series: dict, xlabel: str, ylabel: str, title: str = ""):
    """Curves with their own x values on log-log axes; ``series`` maps a
    label to ``(x, y)``."""
    with plt.rc_context(params):
        fig, ax = plt.subplots()
        blocks = []
        for (label, (x, y)), c in zip(series.items(), colors):
            ax.loglog(x, y, marker="o", color=c, label=label)
            blocks.append(label + "\n" + data_block({"x": x, "y": y}))
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        ax.legend(frameon=False)
        fig.tight_layout()
        _save(fig, path, "\n\n".join(blocks))


def planar_view(g: Geometry, pts) -> np.ndarray:
    """Model coordinates for the plane and the Klein disc; orthographic
    view from the pole for the sphere."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    return pts[:, :2]


def shape_plot(path, g: Geometry, disc_pts, polygon_pts=None, inner=None, title: str = ""):
    """Disc boundary, polygon and optionally the pieces of the boundary of
    their intersection (a list of point arrays)."""
    with plt.rc_context(params):
        fig, ax = plt.subplots(figsize=(fig_width, fig_width))
        d = planar_view(g, disc_pts)
        ax.plot(np.append(d[:, 0], d[0, 0]), np.append(d[:, 1], d[0, 1]),
                color=colors[0], label="disc")
        cols = {"disc_x": d[:, 0], "disc_y": d[:, 1]}
        if polygon_pts is not None:
            p = planar_view(g, polygon_pts)
            ax.plot(np.append(p[:, 0], p[0, 0]), np.append(p[:, 1], p[0, 1]),
                    color=colors[1], marker="o", label="polygon")
            cols_p = {"polygon_x": p[:, 0], "polygon_y": p[:, 1]}
        else:
            cols_p = {}
        for j, piece in enumerate(inner or []):
            q = planar_view(g, piece)
            ax.plot(q[:, 0], q[:, 1], color=colors[2], linewidth=2.5, alpha=0.6,
                    label="boundary of intersection" if j == 0 else None)
        if g is Geometry.HYPERBOLIC:
            th = np.linspace(0, 2 * math.pi, 400)
            ax.plot(np.cos(th), np.sin(th), color="0.7", linewidth=0.6)
        ax.set_aspect("equal")
        ax.set_xlabel("x (model)" if g is not Geometry.SPHERICAL else "x (orthographic)")
        ax.set_ylabel("y (model)" if g is not Geometry.SPHERICAL else "y (orthographic)")
        if title:
            ax.set_title(title)
        ax.legend(frameon=False, loc="upper right")
        fig.tight_layout()
        data = data_block(cols)
        if cols_p:
            data += "\n\n" + data_block(cols_p)
        _save(fig, path, data)
