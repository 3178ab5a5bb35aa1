"""
Static SVG figures.

Colour code: electron orange, positron blue, centre of mass red dashed,
caustics black, shaded regions gray, L1 red, L2 blue, Delta = 0 green and the
Coulomb centre as a red dot. Output is byte-stable for identical input.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.colors import ListedColormap  # noqa: E402

from utils.physics.classify import LABEL_ORDER, region_mask  # noqa: E402
from utils.physics.model import reduced_potential  # noqa: E402
from utils.system.errors import EmptyPlot  # noqa: E402

ELECTRON = "tab:orange"
POSITRON = "tab:blue"
CENTER_OF_MASS = "red"
CAUSTIC = "black"
SHADE = "0.8"
LINE_L1 = "red"
LINE_L2 = "blue"
DELTA_ZERO = "green"

STABLE_RC = {"svg.hashsalt": "pair-orbits", "svg.fonttype": "none", "path.simplify": False}
LABEL_COLORS = {
    "t_s1": "#fdd49e",
    "t_s2": "#fc8d59",
    "t_s3|t_m2": "#d7301f",
    "t_m1": "#c7e9c0",
    "t_p1": "#c6dbef",
    "t_p2": "#6baed6",
    "forbidden": SHADE,
    "boundary": "white",
}


def _save(fig, output_path):
    fig.savefig(output_path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return output_path


def _coulomb_center(ax, cfg):
    ax.plot([-cfg.a], [0.0], "o", color="red", markersize=5, label="Coulomb centre")


def _draw_caustics(ax, report, cfg):
    u_hi = max((hi for _, hi in report.intervals.u_intervals), default=1.0)
    for curve in report.caustics:
        if curve.kind == "ellipse":
            spans = report.intervals.v_intervals
        else:
            spans = [(1.0, u_hi)]
        for span in spans:
            q1, q2 = curve.points(cfg, span)
            ax.plot(q1, q2, color=CAUSTIC, linewidth=1.0)


# ===== Trajectory =====
def render_trajectory_svg(trajectory, output_path, report=None, title=None):
    if trajectory is None or len(trajectory) == 0:
        raise EmptyPlot("trajectory has no samples")
    frame = trajectory.to_frame()
    cfg = trajectory.cfg

    with plt.rc_context(STABLE_RC):
        fig, (ax_q, ax_lab) = plt.subplots(1, 2, figsize=(11, 5))

        if report is not None:
            _draw_caustics(ax_q, report, cfg)
        ax_q.plot(frame["q1"], frame["q2"], color="0.3", linewidth=0.7)
        _coulomb_center(ax_q, cfg)
        ax_q.set_xlabel("$q_1$")
        ax_q.set_ylabel("$q_2$")
        ax_q.set_aspect("equal", adjustable="datalim")
        ax_q.set_title("relative motion")

        ax_lab.plot(frame["x1"], frame["y1"], color=ELECTRON, linewidth=0.8, label="electron")
        ax_lab.plot(frame["x2"], frame["y2"], color=POSITRON, linewidth=0.8, label="positron")
        ax_lab.plot(frame["X"], frame["Y"], color=CENTER_OF_MASS, linestyle="--", linewidth=0.8, label="centre of mass")
        mid = len(frame) // 2
        for idx, marker in ((0, "o"), (mid, "s"), (len(frame) - 1, "x")):
            row = frame.iloc[idx]
            ax_lab.plot([row["x1"]], [row["y1"]], marker, color=ELECTRON)
            ax_lab.plot([row["x2"]], [row["y2"]], marker, color=POSITRON)
            ax_lab.plot([row["X"]], [row["Y"]], marker, color=CENTER_OF_MASS)
        ax_lab.set_xlabel("x")
        ax_lab.set_ylabel("y")
        ax_lab.set_aspect("equal", adjustable="datalim")
        ax_lab.legend(loc="best", fontsize=8)
        ax_lab.set_title(title or f"termination: {trajectory.termination}")

        fig.tight_layout()
        return _save(fig, output_path)


# ===== Bifurcation Diagram =====
def render_diagram_svg(scan, output_path):
    if scan is None or len(scan.h_values) == 0 or len(scan.lambda_values) == 0:
        raise EmptyPlot("diagram has no cells")

    keys = sorted({key for row in scan.labels for key in row}, key=_key_order)
    index = {key: i for i, key in enumerate(keys)}
    raster = np.array([[index[key] for key in row] for row in scan.labels], dtype=float)
    cmap = ListedColormap([LABEL_COLORS.get(key, "white") for key in keys])

    lam, h = scan.lambda_values, scan.h_values
    with plt.rc_context(STABLE_RC):
        fig, ax = plt.subplots(figsize=(7, 6))
        ax.imshow(
            raster,
            origin="lower",
            aspect="auto",
            interpolation="nearest",
            cmap=cmap,
            vmin=-0.5,
            vmax=len(keys) - 0.5,
            extent=[lam.min(), lam.max(), h.min(), h.max()],
        )
        h1, lam1 = scan.line_l1
        h2, lam2 = scan.line_l2
        ax.plot(lam1, h1, color=LINE_L1, linewidth=1.2, label="$h_a+\\alpha_a-\\lambda_a=0$")
        ax.plot(lam2, h2, color=LINE_L2, linewidth=1.2, label="$h_a-\\alpha_a-\\lambda_a=0$")
        if scan.delta_zero:
            pts = np.array(scan.delta_zero)
            ax.plot(pts[:, 1], pts[:, 0], ".", color=DELTA_ZERO, markersize=1.5, label="$\\Delta=0$")

        for key in keys:
            ax.plot([], [], "s", color=LABEL_COLORS.get(key, "white"), label=key)
        ax.set_xlim(lam.min(), lam.max())
        ax.set_ylim(h.min(), h.max())
        ax.set_xlabel("$\\lambda_a$")
        ax.set_ylabel("$h_a$")
        ax.set_title(f"$\\alpha_a = {scan.alpha_a:.6g}$")
        ax.legend(loc="upper left", fontsize=7)
        fig.tight_layout()
        return _save(fig, output_path)


def _key_order(key):
    first = key.split("|")[0]
    return LABEL_ORDER.index(first) if first in LABEL_ORDER else len(LABEL_ORDER)


# ===== Allowed Region =====
def _q_extent(report, cfg):
    u_max = max((hi for _, hi in report.intervals.u_intervals), default=1.0)
    return 1.15 * cfg.a * u_max


def render_region_svg(report, mc, cfg, output_path, resolution=401):
    if report.intervals.is_empty:
        raise EmptyPlot("the region is forbidden; nothing to draw")

    extent = _q_extent(report, cfg)
    grid = np.linspace(-extent, extent, resolution)
    mask = region_mask(mc, cfg, grid, grid)

    with plt.rc_context(STABLE_RC):
        fig, ax = plt.subplots(figsize=(6, 6))
        ax.contourf(grid, grid, mask.astype(float), levels=[0.5, 1.5], colors=[SHADE])
        _draw_caustics(ax, report, cfg)
        _coulomb_center(ax, cfg)
        ax.set_xlim(-extent, extent)
        ax.set_ylim(-extent, extent)
        ax.set_aspect("equal")
        ax.set_xlabel("$q_1$")
        ax.set_ylabel("$q_2$")
        ax.set_title(", ".join(sorted(report.labels)))
        fig.tight_layout()
        return _save(fig, output_path)


# ===== Reduced Potential =====
def render_potential_svg(cfg, output_path, extent=None, resolution=301, levels=30):
    extent = extent or 2.5 * max(cfg.a, 1.0)
    grid = np.linspace(-extent, extent, resolution)
    Q1, Q2 = np.meshgrid(grid, grid)
    V = reduced_potential(Q1, Q2, cfg)
    finite = np.isfinite(V)
    if not finite.any():
        raise EmptyPlot("potential has no finite values on the grid")

    # clip the Coulomb well so the contours stay readable
    floor = np.percentile(V[finite], 2)
    V = np.where(finite, np.maximum(V, floor), floor)

    with plt.rc_context(STABLE_RC):
        fig, ax = plt.subplots(figsize=(6, 5))
        filled = ax.contourf(grid, grid, V, levels=levels, cmap="viridis")
        ax.contour(grid, grid, V, levels=levels, colors="k", linewidths=0.3)
        fig.colorbar(filled, ax=ax, label="reduced potential")
        _coulomb_center(ax, cfg)
        ax.plot([0.0], [0.0], "+", color="white", markersize=8)
        ax.set_aspect("equal")
        ax.set_xlabel("$q_1$")
        ax.set_ylabel("$q_2$")
        ax.set_title(f"$\\alpha = {cfg.alpha:.6g}$, $a = {cfg.a:.6g}$")
        fig.tight_layout()
        return _save(fig, output_path)
