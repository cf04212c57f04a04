"""Orthographic sphere plots rendered with matplotlib.

Points on the far hemisphere are drawn thin and dashed, near ones solid.
The output is a standalone SVG whose canvas is 640 x 640 units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .sphere import perpendicular_basis  # noqa: E402

CANVAS = 640
MAX_CURVE_POINTS = 6000
DOTS_THRESHOLD = 500

plt.rcParams["svg.hashsalt"] = "strobe"
plt.rcParams["svg.fonttype"] = "none"


@dataclass(frozen=True)
class View:
    """Camera for the orthographic projection (angles in degrees).

    ``roll`` tilts the picture so that ``q = [0, 0, 1]`` leans to the right.
    """

    azimuth: float = 25.0
    elevation: float = 20.0
    roll: float = 20.0

    def basis(self):
        az, el, ro = (math.radians(a) for a in (self.azimuth, self.elevation, self.roll))
        toward = np.array([math.cos(el) * math.cos(az), math.cos(el) * math.sin(az), math.sin(el)])
        right = np.array([-math.sin(az), math.cos(az), 0.0])
        up = np.cross(toward, right)
        right, up = math.cos(ro) * right + math.sin(ro) * up, -math.sin(ro) * right + math.cos(ro) * up
        return toward, right, up


def front_mask(points, view: View):
    """True for points on the hemisphere facing the viewer (``r.v >= 0``)."""
    toward, _, _ = view.basis()
    return np.asarray(points, dtype=float).reshape(-1, 3) @ toward >= 0.0


def project(points, view: View):
    _, right, up = view.basis()
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    return np.stack([pts @ right, pts @ up], axis=-1)


def split_runs(mask):
    """``(start, stop, value)`` for maximal runs of equal ``mask`` entries."""
    mask = np.asarray(mask, dtype=bool)
    if mask.size == 0:
        return []
    cuts = np.flatnonzero(np.diff(mask.astype(np.int8))) + 1
    starts = np.concatenate([[0], cuts])
    stops = np.concatenate([cuts, [mask.size]])
    return [(int(a), int(b), bool(mask[a])) for a, b in zip(starts, stops)]


def _draw_path(ax, points, view, color="black", lw=1.0):
    xy = project(points, view)
    mask = front_mask(points, view)
    for a, b, front in split_runs(mask):
        # overlap one sample so consecutive runs join up
        seg = xy[a : min(b + 1, len(xy))]
        if front:
            ax.plot(seg[:, 0], seg[:, 1], "-", color=color, lw=lw, solid_capstyle="round")
        else:
            ax.plot(seg[:, 0], seg[:, 1], "--", color=color, lw=0.4 * lw, dashes=(3, 3))


def _circle(q, height, n=361):
    e1, e2 = perpendicular_basis(q)
    rad = math.sqrt(max(0.0, 1.0 - height * height))
    t = np.linspace(0.0, 2 * math.pi, n)
    return height * np.asarray(q) + rad * (np.cos(t)[:, None] * e1 + np.sin(t)[:, None] * e2)


def _decimate(points, limit=MAX_CURVE_POINTS):
    if len(points) <= limit:
        return points
    stride = math.ceil(len(points) / limit)
    idx = np.arange(0, len(points), stride)
    if idx[-1] != len(points) - 1:
        idx = np.append(idx, len(points) - 1)
    return points[idx]


def sphere_figure(layers, bounds, q, view: View = View(), mark_initial=False, title=None):
    """Draw the sphere, ``q``, the equator, both parallels and each layer.

    ``layers`` is a sequence of ``(points, style)`` with ``style`` one of
    ``"curve"``, ``"dots"`` or ``"auto"`` (dots for sparse orbits).
    """
    q = np.asarray(q, dtype=float)
    size = CANVAS / 72.0
    fig = plt.figure(figsize=(size, size))
    ax = fig.add_axes([0, 0, 1, 1])
    ax.set_xlim(-1.35, 1.35)
    ax.set_ylim(-1.35, 1.35)
    ax.set_aspect("equal")
    ax.axis("off")

    ax.add_patch(plt.Circle((0, 0), 1.0, fill=False, color="black", lw=0.8))
    _draw_path(ax, _circle(q, 0.0), view, color="0.35", lw=0.7)
    for height in (bounds.lower, bounds.upper):
        _draw_path(ax, _circle(q, height), view, color="0.35", lw=0.7)

    # q axis: the part inside the ball is hidden, the outer part is drawn
    s = np.linspace(0.0, 1.0, 2)
    inner = project(np.outer(s, q), view)
    ax.plot(inner[:, 0], inner[:, 1], "--", color="black", lw=0.4, dashes=(3, 3))
    tip = project(np.outer([1.0, 1.3], q), view)
    ax.annotate("", xy=tip[1], xytext=tip[0], arrowprops=dict(arrowstyle="-|>", color="black", lw=0.8))
    ax.text(*(tip[1] + 0.04), "q", fontsize=12)

    for points, style in layers:
        points = np.asarray(points, dtype=float).reshape(-1, 3)
        if len(points) == 0:
            continue
        if style == "auto":
            style = "dots" if len(points) <= DOTS_THRESHOLD else "curve"
        if style == "dots":
            xy = project(points, view)
            front = front_mask(points, view)
            ax.plot(xy[front, 0], xy[front, 1], "o", ms=3.0, color="black")
            ax.plot(xy[~front, 0], xy[~front, 1], "o", ms=3.0, mfc="none", mec="0.4", mew=0.5)
        else:
            _draw_path(ax, _decimate(points), view, lw=1.0)
    if mark_initial:
        for points, _ in layers[:1]:
            if len(points):
                xy = project(points[:1], view)
                ax.plot(xy[:, 0], xy[:, 1], "o", ms=5.0, color="black")
    if title:
        ax.text(-1.3, -1.3, title, fontsize=8)
    return fig


def save_svg(fig, path):
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def emit_svg(traj, bounds, path, view: View = View(), style="auto", mark_initial=False, title=None):
    """Render one trajectory (possibly empty) to an SVG file."""
    q = traj.config.q if traj.config is not None else np.array([0.0, 0.0, 1.0])
    fig = sphere_figure([(traj.r, style)], bounds, q, view, mark_initial=mark_initial, title=title)
    return save_svg(fig, path)


def convergence_figure(steps, errors, path):
    """Log-log plot of RK4 global error against step size."""
    fig, ax = plt.subplots(figsize=(4.5, 3.5))
    ax.loglog(steps, errors, "o-", color="black")
    ref = errors[0] * (np.asarray(steps) / steps[0]) ** 4
    ax.loglog(steps, ref, "--", color="0.5", label="slope 4")
    ax.set_xlabel("step h")
    ax.set_ylabel("global error")
    ax.legend(frameon=False)
    fig.tight_layout()
    return save_svg(fig, path)
