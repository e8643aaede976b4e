"""PNG renders of point clouds and polygon unions (matplotlib, Agg backend)."""
from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.collections import PolyCollection  # noqa: E402

from .geometry import Polygon2  # noqa: E402

FIGSIZE = (6.0, 6.0)
DPI = 150


def _finish(fig, ax, path: str | Path, title: str | None) -> Path:
    ax.set_aspect("equal", adjustable="datalim")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    if title:
        ax.set_title(title, fontsize=10)
    ax.grid(True, lw=0.3, alpha=0.5)
    path = Path(path)
    fig.savefig(path, dpi=DPI, bbox_inches="tight", metadata={"Software": None})
    plt.close(fig)
    return path


def plot_points(
    points: np.ndarray,
    path: str | Path,
    title: str | None = None,
    outline: Polygon2 | None = None,
) -> Path:
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    fig, ax = plt.subplots(figsize=FIGSIZE)
    size = 4.0 if len(pts) < 2000 else 0.3
    ax.scatter(pts[:, 0], pts[:, 1], s=size, c="#1d3557", lw=0, rasterized=len(pts) > 2000)
    if outline is not None and len(outline) >= 2:
        ring = np.vstack([outline.vertices, outline.vertices[:1]])
        ax.plot(ring[:, 0], ring[:, 1], c="#e63946", lw=1.0)
    return _finish(fig, ax, path, title)


def plot_polygons(
    polygons: Sequence[Polygon2 | np.ndarray] | np.ndarray,
    path: str | Path,
    title: str | None = None,
) -> Path:
    rings = [np.asarray(p.vertices if isinstance(p, Polygon2) else p, dtype=float) for p in polygons]
    fig, ax = plt.subplots(figsize=FIGSIZE)
    coll = PolyCollection(rings, facecolors="#3b6ea5", edgecolors="#1d3557", alpha=0.6, lw=0.4)
    ax.add_collection(coll)
    if rings:
        ax.autoscale_view()
    return _finish(fig, ax, path, title)
