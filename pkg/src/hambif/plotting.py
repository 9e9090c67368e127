"""Optional PNG rendering of traced zero sets with matplotlib.

The SVG and OBJ writers in ``trace`` carry no plotting dependency; this
module is imported only when a PNG is requested.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .trace import Mesh3D, ZeroSet2D, _STYLES


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def plot_curves(sets: Sequence[ZeroSet2D], path, disk_radius: float, title: str = "", dpi: int = 150):
    """Plot planar zero sets inside the disk, one colour and dash style per label."""
    plt = _pyplot()
    r = float(disk_radius)
    fig, ax = plt.subplots(figsize=(5.5, 5.0))
    try:
        t = np.linspace(0.0, 2 * np.pi, 361)
        ax.plot(r * np.cos(t), r * np.sin(t), color="#888888", lw=0.8)
        ax.axhline(0.0, color="#cccccc", lw=0.5, zorder=0)
        ax.axvline(0.0, color="#cccccc", lw=0.5, zorder=0)
        labels: list[str] = []
        for zs in sets:
            lab = zs.label or (f"j={zs.j}" if zs.j is not None else "zero set")
            if lab not in labels:
                labels.append(lab)
            color, dash = _STYLES[labels.index(lab) % len(_STYLES)]
            ls = (0, tuple(float(x) for x in dash.split(","))) if dash else "-"
            first = True
            for c in zs.components:
                pts = c.points if not c.closed else np.vstack([c.points, c.points[:1]])
                ax.plot(pts[:, 0], pts[:, 1], color=color, linestyle=ls, lw=1.4, label=lab if first else None)
                first = False
        ax.set_xlim(-1.05 * r, 1.05 * r)
        ax.set_ylim(-1.05 * r, 1.05 * r)
        ax.set_aspect("equal")
        ax.set_xlabel(r"$\lambda_1$")
        ax.set_ylabel(r"$\lambda_2$")
        if title:
            ax.set_title(title)
        if labels:
            ax.legend(loc="upper right", fontsize=8, frameon=False)
        fig.tight_layout()
        fig.savefig(path, dpi=dpi, metadata={"Software": None})
    finally:
        plt.close(fig)


def plot_surfaces(meshes: Sequence[Mesh3D], path, title: str = "", dpi: int = 150):
    """Translucent triangle surfaces of the traced zero sets on a 3D axis."""
    plt = _pyplot()
    fig = plt.figure(figsize=(6.0, 5.5))
    try:
        ax = fig.add_subplot(projection="3d")
        for k, m in enumerate(meshes):
            if m.is_empty():
                continue
            color, _ = _STYLES[k % len(_STYLES)]
            v = m.vertices
            ax.plot_trisurf(v[:, 0], v[:, 1], v[:, 2], triangles=m.triangles, color=color, alpha=0.45, lw=0.0)
            # proxy artist for the legend
            ax.plot([], [], color=color, label=m.label or f"j={m.j}")
        ax.set_xlabel(r"$\lambda_1$")
        ax.set_ylabel(r"$\lambda_2$")
        ax.set_zlabel(r"$\lambda_3$")
        if title:
            ax.set_title(title)
        ax.legend(loc="upper left", fontsize=8, frameon=False)
        fig.tight_layout()
        fig.savefig(path, dpi=dpi, metadata={"Software": None})
    finally:
        plt.close(fig)


__all__ = ["plot_curves", "plot_surfaces"]
