"""Zero sets of detecting functions: polylines in the plane, meshes in space.

Grid-corner signs are exact (rational evaluation wherever floats cannot
decide), and zeros are treated as positive throughout so that the sign
field is never ambiguous. Crossing points on grid edges are refined by
float bisection. SVG and OBJ writers produce byte-stable text.
"""

from __future__ import annotations

import math
import os
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from .detect import Box
from .polyalg import MultiPoly, sign_grid, sign_points

BISECTION_STEPS = 64


class TraceError(RuntimeError):
    """Grid too coarse or degenerate input."""


@dataclass
class Component:
    points: np.ndarray  # (m, 2)
    closed: bool
    quadrant: int  # 1..4 by the point farthest from the origin, 0 if undecided
    membership: dict[int, int] = field(default_factory=dict)


@dataclass
class ZeroSet2D:
    components: list[Component]
    j: int | None = None
    label: str | None = None
    box: Box | None = None
    disk_radius: float | None = None
    exclusion_radius: float = 0.0
    resolution: int = 0
    max_residual: float = 0.0

    def quadrant_counts(self) -> tuple[int, int, int, int]:
        counts = [0, 0, 0, 0]
        for c in self.components:
            if c.quadrant:
                counts[c.quadrant - 1] += 1
        return tuple(counts)

    def vertices_array(self) -> np.ndarray:
        if not self.components:
            return np.zeros((0, 2))
        return np.concatenate([c.points for c in self.components])


@dataclass
class Mesh3D:
    vertices: np.ndarray  # (N, 3)
    triangles: np.ndarray  # (M, 3) int
    j: int | None = None
    label: str | None = None
    max_residual: float = 0.0
    grid_index: np.ndarray | None = None  # vertex positions in grid-index space
    resolution: int = 0

    def is_empty(self) -> bool:
        return len(self.triangles) == 0

    def vertices_in_ball(self, radius: float, exclusion: float | None = None) -> np.ndarray:
        if exclusion is None:
            exclusion = 0.0
        n = np.linalg.norm(self.vertices, axis=1) if len(self.vertices) else np.zeros(0)
        return self.vertices[(n <= radius) & (n > exclusion)]

    def open_interior_edges(self) -> int:
        """Interior edges not shared by exactly two triangles (0 means watertight)."""
        if self.is_empty():
            return 0
        counts: dict[tuple[int, int], int] = {}
        for tri in self.triangles:
            for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
                key = (a, b) if a < b else (b, a)
                counts[key] = counts.get(key, 0) + 1
        gi = self.grid_index
        bad = 0
        for (a, b), c in counts.items():
            if c == 2:
                continue
            if gi is not None and _on_common_face(gi[a], gi[b], self.resolution):
                continue
            bad += 1
        return bad


def _on_common_face(p, q, res) -> bool:
    for d in range(3):
        for side in (0.0, float(res)):
            if p[d] == side and q[d] == side:
                return True
    return False


def _float_axes(box: Box, res: int):
    axes_q = box.grid_axes(res + 1)
    return axes_q, [np.array([float(x) for x in a]) for a in axes_q]


def _polish(F: MultiPoly, a: np.ndarray, b: np.ndarray, sign_a: np.ndarray) -> np.ndarray:
    """Vectorised bisection on segments a->b where F changes sign."""
    lo, hi = a.copy(), b.copy()
    dim = a.shape[1]
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        val, _ = F.eval_float(*[mid[:, d] for d in range(dim)])
        s = np.where(val >= 0, 1, -1)
        same = s == sign_a
        lo = np.where(same[:, None], mid, lo)
        hi = np.where(same[:, None], hi, mid)
    return 0.5 * (lo + hi)


def residual_scale(F: MultiPoly) -> float:
    return 1.0 + float(F.max_abs_coefficient())


def _exact_signs(F: MultiPoly, axes_q) -> np.ndarray:
    s = sign_grid(F, axes_q).astype(np.int8)
    s[s == 0] = 1
    return s


# ---------------------------------------------------------------------------
# two parameters
# ---------------------------------------------------------------------------

def _quadrant_of(x: float, y: float) -> int:
    if x > 0 and y > 0:
        return 1
    if x < 0 and y > 0:
        return 2
    if x < 0 and y < 0:
        return 3
    if x > 0 and y < 0:
        return 4
    return 0


def trace2d(
    F: MultiPoly,
    box: Box,
    resolution: int = 256,
    disk_radius=None,
    exclusion_cells: float = 2.0,
    label: str | None = None,
    j: int | None = None,
    mode: str | None = None,
) -> ZeroSet2D:
    """Marching squares for the zero set of F.

    Without a disk the grid is Cartesian over the box. With a disk the zero
    set is traced in the punctured disk between an exclusion radius of
    ``exclusion_cells`` Cartesian cell widths and the disk radius, on a grid
    uniform in (log rho, theta). Its cells shrink in proportion to the
    distance from the origin, which keeps branches that are tangent at the
    origin apart down to the exclusion radius.
    """
    if F.num_vars != 2:
        raise ValueError("trace2d needs a two-variable polynomial")
    if resolution < 16:
        raise ValueError("resolution must be at least 16")
    if F.is_zero():
        raise TraceError("the zero polynomial has no curve to trace")
    if mode is None:
        mode = "polar" if disk_radius is not None else "cartesian"
    axes_q, (xs, ys) = _float_axes(box, resolution)
    cell = max(xs[1] - xs[0], ys[1] - ys[0])
    if mode == "cartesian":
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        P = np.stack([X, Y], axis=-1)
        S = _exact_signs(F, axes_q)
        excl = exclusion_cells * cell if disk_radius is not None else 0.0
        if disk_radius is not None:
            C = 0.25 * (P[:-1, :-1] + P[1:, :-1] + P[1:, 1:] + P[:-1, 1:])
            dist = np.hypot(C[..., 0], C[..., 1])
            keep = (dist <= float(disk_radius)) & (dist > excl)
        else:
            keep = np.ones((resolution, resolution), dtype=bool)
        periodic = False
    elif mode == "polar":
        if disk_radius is None:
            raise ValueError("polar tracing needs a disk radius")
        r = float(disk_radius)
        excl = exclusion_cells * cell
        n_theta = 8 * resolution
        dtheta = 2 * math.pi / n_theta
        n_rho = max(4, int(math.ceil(math.log(r / excl) / dtheta)))
        rho = excl * np.exp(np.linspace(0.0, math.log(r / excl), n_rho + 1))
        # the axes are grid lines, so no cell straddles two quadrants and
        # branches tangent to an axis stay on their own side of it
        theta = np.arange(n_theta) * dtheta
        cos_t, sin_t = np.cos(theta), np.sin(theta)
        quarter = n_theta // 4
        cos_t[quarter::2 * quarter] = 0.0
        sin_t[0::2 * quarter] = 0.0
        P = np.stack([np.outer(rho, cos_t), np.outer(rho, sin_t)], axis=-1)
        S = sign_points(F, P[..., 0], P[..., 1]).astype(np.int8)
        S[S == 0] = 1
        keep = np.ones((n_rho, n_theta), dtype=bool)
        periodic = True
    else:
        raise ValueError(f"unknown mode {mode!r}")
    verts, segments, nedges = _march(F, P, S, keep, periodic)
    if nedges:
        res, _ = F.eval_float(verts[:, 0], verts[:, 1])
        max_res = float(np.max(np.abs(res)))
    else:
        max_res = 0.0
    comps = []
    for chain, closed in _link(segments, nedges):
        pts = verts[chain]
        member: dict[int, int] = {}
        for x, y in pts:
            q = _quadrant_of(x, y)
            member[q] = member.get(q, 0) + 1
        far = int(np.argmax(np.hypot(pts[:, 0], pts[:, 1])))
        comps.append(Component(pts, closed, _quadrant_of(*pts[far]), member))
    rdisk = float(disk_radius) if disk_radius is not None else None
    return ZeroSet2D(comps, j, label, box, rdisk, float(excl), resolution, max_res)


def _march(F: MultiPoly, P: np.ndarray, S: np.ndarray, keep: np.ndarray, periodic: bool):
    """Marching squares on a structured grid of points P with corner signs S.

    Cell (i, k) has corners (i, k), (i+1, k), (i+1, k+1), (i, k+1); with
    ``periodic`` the second index wraps around. Saddle cells are resolved
    by the exact sign at the cell centre.
    """
    n1 = S.shape[1]

    def nxt(k):
        return (k + 1) % n1 if periodic else k + 1

    kk = np.arange(keep.shape[1])
    k1 = (kk + 1) % n1 if periodic else kk + 1
    c0 = S[:-1][:, kk]
    c1 = S[1:][:, kk]
    c2 = S[1:][:, k1]
    c3 = S[:-1][:, k1]
    cross_b = c0 != c1
    cross_r = c1 != c2
    cross_t = c2 != c3
    cross_l = c3 != c0
    ncross = cross_b.astype(int) + cross_r + cross_t + cross_l
    active = keep & (ncross > 0)
    segments_e = []
    for i, k in np.argwhere(active):
        i, k = int(i), int(k)
        # edge ids: ("a", i, k) joins (i,k)-(i+1,k); ("b", i, k) joins (i,k)-(i,k+1)
        eb = ("a", i, k)
        er = ("b", i + 1, k)
        et = ("a", i, nxt(k))
        el = ("b", i, k)
        crossing = [
            e
            for e, c in ((eb, cross_b[i, k]), (er, cross_r[i, k]), (et, cross_t[i, k]), (el, cross_l[i, k]))
            if c
        ]
        if len(crossing) == 2:
            segments_e.append((crossing[0], crossing[1]))
        elif len(crossing) == 4:
            corners = [P[i, k], P[i + 1, k], P[i + 1, nxt(k)], P[i, nxt(k)]]
            mid = sum(corners) / 4.0
            s = F.sign_at([Fraction(float(mid[0])), Fraction(float(mid[1]))])
            if (1 if s >= 0 else -1) == c0[i, k]:
                # the centre joins c0 and c2: cut off corners c1 and c3
                segments_e.append((eb, er))
                segments_e.append((et, el))
            else:
                segments_e.append((el, eb))
                segments_e.append((er, et))
    edges = sorted({e for seg in segments_e for e in seg})
    index = {e: n for n, e in enumerate(edges)}
    if not edges:
        return np.zeros((0, 2)), [], 0
    a = np.empty((len(edges), 2))
    b = np.empty((len(edges), 2))
    sa = np.empty(len(edges), dtype=int)
    for n, (kind, i, k) in enumerate(edges):
        a[n] = P[i, k]
        b[n] = P[i + 1, k] if kind == "a" else P[i, nxt(k)]
        sa[n] = S[i, k]
    verts = _polish(F, a, b, sa)
    return verts, [(index[p], index[q]) for p, q in segments_e], len(edges)


def _link(segments: list[tuple[int, int]], nverts: int):
    """Chain segments sharing vertices into maximal polylines (deterministic)."""
    adj: list[list[int]] = [[] for _ in range(nverts)]
    for p, q in segments:
        adj[p].append(q)
        adj[q].append(p)
    seen = [False] * nverts
    out = []

    def walk(start):
        chain = [start]
        seen[start] = True
        prev, cur = -1, start
        while True:
            nxt = [v for v in adj[cur] if v != prev and not seen[v]]
            if not nxt:
                return chain
            prev, cur = cur, nxt[0]
            seen[cur] = True
            chain.append(cur)

    # open chains start at degree-1 vertices
    for v in range(nverts):
        if not seen[v] and len(adj[v]) == 1:
            out.append((walk(v), False))
    for v in range(nverts):
        if not seen[v] and adj[v]:
            chain = walk(v)
            out.append((chain + [chain[0]], True))
    return out


# ---------------------------------------------------------------------------
# three parameters
# ---------------------------------------------------------------------------

def trace3d(F: MultiPoly, box: Box, resolution: int = 48, j: int | None = None, label: str | None = None) -> Mesh3D:
    """Marching cubes on the exact sign field, vertices polished on their grid edge."""
    from skimage.measure import marching_cubes

    if F.num_vars != 3:
        raise ValueError("trace3d needs a three-variable polynomial")
    if resolution < 4:
        raise ValueError("resolution must be at least 4")
    if F.is_zero():
        raise TraceError("the zero polynomial has no surface to trace")
    axes_q, faxes = _float_axes(box, resolution)
    S = _exact_signs(F, axes_q).astype(np.float32)
    if S.min() == S.max():
        return Mesh3D(np.zeros((0, 3)), np.zeros((0, 3), dtype=int), j, label, 0.0, np.zeros((0, 3)), resolution)
    verts, faces, _, _ = marching_cubes(S, level=0.0, method="lewiner", allow_degenerate=False)
    # with values +-1 every vertex sits at the midpoint of a grid edge
    gi = np.round(verts * 2) / 2
    frac = np.abs(gi - np.floor(gi)) > 0.25
    lo_idx = np.floor(gi).astype(int)
    hi_idx = lo_idx + frac.astype(int)
    a = np.stack([faxes[d][lo_idx[:, d]] for d in range(3)], axis=1)
    b = np.stack([faxes[d][hi_idx[:, d]] for d in range(3)], axis=1)
    sa = S[lo_idx[:, 0], lo_idx[:, 1], lo_idx[:, 2]].astype(int)
    world = _polish(F, a, b, sa)
    val, _ = F.eval_float(world[:, 0], world[:, 1], world[:, 2])
    return Mesh3D(world, faces.astype(int), j, label, float(np.max(np.abs(val))), gi, resolution)


# ---------------------------------------------------------------------------
# writers
# ---------------------------------------------------------------------------

_STYLES = [
    ("#1f77b4", ""),
    ("#d62728", "6,3"),
    ("#2ca02c", "2,2"),
    ("#9467bd", "8,2,2,2"),
    ("#ff7f0e", "4,4"),
    ("#8c564b", "1,3"),
]


def _atomic_write(path, text: str):
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    # mkstemp creates 0600 files; use the permissions a plain open() would give
    umask = os.umask(0)
    os.umask(umask)
    os.chmod(tmp, 0o666 & ~umask)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(x: float) -> str:
    s = f"{x:.3f}"
    return "0.000" if s == "-0.000" else s


def render_svg(sets: Sequence[ZeroSet2D], disk_radius: float, size: int = 480, title: str = "") -> str:
    """SVG text: one path per component, a legend of period labels, the disk outline."""
    r = float(disk_radius)
    margin = 20
    plot = size - 2 * margin
    legend_w = 140
    scale = plot / (2 * r)

    def tx(x):
        return margin + (x + r) * scale

    def ty(y):
        return margin + (r - y) * scale

    labels = []
    for zs in sets:
        lab = zs.label or (f"j={zs.j}" if zs.j is not None else "zero set")
        if lab not in labels:
            labels.append(lab)
    style = {lab: _STYLES[k % len(_STYLES)] for k, lab in enumerate(labels)}
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size + legend_w}" height="{size}" viewBox="0 0 {size + legend_w} {size}">',
    ]
    if title:
        out.append(f"  <title>{_escape(title)}</title>")
    out.append(
        f'  <circle class="disk" cx="{_fmt(tx(0))}" cy="{_fmt(ty(0))}" r="{_fmt(r * scale)}" fill="none" stroke="#888888" stroke-width="1"/>'
    )
    for zs in sets:
        lab = zs.label or (f"j={zs.j}" if zs.j is not None else "zero set")
        color, dash = style[lab]
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        for c in zs.components:
            if len(c.points) < 2:
                continue
            d = "M " + " L ".join(f"{_fmt(tx(x))},{_fmt(ty(y))}" for x, y in c.points)
            if c.closed:
                d += " Z"
            out.append(
                f'  <path class="component" data-label="{_escape(lab)}" d="{d}" fill="none" stroke="{color}" stroke-width="1.5"{dash_attr}/>'
            )
    out.append(f'  <g class="legend" transform="translate({size},{margin})">')
    for k, lab in enumerate(labels):
        color, dash = style[lab]
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        y = 10 + 20 * k
        out.append(f'    <line x1="0" y1="{y}" x2="30" y2="{y}" stroke="{color}" stroke-width="2"{dash_attr}/>')
        out.append(f'    <text x="36" y="{y + 4}" font-family="sans-serif" font-size="12">{_escape(lab)}</text>')
    out.append("  </g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")


def emit_svg(sets: Sequence[ZeroSet2D], path, disk_radius: float | None = None, title: str = ""):
    """Write the traced curves as SVG. All sets must share one box."""
    boxes = {zs.box for zs in sets if zs.box is not None}
    if len(boxes) > 1:
        raise ValueError("zero sets do not share a box")
    if disk_radius is None:
        radii = [zs.disk_radius for zs in sets if zs.disk_radius]
        disk_radius = radii[0] if radii else 0.3
    _atomic_write(path, render_svg(sets, disk_radius, title=title))


def render_obj(meshes: Sequence[Mesh3D], comment: str = "") -> str:
    lines = ["# hambif zero-set mesh (v/f records)"]
    if comment:
        lines.append(f"# {comment}")
    offset = 1
    for m in meshes:
        if m.is_empty():
            continue
        name = f"freq_{m.j}" if m.j is not None else "zero_set"
        lines.append(f"g {name}")
        for x, y, z in m.vertices:
            lines.append(f"v {x:.9f} {y:.9f} {z:.9f}")
        for a, b, c in m.triangles:
            lines.append(f"f {a + offset} {b + offset} {c + offset}")
        offset += len(m.vertices)
    return "\n".join(lines) + "\n"


def emit_obj(meshes, path, comment: str = ""):
    """Write one or more meshes as Wavefront OBJ, one group per frequency."""
    if isinstance(meshes, Mesh3D):
        meshes = [meshes]
    _atomic_write(path, render_obj(meshes, comment))


__all__ = [
    "Component",
    "ZeroSet2D",
    "Mesh3D",
    "TraceError",
    "trace2d",
    "trace3d",
    "render_svg",
    "emit_svg",
    "render_obj",
    "emit_obj",
    "residual_scale",
]
