"""
Pair of thin-plate splines mapping one planar configuration onto another.

The deformation is ``phi(t) = c + t @ A.T + s(t) @ W`` where ``s(t)`` holds the
kernel ``delta(t - t_j)`` for every source landmark. ``W`` satisfies the six
side conditions ``1^T W = 0`` and ``T^T W = 0``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist, pdist

from .errors import CollinearLandmarks, DimensionMismatch, DuplicateLandmarks, InsufficientLandmarks

__all__ = [
    "TpsDeformation",
    "TpsGrid",
    "tps_kernel",
    "tps_fit",
    "tps_eval",
    "tps_grid",
    "grid_to_csv",
    "grid_to_svg",
]

CONDITION_LIMIT = 1e12
DUPLICATE_TOLERANCE = 1e-9

# SVG rendering constants
SVG_SIZE = 600
SVG_PADDING = 30
SVG_GRID_STROKE = 0.8
SVG_MARKER_RADIUS = 4.5
SVG_MARKER_STROKE = 1.5


def tps_kernel(h):
    """``|h|^2 log|h|`` with the removable singularity at 0 filled in.

    ``h`` may be a single 2-vector or an array of them (last axis = coordinates).
    """
    r = np.linalg.norm(np.asarray(h, dtype=float), axis=-1)
    return _radial(r)


def _radial(r):
    r = np.asarray(r, dtype=float)
    out = np.zeros_like(r)
    pos = r > 0
    out[pos] = r[pos] ** 2 * np.log(r[pos])
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class TpsDeformation:
    """Fitted pair of thin-plate splines.

    Attributes
    ----------
    source, target : (k, 2) ndarray
        Landmarks the map interpolates, ``phi(source[j]) == target[j]``.
    constant : (2,) ndarray
    affine : (2, 2) ndarray
        Acts on column vectors, ``phi(t) = constant + affine @ t + ...``.
    weights : (k, 2) ndarray
        Coefficients of the kernel terms.
    bending_energy : float
        ``trace(W^T S W)`` clamped at zero. The integral of squared second
        derivatives equals ``8 * pi`` times this value.
    raw_input : bool
        False when the landmarks came from canonicalized mean shapes.
    """

    source: np.ndarray
    target: np.ndarray
    constant: np.ndarray
    affine: np.ndarray
    weights: np.ndarray
    bending_energy: float
    raw_input: bool = True

    def __call__(self, points):
        return tps_eval(self, points)

    def to_dict(self):
        return {
            "source": self.source.tolist(),
            "target": self.target.tolist(),
            "constant": self.constant.tolist(),
            "affine": self.affine.tolist(),
            "weights": self.weights.tolist(),
            "bending_energy": self.bending_energy,
            "raw_input": self.raw_input,
        }


def _as_planar(points, name):
    P = np.asarray(points, dtype=float)
    if P.ndim != 2 or P.shape[1] != 2:
        raise DimensionMismatch(f"{name} must be a (k, 2) array, got shape {P.shape}")
    if not np.all(np.isfinite(P)):
        raise ValueError(f"{name} contains non-finite entries")
    return P


def tps_fit(source, target, raw_input=True):
    """Fit the interpolating pair of thin-plate splines from ``source`` to ``target``.

    Solves ``[[S, 1, T], [1^T, 0, 0], [T^T, 0, 0]] [w; c; a] = [y; 0; 0]`` for
    both output coordinates at once, with ``S_ij = delta(t_i - t_j)``.

    Raises
    ------
    DimensionMismatch
        Shapes differ or are not ``(k, 2)``.
    InsufficientLandmarks
        Fewer than four landmarks.
    DuplicateLandmarks
        Two source landmarks closer than ``1e-9`` times the diameter.
    CollinearLandmarks
        The system's condition number exceeds ``1e12``.
    """
    T = _as_planar(source, "source")
    Y = _as_planar(target, "target")
    if T.shape != Y.shape:
        raise DimensionMismatch(f"source {T.shape} and target {Y.shape} differ in shape")
    k = T.shape[0]
    if k < 4:
        raise InsufficientLandmarks(f"thin-plate splines need at least 4 landmarks, got {k}")
    gaps = pdist(T)
    diameter = gaps.max()
    if diameter == 0 or gaps.min() < DUPLICATE_TOLERANCE * diameter:
        raise DuplicateLandmarks("source landmarks must be pairwise distinct")

    S = _radial(cdist(T, T))
    P = np.hstack([np.ones((k, 1)), T])
    L = np.zeros((k + 3, k + 3))
    L[:k, :k] = S
    L[:k, k:] = P
    L[k:, :k] = P.T
    if np.linalg.cond(L) > CONDITION_LIMIT:
        raise CollinearLandmarks("source landmarks are (nearly) collinear; spline system is singular")
    rhs = np.vstack([Y, np.zeros((3, 2))])
    sol = np.linalg.solve(L, rhs)

    W = sol[:k]
    constant = sol[k]
    affine = sol[k + 1 :].T
    energy = max(float(np.trace(W.T @ S @ W)), 0.0)
    return TpsDeformation(
        source=T,
        target=Y,
        constant=constant,
        affine=affine,
        weights=W,
        bending_energy=energy,
        raw_input=raw_input,
    )


def tps_eval(deformation, points):
    """Map ``points`` (an ``(n, 2)`` array or a single 2-vector) through the deformation."""
    pts = np.asarray(points, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    out = (
        deformation.constant
        + pts @ deformation.affine.T
        + _radial(cdist(pts, deformation.source)) @ deformation.weights
    )
    return out[0] if single else out


@dataclass(frozen=True)
class TpsGrid:
    """Regular grid over the source landmarks and its image.

    ``nodes`` and ``mapped`` have shape ``(rows, cols, 2)``; ``edges`` lists
    pairs of ``(i, j)`` node indices joined by a grid line.
    """

    nodes: np.ndarray
    mapped: np.ndarray
    edges: list
    deformation: TpsDeformation

    @property
    def shape(self):
        return self.nodes.shape[:2]


def tps_grid(deformation, rows=20, cols=20, margin=0.1):
    """Deform a ``rows x cols`` grid spanning the source bounding box.

    The box is enlarged on every side by ``margin`` times the source diameter.
    """
    if rows < 2 or cols < 2:
        raise ValueError("grid needs at least 2 rows and 2 columns")
    if margin < 0:
        raise ValueError("margin must be nonnegative")
    T = deformation.source
    pad = margin * pdist(T).max()
    lo = T.min(axis=0) - pad
    hi = T.max(axis=0) + pad
    xs = np.linspace(lo[0], hi[0], cols)
    ys = np.linspace(lo[1], hi[1], rows)
    gx, gy = np.meshgrid(xs, ys)
    nodes = np.stack([gx, gy], axis=-1)
    mapped = tps_eval(deformation, nodes.reshape(-1, 2)).reshape(nodes.shape)
    edges = []
    for i in range(rows):
        for j in range(cols):
            if j + 1 < cols:
                edges.append(((i, j), (i, j + 1)))
            if i + 1 < rows:
                edges.append(((i, j), (i + 1, j)))
    return TpsGrid(nodes=nodes, mapped=mapped, edges=edges, deformation=deformation)


def grid_to_csv(grid):
    """Deformed node coordinates as CSV text with header ``i,j,x,y``."""
    lines = ["i,j,x,y"]
    rows, cols = grid.shape
    for i in range(rows):
        for j in range(cols):
            x, y = grid.mapped[i, j]
            lines.append(f"{i},{j},{x!r},{y!r}")
    return "\n".join(lines) + "\n"


def grid_to_svg(grid, title=None):
    """Render the deformed grid with source (hollow) and target (filled) landmarks."""
    d = grid.deformation
    pts = np.vstack([grid.mapped.reshape(-1, 2), d.source, d.target])
    lo = pts.min(axis=0)
    span = float((pts.max(axis=0) - lo).max()) or 1.0
    scale = (SVG_SIZE - 2 * SVG_PADDING) / span

    def xy(p):
        # flip y so that up is up
        return (SVG_PADDING + (p[0] - lo[0]) * scale, SVG_SIZE - SVG_PADDING - (p[1] - lo[1]) * scale)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_SIZE}" height="{SVG_SIZE}" '
        f'viewBox="0 0 {SVG_SIZE} {SVG_SIZE}">',
        f'<rect width="{SVG_SIZE}" height="{SVG_SIZE}" fill="white"/>',
    ]
    if title:
        out.append(f'<title>{title}</title>')
    rows, cols = grid.shape
    lines = [grid.mapped[i, :] for i in range(rows)] + [grid.mapped[:, j] for j in range(cols)]
    for line in lines:
        coords = " ".join("%.3f,%.3f" % xy(p) for p in line)
        out.append(
            f'<polyline points="{coords}" fill="none" stroke="#777777" stroke-width="{SVG_GRID_STROKE}"/>'
        )
    for p in d.source:
        cx, cy = xy(p)
        out.append(
            f'<circle cx="{cx:.3f}" cy="{cy:.3f}" r="{SVG_MARKER_RADIUS}" fill="none" '
            f'stroke="#1f4e9e" stroke-width="{SVG_MARKER_STROKE}"/>'
        )
    for p in d.target:
        cx, cy = xy(p)
        out.append(f'<circle cx="{cx:.3f}" cy="{cy:.3f}" r="{SVG_MARKER_RADIUS}" fill="#c0392b"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
