"""
Data depth for curves and vectors.

Modified band depth orders a sample of curves from the center outwards;
projection depth does the same for points in ``R^d``. Both take values in
``[0, 1]`` with larger values meaning more central.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .errors import EmptySample, GridMismatch

__all__ = [
    "FunctionalSample",
    "DepthScores",
    "MedianResult",
    "trapezoid_weights",
    "mbd",
    "functional_median",
    "central_region",
    "subset_normals",
    "planar_breakpoint_directions",
    "outlyingness",
    "projection_depth",
    "depth_trim",
    "load_functional_csv",
    "scores_to_csv",
]

DEFAULT_DIRECTIONS = 1000
TIE_TOLERANCE = 1e-12
# planar samples up to this size use the exact breakpoint direction set
PLANAR_EXACT_MAX_N = 30


@dataclass(frozen=True)
class FunctionalSample:
    """``n`` curves observed on a shared, strictly increasing time grid."""

    grid: np.ndarray
    curves: np.ndarray
    ids: tuple = ()

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        curves = np.atleast_2d(np.asarray(self.curves, dtype=float))
        if grid.ndim != 1 or grid.size < 2:
            raise GridMismatch("grid needs at least two time points")
        if np.any(np.diff(grid) <= 0):
            raise GridMismatch("grid must be strictly increasing")
        if curves.shape[1] != grid.size:
            raise GridMismatch(f"curves have {curves.shape[1]} points, grid has {grid.size}")
        if curves.shape[0] == 0:
            raise EmptySample("functional sample has no curves")
        if not np.all(np.isfinite(curves)):
            raise ValueError("curves contain non-finite values")
        ids = tuple(self.ids) if self.ids else tuple(str(i) for i in range(curves.shape[0]))
        if len(ids) != curves.shape[0]:
            raise ValueError("one id per curve required")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "curves", curves)
        object.__setattr__(self, "ids", ids)

    @classmethod
    def from_curves(cls, curves, grid=None, ids=()):
        curves = np.atleast_2d(np.asarray(curves, dtype=float))
        if grid is None:
            grid = np.arange(curves.shape[1], dtype=float)
        return cls(grid=grid, curves=curves, ids=ids)

    @property
    def n(self):
        return self.curves.shape[0]


@dataclass(frozen=True)
class DepthScores:
    values: np.ndarray
    method: str
    ids: tuple = ()


def trapezoid_weights(grid):
    """Quadrature weights of the trapezoid rule; they sum to ``grid[-1] - grid[0]``."""
    grid = np.asarray(grid, dtype=float)
    d = np.diff(grid)
    w = np.zeros_like(grid)
    w[:-1] += d / 2
    w[1:] += d / 2
    return w


def mbd(sample):
    """Modified band depth of every curve with respect to the whole sample.

    For each pair of sample curves, the fraction of time (trapezoid-weighted)
    that a curve lies inside their band, ends included, averaged over all
    ``n (n - 1) / 2`` pairs.

    Examples
    --------
    >>> s = FunctionalSample.from_curves([[0, 0, 0], [1, 1, 1], [2, 2, 2]])
    >>> np.round(mbd(s).values, 6)
    array([0.666667, 1.      , 0.666667])
    """
    if not isinstance(sample, FunctionalSample):
        sample = FunctionalSample.from_curves(sample)
    n = sample.n
    if n < 2:
        raise EmptySample("modified band depth needs at least two curves")
    X = sample.curves
    # curves strictly below / strictly above each value at each time point
    below = rankdata(X, method="min", axis=0) - 1
    above = n - rankdata(X, method="max", axis=0)
    pairs = n * (n - 1) / 2
    inside = pairs - below * (below - 1) / 2 - above * (above - 1) / 2
    w = trapezoid_weights(sample.grid)
    values = (inside @ w) / (w.sum() * pairs)
    return DepthScores(values=np.clip(values, 0.0, 1.0), method="mbd", ids=sample.ids)


@dataclass(frozen=True)
class MedianResult:
    """Deepest curve (or average of tied deepest curves) and the indices involved."""

    curve: np.ndarray
    indices: tuple
    scores: np.ndarray

    @property
    def tied(self):
        return len(self.indices) > 1


def functional_median(sample):
    """Curve of maximal modified band depth; exact ties are averaged pointwise."""
    if not isinstance(sample, FunctionalSample):
        sample = FunctionalSample.from_curves(sample)
    scores = mbd(sample).values
    top = np.flatnonzero(scores >= scores.max() - TIE_TOLERANCE)
    curve = sample.curves[top].mean(axis=0)
    return MedianResult(curve=curve, indices=tuple(int(i) for i in top), scores=scores)


def central_region(sample, alpha):
    """Indices of curves with depth at least ``alpha`` and the pointwise envelope they span.

    Returns ``(indices, lower, upper)``.
    """
    if not isinstance(sample, FunctionalSample):
        sample = FunctionalSample.from_curves(sample)
    scores = mbd(sample).values
    idx = np.flatnonzero(scores >= alpha)
    if idx.size == 0:
        return idx, None, None
    members = sample.curves[idx]
    return idx, members.min(axis=0), members.max(axis=0)


def subset_normals(sample, directions=DEFAULT_DIRECTIONS, seed=0):
    """Unit normals of hyperplanes through ``d`` randomly chosen sample points.

    Index subsets are drawn from ``seed``, so for a fixed seed the direction
    set moves with the data: under ``z -> B z + v`` every normal maps to a
    multiple of ``B^{-T} u`` and all standardized projections are unchanged.
    """
    Z = np.asarray(sample, dtype=float)
    n, d = Z.shape
    if d == 1:
        return np.ones((1, 1))
    rng = np.random.default_rng(seed)
    size = min(n, d)
    idx = np.stack([rng.choice(n, size=size, replace=False) for _ in range(directions)])
    pts = Z[idx]
    spans = pts[:, 1:, :] - pts[:, :1, :]
    # last right-singular vector spans (part of) the orthogonal complement
    _, _, vt = np.linalg.svd(spans, full_matrices=True)
    return vt[:, -1, :]


def planar_breakpoint_directions(sample):
    """Unit normals of ``(z_i + z_j) - (z_a + z_b)`` over all index pairs ``i <= j``, ``a <= b``.

    In the plane, median and MAD of the projections keep the same order
    statistics between consecutive such normals, and on those arcs the
    standardized deviation of any point is monotone in the angle. The sup over
    all directions is therefore attained on this finite set.
    """
    Z = np.asarray(sample, dtype=float)
    i, j = np.triu_indices(Z.shape[0])
    sums = Z[i] + Z[j]
    p, q = np.triu_indices(sums.shape[0], k=1)
    v = sums[p] - sums[q]
    normals = np.column_stack([-v[:, 1], v[:, 0]])
    norms = np.linalg.norm(normals, axis=1)
    keep = norms > 1e-12 * max(1.0, np.abs(Z).max())
    return normals[keep] / norms[keep, None]


def _direction_set(sample, directions, seed):
    U = subset_normals(sample, directions, seed)
    if sample.shape[1] == 2 and sample.shape[0] <= PLANAR_EXACT_MAX_N:
        U = np.vstack([U, planar_breakpoint_directions(sample)])
    return U


def _as_points(x, name):
    X = np.asarray(x, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise ValueError(f"{name} must be a (n, d) array")
    return X


def outlyingness(points, sample, directions=DEFAULT_DIRECTIONS, seed=0, direction_set=None):
    """Largest standardized deviation ``|u^T x - Med| / MAD`` over the direction set.

    Median and unscaled median absolute deviation are taken over the projected
    sample. A direction with zero MAD contributes 0 where the point sits on the
    median and infinity elsewhere.

    The sup runs over ``directions`` hyperplane normals from
    :func:`subset_normals`, which keeps the result affine invariant for a fixed
    seed. In one dimension there is a single direction and the value is exact;
    small planar samples also get the breakpoint directions of
    :func:`planar_breakpoint_directions`, which make the sup exact there too.
    """
    Z = _as_points(sample, "sample")
    X = _as_points(points, "points")
    if Z.shape[0] < 2:
        raise EmptySample("projection depth needs at least two sample points")
    if X.shape[1] != Z.shape[1]:
        raise ValueError(f"points have dimension {X.shape[1]}, sample has {Z.shape[1]}")
    U = _direction_set(Z, directions, seed) if direction_set is None else direction_set
    proj = Z @ U.T
    med = np.median(proj, axis=0)
    mad = np.median(np.abs(proj - med), axis=0)
    dev = np.abs(X @ U.T - med)
    # treat dispersions at roundoff level as exactly zero
    floor = 1e-12 * np.maximum(np.abs(proj).max(axis=0), 1e-300)
    flat = mad <= floor
    ratio = np.empty_like(dev)
    ratio[:, ~flat] = dev[:, ~flat] / mad[~flat]
    ratio[:, flat] = np.where(dev[:, flat] <= floor[flat], 0.0, np.inf)
    return ratio.max(axis=1)


def projection_depth(point, sample, directions=DEFAULT_DIRECTIONS, seed=0):
    """Projection depth ``1 / (1 + outlyingness)`` of ``point`` (or of each row of ``point``).

    Examples
    --------
    >>> sample = np.array([1.0, 2.0, 3.0, 4.0, 10.0])
    >>> projection_depth(3.0, sample)
    1.0
    >>> projection_depth(4.0, sample)
    0.5
    """
    sample = _as_points(sample, "sample")
    p = np.asarray(point, dtype=float)
    single = p.ndim == 0 or (p.ndim == 1 and (sample.shape[1] > 1 or p.size == 1))
    pts = p.reshape(1, -1) if single else _as_points(p, "point")
    depth = 1.0 / (1.0 + outlyingness(pts, sample, directions, seed))
    return float(depth[0]) if single else depth


def depth_trim(vectors, alpha, directions=DEFAULT_DIRECTIONS, seed=0, return_depths=False):
    """Indices of sample members whose projection depth is at least ``alpha``.

    The deepest member is always kept. With ``return_depths`` the per-member
    depths are returned as well.
    """
    if not 0 <= alpha < 1:
        raise ValueError("alpha must lie in [0, 1)")
    Z = _as_points(vectors, "vectors")
    if Z.shape[0] == 0:
        raise EmptySample("nothing to trim")
    if Z.shape[0] == 1:
        depths = np.ones(1)
    else:
        depths = 1.0 / (1.0 + outlyingness(Z, Z, directions, seed))
    keep = depths >= alpha
    keep[np.argmax(depths)] = True
    idx = np.flatnonzero(keep)
    return (idx, depths) if return_depths else idx


def load_functional_csv(path):
    """Read a functional sample: first column time, one column per curve."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or len(rows[0]) < 2:
        raise GridMismatch(f"{path}: expected a header with a time column and at least one curve")
    header, body = rows[0], [r for r in rows[1:] if r]
    data = np.array([[float(v) for v in r] for r in body], dtype=float)
    if data.ndim != 2 or data.shape[1] != len(header):
        raise GridMismatch(f"{path}: ragged rows")
    return FunctionalSample(grid=data[:, 0], curves=data[:, 1:].T, ids=tuple(header[1:]))


def scores_to_csv(scores):
    lines = ["id,depth"]
    ids = scores.ids or tuple(str(i) for i in range(len(scores.values)))
    lines += [f"{i},{v!r}" for i, v in zip(ids, scores.values.tolist())]
    return "\n".join(lines) + "\n"
