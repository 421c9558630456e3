"""
Configuration preprocessing, Procrustes alignment and Procrustes averaging.

A configuration is a ``(k, m)`` array holding ``k`` landmarks in ``m``
dimensions. Alignment follows the row-vector convention used throughout the
package: a source configuration ``X`` is mapped onto a target as
``scale * X @ rotation + translation``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import helmert

from .errors import DegenerateConfiguration, DimensionMismatch, NoConvergence

__all__ = [
    "AlignmentResult",
    "MeanShapeResult",
    "as_configuration",
    "center",
    "centroid_size",
    "helmert_submatrix",
    "preshape",
    "standardize",
    "procrustes_align",
    "procrustes_distance",
    "gpa_mean",
    "gpa_objective",
    "svar",
    "canonical_rotation",
]


def as_configuration(config, name="config"):
    """Validate and return ``config`` as a float ``(k, m)`` array.

    Raises
    ------
    DimensionMismatch
        If the array is not two dimensional or has fewer than ``m + 1`` rows.
    ValueError
        If any entry is NaN or infinite.
    """
    X = np.asarray(config, dtype=float)
    if X.ndim != 2:
        raise DimensionMismatch(f"{name} must be a 2-d (k, m) array, got ndim={X.ndim}")
    k, m = X.shape
    if m < 1 or k < m + 1:
        raise DimensionMismatch(f"{name} needs k >= m + 1 landmarks, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError(f"{name} contains non-finite entries")
    return X


def center(config):
    """Subtract the column centroid from every landmark."""
    X = as_configuration(config)
    return X - X.mean(axis=0)


def centroid_size(config):
    """Frobenius norm of the centered configuration.

    Raises
    ------
    DegenerateConfiguration
        If all landmarks coincide.
    """
    X = as_configuration(config)
    size = float(np.linalg.norm(X - X.mean(axis=0)))
    if size <= _size_floor(X):
        raise DegenerateConfiguration("all landmarks coincide; centroid size is zero")
    return size


def _size_floor(X):
    # relative guard so constant configurations with large offsets are still caught
    return 1e-14 * max(1.0, float(np.abs(X).max()))


def helmert_submatrix(k):
    """The ``(k - 1, k)`` Helmert submatrix (full Helmert matrix minus its first row)."""
    return helmert(k, full=False)


def preshape(config):
    """Remove location with the Helmert submatrix and scale with centroid size.

    Returns a ``(k - 1, m)`` array of unit Frobenius norm.
    """
    X = as_configuration(config)
    size = centroid_size(X)
    return helmert_submatrix(X.shape[0]) @ X / size


def standardize(config):
    """Centered, unit-centroid-size version of ``config`` in landmark coordinates.

    This is the ``(k, m)`` counterpart of :func:`preshape`; the two are related
    by the isometry ``H.T @ preshape(X) == standardize(X)``.
    """
    X = center(config)
    return X / centroid_size(X)


@dataclass(frozen=True)
class AlignmentResult:
    """Similarity transform taking ``source`` as close as possible to ``target``.

    The fitted map is ``scale * source @ rotation + translation`` and
    ``residual`` is the Frobenius norm of what is left over.
    """

    rotation: np.ndarray
    translation: np.ndarray
    scale: float
    residual: float

    def apply(self, points):
        return self.scale * np.asarray(points, dtype=float) @ self.rotation + self.translation


def _orthogonal_factor(source_c, target_c):
    """Orthogonal ``A`` maximizing ``trace(A.T @ source_c.T @ target_c)``, and the singular values."""
    U, D, Vt = np.linalg.svd(source_c.T @ target_c)
    return U @ Vt, D


def procrustes_align(source, target, with_scale=False):
    """Solve the orthogonal Procrustes problem between two configurations.

    Minimizes ``||target - scale * source @ A - 1 t^T||_F`` over orthonormal
    ``A`` (reflections included), translation ``t`` and, when ``with_scale``
    is set, a positive ``scale``.

    Parameters
    ----------
    source, target : (k, m) array_like
        Configurations of corresponding landmarks.
    with_scale : bool, optional
        Fit the scale factor as well. Otherwise it is fixed at 1.

    Returns
    -------
    AlignmentResult

    Raises
    ------
    DimensionMismatch
        If the two configurations differ in shape.
    DegenerateConfiguration
        If either configuration has zero centroid size.

    Examples
    --------
    >>> X = np.array([[0., 0.], [1., 0.], [0., 2.]])
    >>> res = procrustes_align(X, 2 * X + 1, with_scale=True)
    >>> round(res.scale, 12), round(res.residual, 12)
    (2.0, 0.0)
    """
    X1 = as_configuration(source, "source")
    X2 = as_configuration(target, "target")
    if X1.shape != X2.shape:
        raise DimensionMismatch(f"source {X1.shape} and target {X2.shape} differ in shape")
    centroid_size(X1)
    centroid_size(X2)

    mean1 = X1.mean(axis=0)
    mean2 = X2.mean(axis=0)
    X1c = X1 - mean1
    X2c = X2 - mean2
    A, D = _orthogonal_factor(X1c, X2c)
    scale = float(D.sum() / np.sum(X1c**2)) if with_scale else 1.0
    translation = mean2 - scale * mean1 @ A
    residual = float(np.linalg.norm(X2c - scale * X1c @ A))
    return AlignmentResult(rotation=A, translation=translation, scale=scale, residual=residual)


def procrustes_distance(config1, config2):
    """Residual after aligning the standardized ``config1`` to standardized ``config2``."""
    return procrustes_align(standardize(config1), standardize(config2)).residual


def svar(aligned, mean):
    """Root mean squared Frobenius distance of aligned configurations to their mean.

    Raises
    ------
    DimensionMismatch
        If any configuration differs in shape from ``mean``.
    """
    M = np.asarray(mean, dtype=float)
    Xs = np.asarray(aligned, dtype=float)
    if Xs.ndim == 2:
        Xs = Xs[None]
    if Xs.ndim != 3 or Xs.shape[1:] != M.shape:
        raise DimensionMismatch(f"aligned configurations {Xs.shape} do not match mean {M.shape}")
    return float(np.sqrt(np.mean(np.sum((Xs - M) ** 2, axis=(1, 2)))))


def gpa_objective(aligned, mean=None):
    """Sum of squared Frobenius distances to ``mean`` (landmark-wise average by default)."""
    Xs = np.asarray(aligned, dtype=float)
    M = Xs.mean(axis=0) if mean is None else np.asarray(mean, dtype=float)
    return float(np.sum((Xs - M) ** 2))


def canonical_rotation(mean):
    """Rotation (det +1) putting ``mean`` into its principal-axis frame.

    The first principal axis becomes the first coordinate axis and the sign is
    chosen so that the first landmark has a nonnegative second coordinate.
    """
    M = np.asarray(mean, dtype=float)
    m = M.shape[1]
    _, vecs = np.linalg.eigh(M.T @ M)
    R = vecs[:, ::-1].copy()
    # deterministic sign: largest-magnitude component of each axis positive
    for j in range(m):
        if R[np.argmax(np.abs(R[:, j])), j] < 0:
            R[:, j] *= -1
    if np.linalg.det(R) < 0:
        R[:, -1] *= -1
    if m >= 2:
        second = (M @ R)[:, 1]
        # first landmark off the principal axis decides the half-turn
        off_axis = np.flatnonzero(np.abs(second) > 1e-12 * max(1.0, np.abs(M).max()))
        if off_axis.size and second[off_axis[0]] < 0:
            # half-turn in the plane of the first two axes keeps det = +1
            R[:, 0] *= -1
            R[:, 1] *= -1
    return R


@dataclass(frozen=True)
class MeanShapeResult:
    """Output of :func:`gpa_mean`.

    ``mean`` is the landmark-wise average of ``aligned`` and is only defined
    up to rotation; it is reported in the canonical frame of
    :func:`canonical_rotation`.
    """

    mean: np.ndarray
    aligned: np.ndarray
    svar: float
    objective: float
    iterations: int
    converged: bool
    history: tuple = field(default=())


def gpa_mean(configs, tol=1e-10, max_iter=100, standardize_inputs=True, canonicalize=True):
    """Generalized Procrustes average of a collection of configurations.

    Alternates between rotating every configuration onto the current reference
    and replacing the reference with the landmark-wise average, until the
    objective ``sum_l ||X_l A_l - M||_F^2`` drops by less than ``tol``.

    Parameters
    ----------
    configs : sequence of (k, m) array_like
        At least two configurations of identical shape.
    tol : float, optional
        Stop once one sweep lowers the objective by less than this.
    max_iter : int, optional
        Upper bound on sweeps. Reaching it emits :class:`NoConvergence` and
        returns the best iterate with ``converged=False``.
    standardize_inputs : bool, optional
        Center and scale every configuration to unit centroid size first
        (location and scale removed, so ``svar`` measures shape only).
        When false the inputs are only centered.
    canonicalize : bool, optional
        Rotate the result into the principal-axis frame.

    Returns
    -------
    MeanShapeResult
    """
    Xs = [as_configuration(c, f"configs[{i}]") for i, c in enumerate(configs)]
    if len(Xs) < 2:
        raise DimensionMismatch("gpa_mean needs at least two configurations")
    shape0 = Xs[0].shape
    for i, X in enumerate(Xs):
        if X.shape != shape0:
            raise DimensionMismatch(f"configs[{i}] has shape {X.shape}, expected {shape0}")
    if standardize_inputs:
        X = np.stack([standardize(c) for c in Xs])
    else:
        X = np.stack([c - c.mean(axis=0) for c in Xs])
        for c in X:
            centroid_size(c)

    reference = X[0] / np.linalg.norm(X[0])
    aligned = X.copy()
    history = []
    converged = False
    previous = np.inf
    iterations = 0
    for iterations in range(1, max_iter + 1):
        for l in range(len(X)):
            A, _ = _orthogonal_factor(X[l], reference)
            aligned[l] = X[l] @ A
        mean = aligned.mean(axis=0)
        objective = gpa_objective(aligned, mean)
        history.append(objective)
        if previous - objective < tol:
            converged = True
            break
        previous = objective
        # rescaling the reference leaves the optimal rotations unchanged
        reference = mean / np.linalg.norm(mean)

    if not converged:
        warnings.warn(
            f"GPA did not converge in {max_iter} iterations "
            f"(last decrease {history[-2] - history[-1] if len(history) > 1 else np.nan:.3g})",
            NoConvergence,
            stacklevel=2,
        )

    mean = aligned.mean(axis=0)
    if canonicalize:
        R = canonical_rotation(mean)
        mean = mean @ R
        aligned = aligned @ R
    objective = gpa_objective(aligned, mean)
    return MeanShapeResult(
        mean=mean,
        aligned=aligned,
        svar=svar(aligned, mean),
        objective=objective,
        iterations=iterations,
        converged=converged,
        history=tuple(history),
    )
