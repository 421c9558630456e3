"""
Robust stress estimation for panels of price/volume series.

``proposal1`` is the depth-trimmed Procrustes mean of a sample of
configurations. ``proposal2`` picks one representative company per sector
(the modified-band-depth median of its relative price/volume ratio), turns
every trading day into a configuration with one landmark per sector, and
summarizes consecutive sub-periods by mean shape, shape variability, centroid
sizes and thin-plate spline deformations between neighbouring mean shapes.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .depth import DEFAULT_DIRECTIONS, FunctionalSample, depth_trim, mbd
from .errors import (
    DimensionMismatch,
    IncompletePanel,
    InsufficientLandmarks,
    SampleTooSmall,
    TooFewDates,
    TooFewSurvivors,
)
from .shape import MeanShapeResult, as_configuration, centroid_size, gpa_mean
from .tps import tps_fit

__all__ = [
    "RobustMeanResult",
    "MedianSelection",
    "WindowSummary",
    "StressReport",
    "vectorize",
    "proposal1",
    "relative_series",
    "select_median",
    "window_split",
    "build_configurations",
    "analyze_windows",
    "proposal2",
]

MIN_SAMPLE = 10
MIN_SURVIVORS = 3


def vectorize(config):
    """Column-stacked vector of a configuration: all first coordinates, then all second ones."""
    return np.asarray(config, dtype=float).ravel(order="F")


@dataclass(frozen=True)
class RobustMeanResult:
    """Depth-trimmed Procrustes mean together with the trimming bookkeeping."""

    gpa: MeanShapeResult
    retained: np.ndarray
    depths: np.ndarray
    sample_size: int

    @property
    def mean(self):
        return self.gpa.mean

    @property
    def svar(self):
        return self.gpa.svar

    @property
    def retained_fraction(self):
        return len(self.retained) / self.sample_size


def proposal1(configs, alpha=0.1, directions=DEFAULT_DIRECTIONS, seed=0, tol=1e-10, max_iter=100):
    """Procrustes mean and shape variability after projection-depth trimming.

    Every configuration is vectorized (see :func:`vectorize`), the projection
    depth of each vector within the vectorized sample is computed, and the
    configurations with depth below ``alpha`` are discarded before running
    :func:`~shapestress.shape.gpa_mean` on the survivors. ``alpha=0`` keeps
    everything and reduces to the ordinary estimator.

    Raises
    ------
    SampleTooSmall
        Fewer than 10 configurations.
    TooFewSurvivors
        Fewer than 3 configurations survive the trimming.
    """
    configs = list(configs)
    if len(configs) < MIN_SAMPLE:
        raise SampleTooSmall(f"proposal1 needs at least {MIN_SAMPLE} configurations, got {len(configs)}")
    Xs = np.stack([as_configuration(c, f"configs[{i}]") for i, c in enumerate(configs)])
    Z = np.stack([vectorize(X) for X in Xs])
    retained, depths = depth_trim(Z, alpha, directions=directions, seed=seed, return_depths=True)
    if len(retained) < MIN_SURVIVORS:
        raise TooFewSurvivors(
            f"only {len(retained)} of {len(Xs)} configurations have depth >= {alpha}; lower alpha"
        )
    result = gpa_mean(Xs[retained], tol=tol, max_iter=max_iter)
    return RobustMeanResult(gpa=result, retained=retained, depths=depths, sample_size=len(Xs))


def relative_series(panel):
    """Median-normalized price, volume and their ratio, each ``(tickers, dates)``.

    Medians are taken per ticker over all dates of ``panel``.
    """
    price = np.asarray(panel.price, dtype=float)
    volume = np.asarray(panel.volume, dtype=float)
    rel_price = price / np.median(price, axis=1, keepdims=True)
    rel_volume = volume / np.median(volume, axis=1, keepdims=True)
    if not np.all(np.isfinite(rel_volume)) or np.any(rel_volume <= 0):
        raise IncompletePanel(f"{panel.source or 'panel'}: volumes must be positive to form relative series")
    return rel_price, rel_volume, rel_price / rel_volume


@dataclass(frozen=True)
class MedianSelection:
    """The representative company of one sector."""

    sector: str
    ticker: str
    index: int
    scores: np.ndarray
    tied: tuple

    def to_dict(self, tickers):
        return {
            "sector": self.sector,
            "ticker": self.ticker,
            "tied": [tickers[i] for i in self.tied],
            "mbd": dict(zip(tickers, self.scores.tolist())),
        }


def select_median(panel, sector=None):
    """Company whose price/volume ratio curve has maximal modified band depth.

    If several companies tie for the maximum, the pointwise average of their
    curves is formed and the tied company closest to it in squared deviation
    wins; any remaining tie goes to the lexicographically smallest ticker.
    """
    if len(panel.tickers) < 2:
        raise IncompletePanel(f"{panel.source or 'panel'}: need at least two companies for a median")
    _, _, ratio = relative_series(panel)
    sample = FunctionalSample.from_curves(ratio, ids=panel.tickers)
    scores = mbd(sample).values
    tied = np.flatnonzero(scores >= scores.max() - 1e-12)
    if len(tied) == 1:
        best = int(tied[0])
    else:
        center = ratio[tied].mean(axis=0)
        dist = np.sum((ratio[tied] - center) ** 2, axis=1)
        closest = tied[dist <= dist.min() * (1 + 1e-12) + 1e-300]
        best = int(min(closest, key=lambda i: panel.tickers[i]))
    return MedianSelection(
        sector=sector if sector is not None else panel.source,
        ticker=panel.tickers[best],
        index=best,
        scores=scores,
        tied=tuple(int(i) for i in tied),
    )


def window_split(dates, window_count):
    """Split ``dates`` (a sequence or a count) into contiguous, near-equal windows.

    Returns ``(start, stop)`` index pairs. Lengths differ by at most one and
    the earlier windows take the extra dates.

    >>> window_split(10, 3)
    [(0, 4), (4, 7), (7, 10)]
    """
    n = dates if isinstance(dates, (int, np.integer)) else len(dates)
    if window_count < 1:
        raise ValueError("window_count must be positive")
    if n < window_count:
        raise TooFewDates(f"{n} dates cannot fill {window_count} windows")
    base, extra = divmod(n, window_count)
    bounds, start = [], 0
    for w in range(window_count):
        stop = start + base + (1 if w < extra else 0)
        bounds.append((start, stop))
        start = stop
    return bounds


def build_configurations(panels, selections):
    """One ``(k, 2)`` configuration per date from the selected companies.

    Landmark ``j`` is sector ``j``'s representative company with coordinates
    (relative price, relative volume).
    """
    coords = []
    for panel, sel in zip(panels, selections):
        rel_price, rel_volume, _ = relative_series(panel)
        coords.append(np.column_stack([rel_price[sel.index], rel_volume[sel.index]]))
    return np.stack(coords, axis=1)


@dataclass(frozen=True)
class WindowSummary:
    index: int
    start: int
    stop: int
    dates: tuple
    mean_shape: np.ndarray
    svar: float
    centroid_sizes: np.ndarray
    retained: np.ndarray
    retained_fraction: float
    iterations: int
    converged: bool

    def to_dict(self):
        return {
            "index": self.index,
            "start": self.start,
            "stop": self.stop,
            "first_date": _iso(self.dates[0]),
            "last_date": _iso(self.dates[-1]),
            "mean_shape": self.mean_shape.tolist(),
            "svar": self.svar,
            "centroid_sizes": self.centroid_sizes.tolist(),
            "retained_fraction": self.retained_fraction,
            "retained": self.retained.tolist(),
            "iterations": self.iterations,
            "converged": self.converged,
        }


@dataclass(frozen=True)
class StressReport:
    """Windowed mean shapes, their variability and the deformations between them."""

    windows: list
    deformations: list
    landmarks: tuple = ()
    medians: list = field(default_factory=list)
    dates: tuple = ()
    parameters: dict = field(default_factory=dict)

    @property
    def svar_series(self):
        return np.array([w.svar for w in self.windows])

    @property
    def centroid_size_series(self):
        return np.concatenate([w.centroid_sizes for w in self.windows])

    def to_dict(self):
        return {
            "parameters": self.parameters,
            "landmarks": list(self.landmarks),
            "medians": self.medians,
            "windows": [w.to_dict() for w in self.windows],
            "deformations": [d.to_dict() for d in self.deformations],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _iso(d):
    return d.isoformat() if hasattr(d, "isoformat") else str(d)


def analyze_windows(configs, window_count, dates=None, alpha=0.1, directions=DEFAULT_DIRECTIONS, seed=0,
                    tol=1e-10, max_iter=100, landmarks=()):
    """Stress summaries for consecutive windows of a configuration series.

    Each window gets a depth-trimmed Procrustes mean (canonical frame),
    its shape variability and the centroid size of every configuration in it;
    consecutive mean shapes are linked by thin-plate spline deformations.
    """
    X = np.asarray(configs, dtype=float)
    if X.ndim != 3:
        raise DimensionMismatch("configs must be an (n_dates, k, m) array")
    if X.shape[1] < 4 and window_count > 1:
        raise InsufficientLandmarks(
            f"deformations between windows need at least 4 landmarks, got {X.shape[1]}"
        )
    if dates is None:
        dates = tuple(range(len(X)))
    windows = []
    for w, (start, stop) in enumerate(window_split(len(X), window_count)):
        robust = proposal1(X[start:stop], alpha=alpha, directions=directions, seed=seed, tol=tol,
                           max_iter=max_iter)
        sizes = np.array([centroid_size(c) for c in X[start:stop]])
        windows.append(WindowSummary(
            index=w,
            start=start,
            stop=stop,
            dates=tuple(dates[start:stop]),
            mean_shape=robust.mean,
            svar=robust.svar,
            centroid_sizes=sizes,
            retained=robust.retained,
            retained_fraction=robust.retained_fraction,
            iterations=robust.gpa.iterations,
            converged=robust.gpa.converged,
        ))
    deformations = [
        tps_fit(a.mean_shape, b.mean_shape, raw_input=False) for a, b in zip(windows, windows[1:])
    ]
    return StressReport(
        windows=windows,
        deformations=deformations,
        landmarks=tuple(landmarks),
        dates=tuple(dates),
        parameters={"window_count": window_count, "alpha": alpha, "directions": directions, "seed": seed},
    )


def proposal2(panels, window_count=7, alpha=0.1, directions=DEFAULT_DIRECTIONS, seed=0, sectors=None,
              tol=1e-10, max_iter=100):
    """Windowed stress analysis of several sector panels.

    Parameters
    ----------
    panels : sequence of PanelWindow
        One rectangular panel per sector, all on the same dates.
    window_count : int
        Number of consecutive sub-periods.
    alpha : float
        Projection-depth trimming threshold inside each window; 0 disables it.
    sectors : sequence of str, optional
        Sector labels; default to the panel sources.

    Returns
    -------
    StressReport
    """
    panels = list(panels)
    if len(panels) < 2:
        raise IncompletePanel("proposal2 needs at least two sector panels")
    if window_count < 2:
        raise ValueError("window_count must be at least 2")
    dates = panels[0].dates
    for p in panels[1:]:
        if tuple(p.dates) != tuple(dates):
            raise IncompletePanel(f"{p.source or 'panel'} does not cover the same dates; rectangularize first")
    if sectors is None:
        sectors = [p.source or f"sector{i}" for i, p in enumerate(panels)]
    selections = [select_median(p, s) for p, s in zip(panels, sectors)]
    configs = build_configurations(panels, selections)
    report = analyze_windows(
        configs, window_count, dates=dates, alpha=alpha, directions=directions, seed=seed, tol=tol,
        max_iter=max_iter, landmarks=[f"{s.sector}:{s.ticker}" for s in selections],
    )
    medians = [s.to_dict(list(p.tickers)) for s, p in zip(selections, panels)]
    return StressReport(
        windows=report.windows,
        deformations=report.deformations,
        landmarks=report.landmarks,
        medians=medians,
        dates=report.dates,
        parameters=report.parameters,
    )
