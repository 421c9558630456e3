"""
Synthetic configuration samples and synthetic price/volume markets.

Random draws use numpy's ``default_rng`` (PCG64 bit generator) seeded from the
scenario seed; replications get independent child seeds from
``SeedSequence.spawn`` so results do not depend on execution order.
"""
from __future__ import annotations

import datetime as dt
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import pdist

from .ingest import PanelWindow
from .pipeline import proposal1
from .shape import procrustes_distance

__all__ = [
    "DEFAULT_BASE_SHAPE",
    "SimScenario",
    "SimulatedSample",
    "generate",
    "evaluate",
    "summary_to_csv",
    "business_days",
    "synthetic_market",
    "planted_median_panel",
    "panel_records",
]

# irregular 8-landmark outline; no symmetry so its shape has a unique alignment
DEFAULT_BASE_SHAPE = np.array(
    [
        [0.0, 0.0],
        [1.0, -0.3],
        [2.1, 0.1],
        [2.6, 1.0],
        [2.0, 1.9],
        [1.1, 2.3],
        [0.2, 1.8],
        [-0.4, 0.9],
    ]
)
FAMILIES = ("normal", "student", "uniform")


@dataclass(frozen=True)
class SimScenario:
    family: str = "normal"
    base_shape: np.ndarray = field(default_factory=lambda: DEFAULT_BASE_SHAPE.copy())
    noise_scale: float = 0.05
    sample_size: int = 100
    outlier_fraction: float = 0.0
    outlier_magnitude: float = 50.0
    seed: int = 0
    df: float = 3.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}, got {self.family!r}")
        if self.noise_scale < 0 or self.outlier_magnitude <= 0:
            raise ValueError("noise_scale must be >= 0 and outlier_magnitude > 0")
        if not 0 <= self.outlier_fraction < 1:
            raise ValueError("outlier_fraction must lie in [0, 1)")
        if self.sample_size < 1:
            raise ValueError("sample_size must be positive")
        object.__setattr__(self, "base_shape", np.asarray(self.base_shape, dtype=float))

    @property
    def extrapolated(self):
        """True outside the envelope the method was designed for (50-150 draws, <= 5% outliers)."""
        return self.outlier_fraction > 0.05 or not 50 <= self.sample_size <= 150

    @property
    def outlier_count(self):
        return math.floor(self.outlier_fraction * self.sample_size + 1e-9)


@dataclass(frozen=True)
class SimulatedSample:
    configs: np.ndarray
    outliers: np.ndarray
    scenario: SimScenario

    def __len__(self):
        return len(self.configs)

    def __iter__(self):
        return iter(self.configs)


def _noise(rng, scenario, size):
    if scenario.family == "normal":
        return rng.standard_normal(size)
    if scenario.family == "student":
        return rng.standard_t(scenario.df, size)
    return rng.uniform(-math.sqrt(3.0), math.sqrt(3.0), size)


def generate(scenario, rng=None):
    """Draw ``sample_size`` noisy copies of the base shape, some with a displaced landmark.

    Noise is independent across entries. Exactly ``floor(outlier_fraction *
    sample_size)`` configurations get one uniformly chosen landmark moved by
    ``outlier_magnitude`` times the base-shape diameter in a random direction.
    """
    if scenario.extrapolated:
        warnings.warn("scenario lies outside the 50-150 draws / 5% outlier design envelope", stacklevel=2)
    rng = np.random.default_rng(scenario.seed) if rng is None else rng
    base = scenario.base_shape
    k, m = base.shape
    n = scenario.sample_size
    configs = base + scenario.noise_scale * _noise(rng, scenario, (n, k, m))
    outliers = np.sort(rng.choice(n, size=scenario.outlier_count, replace=False))
    diameter = pdist(base).max()
    for i in outliers:
        direction = rng.standard_normal(m)
        direction /= np.linalg.norm(direction)
        configs[i, rng.integers(k)] += scenario.outlier_magnitude * diameter * direction
    return SimulatedSample(configs=configs, outliers=outliers, scenario=scenario)


def evaluate(scenario, replications=50, alphas=(0.0, 0.1), directions=1000):
    """Replicated accuracy of the trimmed Procrustes mean.

    Returns a dict keyed by alpha with the mean and standard deviation of the
    Procrustes distance between estimate and base shape, mean shape
    variability, mean retained fraction, and ``outliers_removed``: the share
    of contaminated replications in which every contaminated draw was trimmed.
    """
    children = np.random.SeedSequence(scenario.seed).spawn(replications)
    errors = {a: [] for a in alphas}
    svars = {a: [] for a in alphas}
    retained = {a: [] for a in alphas}
    removed = {a: [] for a in alphas}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        for child in children:
            sample = generate(scenario, np.random.default_rng(child))
            depth_seed = int(child.generate_state(1)[0])
            for a in alphas:
                est = proposal1(sample.configs, alpha=a, directions=directions, seed=depth_seed)
                errors[a].append(procrustes_distance(est.mean, scenario.base_shape))
                svars[a].append(est.svar)
                retained[a].append(est.retained_fraction)
                if len(sample.outliers):
                    removed[a].append(not np.isin(sample.outliers, est.retained).any())
    summary = {}
    for a in alphas:
        e = np.array(errors[a])
        summary[a] = {
            "mean_err": float(e.mean()),
            "sd_err": float(e.std(ddof=1)) if len(e) > 1 else 0.0,
            "mean_svar": float(np.mean(svars[a])),
            "mean_retained": float(np.mean(retained[a])),
            "outliers_removed": float(np.mean(removed[a])) if removed[a] else float("nan"),
            "replications": replications,
        }
    return summary


def summary_to_csv(summary):
    lines = ["alpha,mean_err,sd_err,mean_svar,mean_retained"]
    for a in sorted(summary):
        s = summary[a]
        lines.append(f"{a!r},{s['mean_err']!r},{s['sd_err']!r},{s['mean_svar']!r},{s['mean_retained']!r}")
    return "\n".join(lines) + "\n"


def business_days(start, count):
    """``count`` consecutive weekdays starting at ``start`` (inclusive if a weekday)."""
    day = start
    out = []
    while len(out) < count:
        if day.weekday() < 5:
            out.append(day)
        day += dt.timedelta(days=1)
    return tuple(out)


def synthetic_market(sectors=5, companies=5, dates=300, seed=0, start=dt.date(2005, 12, 29)):
    """Random-walk price and log-normal volume panels, one per sector.

    Companies share a market factor and a sector factor so that the sector
    medians co-move. Returns a list of :class:`~shapestress.ingest.PanelWindow`.
    """
    rng = np.random.default_rng(seed)
    days = business_days(start, dates)
    market = rng.standard_normal(dates) * 0.01
    panels = []
    for s in range(sectors):
        sector_f = rng.standard_normal(dates) * 0.008
        tickers = tuple(f"S{s}C{c}" for c in range(companies))
        idio = rng.standard_normal((companies, dates)) * 0.012
        drift = rng.normal(0.0, 4e-4, (companies, 1))
        log_p = np.cumsum(market + sector_f + idio + drift, axis=1) + np.log(rng.uniform(10, 200, (companies, 1)))
        vol_level = np.log(rng.uniform(1e4, 1e6, (companies, 1)))
        vol_cycle = 0.4 * np.sin(2 * np.pi * np.arange(dates) / dates * (1 + s % 3))
        log_v = vol_level + vol_cycle + rng.standard_normal((companies, dates)) * 0.3
        panels.append(PanelWindow(
            tickers=tickers,
            dates=days,
            price=np.round(np.exp(log_p), 4),
            volume=np.round(np.exp(log_v)),
            source=f"sector{s}",
        ))
    return panels


def planted_median_panel(name, companies=5, dates=61, start=dt.date(2006, 1, 2), amplitude=0.2):
    """Panel whose price/volume ratio curves fan out around a constant central company.

    Company ``j`` has relative ratio ``exp(a_j * s(t))`` with ``a_j`` running
    symmetrically through zero and ``s`` a sine wave, so the company with
    ``a_j = 0`` (the middle ticker, suffix ``MID``) is the exact pointwise
    median at every date.
    """
    if companies % 2 == 0:
        raise ValueError("use an odd number of companies so the centre is unique")
    t = np.arange(dates)
    s = np.sin(2 * np.pi * t / (dates - 1))
    half = companies // 2
    slopes = amplitude * np.arange(-half, half + 1)
    names = [f"{name}{j}" if a != 0 else f"{name}MID" for j, a in enumerate(slopes)]
    price = 50.0 * np.exp(np.outer(slopes, s))
    volume = np.full((companies, dates), 1e5)
    order = np.argsort(names)
    return PanelWindow(
        tickers=tuple(names[i] for i in order),
        dates=business_days(start, dates),
        price=price[order],
        volume=volume[order],
        source=name,
    )


def panel_records(panel):
    """Flatten a panel into ingest records (date-major order)."""
    return sorted(panel.to_records(), key=lambda r: (r.date, r.ticker))

