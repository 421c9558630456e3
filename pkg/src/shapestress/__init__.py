"""Shape-theoretic stress measures for panels of price/volume time series."""

from .depth import FunctionalSample, depth_trim, functional_median, mbd, projection_depth
from .errors import *  # noqa: F401,F403
from .ingest import PanelWindow, RawPanel, load_panel, rectangularize
from .pipeline import StressReport, analyze_windows, proposal1, proposal2, select_median, window_split
from .shape import (
    AlignmentResult,
    MeanShapeResult,
    center,
    centroid_size,
    gpa_mean,
    preshape,
    procrustes_align,
    procrustes_distance,
    svar,
)
from .simulate import SimScenario, evaluate, generate
from .tps import TpsDeformation, tps_eval, tps_fit, tps_grid, tps_kernel

__version__ = "0.1.0"
