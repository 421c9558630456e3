"""Describing how one shape turns into another with a thin-plate spline.

A square with a centre point is deformed by pushing the centre up. The spline
interpolates the landmarks exactly; its bending energy measures how far the
change is from an affine map. The deformed grid is written as SVG.
"""
import tempfile
from pathlib import Path

import numpy as np

from shapestress import tps_fit, tps_grid
from shapestress.tps import grid_to_svg

source = np.array([[0, 0], [1, 0], [1, 1], [0, 1], [0.5, 0.5]], float)
target = source.copy()
target[4] = [0.5, 0.75]

warp = tps_fit(source, target)
print("bending energy (local warp)", round(warp.bending_energy, 5))
print("affine part\n", np.round(warp.affine, 4))

shear = tps_fit(source, source @ np.array([[1.0, 0.0], [0.4, 1.0]]))
print("bending energy (pure shear) ", f"{shear.bending_energy:.1e}")

out = Path(tempfile.mkdtemp(prefix="tps-")) / "tps_demo.svg"
out.write_text(grid_to_svg(tps_grid(warp, rows=15, cols=15), title="centre pushed up"))
print("grid written to", out)
