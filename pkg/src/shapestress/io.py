"""
File formats: configuration CSVs, run manifests and the stress artifact bundle.

Manifests are plain ``key = value`` lines; ``#`` starts a comment. A key may
repeat where a list is expected (``sector_file``), or take a comma separated
list (``sector_files``). Relative paths resolve against the manifest's folder.
"""
from __future__ import annotations

import csv
import os
import shutil
import tempfile
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ManifestError, SchemaError
from .tps import grid_to_csv, grid_to_svg, tps_grid

__all__ = [
    "read_configuration",
    "write_configuration",
    "configuration_to_csv",
    "parse_manifest",
    "RunManifest",
    "read_run_manifest",
    "staged_directory",
    "write_stress_artifacts",
]


def configuration_to_csv(config):
    X = np.asarray(config, dtype=float)
    header = ["x", "y"] if X.shape[1] == 2 else [f"x{j + 1}" for j in range(X.shape[1])]
    lines = [",".join(header)]
    lines += [",".join(repr(float(v)) for v in row) for row in X]
    return "\n".join(lines) + "\n"


def write_configuration(path, config):
    Path(path).write_text(configuration_to_csv(config), encoding="utf-8")


def read_configuration(path):
    """Load a configuration CSV (header ``x,y``; one landmark per row)."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows:
        raise SchemaError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if header != ["x", "y"] and header != [f"x{j + 1}" for j in range(len(header))]:
        raise SchemaError(f"{path}: header must be x,y")
    try:
        data = np.array([[float(v) for v in r] for r in rows[1:]], dtype=float)
    except ValueError as exc:
        raise SchemaError(f"{path}: {exc}") from None
    if data.ndim != 2 or data.shape[1] != len(header):
        raise SchemaError(f"{path}: every row needs {len(header)} values")
    return data


def parse_manifest(path):
    """Read a ``key = value`` file into a dict of lists of strings."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ManifestError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            out.setdefault(key.replace("-", "_").lower(), []).append(value)
    return out


def _single(values, key, cast, default):
    if key not in values:
        return default
    if len(values[key]) > 1:
        raise ManifestError(f"{key} given more than once")
    try:
        return cast(values[key][0])
    except ValueError:
        raise ManifestError(f"{key}: cannot parse {values[key][0]!r}") from None


@dataclass
class RunManifest:
    sector_files: list
    window_count: int = 7
    alpha: float = 0.1
    seed: int = 0
    output_dir: str = "stress_output"
    grid_rows: int = 20
    grid_cols: int = 20
    directions: int = 1000
    sectors: list = field(default_factory=list)

    def validate(self):
        if len(self.sector_files) < 2:
            raise ManifestError("at least two sector files are required")
        if self.window_count < 2:
            raise ManifestError("window_count must be at least 2")
        if not 0 <= self.alpha < 1:
            raise ManifestError("alpha must lie in [0, 1)")
        if self.grid_rows < 2 or self.grid_cols < 2:
            raise ManifestError("grid_rows and grid_cols must be at least 2")
        return self


def read_run_manifest(path):
    values = parse_manifest(path)
    base = Path(path).resolve().parent
    files = list(values.get("sector_file", []))
    for item in values.get("sector_files", []):
        files += [s.strip() for s in item.split(",") if s.strip()]
    files = [str(p if Path(p).is_absolute() else base / p) for p in files]
    output = _single(values, "output_dir", str, "stress_output")
    output = str(output if Path(output).is_absolute() else base / output)
    manifest = RunManifest(
        sector_files=files,
        window_count=_single(values, "window_count", int, 7),
        alpha=_single(values, "alpha", float, 0.1),
        seed=_single(values, "seed", int, 0),
        output_dir=output,
        grid_rows=_single(values, "grid_rows", int, 20),
        grid_cols=_single(values, "grid_cols", int, 20),
        directions=_single(values, "directions", int, 1000),
    )
    return manifest.validate()


@contextmanager
def staged_directory(target):
    """Yield a scratch directory whose files move into ``target`` only on success."""
    target = Path(target)
    target.parent.mkdir(parents=True, exist_ok=True)
    stage = Path(tempfile.mkdtemp(prefix=".staging-", dir=target.parent))
    try:
        yield stage
    except BaseException:
        shutil.rmtree(stage, ignore_errors=True)
        raise
    target.mkdir(exist_ok=True)
    for item in sorted(stage.iterdir()):
        os.replace(item, target / item.name)
    stage.rmdir()


def _iso(d):
    return d.isoformat() if hasattr(d, "isoformat") else str(d)


def write_stress_artifacts(report, directory, grid_rows=20, grid_cols=20, margin=0.1):
    """Write the report bundle into ``directory`` and return the file names.

    ``report.json``, ``mean_shape_NN.csv`` per window, ``svar.csv``,
    ``centroid_size.csv`` and a ``tps_NN_MM.svg`` / ``tps_NN_MM.csv`` grid
    pair per consecutive window pair.
    """
    directory = Path(directory)
    written = []

    def put(name, text):
        (directory / name).write_text(text, encoding="utf-8")
        written.append(name)

    put("report.json", report.to_json())
    width = max(2, len(str(len(report.windows))))
    for w in report.windows:
        put(f"mean_shape_{w.index + 1:0{width}d}.csv", configuration_to_csv(w.mean_shape))
    lines = ["window,first_date,last_date,svar,retained_fraction"]
    for w in report.windows:
        lines.append(f"{w.index + 1},{_iso(w.dates[0])},{_iso(w.dates[-1])},{w.svar!r},{w.retained_fraction!r}")
    put("svar.csv", "\n".join(lines) + "\n")
    lines = ["date,window,centroid_size"]
    for w in report.windows:
        for d, size in zip(w.dates, w.centroid_sizes.tolist()):
            lines.append(f"{_iso(d)},{w.index + 1},{size!r}")
    put("centroid_size.csv", "\n".join(lines) + "\n")
    for i, d in enumerate(report.deformations):
        grid = tps_grid(d, grid_rows, grid_cols, margin)
        stem = f"tps_{i + 1:0{width}d}_{i + 2:0{width}d}"
        put(stem + ".svg", grid_to_svg(grid, title=f"window {i + 1} to {i + 2}"))
        put(stem + ".csv", grid_to_csv(grid))
    return written
