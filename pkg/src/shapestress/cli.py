"""Command line entry point: ``shapestress <subcommand> ...``."""
from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import errors
from .depth import DepthScores, load_functional_csv, mbd, projection_depth, scores_to_csv
from .ingest import load_panel, rectangularize, rejects_to_csv
from .io import (
    configuration_to_csv,
    parse_manifest,
    read_configuration,
    read_run_manifest,
    staged_directory,
    write_stress_artifacts,
)
from .pipeline import proposal2
from .shape import gpa_mean, procrustes_align
from .simulate import DEFAULT_BASE_SHAPE, SimScenario, evaluate, generate, summary_to_csv
from .tps import grid_to_csv, grid_to_svg, tps_fit, tps_grid

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_NOT_FOUND = 3
EXIT_INPUT = 4
EXIT_DATA = 5
EXIT_GEOMETRY = 6

EXIT_CODES = [
    (FileNotFoundError, EXIT_NOT_FOUND),
    ((errors.ManifestError,), EXIT_USAGE),
    ((errors.SchemaError, errors.ParseError, errors.DuplicateRecord, errors.GridMismatch), EXIT_INPUT),
    (
        (errors.EmptyIntersection, errors.IncompletePanel, errors.TooFewDates, errors.TooFewSurvivors,
         errors.SampleTooSmall, errors.EmptySample),
        EXIT_DATA,
    ),
    (
        (errors.DegenerateConfiguration, errors.CollinearLandmarks, errors.DuplicateLandmarks,
         errors.InsufficientLandmarks, errors.DimensionMismatch),
        EXIT_GEOMETRY,
    ),
    (ValueError, EXIT_USAGE),
]

EPILOG = """\
exit codes:
  0  success
  1  unexpected internal error
  2  invalid parameter or manifest
  3  input file not found
  4  malformed input file (schema, parse, duplicate record)
  5  unusable data (empty date intersection, too few dates or survivors)
  6  degenerate geometry (coincident, collinear or too few landmarks)
"""


class UsageError(errors.ShapeStressError):
    pass


def _emit(text, args, name):
    """Write ``text`` to ``--output`` (file or directory) or to stdout."""
    if args.output:
        out = Path(args.output)
        if out.suffix == "":
            with staged_directory(out) as stage:
                (stage / name).write_text(text, encoding="utf-8")
        else:
            out.parent.mkdir(parents=True, exist_ok=True)
            with staged_directory(out.parent) as stage:
                (stage / out.name).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _info(args, message):
    if not args.quiet:
        print(message, file=sys.stderr)


def cmd_stress(args):
    if not args.manifest:
        raise UsageError("stress needs a manifest file")
    manifest = read_run_manifest(args.manifest)
    if args.seed is not None:
        manifest.seed = args.seed
    if args.output:
        manifest.output_dir = args.output
    for f in manifest.sector_files:
        if not Path(f).exists():
            raise FileNotFoundError(f"sector file not found: {f}")
    raw = [load_panel(f) for f in manifest.sector_files]
    rect = rectangularize(raw)
    sectors = [Path(f).stem for f in manifest.sector_files]
    report = proposal2(
        rect.panels,
        window_count=manifest.window_count,
        alpha=manifest.alpha,
        directions=manifest.directions,
        seed=manifest.seed,
        sectors=sectors,
    )
    with staged_directory(manifest.output_dir) as stage:
        written = write_stress_artifacts(report, stage, manifest.grid_rows, manifest.grid_cols)
    for name, count in rect.dropped_counts.items():
        if count:
            _info(args, f"dropped {count} dates ({name})")
    _info(args, f"wrote {len(written)} files to {manifest.output_dir}")
    return EXIT_OK


def cmd_depth(args):
    sample = load_functional_csv(args.input)
    if args.method == "mbd":
        scores = mbd(sample)
    else:
        # each curve column is one point in R^G
        values = projection_depth(sample.curves, sample.curves, directions=args.directions,
                                  seed=args.seed or 0)
        scores = DepthScores(values=np.atleast_1d(values), method="projection", ids=sample.ids)
    _emit(scores_to_csv(scores), args, "depth.csv")
    return EXIT_OK


def cmd_align(args):
    res = procrustes_align(read_configuration(args.source), read_configuration(args.target),
                           with_scale=args.scale)
    payload = {
        "rotation": res.rotation.tolist(),
        "translation": res.translation.tolist(),
        "scale": res.scale,
        "residual": res.residual,
    }
    _emit(json.dumps(payload, indent=2) + "\n", args, "alignment.json")
    return EXIT_OK


def cmd_gpa(args):
    configs = [read_configuration(p) for p in args.inputs]
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", errors.NoConvergence)
        res = gpa_mean(configs, tol=args.tol, max_iter=args.max_iter, standardize_inputs=not args.keep_scale)
    for w in caught:
        _info(args, f"warning: {w.message}")
    summary = {"svar": res.svar, "objective": res.objective, "iterations": res.iterations,
               "converged": res.converged}
    if args.output:
        with staged_directory(args.output) as stage:
            (stage / "mean_shape.csv").write_text(configuration_to_csv(res.mean), encoding="utf-8")
            width = max(3, len(str(len(configs))))
            for i, X in enumerate(res.aligned):
                (stage / f"aligned_{i:0{width}d}.csv").write_text(configuration_to_csv(X), encoding="utf-8")
            (stage / "summary.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    else:
        sys.stdout.write(configuration_to_csv(res.mean))
        _info(args, json.dumps(summary))
    return EXIT_OK


def cmd_tps(args):
    deformation = tps_fit(read_configuration(args.source), read_configuration(args.target))
    grid = tps_grid(deformation, args.rows, args.cols, args.margin)
    summary = {"bending_energy": deformation.bending_energy, **deformation.to_dict()}
    if args.output:
        with staged_directory(args.output) as stage:
            (stage / "grid.csv").write_text(grid_to_csv(grid), encoding="utf-8")
            (stage / "grid.svg").write_text(grid_to_svg(grid), encoding="utf-8")
            (stage / "deformation.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    else:
        sys.stdout.write(grid_to_svg(grid) if args.svg else grid_to_csv(grid))
        _info(args, f"bending energy {deformation.bending_energy!r}")
    return EXIT_OK


def _scenario_from_args(args):
    values = parse_manifest(args.manifest) if args.manifest else {}

    def get(key, cast, default):
        if getattr(args, key, None) is not None:
            return getattr(args, key)
        return cast(values[key][0]) if key in values else default

    base = DEFAULT_BASE_SHAPE
    base_path = values.get("base_shape", [None])[0]
    if base_path:
        p = Path(base_path)
        base = read_configuration(p if p.is_absolute() else Path(args.manifest).resolve().parent / p)
    seed = args.seed if args.seed is not None else int(values.get("seed", ["0"])[0])
    return SimScenario(
        family=get("family", str, "normal"),
        base_shape=base,
        noise_scale=get("noise_scale", float, 0.05),
        sample_size=get("sample_size", int, 100),
        outlier_fraction=get("outlier_fraction", float, 0.0),
        outlier_magnitude=get("outlier_magnitude", float, 50.0),
        seed=seed,
        df=get("df", float, 3.0),
    ), get("replications", int, 20)


def cmd_simulate(args):
    scenario, replications = _scenario_from_args(args)
    if replications < 1:
        raise UsageError("replications must be at least 1")
    if args.sample_only:
        sample = generate(scenario)
        if not args.output:
            raise UsageError("--sample-only needs --output DIR")
        width = max(3, len(str(len(sample))))
        with staged_directory(args.output) as stage:
            for i, X in enumerate(sample.configs):
                (stage / f"config_{i:0{width}d}.csv").write_text(configuration_to_csv(X), encoding="utf-8")
            (stage / "outliers.csv").write_text(
                "index\n" + "".join(f"{i}\n" for i in sample.outliers.tolist()), encoding="utf-8"
            )
        return EXIT_OK
    summary = evaluate(scenario, replications, directions=args.directions)
    _emit(summary_to_csv(summary), args, "summary.csv")
    return EXIT_OK


def cmd_ingest_check(args):
    panels = []
    for path in args.inputs:
        panel = load_panel(path)
        panels.append(panel)
        _info(args, f"{path}: {len(panel.records)} records, {len(panel.rejects)} rejected")
    rect = rectangularize(panels)
    report = {
        "files": [
            {"path": p.source, "records": len(p.records), "rejects": [{"row": r, "reason": why} for r, why in p.rejects]}
            for p in panels
        ],
        "dates_kept": len(rect.panels[0].dates),
        "dropped": rect.dropped_counts,
    }
    if args.output:
        with staged_directory(args.output) as stage:
            (stage / "ingest_report.json").write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
            for i, p in enumerate(panels):
                (stage / f"rejects_{i:02d}_{Path(p.source).stem}.csv").write_text(rejects_to_csv(p),
                                                                                 encoding="utf-8")
    else:
        sys.stdout.write(json.dumps(report, indent=2) + "\n")
    return EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="random seed (direction sampling, simulation)")
    common.add_argument("--output", "-o", default=None, help="output file or directory")
    common.add_argument("--quiet", "-q", action="store_true", help="suppress messages on stderr")

    parser = argparse.ArgumentParser(
        prog="shapestress",
        description="Shape-based stress measures for price/volume panels.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stress", parents=[common], help="full windowed analysis from a run manifest",
                       epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("manifest")
    p.set_defaults(func=cmd_stress)

    p = sub.add_parser("depth", parents=[common], help="depth of every curve in a functional CSV")
    p.add_argument("input")
    p.add_argument("--method", choices=["mbd", "projection"], default="mbd")
    p.add_argument("--directions", type=int, default=1000)
    p.set_defaults(func=cmd_depth)

    p = sub.add_parser("align", parents=[common], help="Procrustes alignment of two configurations")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("--scale", action="store_true", help="fit a scale factor too")
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("gpa", parents=[common], help="generalized Procrustes mean of configurations")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--keep-scale", action="store_true", help="center only; do not rescale to unit size")
    p.set_defaults(func=cmd_gpa)

    p = sub.add_parser("tps", parents=[common], help="thin-plate spline deformation grid")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("--rows", type=int, default=20)
    p.add_argument("--cols", type=int, default=20)
    p.add_argument("--margin", type=float, default=0.1)
    p.add_argument("--svg", action="store_true", help="stream SVG instead of CSV to stdout")
    p.set_defaults(func=cmd_tps)

    p = sub.add_parser("simulate", parents=[common], help="robustness study of the trimmed mean shape")
    p.add_argument("--manifest", default=None, help="scenario file (key = value)")
    p.add_argument("--family", choices=["normal", "student", "uniform"], default=None)
    p.add_argument("--df", type=float, default=None)
    p.add_argument("--noise-scale", dest="noise_scale", type=float, default=None)
    p.add_argument("--sample-size", dest="sample_size", type=int, default=None)
    p.add_argument("--outlier-fraction", dest="outlier_fraction", type=float, default=None)
    p.add_argument("--outlier-magnitude", dest="outlier_magnitude", type=float, default=None)
    p.add_argument("--replications", type=int, default=None)
    p.add_argument("--directions", type=int, default=1000)
    p.add_argument("--sample-only", action="store_true", help="write one generated sample instead")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("ingest-check", parents=[common], help="validate sector CSVs and report dropped dates")
    p.add_argument("inputs", nargs="+")
    p.set_defaults(func=cmd_ingest_check)
    return parser


def _exit_code(exc):
    for types, code in EXIT_CODES:
        if isinstance(exc, types):
            return code
    return EXIT_INTERNAL


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # mapped to documented exit codes
        code = EXIT_USAGE if isinstance(exc, UsageError) else _exit_code(exc)
        if not args.quiet:
            print(f"shapestress {args.command}: {exc}", file=sys.stderr)
        payload = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
        sys.stdout.write(json.dumps(payload) + "\n")
        return code


if __name__ == "__main__":
    sys.exit(main())
