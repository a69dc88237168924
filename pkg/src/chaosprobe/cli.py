"""Command-line interface.

Exit codes: 0 success, 1 validation error, 2 runtime failure,
3 acceptance-threshold failure (``compare --check``).
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .analytic import GoeAnalyticParams, avg_G, plateau
from .characteristic import time_grid
from .diagnostics import diagnose
from .export import CurveTable, build_id, export_curve, load_curve, write_table
from .plotting import render_plot
from .runner import CheckpointError, EnsembleFailure, GoeModel, SpecError, run_ensemble, selector
from .multipartite import Total
from .runspec_io import dump_runspec, parse_runspec, preset_names

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME, EXIT_THRESHOLD = 0, 1, 2, 3

# compare --check thresholds
LOG_TOLERANCE = 0.15
PLATEAU_TOLERANCE = 0.20

log = logging.getLogger("chaosprobe")


def _outputs(prefix: Path, n: int, fmt: str) -> list[Path]:
    if n == 1:
        return [prefix.with_suffix(f".{fmt}")]
    return [prefix.with_name(f"{prefix.name}-{i}").with_suffix(f".{fmt}") for i in range(n)]


def _print_diag(label: str, times, G) -> None:
    try:
        d = diagnose(times, G)
    except ValueError as exc:
        print(f"{label}: diagnostics unavailable ({exc})")
        return
    print(f"{label}: plateau={d.plateau_estimate:.6g} dip_time={d.dip_time:.4g} "
          f"dip_depth_ratio={d.dip_depth_ratio:.4g} ramp_span_decades={d.ramp_span_decades:.3g} "
          f"has_dip={d.has_dip}")


def cmd_run(args) -> int:
    spec = parse_runspec(args.spec)
    if args.echo:
        print(dump_runspec(spec), end="")
    runs = spec.expand()
    paths = _outputs(Path(args.out), len(runs), args.format)
    series = []
    for k, (s, path) in enumerate(zip(runs, paths)):
        ck = None if args.checkpoint is None else f"{args.checkpoint}.{k}.json"
        stats = run_ensemble(s, parallelism=args.parallel, checkpoint_path=ck)
        export_curve(stats, path, args.format, spec=s)
        _print_diag(s.label or path.stem, stats.times, stats.mean)
        print(f"wrote {path}")
        series.append((s.label or path.stem, stats.times, stats.mean))
    if args.plot:
        render_plot(series, args.plot, title=spec.label or None)
        print(f"wrote {args.plot}")
    return EXIT_OK


def cmd_analytic(args) -> int:
    p = GoeAnalyticParams(args.dim, args.sigma, args.beta)
    t = time_grid(args.t_min, args.t_max, args.points)
    g = np.asarray(avg_G(t, p), dtype=float)
    meta = {"label": f"analytic GOE d={p.dim} sigma={p.sigma:g} beta={p.beta:g}", "master_seed": "",
            "spec_hash": "", "build_id": build_id(), "realizations": 0}
    path = write_table(CurveTable({"t": t, "analytic_G": g}, meta), args.out, args.format)
    print(f"plateau={plateau(p):.6g} t_plateau={p.t_plateau:.6g}")
    print(f"wrote {path}")
    return EXIT_OK


def compare_metrics(times, mc, analytic, p: GoeAnalyticParams) -> dict:
    """Agreement figures used by ``compare --check``: max |log10 MC - log10 analytic|
    for t >= dip time of the MC curve, and the relative plateau error."""
    d = diagnose(times, mc)
    past = np.asarray(times) >= d.dip_time
    dev = np.abs(np.log10(mc[past]) - np.log10(analytic[past]))
    target = plateau(p)
    return {"dip_time": d.dip_time, "max_log10_deviation": float(dev.max()),
            "plateau_estimate": d.plateau_estimate, "plateau_analytic": target,
            "plateau_rel_error": abs(d.plateau_estimate / target - 1)}


def cmd_compare(args) -> int:
    spec = parse_runspec(args.spec)
    m = spec.model
    if (spec.sweeps or not isinstance(m, GoeModel) or len(m.dims) != 1
            or not isinstance(selector(spec), Total) or m.convention != "element"):
        raise SpecError("compare needs a sweep-free single-GOE spec with observable total and element convention")
    p = GoeAnalyticParams(m.dims[0], m.sigma, spec.beta)
    stats = run_ensemble(spec, parallelism=args.parallel)
    analytic = np.asarray(avg_G(stats.times, p), dtype=float)
    path = Path(args.out).with_suffix(f".{args.format}")
    export_curve(stats, path, args.format, analytic=analytic, spec=spec)
    print(f"wrote {path}")
    metrics = compare_metrics(stats.times, stats.mean, analytic, p)
    print(json.dumps(metrics, indent=1))
    if args.plot:
        render_plot([("Monte Carlo", stats.times, stats.mean), ("analytic", stats.times, analytic)],
                    args.plot, title=spec.label or None)
        print(f"wrote {args.plot}")
    if args.check:
        ok = (metrics["max_log10_deviation"] <= args.log_tolerance
              and metrics["plateau_rel_error"] <= args.plateau_tolerance)
        print("check: " + ("PASS" if ok else "FAIL"))
        return EXIT_OK if ok else EXIT_THRESHOLD
    return EXIT_OK


def cmd_diagnose(args) -> int:
    table = load_curve(args.file)
    if args.column not in table.columns:
        raise SpecError(f"column {args.column!r} not in {args.file}; have {list(table.columns)}")
    d = diagnose(table.t, table.columns[args.column])
    print(json.dumps(asdict(d), indent=1))
    return EXIT_OK


def cmd_plot(args) -> int:
    series = []
    for f in args.files:
        table = load_curve(f)
        name = table.metadata.get("label") or Path(f).stem
        for col in ("mean_G", "analytic_G"):
            if col in table.columns:
                series.append((name if col == "mean_G" else f"{name} (analytic)", table.t, table.columns[col]))
    render_plot(series, args.out, title=args.title)
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_presets(args) -> int:
    if args.name:
        print(dump_runspec(parse_runspec(args.name)), end="")
    else:
        print("\n".join(preset_names()))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="chaosprobe", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"chaosprobe {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run an ensemble from a preset name, spec file or inline YAML")
    r.add_argument("spec")
    r.add_argument("-o", "--out", default="curve", help="output prefix (suffix added per sweep point)")
    r.add_argument("-f", "--format", choices=("csv", "json"), default="csv")
    r.add_argument("-j", "--parallel", type=int, default=1)
    r.add_argument("--checkpoint", help="checkpoint prefix; existing checkpoints are resumed")
    r.add_argument("--plot", help="also write an SVG overlay of all sweep points")
    r.add_argument("--echo", action="store_true", help="print the run spec with defaults filled in")
    r.set_defaults(func=cmd_run)

    a = sub.add_parser("analytic", help="GOE-averaged G(t) for X = H")
    a.add_argument("--dim", type=int, required=True)
    a.add_argument("--sigma", type=float, default=1.0)
    a.add_argument("--beta", type=float, default=0.0)
    a.add_argument("--t-min", type=float, default=1e-2)
    a.add_argument("--t-max", type=float, default=1e4)
    a.add_argument("--points", type=int, default=400)
    a.add_argument("-o", "--out", default="analytic.csv")
    a.add_argument("-f", "--format", choices=("csv", "json"), default=None)
    a.set_defaults(func=cmd_analytic)

    c = sub.add_parser("compare", help="run a single-GOE spec and overlay the analytic average")
    c.add_argument("spec")
    c.add_argument("-o", "--out", default="compare")
    c.add_argument("-f", "--format", choices=("csv", "json"), default="csv")
    c.add_argument("-j", "--parallel", type=int, default=1)
    c.add_argument("--plot")
    c.add_argument("--check", action="store_true", help="exit 3 if agreement thresholds are missed")
    c.add_argument("--log-tolerance", type=float, default=LOG_TOLERANCE)
    c.add_argument("--plateau-tolerance", type=float, default=PLATEAU_TOLERANCE)
    c.set_defaults(func=cmd_compare)

    d = sub.add_parser("diagnose", help="dip/ramp/plateau diagnostics of an exported curve")
    d.add_argument("file")
    d.add_argument("--column", default="mean_G")
    d.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("plot", help="log-log SVG of exported curves")
    p.add_argument("files", nargs="+")
    p.add_argument("-o", "--out", default="curves.svg")
    p.add_argument("--title")
    p.set_defaults(func=cmd_plot)

    s = sub.add_parser("presets", help="list presets, or echo one with defaults")
    s.add_argument("name", nargs="?")
    s.set_defaults(func=cmd_presets)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (SpecError, CheckpointError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (EnsembleFailure, OSError, ArithmeticError, RuntimeError) as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
