"""Command line front end.

Five subcommands share one JSON config document: `curves` tabulates the
conditional median/mean and two prediction bands over a time grid,
`predict` prints quantiles and bands at a single conditioning point,
`simulate` writes a component/system sample, `coverage` runs the plug-in
interval experiment, and `fitqr` fits quantile-regression lines to a
sample file.  Scalar settings (seed, output path) can be overridden on
the command line; everything is deterministic given (config, seed).

Grid evaluation may be spread over threads (PREDICT_THREADS, 0 = one per
CPU); chunks are reassembled in grid order, so the thread count never
changes the output.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .config import grid_from, load_config, point_from, predictor_from, structure_from
from .copula import copula_from_config
from .errors import ConfigError, SysPredictError
from .marginal import marginal_from_config
from .montecarlo import coverage_table, simulate
from .qr import detect_crossings, fit_lqr, fit_ols, load_xy

CURVE_COLUMNS = ("t", "median", "mean", "lower_50", "upper_50", "lower_90", "upper_90")
COVERAGE_COLUMNS = ("k", "replications", "coverage50", "se50", "coverage90", "se90")
FITQR_COLUMNS = ("tau", "intercept", "slope", "loss")


def _fmt(value):
    return f"{float(value):.9g}"


def thread_count(env=None):
    """Worker count from PREDICT_THREADS (0 or unset: one per CPU)."""
    raw = (env if env is not None else os.environ.get("PREDICT_THREADS", "0")).strip()
    try:
        threads = int(raw)
    except ValueError:
        raise ConfigError(f"PREDICT_THREADS must be an integer, got {raw!r}") from None
    if threads < 0:
        raise ConfigError(f"PREDICT_THREADS must be >= 0, got {threads}")
    return threads if threads else (os.cpu_count() or 1)


def _over_grid(fn, grid, threads):
    """Evaluate a vectorized fn over the grid, chunked across threads.

    Chunks are mapped in submission order, so the result is identical to
    fn(grid) regardless of scheduling.
    """
    workers = min(int(threads), grid.size)
    if workers <= 1:
        return np.asarray(fn(grid), dtype=float)
    chunks = np.array_split(grid, workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda g: np.asarray(fn(g), dtype=float), chunks))
    return np.concatenate(parts)


def _write_csv(path, header, rows):
    # RFC 4180: csv defaults give CRLF line endings and minimal quoting
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([cell if isinstance(cell, str) else _fmt(cell) for cell in row])


def _resolve_out(args, cfg):
    out = args.out if args.out is not None else cfg.get("out")
    if out is None:
        raise ConfigError("an output path is required (give --out or config 'out')")
    return out


def _resolve_seed(args, cfg):
    seed = args.seed if args.seed is not None else cfg.get("seed")
    if seed is None:
        raise ConfigError("a seed is required (give --seed or config 'seed')")
    return int(seed)


def cmd_curves(args, cfg):
    mode = cfg.get("mode", "strict")
    if mode == "two_failures":
        raise ConfigError("curves needs a single conditioning time; "
                          "use predict for two_failures mode")
    predictor = predictor_from(cfg)
    grid = grid_from(cfg)
    kind = cfg.get("band_kind", "centered")
    out = _resolve_out(args, cfg)
    threads = thread_count()
    band50 = predictor.band(kind, 0.5)
    band90 = predictor.band(kind, 0.9)
    columns = [
        grid,
        _over_grid(predictor.median, grid, threads),
        _over_grid(predictor.mean, grid, threads),
        _over_grid(band50.lower, grid, threads),
        _over_grid(band50.upper, grid, threads),
        _over_grid(band90.lower, grid, threads),
        _over_grid(band90.upper, grid, threads),
    ]
    _write_csv(out, CURVE_COLUMNS, zip(*columns))
    print("command: curves")
    print(f"mode: {mode}")
    print(f"band_kind: {kind}")
    print(f"rows: {grid.size}")
    print(f"out: {out}")
    return 0


def cmd_predict(args, cfg):
    predictor = predictor_from(cfg)
    mode = cfg["mode"]
    cond = point_from(cfg, mode)
    levels = cfg.get("quantiles", [0.5])
    kind = cfg.get("band_kind", "centered")
    print("command: predict")
    print(f"mode: {mode}")
    print("point: " + " ".join(f"t{i + 1}={_fmt(c)}" for i, c in enumerate(cond)))
    for w in levels:
        print(f"quantile {_fmt(w)}: {_fmt(predictor.quantile(w, *cond))}")
    for level in (0.5, 0.9):
        band = predictor.band(kind, level)
        lo, hi = band.lower(*cond), band.upper(*cond)
        print(f"band {kind} {_fmt(level)}: [{_fmt(lo)}, {_fmt(hi)}]")
    print(f"mean: {_fmt(predictor.mean(*cond))}")
    return 0


def cmd_simulate(args, cfg):
    copula = copula_from_config(cfg.get("copula") or _missing("copula"))
    marginal = marginal_from_config(cfg.get("marginal") or _missing("marginal"))
    first = structure_from(cfg, "first")
    system = structure_from(cfg, "system")
    second = (structure_from(cfg, "second")
              if "second" in cfg.get("structures", {}) else None)
    if "size" not in cfg:
        raise ConfigError("config 'size' is required for simulate")
    seed = _resolve_seed(args, cfg)
    out = _resolve_out(args, cfg)
    sample = simulate(first, system, copula, marginal, cfg["size"], seed, second=second)
    sample.to_csv(out)
    print("command: simulate")
    print(f"seed: {seed}")
    print(f"size: {sample.size}")
    print(f"out: {out}")
    return 0


def cmd_coverage(args, cfg):
    section = cfg.get("coverage")
    if section is None:
        raise ConfigError("config section 'coverage' is required for coverage")
    seed = _resolve_seed(args, cfg)
    out = _resolve_out(args, cfg)
    kwargs = {"score": section.get("score", "same"),
              "exact_mu": section.get("exact_mu", False)}
    if "eval_draws" in section:
        kwargs["eval_draws"] = section["eval_draws"]
    reports = coverage_table(section["k"], section["replications"], seed, **kwargs)
    rows = [
        (str(r.k), str(r.replications), r.coverage50, r.se50, r.coverage90, r.se90)
        for r in reports
    ]
    _write_csv(out, COVERAGE_COLUMNS, rows)
    print("command: coverage")
    print(f"seed: {seed}")
    print(f"k: {','.join(str(r.k) for r in reports)}")
    print(f"replications: {section['replications']}")
    print(f"out: {out}")
    return 0


def cmd_fitqr(args, cfg):
    section = cfg.get("fitqr")
    if section is None:
        raise ConfigError("config section 'fitqr' is required for fitqr")
    out = _resolve_out(args, cfg)
    x_col = section.get("x", "t1")
    y_col = section.get("y", "t")
    pairs = load_xy(section["sample"], x_col=x_col, y_col=y_col)
    fits = [fit_lqr(pairs, tau) for tau in section["taus"]]
    rows = [(_fmt(f.tau), f.intercept, f.slope, f.loss) for f in fits]
    if section.get("ols", False):
        ols = fit_ols(pairs)
        rows.append(("", ols.intercept, ols.slope, ols.loss))
    _write_csv(out, FITQR_COLUMNS, rows)
    crossings = detect_crossings(fits, float(pairs[:, 0].min()), float(pairs[:, 0].max()))
    print("command: fitqr")
    print(f"sample: {section['sample']}")
    print(f"rows: {pairs.shape[0]}")
    if crossings:
        fmt = ", ".join(f"({_fmt(a)}, {_fmt(b)})" for a, b in crossings)
        print(f"crossings: {fmt}")
    else:
        print("crossings: none")
    print(f"out: {out}")
    return 0


def _missing(name):
    raise ConfigError(f"config section {name!r} is required for this command")


_COMMANDS = {
    "curves": cmd_curves,
    "predict": cmd_predict,
    "simulate": cmd_simulate,
    "coverage": cmd_coverage,
    "fitqr": cmd_fitqr,
}


def _build_parser():
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", required=True, help="path to the JSON run config")
    shared.add_argument("--seed", type=int, default=None,
                        help="override the config seed")
    shared.add_argument("--out", default=None, help="override the config output path")
    parser = argparse.ArgumentParser(
        prog="syspredict",
        description="Predict coherent-system failure times from early component failures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("curves", parents=[shared],
                   help="tabulate median/mean curves and prediction bands over a grid")
    sub.add_parser("predict", parents=[shared],
                   help="print quantiles and bands at one conditioning point")
    sub.add_parser("simulate", parents=[shared],
                   help="simulate component and system lifetimes to CSV")
    sub.add_parser("coverage", parents=[shared],
                   help="run the plug-in prediction-interval coverage experiment")
    sub.add_parser("fitqr", parents=[shared],
                   help="fit exact linear quantile regressions to a sample CSV")
    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        if args.seed is not None and args.seed < 0:
            raise ConfigError(f"--seed must be >= 0, got {args.seed}")
        cfg = load_config(args.config)
        return _COMMANDS[args.command](args, cfg)
    except SysPredictError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"IOError: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
