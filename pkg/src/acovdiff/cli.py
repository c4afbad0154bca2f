"""Difference-based autocovariance estimation and Monte Carlo studies.

Subcommands: estimate, simulate, mse-study, tables, rate-study.
Exit codes: 0 success, 2 usage error, 3 data error, 4 experiment failure.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import logging
import secrets
import sys
from pathlib import Path

import numpy as np

from . import noise as noise_mod
from .config import ConfigError, dump_spec, load_spec
from .estimators import estimate_acf, estimate_acf_hvk
from .montecarlo import ExperimentError, ExperimentSpec, run_experiment, run_rate_study
from .signal import SMOOTH_COMPONENTS, evaluate_mean, get_smooth
from .tables import TABLE_IDS, run_table

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_EXPERIMENT = 0, 2, 3, 4

log = logging.getLogger("acovdiff")


class DataError(Exception):
    pass


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- input/output


def read_series(path: str, column: str | None = None) -> np.ndarray:
    """Read one numeric column from a CSV file (``-`` for stdin).

    Lines starting with ``#`` are skipped. A header row is detected when its
    first field is not numeric. Without ``column``, a single-column file is
    read as is and a multi-column file must contain a ``y`` column.
    """
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise DataError(f"cannot read input {path!r}: {exc.strerror}") from None
    rows = [r for r in csv.reader(io.StringIO(text)) if r and not r[0].lstrip().startswith("#")]
    if not rows:
        raise DataError(f"input {path!r} contains no data rows")
    header = None
    try:
        float(rows[0][0])
    except ValueError:
        header = [h.strip() for h in rows[0]]
        rows = rows[1:]
    if header is not None:
        want = column or ("y" if "y" in header else None)
        if want is None:
            if len(header) != 1:
                raise DataError(f"input has columns {header}; pick one with --column")
            idx = 0
        elif want not in header:
            raise DataError(f"column {want!r} not found; available: {header}")
        else:
            idx = header.index(want)
    else:
        if column is not None:
            raise DataError(f"--column {column!r} given but the input has no header row")
        if any(len(r) != 1 for r in rows):
            raise DataError("input without header must have exactly one column")
        idx = 0
    try:
        return np.array([float(r[idx]) for r in rows])
    except (ValueError, IndexError) as exc:
        raise DataError(f"non-numeric or missing value in input: {exc}") from None


def _open_out(path: str | None):
    if path in (None, "-"):
        return contextlib.nullcontext(sys.stdout)
    return open(path, "w", newline="")


def _write_rows(fh, rows: list[dict], comments: list[str] = ()) -> None:
    for c in comments:
        fh.write(f"# {c}\n")
    if not rows:
        return
    w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (f"{v:.17g}" if isinstance(v, float) else v) for k, v in r.items()})


def _seed(value: int | None) -> int:
    if value is not None:
        return value
    seed = secrets.randbits(32)
    print(f"# seed: {seed}", file=sys.stderr)
    return seed


# ---------------------------------------------------------------- commands


def cmd_estimate(args) -> int:
    y = read_series(args.input, args.column)
    if args.m < 0:
        raise UsageError("--m must be nonnegative")
    try:
        if args.method == "hvk":
            est = estimate_acf_hvk(y, args.m)
        else:
            est = estimate_acf(y, args.m, args.scheme[0], args.scheme[1])
    except ValueError as exc:
        raise DataError(str(exc)) from None
    out = est.to_dict()
    if not est.ok:
        out["warning"] = "estimated variance is not positive; autocorrelations omitted"
        print(f"warning: {out['warning']}", file=sys.stderr)
    with _open_out(args.output) as fh:
        if args.format == "json":
            json.dump(out, fh, indent=2)
            fh.write("\n")
        else:
            rows = [
                {"lag": h, "gamma": float(g), "rho": "" if est.rho is None else float(est.rho[h])}
                for h, g in enumerate(est.gamma)
            ]
            meta = [f"{k}: {v}" for k, v in out.items() if k not in ("gamma", "rho")]
            _write_rows(fh, rows, meta)
    return EXIT_OK


def _simulation_spec(args) -> ExperimentSpec:
    if args.config:
        spec = load_spec(args.config)
        overrides = {k: v for k, v in (("n", args.n), ("seed", args.seed)) if v is not None}
        return spec.with_(**overrides) if overrides else spec
    from .config import signal_from_config

    if args.noise == "ma1":
        model = noise_mod.MA1Dependent(args.gamma1, args.innovation)
    else:
        model = noise_mod.AR1(args.phi)
    return ExperimentSpec(
        step=signal_from_config(args.signal),
        smooth=args.smooth,
        noise=model,
        n=args.n if args.n is not None else 1600,
        replications=1,
        seed=_seed(args.seed),
        name="simulate",
    )


def cmd_simulate(args) -> int:
    try:
        spec = _simulation_spec(args)
    except (ValueError, KeyError) as exc:
        raise UsageError(str(exc).strip("'\"")) from None
    mean = evaluate_mean(spec.step, get_smooth(spec.smooth), spec.n)
    rng = noise_mod.make_rng(spec.seed, 0, stream=spec.stream)
    eps = noise_mod.generate(spec.noise, spec.n, rng)
    y = mean + eps
    rows = [
        {"index": i + 1, "mean": float(mean[i]), "noise": float(eps[i]), "y": float(y[i])}
        for i in range(spec.n)
    ]
    header = [f"seed: {spec.seed}"] + dump_spec(spec).rstrip().splitlines()
    with _open_out(args.output) as fh:
        _write_rows(fh, rows, header)
    return EXIT_OK


def cmd_mse_study(args) -> int:
    spec = load_spec(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.replications is not None:
        overrides["replications"] = args.replications
    spec = spec.with_(**overrides) if overrides else spec
    print(f"# seed: {spec.seed}", file=sys.stderr)
    report = run_experiment(spec, args.workers)
    with _open_out(args.output) as fh:
        _write_rows(fh, report.rows(), [f"seed: {spec.seed}"] + dump_spec(spec).rstrip().splitlines())
    if args.json:
        Path(args.json).write_text(
            json.dumps({"rows": report.rows(), "predictions": report.predictions}, indent=2) + "\n"
        )
    return EXIT_OK


def cmd_tables(args) -> int:
    seed = _seed(args.seed)
    result = run_table(args.table, seed, args.replications, args.workers)
    text = result.render()
    print(f"{args.table} (seed {seed}, {args.replications} replications; MSE with MC s.e.)")
    print(text)
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{args.table}.md").write_text(text + "\n")
        (out / f"{args.table}.csv").write_text(f"# seed: {seed}\n" + result.to_csv())
    return EXIT_OK


def cmd_rate_study(args) -> int:
    spec = load_spec(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.replications is not None:
        overrides["replications"] = args.replications
    spec = spec.with_(**overrides) if overrides else spec
    try:
        report = run_rate_study(spec, args.n_grid, args.workers)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    with _open_out(args.output) as fh:
        _write_rows(fh, report.rows(), [f"seed: {spec.seed}", f"n_grid: {list(report.n_grid)}"])
    return EXIT_OK


# ---------------------------------------------------------------- parser


def _add_workers(p):
    p.add_argument(
        "--workers", type=int, default=None,
        help="worker processes (default: $ACOVDIFF_WORKERS or 1)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="acovdiff", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="estimate the autocovariance of a series in a CSV file")
    p.add_argument("input", help="CSV file, or - for stdin")
    p.add_argument("--column", help="column name (default: the only column, or 'y')")
    p.add_argument("--m", type=int, default=1, help="dependence depth / largest lag")
    p.add_argument("--method", choices=("difference", "hvk"), default="difference")
    p.add_argument("--scheme", type=float, nargs=2, default=(1.0, -1.0), metavar=("D0", "D1"))
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("simulate", help="write one simulated data set as CSV")
    p.add_argument("--config", help="YAML experiment config (overrides scenario flags)")
    p.add_argument("--signal", default="simulation", help="simulation | none")
    p.add_argument("--smooth", default="f1", help=f"one of {sorted(SMOOTH_COMPONENTS)}")
    p.add_argument("--noise", choices=("ma1", "ar1"), default="ma1")
    p.add_argument("--gamma1", type=float, default=0.0)
    p.add_argument("--innovation", default="gaussian", help="gaussian | t4")
    p.add_argument("--phi", type=float, default=0.1)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("mse-study", help="run one Monte Carlo experiment from a config")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--replications", type=int, default=None)
    p.add_argument("--output", "-o", help="CSV report (default stdout)")
    p.add_argument("--json", help="also write a JSON report with theory predictions")
    _add_workers(p)
    p.set_defaults(func=cmd_mse_study)

    p = sub.add_parser("tables", help="reproduce one of the MSE tables")
    p.add_argument("--table", required=True, choices=TABLE_IDS)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--replications", type=int, default=500)
    p.add_argument("--out-dir", help="directory for <table>.md and <table>.csv")
    _add_workers(p)
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("rate-study", help="MSE against sample size on a log-log scale")
    p.add_argument("--config", required=True)
    p.add_argument("--n-grid", type=int, nargs="+", default=[400, 1600, 6400])
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--replications", type=int, default=None)
    p.add_argument("--output", "-o")
    _add_workers(p)
    p.set_defaults(func=cmd_rate_study)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"acovdiff: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, ConfigError) as exc:
        print(f"acovdiff: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ExperimentError as exc:
        print(f"acovdiff: experiment failed: {exc}", file=sys.stderr)
        return EXIT_EXPERIMENT
    except OSError as exc:
        print(f"acovdiff: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
