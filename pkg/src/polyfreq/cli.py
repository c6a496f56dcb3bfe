"""Command-line harness: estimate, simulate, delta, rate, bench.

Every output artifact embeds its fully resolved configuration (including
the seed and any model spec) in a comment header, so a run can be
reproduced byte-for-byte from its own output; measured wall times are the
only nondeterministic fields.  Numbers are written with 17 significant
digits for exact round-tripping.

Exit status contract: 0 success, 1 usage error, 2 data error, 3 model
validity error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from typing import Sequence

import numpy as np

from . import __version__
from .dependence import check_summability, estimate_delta_profile
from .diagnostics import make_eval_grid, rate_experiment
from .estimators import (
    BinningScheme,
    SparseHistogram,
    accumulate_counts,
    build_histogram,
    fp_eval,
    histogram_eval,
    kde_eval_naive,
    stone_bandwidth,
)
from .models import (
    ArmaModel,
    ModelValidityError,
    contraction_proxy,
    model_from_spec,
    model_to_spec,
    simulate,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_MODEL = 3

_CHUNK_LINES = 65536


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _header_lines(config: dict) -> list[str]:
    lines = [f"# polyfreq {__version__}"]
    for key in sorted(config):
        lines.append(f"# {key}={json.dumps(config[key], sort_keys=True)}")
    return lines


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(text)


def _load_model(path: str):
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as exc:
        raise DataError(f"cannot read model spec {path}: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataError(f"model spec {path} is not valid JSON: {exc}") from exc
    try:
        return model_from_spec(obj)
    except ModelValidityError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"model spec {path} is malformed: {exc}") from exc


# ---------------------------------------------------------------------------
# estimate
# ---------------------------------------------------------------------------


def _scan_input(path: str) -> tuple[int, float, float]:
    """First pass: count numeric rows, track the data range, reject junk."""
    n = 0
    lo, hi = math.inf, -math.inf
    bad: list[str] = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, raw in enumerate(f, 1):
            text = raw.strip()
            if not text or text.startswith("#"):
                continue
            try:
                v = float(text)
            except ValueError:
                if lineno == 1:
                    continue  # optional header row
                bad.append(str(lineno))
                if len(bad) >= 10:
                    break
                continue
            if not np.isfinite(v):
                bad.append(str(lineno))
                if len(bad) >= 10:
                    break
                continue
            n += 1
            lo = v if v < lo else lo
            hi = v if v > hi else hi
    if bad:
        raise DataError(f"unparseable or non-finite rows at lines {', '.join(bad)}")
    if n < 2:
        raise DataError(f"need at least 2 numeric rows, found {n}")
    return n, lo, hi


def _build_streaming(path: str, scheme: BinningScheme) -> SparseHistogram:
    """Second pass: bin the file in chunks; memory scales with occupied bins."""
    counts: dict[int, int] = {}
    total = 0
    chunk: list[float] = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, raw in enumerate(f, 1):
            text = raw.strip()
            if not text or text.startswith("#"):
                continue
            try:
                v = float(text)
            except ValueError:
                if lineno == 1:
                    continue
                raise DataError(f"unparseable row at line {lineno}")
            chunk.append(v)
            if len(chunk) >= _CHUNK_LINES:
                total += accumulate_counts(counts, chunk, scheme)
                chunk.clear()
    if chunk:
        total += accumulate_counts(counts, chunk, scheme)
    return SparseHistogram(scheme, counts, total)


def cmd_estimate(args: argparse.Namespace) -> int:
    n, lo, hi = _scan_input(args.input)
    bandwidth = args.bandwidth if args.bandwidth is not None else stone_bandwidth(n)
    if bandwidth <= 0:
        raise UsageError(f"--bandwidth must be positive, got {bandwidth}")
    scheme = BinningScheme(bandwidth)
    h = _build_streaming(args.input, scheme)

    gmin = args.grid_min if args.grid_min is not None else lo - 4.0 * bandwidth
    gmax = args.grid_max if args.grid_max is not None else hi + 4.0 * bandwidth
    gstep = args.grid_step if args.grid_step is not None else bandwidth / 10.0
    if not (gmax > gmin and gstep > 0):
        raise UsageError(f"invalid grid [{gmin}, {gmax}] step {gstep}")
    count = int(np.floor((gmax - gmin) / gstep + 1e-9)) + 1
    grid = gmin + gstep * np.arange(count)

    config = {
        "command": "estimate",
        "input": args.input,
        "n": h.n,
        "bandwidth": bandwidth,
        "grid_min": gmin,
        "grid_max": gmax,
        "grid_step": gstep,
    }
    hist_vals = histogram_eval(h, grid)
    fp_vals = fp_eval(h, grid)
    if args.format == "json":
        payload = {
            "config": config,
            "histogram": h.to_json_obj(),
            "grid": [float(x) for x in grid],
            "histogram_density": [float(v) for v in hist_vals],
            "frequency_polygon": [float(v) for v in fp_vals],
        }
        _write_text(args.output, json.dumps(payload, indent=2) + "\n")
    else:
        lines = _header_lines(config)
        lines.append("x,histogram,frequency_polygon")
        for x, hv, fv in zip(grid, hist_vals, fp_vals):
            lines.append(f"{_fmt(x)},{_fmt(hv)},{_fmt(fv)}")
        _write_text(args.output, "\n".join(lines) + "\n")
    print(f"n={h.n} b={_fmt(bandwidth)} p_n={h.occupied}", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


def cmd_simulate(args: argparse.Namespace) -> int:
    model = _load_model(args.model)
    if args.n < 1:
        raise UsageError(f"--n must be positive, got {args.n}")
    sample = simulate(model, args.n, burn_in=args.burn_in, seed=args.seed)
    config = {
        "command": "simulate",
        "model": model_to_spec(model),
        "n": args.n,
        "burn_in": args.burn_in,
        "seed": args.seed,
    }
    lines = _header_lines(config)
    lines.extend(_fmt(v) for v in sample)
    _write_text(args.output, "\n".join(lines) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# delta
# ---------------------------------------------------------------------------


def cmd_delta(args: argparse.Namespace) -> int:
    model = _load_model(args.model)
    if args.kmax < 0:
        raise UsageError(f"--kmax must be nonnegative, got {args.kmax}")
    deltas = estimate_delta_profile(model, args.kmax, args.reps, seed=args.seed)
    rho = contraction_proxy(model)
    report = check_summability(deltas, rho)
    config = {
        "command": "delta",
        "model": model_to_spec(model),
        "kmax": args.kmax,
        "replications": args.reps,
        "seed": args.seed,
        "contraction": rho,
    }
    decay = {
        "slope": report.slope,
        "slope_target": report.slope_target,
        "decay_ok": report.decay_ok,
        "used_lags": list(report.used_lags),
        "partial_sum": report.partial_sum,
        "tail_bound": report.tail_bound,
        "certificate_total": report.certificate_total,
        "conclusive": report.conclusive,
    }
    if args.format == "json":
        payload = {
            "config": config,
            "deltas": [
                {
                    "k": d.lag,
                    "delta_hat": d.delta_hat,
                    "std_error": d.std_error,
                    "replications": d.replications,
                }
                for d in deltas
            ],
            "decay": decay,
        }
        _write_text(args.output, json.dumps(payload, indent=2) + "\n")
    else:
        lines = _header_lines(config)
        lines.append("k,delta_hat,std_error,replications")
        for d in deltas:
            lines.append(f"{d.lag},{_fmt(d.delta_hat)},{_fmt(d.std_error)},{d.replications}")
        _write_text(args.output, "\n".join(lines) + "\n")
        print(json.dumps(decay), file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# rate
# ---------------------------------------------------------------------------


def cmd_rate(args: argparse.Namespace) -> int:
    model = _load_model(args.model)
    if args.n_min >= args.n_max:
        raise UsageError(f"--n-min must be below --n-max, got {args.n_min} >= {args.n_max}")
    if args.reps < 1:
        raise UsageError(f"--reps must be positive, got {args.reps}")
    n_values = []
    n = args.n_min
    while n <= args.n_max:
        n_values.append(n)
        n *= 2
    try:
        report = rate_experiment(
            model, n_values, args.reps, seed=args.seed, max_workers=args.threads
        )
    except ModelValidityError:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    config = {
        "command": "rate",
        "model": model_to_spec(model),
        "n_values": n_values,
        "reps": args.reps,
        "seed": args.seed,
    }
    summary = {
        "config": config,
        "fitted_slope": report.fitted_slope,
        "slope_ci": list(report.slope_ci) if report.slope_ci else None,
        "target_slope": report.target_slope,
        "n_values": list(report.n_values),
        "median_errors": list(report.median_errors),
        "mean_errors": list(report.mean_errors),
    }
    if args.output:
        lines = _header_lines(config)
        lines.append("n,b,replication,sup_error,wall_time_ms")
        for r in report.records:
            lines.append(
                f"{r.n},{_fmt(r.bandwidth)},{r.replication},{_fmt(r.sup_error)},"
                f"{_fmt(r.wall_time_s * 1000.0)}"
            )
        _write_text(args.output, "\n".join(lines) + "\n")
    sys.stdout.write(json.dumps(summary, indent=2) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------


def run_benchmark(n: int, m: int, seed: int = 0, repeats: int = 5) -> dict:
    """Time frequency polygon build+query against the naive KDE baseline.

    Both estimators use the same simulated gaussian sample, the same
    bandwidth schedule, and the same query grid; each phase is repeated and
    the minimum wall time reported.
    """
    if n < 10_000:
        raise UsageError(f"benchmark needs n >= 10000, got {n}")
    if m < 100:
        raise UsageError(f"benchmark needs m >= 100, got {m}")
    model = ArmaModel()
    sample = simulate(model, n, seed=seed)
    bandwidth = stone_bandwidth(n)
    queries = np.linspace(float(sample.min()), float(sample.max()), m)

    build_t, eval_t, kde_t = [], [], []
    occupied = 0
    for _ in range(repeats):
        t0 = time.perf_counter()
        h = build_histogram(sample, BinningScheme(bandwidth))
        t1 = time.perf_counter()
        fp_eval(h, queries)
        t2 = time.perf_counter()
        kde_eval_naive(sample, bandwidth, queries)
        t3 = time.perf_counter()
        build_t.append(t1 - t0)
        eval_t.append(t2 - t1)
        kde_t.append(t3 - t2)
        occupied = h.occupied
    fp_build, fp_query, kde = min(build_t), min(eval_t), min(kde_t)
    return {
        "n": n,
        "m": m,
        "seed": seed,
        "repeats": repeats,
        "bandwidth": bandwidth,
        "p_n": occupied,
        "fp_build_s": fp_build,
        "fp_query_s": fp_query,
        "fp_total_s": fp_build + fp_query,
        "kde_query_s": kde,
        "kde_over_fp_total": kde / (fp_build + fp_query),
        "kde_over_fp_query": kde / fp_query,
    }


def cmd_bench(args: argparse.Namespace) -> int:
    result = run_benchmark(args.n, args.m, seed=args.seed)
    if args.format == "json":
        sys.stdout.write(json.dumps(result, indent=2) + "\n")
        return EXIT_OK
    print(f"n={result['n']} m={result['m']} seed={result['seed']} "
          f"b={_fmt(result['bandwidth'])} p_n={result['p_n']}")
    print(f"fp_build_s     {result['fp_build_s']:.6f}")
    print(f"fp_query_s     {result['fp_query_s']:.6f}")
    print(f"fp_total_s     {result['fp_total_s']:.6f}")
    print(f"kde_query_s    {result['kde_query_s']:.6f}")
    print(f"kde/fp_total   {result['kde_over_fp_total']:.2f}x")
    print(f"kde/fp_query   {result['kde_over_fp_query']:.2f}x")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    # the CLI contract reserves exit status 2 for data errors, so argparse's
    # default usage-error exit code is remapped
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _default_seed() -> int:
    raw = os.environ.get("POLYFREQ_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="polyfreq", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"polyfreq {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, model=False):
        p.add_argument("--seed", type=int, default=_default_seed(),
                       help="stream seed (default: POLYFREQ_SEED env var, else 0)")
        p.add_argument("--output", default=None, help="output path (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--threads", type=int, default=None,
                       help="cap concurrent workers (default: machine parallelism)")
        if model:
            p.add_argument("--model", required=True, help="model spec JSON path")

    p = sub.add_parser("estimate", help="histogram + frequency polygon over a grid")
    p.add_argument("--input", required=True, help="CSV with one numeric column")
    p.add_argument("--bandwidth", type=float, default=None,
                   help="bin width (default: (log n / n)^(1/3))")
    p.add_argument("--grid-min", type=float, default=None)
    p.add_argument("--grid-max", type=float, default=None)
    p.add_argument("--grid-step", type=float, default=None)
    add_common(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("simulate", help="simulate a model to a one-column CSV")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--burn-in", type=int, default=None)
    add_common(p, model=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("delta", help="dependence coefficients and decay report")
    p.add_argument("--kmax", type=int, required=True)
    p.add_argument("--reps", type=int, default=10_000)
    add_common(p, model=True)
    p.set_defaults(func=cmd_delta)

    p = sub.add_parser("rate", help="sup-error convergence-rate experiment")
    p.add_argument("--n-min", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--reps", type=int, default=20)
    add_common(p, model=True)
    p.set_defaults(func=cmd_rate)

    p = sub.add_parser("bench", help="frequency polygon vs naive KDE timing")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    add_common(p)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"polyfreq: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"polyfreq: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ModelValidityError as exc:
        print(f"polyfreq: model error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except ValueError as exc:
        print(f"polyfreq: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
