"""Command-line front end.

Subcommands: generate, decode-ls, decode-l1, path, experiment, check-theory.
Exit codes: 0 success, 1 check failure, 2 usage error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
import time

import numpy as np

from . import experiments, problem_io
from .continuation import decode_l1, run_path, select_lambda, write_path_csv
from .errors import OneBitCSError
from .least_squares import decode_ls
from .metrics import REPORT_COLUMNS, report, report_to_row
from .sensing import ModelParams, generate

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3


def _add_model_flags(parser, require_dims=False):
    parser.add_argument("--m", type=int, required=require_dims, help="measurement count")
    parser.add_argument("--n", type=int, required=require_dims, help="signal dimension")
    parser.add_argument("--s", type=int, required=require_dims, help="signal sparsity")
    parser.add_argument("--nu", type=float, default=0.0, help="row correlation in [0,1)")
    parser.add_argument("--sigma", type=float, default=0.0, help="pre-quantization noise std")
    parser.add_argument("--flip", type=float, default=0.0, help="sign-flip probability")
    parser.add_argument("--seed", type=int, default=0, help="RNG seed")


def _params_from_args(args):
    if args.m is None or args.n is None or args.s is None:
        raise OneBitCSError("need --m, --n and --s (or --problem) to build an instance")
    return ModelParams(
        m=args.m, n=args.n, s=args.s, nu=args.nu, sigma=args.sigma,
        flip_prob=args.flip, seed=args.seed,
    )


def _load_or_generate(args):
    if args.problem:
        return problem_io.load_problem(args.problem)
    return generate(_params_from_args(args))


def _write_report(rep, out, extra_header=(), extra_cells=()):
    header = ",".join(REPORT_COLUMNS + tuple(extra_header))
    row = ",".join(report_to_row(rep) + list(extra_cells))
    text = header + "\n" + row + "\n"
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_generate(args):
    params = _params_from_args(args)
    problem = generate(params)
    problem_io.save_problem(problem, args.out)
    if args.csv_out:
        problem_io.export_csv(problem, args.csv_out)
    print(f"wrote {args.out} (m={params.m}, n={params.n}, seed={params.seed})")
    return EXIT_OK


def cmd_decode_ls(args):
    problem = _load_or_generate(args)
    t0 = time.perf_counter()
    estimate = decode_ls(problem)
    wall = time.perf_counter() - t0
    if problem.truth is None:
        print("no ground truth in problem; writing estimate only")
        if args.out:
            np.savetxt(args.out, estimate.x_ls, fmt="%.17g")
        return EXIT_OK
    rep = report(estimate.x_ls, problem.truth, wall)
    _write_report(
        rep,
        args.out,
        extra_header=("gram_condition",),
        extra_cells=(f"{estimate.gram_condition:.17g}",),
    )
    return EXIT_OK


def cmd_decode_l1(args):
    problem = _load_or_generate(args)
    t0 = time.perf_counter()
    x_hat, selection, _path = decode_l1(
        problem, rho=args.rho, max_grid=args.max_grid, max_iter=args.max_iter
    )
    wall = time.perf_counter() - t0
    if problem.truth is None:
        print("no ground truth in problem; writing estimate only")
        if args.out:
            np.savetxt(args.out, x_hat, fmt="%.17g")
        return EXIT_OK
    rep = report(x_hat, problem.truth, wall)
    _write_report(
        rep,
        args.out,
        extra_header=("ell_bar", "lambda_hat"),
        extra_cells=(str(selection.ell_bar), f"{selection.lambda_hat:.17g}"),
    )
    return EXIT_OK


def cmd_path(args):
    problem = _load_or_generate(args)
    path = run_path(problem, rho=args.rho, max_grid=args.max_grid, max_iter=args.max_iter)
    write_path_csv(path, args.out)
    try:
        selection = select_lambda(path)
        print(
            f"{len(path.points)} grid points, cap={path.cap}, "
            f"selected support={selection.ell_bar} at lambda={selection.lambda_hat:.6g}"
        )
    except OneBitCSError as exc:
        print(f"{len(path.points)} grid points, cap={path.cap}, no selection: {exc}")
    return EXIT_OK


def cmd_experiment(args):
    if args.config:
        config = experiments.load_config_file(args.config)
        if args.out:
            config = dataclasses.replace(config, out=args.out)
    elif args.scenario:
        config = experiments.config_from_scenario(
            args.scenario,
            seed=args.seed,
            replications=args.reps,
            out=args.out,
            allow_large=args.large,
        )
    else:
        params = _params_from_args(args)
        sweep = None
        if args.sweep:
            if not args.sweep_values:
                raise OneBitCSError("--sweep requires --sweep-values")
            caster = int if args.sweep in ("m", "n", "s") else float
            sweep = (args.sweep, tuple(caster(v) for v in args.sweep_values.split(",")))
        config = experiments.ExperimentConfig(
            scenario="custom",
            params=params,
            replications=args.reps,
            decoder=args.decoder,
            sweep=sweep,
            out=args.out,
        )
    if not config.out:
        raise OneBitCSError("experiment needs an output CSV path (--out)")
    result = experiments.run_experiment(config, threads=args.threads)
    experiments.write_experiment_csv(result, config.out)
    failures = sum(1 for r in result.rows if r.error)
    for agg in result.aggregates:
        label = f"{agg.sweep_param}={agg.sweep_value:g} " if agg.sweep_param else ""
        print(
            f"{config.scenario} {label}reps={agg.count}: "
            f"err_optscale={agg.mean_err_optscale:.4g} PrE={agg.pre_percent:.1f}% "
            f"time={agg.mean_time:.3f}s"
        )
    if failures:
        print(f"{failures} replication(s) failed; see the error column")
    print(f"wrote {config.out} and {experiments.timing_sidecar_path(config.out)}")
    return EXIT_OK


def cmd_check_theory(args):
    checks = experiments.run_theory_checks(
        which=args.which, seed=args.seed, mc_samples=args.mc_samples, reps=args.reps
    )
    if args.out:
        experiments.write_theory_csv(checks, args.out)
    all_passed = True
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        print(f"[{status}] {c.name}: value={c.value:.6g} band=[{c.lo:g}, {c.hi:g}] ({c.details})")
        all_passed &= c.passed
    return EXIT_OK if all_passed else EXIT_CHECK_FAILED


def build_parser():
    parser = argparse.ArgumentParser(
        prog="onebitcs",
        description="Decode signals from 1-bit measurements and reproduce the synthetic benchmarks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a synthetic problem file")
    _add_model_flags(p, require_dims=True)
    p.add_argument("--out", required=True, help="output problem file")
    p.add_argument("--csv-out", help="also export (y, psi) as CSV")
    p.set_defaults(func=cmd_generate)

    for name, func, extra in (
        ("decode-ls", cmd_decode_ls, False),
        ("decode-l1", cmd_decode_l1, True),
        ("path", cmd_path, True),
    ):
        p = sub.add_parser(name, help=f"run {name} on a problem file or a fresh instance")
        p.add_argument("--problem", help="problem file from 'generate'")
        _add_model_flags(p)
        if extra:
            p.add_argument("--rho", type=float, default=0.95, help="grid decay ratio")
            p.add_argument("--max-grid", type=int, default=200, help="grid length")
            p.add_argument(
                "--max-iter", type=int, default=1, help="Newton steps per grid point"
            )
        if name == "path":
            p.add_argument("--out", required=True, help="path CSV output")
        else:
            p.add_argument("--out", help="report CSV output (default: stdout)")
        p.set_defaults(func=func)

    p = sub.add_parser("experiment", help="run a replicated scenario and write CSV results")
    p.add_argument("--scenario", help=f"preset name, one of {sorted(experiments.SCENARIOS)}")
    p.add_argument("--config", help="key=value config file")
    _add_model_flags(p)
    p.add_argument("--decoder", choices=experiments.DECODERS, default="l1-pdasc")
    p.add_argument("--sweep", choices=experiments.SWEEPABLE, help="parameter to sweep")
    p.add_argument("--sweep-values", help="comma-separated sweep values")
    p.add_argument("--reps", type=int, default=100, help="replications per sweep value")
    p.add_argument("--threads", type=int, default=1, help="worker threads")
    p.add_argument("--large", action="store_true", help="allow large-scale presets")
    p.add_argument("--out", help="results CSV (timing goes to a .timing.csv sidecar)")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("check-theory", help="empirical consistency checks")
    p.add_argument(
        "which",
        nargs="?",
        default="all",
        choices=["all", "population-identity", "scaling-ls", "scaling-l1"],
    )
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mc-samples", type=int, default=100_000)
    p.add_argument("--reps", type=int, default=50)
    p.add_argument("--out", help="write the check report as CSV")
    p.set_defaults(func=cmd_check_theory)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (OneBitCSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
