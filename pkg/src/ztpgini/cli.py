"""Command-line interface.

Subcommands: ``pop`` (population Gini), ``expect`` (exact estimator
expectation and bias), ``estimate`` (run the estimators on a count file),
``sample`` (draw variates), ``simulate`` (Monte Carlo grid with CSV and SVG
output), ``verify`` (cross-path identity checks plus golden-fixture
comparisons).  Every numeric value printed here is produced by the library;
this module only parses flags and formats output.

Exit codes: 0 success, 1 runtime or accuracy failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

from .gini import estimate, expected_gini, gini_population, gini_sample
from .oracles import IdentityCheck, identity_suite, load_golden
from .report import render_figures, write_csv
from .simulate import DEFAULT_MASTER_SEED, SimConfig, SimulationError, run_simulation
from .specfun import AccuracyError
from .ztp import Sample, ZtpParams, mle, sample

__all__ = ["main"]


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not (math.isfinite(value) and value > 0.0):
        raise argparse.ArgumentTypeError(f"must be a positive finite real, got {text!r}")
    return value


def _size_at_least(minimum: int):
    def parse(text: str) -> int:
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
        if value < minimum:
            raise argparse.ArgumentTypeError(f"must be >= {minimum}, got {text!r}")
        return value

    return parse


def _seed_value(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if not (0 <= value < 2**64):
        raise argparse.ArgumentTypeError(f"must fit in 64 unsigned bits, got {text!r}")
    return value


def _rate_list(text: str) -> tuple[float, ...]:
    items = [part.strip() for part in text.split(",") if part.strip()]
    if not items:
        raise argparse.ArgumentTypeError("expected a comma-separated list of rates")
    return tuple(_positive_float(part) for part in items)


def _size_list(text: str) -> tuple[int, ...]:
    items = [part.strip() for part in text.split(",") if part.strip()]
    if not items:
        raise argparse.ArgumentTypeError("expected a comma-separated list of sample sizes")
    return tuple(_size_at_least(2)(part) for part in items)


def _default_threads() -> int:
    raw = os.environ.get("ZTPGINI_THREADS", "1")
    try:
        value = int(raw)
    except ValueError:
        return 1
    return max(value, 1)


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def cmd_pop(args: argparse.Namespace) -> int:
    g = gini_population(ZtpParams(args.lam))
    print(f"gini_population {_fmt(g)}")
    return 0


def cmd_expect(args: argparse.Namespace) -> int:
    params = ZtpParams(args.lam)
    g = gini_population(params)
    e = expected_gini(params, args.n)
    print(f"gini_population {_fmt(g)}")
    print(f"expected_gini {_fmt(e)}")
    print(f"bias {_fmt(e - g)}")
    return 0


def _read_counts(parser: argparse.ArgumentParser, source: str) -> list[int]:
    if source == "-":
        lines = sys.stdin.read().splitlines()
    else:
        try:
            with open(source, "r", encoding="utf-8") as fh:
                lines = fh.read().splitlines()
        except OSError as exc:
            parser.error(f"cannot read {source!r}: {exc}")
    values: list[int] = []
    first_content = True
    for raw in lines:
        line = raw.strip()
        if not line:
            continue
        if first_content and line == "count":
            first_content = False
            continue
        first_content = False
        try:
            value = int(line)
        except ValueError:
            parser.error(f"input line {line!r} is not an integer count")
        values.append(value)
    if any(v < 1 for v in values):
        parser.error("values must be >= 1 (zero-truncated support)")
    if len(values) < 2:
        parser.error("need at least 2 observations to estimate a Gini coefficient")
    return values


def cmd_estimate(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    values = _read_counts(parser, args.input)
    observed = Sample(values)
    if args.bias_correct:
        report = estimate(observed)
        fields = [
            ("n", str(report.n)),
            ("g_hat", _fmt(report.g_hat)),
            ("lambda_hat", _fmt(report.lambda_hat)),
            ("lambda_degenerate", "true" if report.lambda_degenerate else "false"),
            ("bias_hat", _fmt(report.bias_hat)),
            ("g_hat_bc", _fmt(report.g_hat_bc)),
        ]
    else:
        g_hat = gini_sample(observed)
        lam_hat, degenerate = mle(observed)
        fields = [
            ("n", str(observed.n)),
            ("g_hat", _fmt(g_hat)),
            ("lambda_hat", _fmt(lam_hat)),
            ("lambda_degenerate", "true" if degenerate else "false"),
        ]
    if args.csv:
        print(",".join(name for name, _ in fields))
        print(",".join(value for _, value in fields))
    else:
        for name, value in fields:
            print(f"{name} {value}")
    return 0


def cmd_sample(args: argparse.Namespace) -> int:
    import numpy as np

    rng = np.random.default_rng(np.random.SeedSequence(entropy=[args.seed]))
    drawn = sample(ZtpParams(args.lam), args.n, rng)
    out = sys.stdout
    for value in drawn.values:
        out.write(f"{value}\n")
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    config = SimConfig(
        lambdas=args.lambdas,
        ns=args.ns,
        reps=args.reps,
        master_seed=args.seed,
    )

    def progress(summary):
        print(
            f"cell lambda={summary.lam:g} n={summary.n} done "
            f"(rel_bias_std={summary.rel_bias_std:.4g}, rel_bias_bc={summary.rel_bias_bc:.4g})",
            file=sys.stderr,
        )

    summaries = run_simulation(config, progress_sink=progress, threads=args.threads)
    csv_path = write_csv(summaries, args.out)
    svg_dir = args.svg if args.svg is not None else os.path.dirname(os.path.abspath(args.out))
    bias_fig, mse_fig = render_figures(summaries, svg_dir, log_y=args.log_y)
    print(f"wrote {len(summaries)} rows to {csv_path}")
    print(f"wrote figures {bias_fig} and {mse_fig}")
    return 0


def _golden_checks(perturb: float) -> list[tuple[str, IdentityCheck]]:
    out: list[tuple[str, IdentityCheck]] = []
    for row in load_golden():
        lam = float(row["lambda"])
        params = ZtpParams(lam)
        reference = float(row["value"])
        if row["quantity"] == "gini_population":
            live = gini_population(params)
            tol = 1e-9
            label = f"golden gini_population lambda={lam:g}"
        else:
            n = int(row["n"])
            live = expected_gini(params, n)
            tol = 1e-8
            label = f"golden expected_gini lambda={lam:g} n={row['n']}"
        out.append((label, IdentityCheck(row["quantity"], live + perturb, reference, tol)))
    return out


def cmd_verify(args: argparse.Namespace) -> int:
    failures = 0
    total = 0

    def report_check(label: str, check: IdentityCheck) -> None:
        nonlocal failures, total
        total += 1
        status = "PASS" if check.passed else "FAIL"
        if not check.passed:
            failures += 1
        print(f"{status} {label} residual={check.residual:.3e} tol={check.tol:g}")

    for lam in args.lambdas:
        params = ZtpParams(lam)
        for n in args.ns:
            suite = identity_suite(params, n)
            for check in suite.checks:
                perturbed = IdentityCheck(check.name, check.lhs + args.perturb, check.rhs, check.tol)
                report_check(f"{check.name} lambda={lam:g} n={n}", perturbed)
    for label, check in _golden_checks(args.perturb):
        report_check(label, check)
    if failures:
        print(f"{failures} of {total} checks FAILED")
        return 1
    print(f"all {total} checks passed")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ztpgini",
        description="Gini coefficients of zero-truncated Poisson populations: "
        "exact values, finite-sample bias, corrected estimation, Monte Carlo study.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_pop = sub.add_parser("pop", help="population Gini coefficient")
    p_pop.add_argument("--lambda", dest="lam", type=_positive_float, required=True, help="rate")
    p_pop.set_defaults(handler=lambda args, parser: cmd_pop(args))

    p_expect = sub.add_parser("expect", help="exact estimator expectation and bias")
    p_expect.add_argument("--lambda", dest="lam", type=_positive_float, required=True, help="rate")
    p_expect.add_argument("--n", type=_size_at_least(2), required=True, help="sample size (>= 2)")
    p_expect.set_defaults(handler=lambda args, parser: cmd_expect(args))

    p_est = sub.add_parser("estimate", help="estimate from a file of counts")
    p_est.add_argument(
        "input",
        nargs="?",
        default="-",
        help="path to counts (one integer per line, optional 'count' header); '-' for stdin",
    )
    p_est.add_argument(
        "--no-bias-correction",
        dest="bias_correct",
        action="store_false",
        help="skip the bias computation; report only g_hat and lambda_hat",
    )
    p_est.add_argument("--csv", action="store_true", help="emit a CSV header and row instead of key-value lines")
    p_est.set_defaults(handler=cmd_estimate)

    p_sample = sub.add_parser("sample", help="draw variates")
    p_sample.add_argument("--lambda", dest="lam", type=_positive_float, required=True, help="rate")
    p_sample.add_argument("--n", type=_size_at_least(1), required=True, help="number of draws")
    p_sample.add_argument("--seed", type=_seed_value, default=0, help="rng seed (default 0)")
    p_sample.set_defaults(handler=lambda args, parser: cmd_sample(args))

    p_sim = sub.add_parser("simulate", help="run the Monte Carlo grid")
    p_sim.add_argument("--lambdas", type=_rate_list, default=(0.1, 0.5, 1.0, 2.0), help="comma-separated rates")
    p_sim.add_argument("--ns", type=_size_list, default=(5, 10, 30, 50), help="comma-separated sample sizes")
    p_sim.add_argument("--reps", type=_size_at_least(1), default=1000, help="replications per cell")
    p_sim.add_argument("--seed", type=_seed_value, default=DEFAULT_MASTER_SEED, help="master seed")
    p_sim.add_argument(
        "--threads",
        type=_size_at_least(1),
        default=_default_threads(),
        help="worker threads (default: ZTPGINI_THREADS or 1)",
    )
    p_sim.add_argument("--out", default="ztpgini_results.csv", help="output CSV path")
    p_sim.add_argument("--svg", default=None, help="directory for figures (default: alongside the CSV)")
    p_sim.add_argument("--log-y", dest="log_y", action="store_true", help="log-scale the figure y axes")
    p_sim.set_defaults(handler=lambda args, parser: cmd_simulate(args))

    p_verify = sub.add_parser("verify", help="identity checks and golden comparisons")
    p_verify.add_argument(
        "--lambdas",
        type=_rate_list,
        default=(0.1, 0.5, 1.0, 2.0),
        help="comma-separated rates",
    )
    p_verify.add_argument(
        "--ns",
        type=_size_list,
        default=(2, 3, 5, 10, 30, 50),
        help="comma-separated sample sizes",
    )
    p_verify.add_argument("--perturb", type=float, default=0.0, help=argparse.SUPPRESS)
    p_verify.set_defaults(handler=lambda args, parser: cmd_verify(args))

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args, parser)
    except (AccuracyError, SimulationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
