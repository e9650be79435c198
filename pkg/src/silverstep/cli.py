"""Command line interface.

Subcommands: schedule (print step sizes), run (config-driven experiments to
CSV plus optional figures), verify (certificate suites), curvature (the
covariance-manifold sectional curvature table).

Exit codes: 0 success, 1 usage/config error, 2 all runs diverged,
3 certificate failure.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import certify
from .errors import ConfigError
from .experiments import all_diverged, parse_config, run_experiment, write_rows_csv, write_summary_csv
from .schedules import silver_schedule, silver_step

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DIVERGED = 2
EXIT_CERT_FAIL = 3


def _closed_form_label(i: int) -> str:
    m = i + 1
    v = (m & -m).bit_length() - 1
    if v == 0:
        return "sqrt(2)"
    if v == 1:
        return "2"
    if v == 2:
        return "2+sqrt(2)"
    return f"1+rho^{v - 1}"


def cmd_schedule(args) -> int:
    if args.k is None and args.n is None:
        print("error: need --k or --n", file=sys.stderr)
        return EXIT_USAGE
    if args.k is not None:
        try:
            entries = silver_schedule(args.k).entries
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        count = len(entries)
    else:
        if args.n < 1:
            print("error: n must be positive", file=sys.stderr)
            return EXIT_USAGE
        count = args.n
    for i in range(count):
        eta = silver_step(i)
        line = f"{i}\t{eta!r}\t{eta / args.scale!r}"
        if args.closed_form:
            line += f"\t{_closed_form_label(i)}"
        print(line)
    return EXIT_OK


def cmd_run(args) -> int:
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        cfg = parse_config(text)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.out:
        cfg.out = args.out
    if args.plot:
        cfg.plot = True
    if args.seed is not None:
        cfg.seeds = [args.seed]

    os.makedirs(cfg.out, exist_ok=True)
    results = run_experiment(cfg)
    stem = os.path.join(cfg.out, cfg.experiment)
    write_rows_csv(cfg, results, stem + "_runs.csv")
    write_summary_csv(results, stem + "_summary.csv")
    print(f"wrote {stem}_runs.csv and {stem}_summary.csv")
    if cfg.plot:
        from .plotting import plot_error_curves

        plot_error_curves(results, stem + "_errors.svg", title=cfg.experiment)
        print(f"wrote {stem}_errors.svg")
    if all_diverged(results):
        print("all runs diverged", file=sys.stderr)
        return EXIT_DIVERGED
    return EXIT_OK


def cmd_verify(args) -> int:
    kwargs = {}
    if args.manifold:
        kwargs["manifold"] = args.manifold
    if args.objective:
        kwargs["objective"] = args.objective
    try:
        reports = certify.run_suite(args.suites, seed=args.seed, samples=args.samples, **kwargs)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out_path = args.report or "certificates.txt"
    certify.write_reports(reports, out_path)
    failures = 0
    for rep in reports:
        print(rep.to_line())
        if not rep.passed:
            failures += 1
    print(f"report written to {out_path}")
    if failures and not args.informative:
        return EXIT_CERT_FAIL
    return EXIT_OK


def cmd_curvature(args) -> int:
    try:
        lams = [float(s) for s in args.eigenvalues.split(",") if s.strip()]
    except ValueError:
        print("error: eigenvalues must be a comma-separated list of numbers", file=sys.stderr)
        return EXIT_USAGE
    if not lams:
        print("error: empty eigenvalue list", file=sys.stderr)
        return EXIT_USAGE
    if any(l <= 0 for l in lams):
        print("error: eigenvalues must be positive", file=sys.stderr)
        return EXIT_USAGE
    lams = sorted(lams)
    rows = certify.curvature_table(lams)
    if not rows:
        return EXIT_OK
    print("plane\tindices\tcurvature")
    for pair, idxs, val in rows:
        pretty = ",".join(str(i + 1) for i in idxs)
        print(f"{pair}\t({pretty})\t{val!r}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="silverstep",
        description="Silver step-size Riemannian gradient descent benchmarks and certificates",
    )
    sub = p.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("schedule", help="print silver step sizes")
    ps.add_argument("--k", type=int, default=None, help="print the level-k block (2^k - 1 entries)")
    ps.add_argument("--n", type=int, default=None, help="print the first n entries")
    ps.add_argument("--scale", type=float, default=1.0, metavar="L", help="divide entries by L")
    ps.add_argument("--closed-form", action="store_true", help="annotate entries")
    ps.set_defaults(func=cmd_schedule)

    pr = sub.add_parser("run", help="run a config-driven experiment")
    pr.add_argument("config", help="path to a key = value config file")
    pr.add_argument("--out", default=None, help="output directory (overrides config)")
    pr.add_argument("--plot", action="store_true", help="also render figures")
    pr.add_argument("--seed", type=int, default=None, help="run a single seed (overrides config)")
    pr.set_defaults(func=cmd_run)

    pv = sub.add_parser("verify", help="run certificate suites")
    pv.add_argument("suites", nargs="+", help=f"suite names ({', '.join(certify.suite_names())}, all)")
    pv.add_argument("--seed", type=int, default=0)
    pv.add_argument("--samples", type=int, default=200)
    pv.add_argument("--report", default=None, help="report file path (default certificates.txt)")
    pv.add_argument("--manifold", default=None, help="combination suite: manifold selector")
    pv.add_argument("--objective", default=None, help="combination suite: objective selector")
    pv.add_argument(
        "--informative",
        action="store_true",
        help="report failures without a nonzero exit (for objectives outside the theory)",
    )
    pv.set_defaults(func=cmd_verify)

    pc = sub.add_parser("curvature", help="sectional curvature table for a covariance spectrum")
    pc.add_argument("eigenvalues", help="comma-separated positive eigenvalues")
    pc.set_defaults(func=cmd_curvature)

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
