"""Command-line interface.

Subcommands:
  run        run an experiment described by a JSON config, write a CSV
  figure     run the canonical experiments behind one figure (1..9)
  histogram  the repeated-split e-value instability experiment
  selftest   oracle, identity, and validity checks

Exit codes: 0 success, 1 invalid config or usage, 2 runtime or I/O failure,
3 selftest failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .experiments import DEFAULT_SEED_BASE, PROFILES, build_figure
from .harness import (
    ConfigError,
    ExperimentConfig,
    histogram_records,
    run_experiment,
    run_histogram_experiment,
    write_results,
)
from .selftest import run_selftest

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2
EXIT_SELFTEST = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse funnels all usage errors here
        raise ConfigError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="cepsim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a JSON-configured experiment")
    run_p.add_argument("--config", required=True, help="JSON experiment config")
    run_p.add_argument("--out", required=True, help="output CSV path")
    run_p.add_argument("--threads", type=int, default=1)
    run_p.add_argument(
        "--profile",
        choices=sorted(PROFILES),
        help="override training_size and iterations with the profile's values",
    )

    fig_p = sub.add_parser("figure", help="emit the CSVs underlying one figure")
    fig_p.add_argument("figure_id", type=int, choices=range(1, 10),
                       metavar="1..9")
    fig_p.add_argument("--out-dir", required=True)
    fig_p.add_argument("--profile", choices=sorted(PROFILES), default="desk")
    fig_p.add_argument("--threads", type=int, default=1)
    fig_p.add_argument("--seed", type=int, default=DEFAULT_SEED_BASE,
                       help="seed base for the figure's experiments")
    fig_p.add_argument("--iterations", type=int, default=None,
                       help="override the profile's iteration count")

    hist_p = sub.add_parser("histogram", help="repeated-split e-value experiment")
    hist_p.add_argument("--out", required=True)
    hist_p.add_argument("--seed", type=int, default=DEFAULT_SEED_BASE)
    hist_p.add_argument("--size", type=int, default=12_000,
                        help="training-set size")
    hist_p.add_argument("--labels", type=int, default=10)
    hist_p.add_argument("--alpha", type=float, default=0.5)
    hist_p.add_argument("--proper-size", type=int, default=8_000)
    hist_p.add_argument("--splits", type=int, default=1_000)

    self_p = sub.add_parser("selftest", help="run built-in checks")
    self_p.add_argument("--quick", action="store_true",
                        help="reduced sample sizes")
    return parser


def _cmd_run(args) -> int:
    try:
        raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if args.profile is not None:
        profile = PROFILES[args.profile]
        raw = dict(raw, training_size=profile.training_size,
                   iterations=profile.iterations)
    config = ExperimentConfig.from_dict(raw)
    records = run_experiment(config, threads=args.threads)
    write_results(records, args.out)
    print(f"wrote {len(records)} records to {args.out}")
    return EXIT_OK


def _cmd_figure(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    results = build_figure(
        args.figure_id,
        profile_name=args.profile,
        seed_base=args.seed,
        iterations=args.iterations,
        threads=args.threads,
    )
    for name, records in results.items():
        path = out_dir / name
        write_results(records, path)
        print(f"wrote {len(records)} records to {path}")
    return EXIT_OK


def _cmd_histogram(args) -> int:
    if not 1 <= args.proper_size <= args.size - 1:
        raise ConfigError(
            f"--proper-size must lie in 1..{args.size - 1}, got {args.proper_size}"
        )
    if args.splits < 1:
        raise ConfigError(f"--splits must be >= 1, got {args.splits}")
    result = run_histogram_experiment(
        training_size=args.size,
        num_labels=args.labels,
        alpha=args.alpha,
        proper_size=args.proper_size,
        num_splits=args.splits,
        seed=args.seed,
    )
    write_results(histogram_records(result, args.seed), args.out)
    print(
        f"least likely label {result.target_label} "
        f"(theta = {result.theta[result.target_label - 1]:.6g}), "
        f"mean e-value {result.mean_e:.6g}; wrote {args.out}"
    )
    return EXIT_OK


def _cmd_selftest(args) -> int:
    results = run_selftest(quick=args.quick)
    failed = False
    for check in results:
        status = "PASS" if check.passed else "FAIL"
        print(f"[{status}] {check.name}: {check.detail}")
        failed |= not check.passed
    return EXIT_SELFTEST if failed else EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "figure":
            return _cmd_figure(args)
        if args.command == "histogram":
            return _cmd_histogram(args)
        return _cmd_selftest(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
