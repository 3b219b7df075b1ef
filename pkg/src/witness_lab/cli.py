"""Command-line entry point: ``witness-lab run <config.json> [--self-check] [--out DIR] [--seed N]``.

Exit codes: 0 when every checked claim held, 2 when at least one was
violated, 1 on a configuration or IO error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

from witness_lab.config import EXPERIMENTS, ExperimentConfig
from witness_lab.experiments import run_experiment
from witness_lab.loaders import default_config, load_experiment_config
from witness_lab.reports import write_csv, write_json

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATION = 2
OUT_ENV = "WITNESS_LAB_OUT"
DEFAULT_OUT = "results"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="witness-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run one experiment, or every experiment with --self-check")
    run.add_argument("config", nargs="?", type=Path, help="experiment config (JSON)")
    run.add_argument(
        "--self-check", action="store_true", help="small sizes; without a config, run every experiment"
    )
    run.add_argument(
        "--out", type=Path, default=None, help=f"output directory (default ${OUT_ENV} or ./{DEFAULT_OUT})"
    )
    run.add_argument("--seed", type=int, default=None, help="override the config seed")
    run.add_argument("--workers", type=int, default=None, help="worker threads for independent trials")
    run.add_argument("--verbose", "-v", action="store_true", help="debug logging on stderr")
    return parser


def configure_logging(verbose: bool) -> None:
    """One stderr handler on the package logger; library modules never add their own."""
    root = logging.getLogger("witness_lab")
    for handler in list(root.handlers):
        root.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    root.addHandler(handler)
    root.setLevel(logging.DEBUG if verbose else logging.INFO)
    root.propagate = False


def resolve_out(args: argparse.Namespace, config: ExperimentConfig | None = None) -> Path:
    if args.out is not None:
        return args.out
    env = os.environ.get(OUT_ENV)
    if env:
        return Path(env)
    if config is not None and config.output_dir:
        return config.base_dir / config.output_dir
    return Path(DEFAULT_OUT)


def run_config(config: ExperimentConfig, out_dir: Path) -> int:
    """Run one experiment and write its report files; returns the exit code."""
    result = run_experiment(config)
    report_path = write_json(out_dir / f"{result.report_name}_report.json", result.to_report(config))
    logger.info("wrote %s", report_path)
    if result.columns:
        csv_path = write_csv(
            out_dir / f"{result.report_name}.csv", result.columns, result.rows, result.description
        )
        logger.info("wrote %s", csv_path)
    for v in result.ledger.violations:
        logger.error(
            "%s violated (seed %s): measured %r, bound %r%s",
            v.claim,
            v.seed,
            v.measured,
            v.bound,
            f" ({v.detail})" if v.detail else "",
        )
    return result.exit_code


def _with_overrides(config: ExperimentConfig, args: argparse.Namespace) -> ExperimentConfig:
    if args.workers is not None:
        config = replace(config, workers=args.workers)
    return config


def run_command(args: argparse.Namespace) -> int:
    if args.seed is not None and not 0 <= args.seed <= 2**64 - 1:
        raise ValueError(f"--seed must lie in [0, 2^64 - 1], got {args.seed}")
    if args.workers is not None and args.workers < 1:
        raise ValueError(f"--workers must be positive, got {args.workers}")

    if args.config is not None:
        config = load_experiment_config(args.config, seed=args.seed, self_check=args.self_check)
        config = _with_overrides(config, args)
        out_dir = resolve_out(args, config)
        if args.self_check:
            out_dir = out_dir / "self_check" / config.experiment
        return run_config(config, out_dir)

    if not args.self_check:
        raise ValueError("a config file is required unless --self-check is given")
    seed = 0 if args.seed is None else args.seed
    root = resolve_out(args) / "self_check"
    worst = EXIT_OK
    for name in EXPERIMENTS:
        config = _with_overrides(default_config(name, seed, self_check=True), args)
        code = run_config(config, root / name)
        if code == EXIT_VIOLATION:
            logger.warning("self-check %s: claims violated", name)
        else:
            logger.info("self-check %s: ok", name)
        worst = max(worst, code)
    return worst


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    try:
        return run_command(args)
    except (ValueError, OSError) as e:
        print(f"witness-lab: error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
