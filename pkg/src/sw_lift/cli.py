"""Command line interface for sw-lift."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Sequence

from .config import ConfigError, load_config
from .pipelines import COMMANDS
from .pipelines.report import EXIT_USAGE

LOGGER = logging.getLogger(__name__)

U64_MAX = 2**64 - 1


def _seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from exc
    if not 0 <= value <= U64_MAX:
        raise argparse.ArgumentTypeError(f"seed must fit in an unsigned 64-bit integer, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Checks for the Kaluza-Klein lift of the Seiberg-Witten equations.",
    )
    parser.add_argument(
        "--log-level",
        default="WARNING",
        choices=["CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG"],
        help="Logging level to use.",
    )
    parser.add_argument(
        "--debug-dir",
        type=Path,
        help="Directory to store per-step JSON snapshots",
    )

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="Configuration file (key = value with sections)")
    common.add_argument("--out", type=Path, help="Output directory for reports and artifacts")
    common.add_argument("--seed", type=_seed, help="Seed for all random fields")
    common.add_argument("--json", action="store_true", help="Print the JSON report to stdout")

    subparsers = parser.add_subparsers(dest="command", required=True)
    subparsers.add_parser(
        "verify", parents=[common], help="Clifford identities and torus field calculus"
    )
    subparsers.add_parser(
        "lift-check", parents=[common], help="Five-dimensional Dirac operator against the torus equations"
    )
    subparsers.add_parser(
        "solve", parents=[common], help="Solve the perturbed equations and cross-check the lift"
    )
    ke_parser = subparsers.add_parser(
        "ke-report", parents=[common], help="Sasaki bundles over Kähler-Einstein surfaces"
    )
    ke_parser.add_argument("--lambdas", help="Comma separated Einstein constants, e.g. --lambdas=-4,2,6")
    ricci_parser = subparsers.add_parser(
        "ricci-oracle", parents=[common], help="Ricci formulas against finite differences"
    )
    ricci_parser.add_argument("--curvature", type=float, help="Curvature constant c of F = -i c dx1^dx2")
    ricci_parser.add_argument("--radius", type=float, help="Fibre radius r")
    return parser


def configure_logging(level: str) -> None:
    logging.basicConfig(level=getattr(logging, level.upper()), format="%(levelname)s %(name)s %(message)s")


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    overrides: dict[str, Any] = {
        "run.seed": args.seed,
        "output.directory": args.out,
    }
    if args.command == "ke-report":
        overrides["ke-report.lambdas"] = args.lambdas
    if args.command == "ricci-oracle":
        overrides["ricci-oracle.curvature"] = args.curvature
        overrides["ricci-oracle.radius"] = args.radius
    return overrides


def run_command(args: argparse.Namespace) -> int:
    try:
        config = load_config(args.config, _overrides(args))
    except ConfigError as exc:
        print(f"sw-lift {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    pipeline = COMMANDS[args.command](
        config,
        debug_dir=args.debug_dir,
        logger=logging.getLogger(f"sw_lift.{args.command}"),
    )
    try:
        report = pipeline.execute()
    except ValueError as exc:
        LOGGER.debug("Command %s rejected its input", args.command, exc_info=True)
        print(f"sw-lift {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.json:
        print(report.to_json())
    else:
        for line in report.summary_lines():
            print(line)
    return report.exit_code()


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)
    if args.command in COMMANDS:
        return run_command(args)
    parser.error("Unknown command")
    return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
