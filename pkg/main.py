"""voa-forge CLI Application.

A command-line tool that builds and checks the weight-0 and weight-1
structure of shifted lattice vertex algebras with exact rational
arithmetic.

Usage:
    python main.py report --seed 7
    python main.py lattice-shift data/a1.toml --output json
    python main.py sl2-shift --level 2
    python main.py analyze-leibniz data/leibniz_sl2.json
"""

import argparse
import logging
import sys

from voa_forge.runner import OUTPUT_FORMATS, VALID_COMMANDS, RunConfig, run

INPUT_COMMANDS_HELP = "analyze-leibniz, analyze-frobenius, lattice-shift, fock-eval"


def parse_arguments(args: list[str] | None = None) -> argparse.Namespace:
    """Parse command-line arguments for voa-forge.

    Args:
        args: Optional list of arguments (for testing). If None,
              sys.argv is used.

    Returns:
        Parsed argument namespace.
    """
    parser = argparse.ArgumentParser(
        prog="voa-forge",
        description="Exact checks for shifted lattice vertex algebras.",
        epilog="Example: python main.py lattice-shift data/a1.toml --output json",
    )

    parser.add_argument(
        "command",
        type=str,
        choices=VALID_COMMANDS,
        help="What to run.",
    )

    parser.add_argument(
        "input",
        nargs="?",
        default=None,
        help=f"Input file, required by {INPUT_COMMANDS_HELP}.",
    )

    parser.add_argument(
        "-i",
        "--input",
        dest="input_flag",
        type=str,
        default=None,
        help="Input file (alternative to the positional argument).",
    )

    parser.add_argument(
        "--level",
        type=int,
        default=1,
        help="Level k of the shifted sl2 model (default: 1).",
    )

    parser.add_argument(
        "-o",
        "--output",
        type=str,
        choices=OUTPUT_FORMATS,
        default="text",
        help="Output format: text or json (default: text).",
    )

    parser.add_argument(
        "--seed",
        type=int,
        default=0,
        help="Seed for the randomized basis-change checks (default: 0).",
    )

    parser.add_argument(
        "--weight-cap",
        type=int,
        default=2,
        help="Highest weight of the state pairs used in property checks (default: 2).",
    )

    parser.add_argument(
        "-v",
        "--verbose",
        action="store_true",
        default=False,
        help="Log progress to stderr.",
    )

    namespace = parser.parse_args(args)
    if namespace.weight_cap < 0:
        parser.error("--weight-cap must be nonnegative.")
    if namespace.input and namespace.input_flag:
        parser.error("Give the input file once, positionally or with --input.")
    namespace.input = namespace.input or namespace.input_flag
    return namespace


def build_config(args: argparse.Namespace) -> RunConfig:
    """Turn parsed arguments into a RunConfig."""
    return RunConfig(
        command=args.command,
        input_path=args.input,
        output=args.output,
        seed=args.seed,
        weight_cap=args.weight_cap,
        level=args.level,
        verbose=args.verbose,
    )


def main() -> None:
    """Entry point for the voa-forge application."""
    args = parse_arguments()
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    sys.exit(run(build_config(args)))


if __name__ == "__main__":
    main()
