import argparse
import json
import logging
import sys

from pydantic import ValidationError

from symcurrents.runner import run_scenario
from symcurrents.scenario import Scenario
from symcurrents.scenario import bundled_scenarios
from symcurrents.scenario import load_scenario
from symcurrents.utils import SymcurrentsException


def cmd_run(args) -> int:
    return run_scenario(
        args.scenario,
        out=args.out,
        dt=args.dt,
        steps=args.steps,
        refine=args.refine,
        seed=args.seed,
    )


def cmd_validate(args) -> int:
    try:
        scenario = load_scenario(args.scenario)
    except ValidationError as e:
        print(f"error: invalid scenario {args.scenario}:\n{e}", file=sys.stderr)
        return 1
    except SymcurrentsException as e:
        print(f"error: {e.message}", file=sys.stderr)
        return e.exit_code
    print(f"{scenario.name}: valid")
    return 0


def cmd_list(args) -> int:
    for name in bundled_scenarios():
        scenario = load_scenario(name)
        print(f"{name}\t{scenario.description}")
    return 0


def cmd_describe(args) -> int:
    """Print a scenario document followed by the scenario JSON schema."""
    try:
        scenario = load_scenario(args.scenario)
    except ValidationError as e:
        print(f"error: invalid scenario {args.scenario}:\n{e}", file=sys.stderr)
        return 1
    except SymcurrentsException as e:
        print(f"error: {e.message}", file=sys.stderr)
        return e.exit_code
    print(json.dumps(scenario.model_dump(mode="json"), indent=2))
    if args.schema:
        print(json.dumps(Scenario.model_json_schema(), indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symcurrents",
        description="Check symmetry-induced continuity equations of non-Hermitian Schrödinger fields",
    )
    parser.add_argument(
        "--verbose", "-v", action="store_true", help="Log every pipeline stage"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="Run a scenario file or bundled scenario")
    run.add_argument("scenario", help="Scenario JSON file or bundled name")
    run.add_argument("--out", help="Directory receiving the CSV and JSON reports")
    run.add_argument("--dt", type=float, help="Override the time step")
    run.add_argument("--steps", type=int, help="Override the number of steps per side")
    run.add_argument(
        "--refine",
        type=int,
        default=0,
        metavar="K",
        help="Halve dx and dt K times over the same box and time span",
    )
    run.add_argument("--seed", type=int, help="Override the random seed")
    run.set_defaults(func=cmd_run)

    validate = commands.add_parser("validate", help="Validate a scenario document")
    validate.add_argument("scenario")
    validate.set_defaults(func=cmd_validate)

    listing = commands.add_parser("list-scenarios", help="List bundled scenarios")
    listing.set_defaults(func=cmd_list)

    describe = commands.add_parser("describe", help="Print a scenario document")
    describe.add_argument("scenario")
    describe.add_argument(
        "--schema", action="store_true", help="Also print the scenario JSON schema"
    )
    describe.set_defaults(func=cmd_describe)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO)
    if getattr(args, "refine", 0) < 0:
        print("error: --refine must be non-negative", file=sys.stderr)
        return 1
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
