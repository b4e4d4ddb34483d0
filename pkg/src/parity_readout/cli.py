"""Command-line entry point: ``parity-readout {list,validate,run,default-config}``."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import scenarios
from .lindblad import InvariantError
from .ode import StepSizeUnderflow

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PHYSICS = 3


def _load(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise scenarios.ConfigError(f"cannot read config {path!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise scenarios.ConfigError(f"config {path!r} is not valid JSON: {exc}") from None


def _cmd_list(args) -> int:
    entries = scenarios.list_scenarios()
    if args.json:
        print(json.dumps(entries, indent=2))
    else:
        width = max(len(e["name"]) for e in entries)
        for e in entries:
            print(f"{e['name']:<{width}}  {e['description']}  [{e['plot']}]")
    return EXIT_OK


def _cmd_default_config(args) -> int:
    print(json.dumps(scenarios.default_config(args.name), indent=2))
    return EXIT_OK


def _cmd_validate(args) -> int:
    config = _load(args.config)
    scenarios.validate_config(config)
    print(f"{args.config}: ok ({config['scenario']})")
    return EXIT_OK


def _cmd_run(args) -> int:
    config = _load(args.config)
    result = scenarios.run_scenario(config)
    text = result.to_csv()
    out = args.out or config.get("output")
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="parity-readout", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("list", help="list the scenario catalog")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=_cmd_list)

    p = sub.add_parser("default-config", help="print the default config of a scenario")
    p.add_argument("name")
    p.set_defaults(func=_cmd_default_config)

    p = sub.add_parser("validate", help="check a config file without running it")
    p.add_argument("--config", required=True)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("run", help="run a scenario and write its CSV table")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="output CSV path (default: config 'output' or stdout)")
    p.set_defaults(func=_cmd_run)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except scenarios.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InvariantError, StepSizeUnderflow, ArithmeticError) as exc:
        print(f"physics error: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    except ValueError as exc:
        # physically inconsistent parameters that passed the schema (e.g. |eps| >= chi)
        print(f"physics error: {exc}", file=sys.stderr)
        return EXIT_PHYSICS


if __name__ == "__main__":
    sys.exit(main())
