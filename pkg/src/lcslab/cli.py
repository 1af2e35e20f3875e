"""Command line front end.

Subcommands: list the built-in scenarios, export one to a JSON file, run a
scenario file through the check pipeline, or run the whole built-in suite.
Exit codes are a stable contract: 0 all checks passed, 1 at least one FAIL,
2 bad input (unknown name, unreadable file, schema or expression error).
"""

import argparse
import json
import sys

from .checks import KNOWN_MODULES, run_scenario, run_suite
from .errors import ScenarioFormatError, UnknownScenarioError
from .gallery import load_example, registry_names
from .report import (render_csv, render_json, render_suite_csv,
                     render_suite_json, render_suite_text, render_text)
from .scenario import export_scenario, scenario_from_dict

RENDERERS = {"json": render_json, "csv": render_csv, "text": render_text}
SUITE_RENDERERS = {"json": render_suite_json, "csv": render_suite_csv,
                   "text": render_suite_text}


def _emit(text: str, out_path):
    if out_path is None:
        sys.stdout.write(text)
        return
    try:
        with open(out_path, "w", encoding="utf-8") as handle:
            handle.write(text)
    except OSError as err:
        raise ScenarioFormatError(f"cannot write report: {err}") from err


def cmd_list(args) -> int:
    for name in registry_names():
        print(f"{name:22s} {load_example(name).description}")
    return 0


def cmd_export(args) -> int:
    try:
        export_scenario(args.name, args.path)
    except OSError as err:
        raise ScenarioFormatError(f"cannot write scenario: {err}") from err
    return 0


def cmd_run(args) -> int:
    try:
        with open(args.path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as err:
        raise ScenarioFormatError(f"cannot read scenario file: {err}") from err
    except json.JSONDecodeError as err:
        raise ScenarioFormatError(
            f"scenario file is not valid JSON: {err}") from err
    scn = scenario_from_dict(data)
    if args.seed is not None:
        seed = args.seed
    else:
        samples = data.get("samples", {})
        seed = int(samples.get("seed", 0)) if isinstance(samples, dict) else 0
    checks = args.checks.split(",") if args.checks else None
    report = run_scenario(scn, seed=seed, checks=checks)
    _emit(RENDERERS[args.format](report), args.out)
    return report.exit_code


def cmd_suite(args) -> int:
    reports = run_suite(seed=args.seed, module=args.filter)
    _emit(SUITE_RENDERERS[args.format](reports), args.out)
    return 1 if any(rep.exit_code for rep in reports) else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lcslab",
        description="Numerical checks for twisted-form geometry scenarios.")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="show the built-in scenarios")

    p_export = sub.add_parser("export", help="write a built-in scenario to JSON")
    p_export.add_argument("name")
    p_export.add_argument("path")

    p_run = sub.add_parser("run", help="run a scenario file")
    p_run.add_argument("path")
    p_run.add_argument("--checks", default=None,
                       help="comma-separated check id prefixes to keep")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--format", choices=sorted(RENDERERS), default="json")
    p_run.add_argument("--out", default=None)

    p_suite = sub.add_parser("suite", help="run every built-in scenario")
    p_suite.add_argument("--filter", choices=KNOWN_MODULES, default=None,
                         help="keep only one module's checks")
    p_suite.add_argument("--seed", type=int, default=0)
    p_suite.add_argument("--format", choices=sorted(SUITE_RENDERERS),
                         default="json")
    p_suite.add_argument("--out", default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"list": cmd_list, "export": cmd_export, "run": cmd_run,
                "suite": cmd_suite}
    try:
        return handlers[args.command](args)
    except (ScenarioFormatError, UnknownScenarioError) as err:
        print(f"lcslab: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
