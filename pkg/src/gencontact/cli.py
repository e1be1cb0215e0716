"""Command line front end: run scenarios, list the catalog, explain checks.

Exit status of ``run``: 0 when every check passes, 1 when any check
fails, 2 when the scenario cannot be loaded or validated, 3 when
--strict is set and any check is inconclusive.
"""

from __future__ import annotations

import argparse
import sys
import textwrap

from .scenario import (
    ScenarioError,
    catalog_lines,
    check_names,
    explain_check,
    load_scenario,
    run_checks,
)


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="gencontact",
        description="Exact checks for generalized contact structures "
                    "on frame-presented models.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="load a scenario and run its checks")
    run.add_argument("scenario",
                     help="path to a scenario file or a shipped scenario name")
    run.add_argument("--strict", action="store_true",
                     help="treat inconclusive verdicts as a failing exit")
    run.add_argument("--report", metavar="PATH",
                     help="write the machine-readable report here")
    run.add_argument("--points", metavar="SUBSET",
                     help="comma-separated sample point indices to report")

    sub.add_parser("list", help="print every addressable name")

    explain = sub.add_parser("explain", help="describe one check")
    explain.add_argument("check", help="a check name; see list")
    return parser


def _parse_points(text):
    if text is None:
        return None
    try:
        indices = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ScenarioError("--points wants comma-separated integers, got %r"
                            % (text,))
    if not indices:
        raise ScenarioError("--points selected no indices")
    return indices


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)

    if args.command == "list":
        for line in catalog_lines():
            print(line)
        return 0

    if args.command == "explain":
        try:
            doc = explain_check(args.check)
        except ScenarioError as exc:
            print("error: %s" % exc, file=sys.stderr)
            return 2
        print("%s:" % args.check)
        for line in textwrap.wrap(" ".join(doc.split()), width=72):
            print("  " + line)
        return 0

    try:
        point_filter = _parse_points(args.points)
        scenario = load_scenario(args.scenario)
        report = run_checks(scenario, strict=args.strict,
                            point_filter=point_filter)
    except ScenarioError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    sys.stdout.write(report.human_text())
    if args.report:
        with open(args.report, "w", encoding="utf-8") as handle:
            handle.write(report.machine_text())
    return report.status


if __name__ == "__main__":
    sys.exit(main())
