"""Command-line driver.

    sfcverify verify SCENARIO [--format text|json] [--trace] ...
    sfcverify trace SCENARIO POLICY [--format text|json] ...

``verify`` exits 0 when every policy is enforced, 1 when at least one is
violated and 2 on parse, configuration or I/O errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from .errors import SfcError
from .policy import AbsentMode
from .report import result_to_dict, emit_report, render_trace
from .scenario import load_scenario
from .verify import MatchMode, VerificationReport, verify_all, verify_policy

EXIT_OK, EXIT_VIOLATED, EXIT_ERROR = 0, 1, 2


def exit_status(report: VerificationReport) -> int:
    if report.has_errors:
        return EXIT_ERROR
    return EXIT_VIOLATED if report.p_false else EXIT_OK


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("scenario", help="path to a scenario file")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--absent-mode", choices=[m.value for m in AbsentMode], default=None,
                   help="how conditions on missing fields evaluate (overrides the scenario)")
    p.add_argument("--match-mode", choices=[m.value for m in MatchMode], default=None,
                   help="expected-traffic matching (overrides the scenario)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sfcverify",
                                     description="Verify security policies on service function chains.")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="verify every policy in a scenario")
    _add_common(v)
    v.add_argument("--trace", action="store_true", help="include hop-by-hop traces")
    v.add_argument("--jobs", type=int, default=None, help="verify policies in parallel")

    t = sub.add_parser("trace", help="show the hop-by-hop derivation of one policy")
    _add_common(t)
    t.add_argument("policy", help="verification policy name")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        scenario = load_scenario(args.scenario)
    except OSError as exc:
        print(f"sfcverify: cannot read {args.scenario}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_ERROR
    except SfcError as exc:
        print(f"sfcverify: {args.scenario}: {exc}", file=sys.stderr)
        return EXIT_ERROR

    options = scenario.options(
        AbsentMode(args.absent_mode) if args.absent_mode else None,
        MatchMode(args.match_mode) if args.match_mode else None,
    )
    chain = scenario.build_chain()

    if args.command == "verify":
        report = verify_all(chain, scenario.policies, options, max_workers=args.jobs)
        sys.stdout.write(emit_report(report, args.format, scenario.name, chain.names, options,
                                     trace=args.trace))
        for r in report.results:
            if r.error:
                print(f"sfcverify: policy {r.policy}: {r.error}", file=sys.stderr)
        return exit_status(report)

    try:
        policy = scenario.policy(args.policy)
    except KeyError:
        print(f"sfcverify: no policy named {args.policy!r} in {args.scenario}", file=sys.stderr)
        return EXIT_ERROR
    result = verify_policy(chain, policy, options)
    if args.format == "json":
        sys.stdout.write(json.dumps(result_to_dict(result), indent=2, sort_keys=True,
                                    ensure_ascii=False) + "\n")
    else:
        sys.stdout.write("\n".join(render_trace(result)) + "\n")
    return exit_status(VerificationReport((result,)))


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
