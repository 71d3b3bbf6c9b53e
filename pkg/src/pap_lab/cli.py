"""Command-line entry point.

    pap-lab run --scenario <path> [--seed <u64>] --out <dir>
                [--format json|text] [--halt-on-error]
    pap-lab summarize --in <dir>

Exit code 0 iff every step ran without error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import ScenarioError
from .scenario import load_scenario, run_scenario, summarize_directory


def _print_text_report(report: dict) -> None:
    for step in report["steps"]:
        status = "error" if step["error"] else "ok"
        extra = ""
        if "verdict" in step:
            v = step["verdict"]
            extra = (f" reader_accepted={v['reader_accepted_tag']}"
                     f" tag_accepted={v['tag_accepted_reader']}"
                     f" bit {v['privacy_bit_before']}->{v['privacy_bit_after']}")
        elif "report" in step:
            r = step["report"]
            extra = f" success={r['success']} linked={r['linked']}"
        elif "game" in step:
            g = step["game"]
            extra = f" strategy={g['strategy']} advantage={g['advantage']:.3f}"
        print(f"step {step['index']:3d} [{step['kind']}] {step['label']}: {status}{extra}")
        if step["error"]:
            print(f"        {step['error']}")
    c = report["counters"]
    print(f"steps={c['steps']} sessions={c['sessions_run']} attacks={c['attacks_run']} "
          f"attacks_succeeded={c['attacks_succeeded']} errors={c['steps_errored']}")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="pap-lab",
        description="Deterministic simulator and adversary harness for the PAP "
                    "RFID authentication protocol.")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute a scenario file")
    run_p.add_argument("--scenario", required=True, help="path to the JSON scenario")
    run_p.add_argument("--seed", type=int, default=None,
                       help="64-bit seed overriding the scenario file")
    run_p.add_argument("--out", required=True, help="output directory for transcripts/report")
    run_p.add_argument("--format", choices=("json", "text"), default="text")
    run_p.add_argument("--halt-on-error", action="store_true",
                       help="stop at the first step error")

    sum_p = sub.add_parser("summarize", help="aggregate statistics over emitted transcripts")
    sum_p.add_argument("--in", dest="in_dir", required=True,
                       help="directory containing .jsonl transcripts")

    args = parser.parse_args(argv)

    try:
        if args.command == "run":
            if args.seed is not None and not 0 <= args.seed < 1 << 64:
                parser.error("--seed must fit in 64 bits")
            scenario = load_scenario(args.scenario)
            halt = True if args.halt_on_error else None
            report = run_scenario(scenario, args.out, seed_override=args.seed,
                                  halt_on_error=halt)
            if args.format == "json":
                print(json.dumps(report, indent=2))
            else:
                _print_text_report(report)
            return 0 if report["counters"]["steps_errored"] == 0 else 1

        summary = summarize_directory(args.in_dir)
        print(json.dumps(summary, indent=2))
        return 0
    except ScenarioError as exc:
        print(f"pap-lab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"pap-lab: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
