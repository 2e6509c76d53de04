"""``verify <suite>``: run a property suite and write a JSON-lines report."""
from __future__ import annotations

import argparse
import sys

from ..errors import ConfigError
from .report import run_suite
from .scenario import Scenario
from .suites import SUITES

__all__ = ["main", "build_parser"]


def _atoms(text: str) -> tuple:
    try:
        return tuple(float(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"atoms must be comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="verify", description=__doc__)
    ap.add_argument("suite", help=f"one of: {', '.join(SUITES)}")
    ap.add_argument("--scenario", help="JSON file with scenario fields; flags override it")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--atoms", type=_atoms, help='atom probabilities, e.g. "0.1,0.2,0.3,0.4"')
    ap.add_argument("--dim", type=int)
    ap.add_argument("--trials", type=int)
    ap.add_argument("--tolerance", type=float)
    ap.add_argument("--jobs", type=int, help="worker processes; results do not depend on it")
    ap.add_argument("--out", help="report path (default: stdout)")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    flags = {k: getattr(args, k) for k in ("seed", "atoms", "dim", "trials", "tolerance", "jobs")}
    try:
        if args.scenario:
            sc = Scenario.from_file(args.scenario, suite=args.suite, **flags)
        else:
            sc = Scenario.from_dict({"suite": args.suite}, **flags)
        report = run_suite(sc)
    except ConfigError as exc:
        print(f"verify: config error: {exc}", file=sys.stderr)
        return 2
    if args.out:
        with open(args.out, "w") as fh:
            report.write(fh)
    else:
        report.write(sys.stdout)
    s = report.summary()
    print(f"{s['suite']}: {s['trials'] - s['failures']}/{s['trials']} passed, max deviation {s['max_deviation']}",
          file=sys.stderr)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
