#!/usr/bin/env python3
"""Run the backend comparison experiment and print the report.

Usage: python scripts/run_benchmark.py [--reps N]
"""

import argparse

from semnav import fixtures
from semnav.bench import emit_csv, emit_markdown, run_suite, comparison_cases
from semnav.ontology import OntologyReasoner
from semnav.relational import RelationalReasoner


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--reps", type=int, default=100)
    parser.add_argument("--csv", action="store_true", help="print csv instead of markdown")
    args = parser.parse_args()

    kb = fixtures.reference_kb()
    backends = [RelationalReasoner(kb), OntologyReasoner(kb)]
    report = run_suite(comparison_cases(args.reps), kb, backends)
    print(emit_csv(report) if args.csv else emit_markdown(report))
    return 0 if report.all_equal else 3


if __name__ == "__main__":
    raise SystemExit(main())
