"""Run the acceptance scenarios and print a timing table.

    python3 scripts/run_scenarios.py [S1 S3 ...]
"""
import sys

from bingcalc.scenarios import SCENARIOS, run_scenario


def main(names):
    names = [n.upper() for n in names] or sorted(SCENARIOS)
    ok = True
    for n in names:
        r = run_scenario(n)
        ok = ok and r.passed and r.within_target
        print(f"{n:3} {'PASS' if r.passed else 'FAIL'} {r.duration:7.2f}s / {r.target_seconds:g}s  {r.title}")
        for c in r.checks:
            print(f"      {'ok ' if c.passed else 'BAD'} {c.description}: {c.computed!r}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
