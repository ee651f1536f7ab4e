#!/usr/bin/env python3
"""Evaluate the tabulated n = 2m basis changes case by case.

Prints the worst error per (region, case) for the printed table and for
the corrected one.

    python3 scripts/appendix_check.py [--max-m 6]
"""

import argparse

from asptk.fastfactor import appendix_check


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-m", type=int, default=6)
    ap.add_argument("--tol", type=float, default=1e-9)
    args = ap.parse_args()
    bad = 0
    for kind in ("A2", "C2"):
        for verbatim in (True, False):
            tag = "printed" if verbatim else "corrected"
            worst: dict = {}
            for m in range(1, args.max_m + 1):
                r = appendix_check(kind, m, verbatim=verbatim, tol=args.tol)
                for key, e in r["errors"].items():
                    worst[key] = max(worst.get(key, 0.0), e)
            print(f"{kind} {tag}, m = 1..{args.max_m}")
            for (region, case), e in sorted(worst.items()):
                flag = "ok" if e < args.tol else "FAIL"
                print(f"  {region:>3} {case:<10} {e:10.2e}  {flag}")
            if not verbatim:
                bad += sum(e >= args.tol for e in worst.values())
    raise SystemExit(1 if bad else 0)


if __name__ == "__main__":
    main()
