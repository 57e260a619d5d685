#!/usr/bin/env python3
"""Refinement ratios between two verify reports (coarse, fine)."""

import argparse
import csv
import math
import sys


def load(path):
    with open(path, newline="") as f:
        return {row["check"]: row for row in csv.DictReader(f)}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("coarse")
    ap.add_argument("fine")
    ap.add_argument("--tolerance", type=float, default=0.10, help="allowed relative change of max-ratio checks")
    args = ap.parse_args(argv)

    a, b = load(args.coarse), load(args.fine)
    shared = [k for k in a if k in b]
    if not shared:
        print("error: no common checks", file=sys.stderr)
        return 1

    out = csv.writer(sys.stdout)
    out.writerow(["check", "coarse_N", "fine_N", "coarse", "fine", "ratio", "order", "stable"])
    ok = True
    for name in shared:
        x, y = float(a[name]["statistic"]), float(b[name]["statistic"])
        na, nb = int(a[name]["grid_N"]), int(b[name]["grid_N"])
        ratio = y / x if x != 0 else math.nan
        order = -math.log(ratio) / math.log(nb / na) if ratio > 0 and nb != na else math.nan
        stable = ""
        if "max_ratio" in name or name == "poincare_constant":
            stable = "yes" if abs(ratio - 1) < args.tolerance else "no"
            ok = ok and stable == "yes"
        out.writerow([name, na, nb, repr(x), repr(y), f"{ratio:.4g}", f"{order:.3g}", stable])
    return 0 if ok else 2


if __name__ == "__main__":
    sys.exit(main())
