"""Regime map over (b1/b2, c/b2) and a check of its boundaries.

Writes the sweep CSV, then for every b1/b2 row compares the observed label
changes with the threshold formulas (alpha1, alpha2, beta, the high-c lines).
"""

import argparse
import csv
import sys

import numpy as np

from menuforge.cli import SWEEP_COLUMNS, parse_range, sweep_rows
from menuforge.solver import thresholds


def boundary_errors(rows):
    by_r = {}
    for row in rows:
        by_r.setdefault(float(row[1]), []).append((float(row[0]), row[2]))
    worst = 0.0
    for r, cells in sorted(by_r.items()):
        cells.sort()
        th = thresholds(r, 1.0)
        expected = sorted(v for k, v in th.items() if np.isfinite(v))
        for (s0, l0), (s1, l1) in zip(cells, cells[1:]):
            if l0 != l1:
                # some threshold must sit in (s0, s1]
                gap = min(0.0 if s0 < v <= s1 else min(abs(v - s0), abs(v - s1)) for v in expected)
                worst = max(worst, gap)
    return worst


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--b1-over-b2", default="1:2.2:0.02")
    ap.add_argument("--c-over-b2", default="0:12:0.1")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="-")
    a = ap.parse_args()
    rs, ss = parse_range(a.b1_over_b2), parse_range(a.c_over_b2)
    rows = sweep_rows(rs, ss, a.workers)
    f = sys.stdout if a.out == "-" else open(a.out, "w", newline="")
    w = csv.writer(f)
    w.writerow(SWEEP_COLUMNS)
    w.writerows(rows)
    if f is not sys.stdout:
        f.close()
    counts = {}
    for row in rows:
        counts[row[2]] = counts.get(row[2], 0) + 1
    print(f"cells per regime: {dict(sorted(counts.items()))}", file=sys.stderr)
    print(f"label changes off a threshold by at most {boundary_errors(rows):.3g}", file=sys.stderr)


if __name__ == "__main__":
    main()
