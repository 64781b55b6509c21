"""Closed-form revenue against the brute-force menu search at one point per structure."""

import argparse
import json

from menuforge import solve
from menuforge.oracle import OracleConfig, compare

POINTS = {
    "A": (0.5, 1.2, 1.0),
    "B": (1.1, 1.2, 1.0),
    "C": (1.3, 1.05, 1.0),
    "D": (2.0, 1.2, 1.0),
    "E": (10.0, 1.4, 1.0),
    "Dp": (3.0, 2.0, 1.0),
    "Ep": (10.0, 2.0, 1.0),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--allocation-grid", type=float, default=0.05)
    ap.add_argument("--price-grid", type=float, default=0.02)
    ap.add_argument("--max-items", type=int, default=4)
    ap.add_argument("--json", action="store_true")
    a = ap.parse_args()
    cfg = OracleConfig(a.allocation_grid, a.price_grid, a.max_items)
    out = []
    for lab, pt in POINTS.items():
        rep = compare(solve(*pt), cfg)
        out.append(dict(regime=lab, c=pt[0], b1=pt[1], b2=pt[2], **rep))
        if not a.json:
            print(f"{lab:3s} c={pt[0]:<5g} b1={pt[1]:<4g} analytic {rep['analytic']:.6f}  oracle {rep['oracle']:.6f}"
                  f"  gap {rep['relative_gap']:+.2e}  eps {rep['epsilon']:.3f}  {'ok' if rep['passed'] else 'FAIL'}")
    if a.json:
        print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
