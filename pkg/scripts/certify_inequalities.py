"""Grid evidence for the inequalities behind the regime boundaries."""

import argparse
import os

from menuforge.verifier import certify_all


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grid", type=int, default=50)
    ap.add_argument("--csv-dir")
    a = ap.parse_args()
    for rep in certify_all(a.grid):
        print(f"{'PASS' if rep.worst_margin >= -1e-9 else 'FAIL'} {rep.check_id:22s} worst {rep.worst_margin:+.3e}"
              f" at {tuple(round(v, 4) for v in rep.worst_point)} ({rep.n_points} pts)")
        if a.csv_dir:
            os.makedirs(a.csv_dir, exist_ok=True)
            with open(os.path.join(a.csv_dir, f"{rep.check_id}.csv"), "w") as f:
                f.write(rep.to_csv())


if __name__ == "__main__":
    main()
