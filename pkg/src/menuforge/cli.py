"""Command-line entry point: solve, verify, sweep, oracle, dual, certify.

Exit codes: 0 success, 1 domain or input error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .domain import DomainError, SolverError, SupportRect
from .mechanism import SCHEMA_VERSION, from_dict, revenue
from .solver import solve

SWEEP_COLUMNS = ["c_over_b2", "b1_over_b2", "regime", "delta1", "delta2", "delta_star", "h", "a1", "a2", "a",
                 "revenue"]


class UsageError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="menuforge", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="verb", required=True)

    def support(sp):
        sp.add_argument("--c", type=float)
        sp.add_argument("--c1", type=float)
        sp.add_argument("--c2", type=float)
        sp.add_argument("--b1", type=float)
        sp.add_argument("--b2", type=float)
        sp.add_argument("--c-over-b2", type=float, dest="c_over_b2")
        sp.add_argument("--b1-over-b2", type=float, dest="b1_over_b2")

    def output(sp, choices=("json", "text", "csv"), default="json"):
        sp.add_argument("--output", choices=choices, default=default)

    sp = sub.add_parser("solve", help="closed-form optimal mechanism")
    support(sp)
    output(sp)

    sp = sub.add_parser("verify", help="virtual-valuation certificate")
    support(sp)
    sp.add_argument("--input", help="mechanism JSON written by `solve` ('-' for stdin)")
    sp.add_argument("--tolerance", type=float, default=1e-7)
    output(sp, ("json", "text"))

    sp = sub.add_parser("sweep", help="regime map over (b1/b2, c/b2)")
    sp.add_argument("--b1-over-b2", required=True, dest="b1_over_b2", help="lo:hi:step")
    sp.add_argument("--c-over-b2", required=True, dest="c_over_b2", help="lo:hi:step")
    sp.add_argument("--workers", type=int, default=1)
    output(sp, ("csv", "json"), "csv")

    sp = sub.add_parser("oracle", help="brute-force lower bound on revenue")
    support(sp)
    sp.add_argument("--grid", default="0.05,0.02", help="allocation_step,price_step")
    sp.add_argument("--max-items", type=int, default=4, dest="max_items")
    sp.add_argument("--top-k", type=int, default=0, dest="top_k")
    sp.add_argument("--workers", type=int, default=1)
    output(sp, ("json", "text", "csv"))

    sp = sub.add_parser("dual", help="strong-duality report for a worked example")
    sp.add_argument("--example", type=int, required=True, choices=(1, 2, 3))
    output(sp, ("json", "text", "csv"))

    sp = sub.add_parser("certify", help="grid sweeps of the boundary inequalities")
    sp.add_argument("--check", default="all")
    sp.add_argument("--grid", type=int, default=50, help="points per axis")
    sp.add_argument("--tolerance", type=float, default=1e-9)
    output(sp, ("json", "text", "csv"))
    return p


def _rect_args(a) -> dict:
    """Resolve absolute or ratio flags into solve() keyword arguments."""
    b2 = a.b2 if a.b2 is not None else 1.0
    if a.b1 is not None and a.b1_over_b2 is not None:
        raise UsageError("give --b1 or --b1-over-b2, not both")
    if a.b1 is None and a.b1_over_b2 is None:
        raise UsageError("--b1 (or --b1-over-b2) is required")
    b1 = a.b1 if a.b1 is not None else a.b1_over_b2 * b2
    given = [x is not None for x in (a.c, a.c_over_b2)]
    pair = [x is not None for x in (a.c1, a.c2)]
    if sum(given) + (1 if any(pair) else 0) != 1:
        raise UsageError("give exactly one of --c, --c-over-b2, or --c1/--c2")
    if any(pair):
        if not all(pair):
            raise UsageError("--c1 and --c2 go together")
        return {"c1": a.c1, "c2": a.c2, "b1": b1, "b2": b2}
    c = a.c if a.c is not None else a.c_over_b2 * b2
    return {"c": c, "b1": b1, "b2": b2}


def _solve(kw: dict):
    if "c1" in kw:
        return solve(b1=kw["b1"], b2=kw["b2"], c1=kw["c1"], c2=kw["c2"])
    return solve(kw["c"], kw["b1"], kw["b2"])


def _text(d: dict, indent: int = 0) -> str:
    pad = " " * indent
    out = []
    for k, v in d.items():
        if isinstance(v, dict):
            out.append(f"{pad}{k}:")
            out.append(_text(v, indent + 2))
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            out.append(f"{pad}{k}:")
            for x in v:
                out.append(_text(x, indent + 2))
                out.append("")
        else:
            out.append(f"{pad}{k}: {v}")
    return "\n".join(out)


def _emit(obj: dict, fmt: str, out):
    if fmt == "json":
        out.write(json.dumps(obj, indent=2, default=_default) + "\n")
    else:
        out.write(_text(obj) + "\n")


def _default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, float) and math.isinf(o):
        return "inf"
    raise TypeError(type(o))


def _row(m) -> list:
    p = m.params
    b2 = m.rect.b2

    def f(v, scale=True):
        return "" if v is None else f"{v / b2 if scale else v:.12g}"

    return [f"{m.rect.c2 / b2:.12g}", f"{m.rect.b1 / b2:.12g}", m.label, f(p.delta1), f(p.delta2),
            f(p.delta_star), f(p.h), f(p.a1, False), f(p.a2, False), f(p.a, False), f(revenue(m))]


# ------------------------------------------------------------------ verbs

def cmd_solve(a, out) -> int:
    m = _solve(_rect_args(a))
    if a.output == "csv":
        w = csv.writer(out)
        w.writerow(SWEEP_COLUMNS)
        w.writerow(_row(m))
        return 0
    _emit(m.to_dict(), a.output, out)
    return 0


def cmd_verify(a, out) -> int:
    from .verifier import verify_myerson

    if a.input:
        src = sys.stdin.read() if a.input == "-" else open(a.input).read()
        m = from_dict(json.loads(src))
    else:
        m = _solve(_rect_args(a))
    rep = verify_myerson(m)
    d = rep.to_dict()
    d["passed"] = rep.worst_margin >= -a.tolerance
    d["tolerance"] = a.tolerance
    d["regime"] = m.label
    if a.output == "text":
        out.write(f"regime {m.label}: {'PASS' if d['passed'] else 'FAIL'} "
                  f"(worst margin {rep.worst_margin:.3e})\n")
        for f in rep.failures():
            out.write(f"  {f}\n")
    else:
        _emit(d, "json", out)
    return 0 if d["passed"] else 2


def parse_range(spec: str) -> np.ndarray:
    try:
        lo, hi, step = (float(x) for x in spec.split(":"))
    except ValueError:
        raise UsageError(f"range {spec!r} must be lo:hi:step")
    if step <= 0 or hi < lo:
        raise UsageError(f"bad range {spec!r}")
    n = int(math.floor((hi - lo) / step + 1e-9))
    return np.round(lo + step * np.arange(n + 1), 12)


def _sweep_row(args) -> list:
    s, r = args
    try:
        return _row(solve(s, r, 1.0))
    except (DomainError, SolverError) as e:
        return [f"{s:.12g}", f"{r:.12g}", "error"] + [""] * 8


def sweep_rows(rs, ss, workers: int = 1) -> list:
    pts = [(float(s), float(r)) for r in rs for s in ss]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            return list(ex.map(_sweep_row, pts, chunksize=64))
    return [_sweep_row(p) for p in pts]


def _workers(a) -> int:
    env = os.environ.get("MENUFORGE_WORKERS")
    return int(env) if env else a.workers


def cmd_sweep(a, out) -> int:
    rs, ss = parse_range(a.b1_over_b2), parse_range(a.c_over_b2)
    rows = sweep_rows(rs, ss, _workers(a))
    if a.output == "csv":
        w = csv.writer(out)
        w.writerow(SWEEP_COLUMNS)
        w.writerows(rows)
    else:
        out.write(json.dumps([dict(zip(SWEEP_COLUMNS, r)) for r in rows]) + "\n")
    return 0


def cmd_oracle(a, out) -> int:
    from .oracle import OracleConfig, compare, oracle_search

    try:
        ag, pg = (float(x) for x in a.grid.split(","))
    except ValueError:
        raise UsageError("--grid must be allocation_step,price_step")
    cfg = OracleConfig(allocation_grid=ag, price_grid=pg, max_items=a.max_items, workers=_workers(a), top_k=a.top_k)
    m = _solve(_rect_args(a))
    if not m.rect.symmetric():
        raise DomainError("the oracle covers symmetric supports only")
    if a.output == "csv":
        res = oracle_search(m.rect, cfg)
        out.write(res.top_csv() if a.top_k else
                  f"menu,revenue\n{';'.join(f'({i.q1:.4g},{i.q2:.4g},{i.price:.6g})' for i in res.menu.items)},"
                  f"{res.revenue:.12g}\n")
        return 0
    rep = compare(m, cfg)
    rep["regime"] = m.label
    _emit(rep, a.output, out)
    return 0


def cmd_dual(a, out) -> int:
    from .dual_lab import build_example, strong_duality_report

    if a.output == "csv":
        out.write(build_example(a.example).density_csv())
        return 0
    rep = strong_duality_report(a.example)
    _emit(rep, a.output, out)
    return 0 if rep["passed"] else 2


def cmd_certify(a, out) -> int:
    from .verifier import CHECKS, GridSpec, certify_sweep, default_grid

    ids = list(CHECKS) if a.check == "all" else [a.check]
    for cid in ids:
        if cid not in CHECKS:
            raise DomainError(f"unknown check {cid!r}; known: {', '.join(CHECKS)}")
    reps = []
    for cid in ids:
        g = default_grid(cid)
        reps.append(certify_sweep(cid, GridSpec(g.r_lo, g.r_hi, a.grid, g.s_lo, g.s_hi, a.grid)))
    ok = all(r.worst_margin >= -a.tolerance for r in reps)
    if a.output == "csv":
        w = csv.writer(out)
        w.writerow(["check_id", "c", "b1", "b2", "margin"])
        for r in reps:
            for row in r.rows:
                w.writerow([r.check_id, *row])
    elif a.output == "text":
        for r in reps:
            flag = "PASS" if r.worst_margin >= -a.tolerance else "FAIL"
            out.write(f"{flag} {r.check_id}: worst {r.worst_margin:.3e} at {r.worst_point} ({r.n_points} pts)\n")
    else:
        out.write(json.dumps({"schema_version": SCHEMA_VERSION, "tolerance": a.tolerance, "passed": ok,
                              "checks": [dict(r.to_dict(), passed=r.worst_margin >= -a.tolerance) for r in reps]},
                             indent=2, default=_default) + "\n")
    return 0 if ok else 2


VERBS = {"solve": cmd_solve, "verify": cmd_verify, "sweep": cmd_sweep, "oracle": cmd_oracle, "dual": cmd_dual,
         "certify": cmd_certify}


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        a = _parser().parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 1
    try:
        return VERBS[a.verb](a, out)
    except (UsageError, DomainError, SolverError, ValueError, OSError) as e:
        sys.stderr.write(f"error: {e}\n")
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
