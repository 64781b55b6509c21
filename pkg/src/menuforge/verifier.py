"""Optimality certificates for solved mechanisms and numeric re-checks of the
polynomial inequalities used in the existence proofs.

verify_myerson walks the q1 ladder of the one-dimensional reduction and
checks the virtual-valuation conditions on every interval. Running extrema
of the prefix integral F(x) = int V are taken at piece ends and at zeros
of V (F' = V), so they are exact; a 200-point sample is added as a guard.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .domain import DomainError, SolverError
from .measure import PiecewiseV, integral_V, mu_bar_of
from .mechanism import Mechanism, q1_ladder
from . import solver as S

TOL = 1e-7
SWEEP_TOL = 1e-9


@dataclass
class IntervalCheck:
    lo: float
    hi: float
    q1: float
    condition: int
    margins: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(m >= -TOL for m in self.margins.values())


@dataclass
class MyersonReport:
    intervals: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def worst_margin(self) -> float:
        ms = [m for iv in self.intervals for m in iv.margins.values()] + list(self.extra.values())
        return min(ms) if ms else 0.0

    @property
    def passed(self) -> bool:
        return self.worst_margin >= -TOL

    def failures(self) -> list[str]:
        out = []
        for iv in self.intervals:
            out += [f"[{iv.lo:.6g},{iv.hi:.6g}] cond {iv.condition}: {k}={v:.3g}"
                    for k, v in iv.margins.items() if v < -TOL]
        out += [f"{k}={v:.3g}" for k, v in self.extra.items() if v < -TOL]
        return out

    def to_dict(self) -> dict:
        return {"passed": self.passed, "worst_margin": self.worst_margin,
                "intervals": [dict(asdict(iv), passed=iv.passed) for iv in self.intervals],
                "extra": self.extra}


def _critical_points(pv: PiecewiseV, lo: float, hi: float, n: int = 200) -> list[float]:
    xs = set(np.linspace(lo, hi, n).tolist())
    xs.update(float(b) for b in pv.breaks if lo <= b <= hi)
    xs.update(pv.zeros(lo, hi))
    xs.update((lo, hi))
    return sorted(xs)


def _check_interval(pv: PiecewiseV, lo: float, hi: float, q: float, b1: float, b2: float) -> IntervalCheck:
    sc = b1 + b2  # integrals of V carry one power of length
    eps = 1e-12 * sc
    left_end = abs(lo + b2) <= eps
    right_end = abs(hi - b1) <= eps
    total = integral_V(pv, lo, hi)
    xs = _critical_points(pv, lo, hi)
    m: dict = {}
    if q <= 1e-12:
        cond = 2
        m["a:starts_at_-b2"] = 0.0 if left_end else -abs(lo + b2) / sc
        if not right_end:
            m["b:V(hi)=0"] = -abs(pv(hi))
        m["c:integral<=0"] = -total / sc
        m["d:prefix>=k"] = min(integral_V(pv, lo, x) - total for x in xs) / sc
    elif q >= 1 - 1e-12:
        cond = 4
        if not left_end:
            m["a:V(lo)=0"] = -abs(pv(lo))
        m["b:ends_at_b1"] = 0.0 if right_end else -abs(hi - b1) / sc
        m["c:integral>=0"] = total / sc
        m["d:suffix<=k"] = min(total - integral_V(pv, x, hi) for x in xs) / sc
    else:
        cond = 3
        if not left_end:
            m["a:V(lo)=0"] = -abs(pv(lo))
        if not right_end:
            m["b:V(hi)=0"] = -abs(pv(hi))
        m["c:integral=0"] = -abs(total) / sc
        m["d:prefix>=0"] = min(integral_V(pv, lo, x) for x in xs) / sc
    return IntervalCheck(lo, hi, q, cond, m)


def verify_myerson(mech: Mechanism) -> MyersonReport:
    """Check the virtual-valuation optimality conditions interval by interval.

    A swapped mechanism (b1 < b2) is checked in its native orientation; the
    conditions are invariant under relabeling the items.
    """
    nat = mech.native()
    b1, b2 = nat.rect.b1, nat.rect.b2
    pv = nat.virtual_value()
    rep = MyersonReport()
    ladder = q1_ladder(nat)
    prev = -1.0
    for lo, hi, q in ladder:
        rep.intervals.append(_check_interval(pv, lo, hi, q, b1, b2))
        rep.extra.setdefault("q1_monotone", 0.0)
        if q < prev - 1e-12:
            rep.extra["q1_monotone"] = q - prev
        prev = q
    rep.extra["V(b1)=0"] = -abs(pv(b1))
    rep.extra["mu(Z)=0"] = -abs(verify_exclusion_balance(nat))
    rep.extra["V_continuity"] = -pv.continuity_gap()
    # every non-null item sells one unit for sure
    rep.extra["unit_allocation"] = -max([abs(it.q1 + it.q2 - 1) for it in nat.menu.items] + [0.0])
    rep.extra["u(corner)=0"] = -abs(nat.utility((nat.rect.c1, nat.rect.c2)))
    return rep


def verify_exclusion_balance(mech: Mechanism) -> float:
    """mu-bar of the exclusion region (geometric path)."""
    nat = mech.native()
    return mu_bar_of(nat.rect, nat.exclusion)


# ---------------------------------------------------------------------------
# inequality sweeps


@dataclass(frozen=True)
class GridSpec:
    """Grid over r = b1/b2 and s; s is c/b2 or a fraction of the check's c-interval."""

    r_lo: float = 1.0
    r_hi: float = 1.5
    n_r: int = 50
    s_lo: float = 0.0
    s_hi: float = 1.0
    n_s: int = 50

    def rs(self) -> np.ndarray:
        return np.linspace(self.r_lo, self.r_hi, self.n_r)

    def ss(self) -> np.ndarray:
        return np.linspace(self.s_lo, self.s_hi, self.n_s)

    def describe(self) -> str:
        return (f"b1/b2 in [{self.r_lo}, {self.r_hi}] x{self.n_r}; "
                f"s in [{self.s_lo}, {self.s_hi}] x{self.n_s}")


@dataclass
class SweepReport:
    check_id: str
    grid: str
    worst_margin: float
    worst_point: tuple
    n_points: int
    rows: list = field(default_factory=list, repr=False)

    @property
    def passed(self) -> bool:
        return self.worst_margin >= -SWEEP_TOL

    def to_dict(self) -> dict:
        return {"check_id": self.check_id, "grid": self.grid, "worst_margin": self.worst_margin,
                "worst_point": list(self.worst_point), "n_points": self.n_points, "passed": self.passed}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["c", "b1", "b2", "margin"])
        w.writerows(self.rows)
        return buf.getvalue()


def _ds_h0(c, b1, b2):
    return (b1 / 2 - b2 / 4
            - (3 * b2 - 2 * b1) * math.sqrt(3 * b2 * c * (8 * b1 - 3 * b2) * (2 * b2 - c))
            / (36 * b2 * (2 * b2 - c)))


def _upper_14(b1, b2):
    return 2 * (S.T_CONST - 1.4) * (b1 - b2) + 1.4 * b2


def _m_c1_2(c, b1, b2):
    return (b2 / 3 - S.b_curve(c, b1, b2).delta2) / b2


def _m_c1_3(c, b1, b2):
    p = S.solve_structure_b(c, b1, b2)
    return S.b_integral_margin(c, b1, b2, p.h, p.delta_star) / b2 ** 3


def _m_c1_4(c, b1, b2):
    return (2 * (S.T_CONST - 1) * (b1 - b2) + b2 - S.compute_alpha1(b1, b2)) / b2


def _m_c2_1(c, b1, b2):
    ds = _ds_h0(c, b1, b2)
    return (27 * b2 ** 2 * c - 16 * b2 * c ** 2 + (27 * b2 ** 2 + 6 * b2 * c - 12 * c ** 2) * ds
            + (18 * b2 - 9 * c) * ds ** 2) / b2 ** 3


def _m_c2_2(c, b1, b2):
    h = (9 * b2 ** 2 - 4 * c * (b1 + 3 * b2) + 3 * b2 * math.sqrt(9 * b2 ** 2 + 4 * c * (b1 + 3 * b2))) \
        / (6 * (b1 + 3 * b2))
    return (27 * b1 ** 2 * (b1 - b2 + c + h) - (3 * b1 + b2) * (3 * b1 - 3 * b2 + 2 * c + 3 * h) ** 2) / b2 ** 3


def _m_c2_4(c, b1, b2):
    p = S.c_curve(c, b1, b2)
    d2 = (b2 ** 2 / 2 + (2 * b2 - c - 1.5 * p.h) * p.delta_star) / (1.5 * (p.h + p.delta_star) + c)
    return (b2 / 3 - d2) / b2


def _m_c2_5(c, b1, b2):
    return (b1 / 3 - S.c_curve(c, b1, b2).delta1) / b2


def _m_c2_6(c, b1, b2):
    p = S.c_curve(c, b1, b2)
    return S.monotonicity_margin(c, b1, b2, p.h, p.delta_star) / b2 ** 4


def _m_c2_7(c, b1, b2):
    a2 = S.compute_alpha2(b1, b2)
    lo = 2 * (S.T_CONST - 1.36) * (b1 - b2) + 1.36 * b2
    return min(a2 - lo, _upper_14(b1, b2) - a2) / b2


@dataclass(frozen=True)
class Check:
    check_id: str
    margin: Callable
    r_bounds: tuple
    # maps (s, b1, b2) -> c; s-bounds are validated against s_bounds
    c_of: Callable
    s_bounds: tuple
    one_dim: bool = False
    note: str = ""


def _abs_c(s, b1, b2):
    return s * b2


def _frac(lo_fn, hi_fn):
    def f(s, b1, b2):
        lo, hi = lo_fn(b1, b2), hi_fn(b1, b2)
        return lo + s * (hi - lo)
    return f


CHECKS = {
    "c1-2-delta2-bound": Check("c1-2-delta2-bound", _m_c1_2, (1.0, 1.5), _abs_c, (1.0, 2.0),
                               note="delta2 <= b2/3 along the B curve, c in [b2, 2 b2]"),
    "c1-3-b-integral": Check("c1-3-b-integral", _m_c1_3, (1.0, 1.5),
                             _frac(lambda b1, b2: b2, S.compute_alpha1), (0.0, 1.0),
                             note="int_{delta*}^{b1/3} V >= 0 on [b2, alpha1]"),
    "c1-4-alpha1-bound": Check("c1-4-alpha1-bound", _m_c1_4, (1.0, 1.5), _abs_c, (0.0, math.inf),
                               one_dim=True, note="alpha1 <= 2(t-1)(b1-b2)+b2"),
    "c2-1-exit-h0": Check("c2-1-exit-h0", _m_c2_1, (1.0, 1.5),
                          _frac(lambda b1, b2: b2, _upper_14), (0.0, 1.0),
                          note="b-second >= 0 at (0, delta*|h=0)"),
    "c2-2-exit-bp": Check("c2-2-exit-bp", _m_c2_2, (1.0, 1.5),
                          _frac(lambda b1, b2: b2, _upper_14), (0.0, 1.0),
                          note="b-second >= 0 at (h|delta*=b1-b2, b1-b2)"),
    "c2-4-delta2-bound": Check("c2-4-delta2-bound", _m_c2_4, (1.0, 1.5), _abs_c, (1.0, 2.0),
                               note="delta2 <= b2/3 along the C curve, c in [b2, 2 b2]"),
    "c2-5-delta1-bound": Check("c2-5-delta1-bound", _m_c2_5, (1.0, 1.5),
                               _frac(lambda b1, b2: b1, lambda b1, b2: 2 * b2), (0.0, 1.0),
                               note="delta1 <= b1/3 along the C curve, c in [b1, 2 b2]"),
    "c2-6-monotonicity": Check("c2-6-monotonicity", _m_c2_6, (1.0, 1.5),
                               _frac(lambda b1, b2: b2, S.compute_alpha2), (0.0, 1.0),
                               note="a1 + a2 >= 1 on [b2, alpha2]"),
    "c2-7-alpha2-bracket": Check("c2-7-alpha2-bracket", _m_c2_7, (1.0, 1.5), _abs_c, (0.0, math.inf),
                                 one_dim=True, note="alpha2 between the 1.36 and 1.4 lines"),
}

DEFAULT_GRIDS = {
    "c1-2-delta2-bound": GridSpec(s_lo=1.0, s_hi=2.0),
    "c2-4-delta2-bound": GridSpec(s_lo=1.0, s_hi=2.0),
}


def default_grid(check_id: str) -> GridSpec:
    return DEFAULT_GRIDS.get(check_id, GridSpec())


def _point_margin(chk: Check, s: float, r: float, b2: float) -> tuple[float, float]:
    b1 = r * b2
    c = chk.c_of(s, b1, b2)
    return c, chk.margin(c, b1, b2)


def certify_sweep(check_id: str, grid: GridSpec | None = None, b2: float = 1.0) -> SweepReport:
    """Evaluate one inequality on a grid inside the region where it is claimed."""
    if check_id not in CHECKS:
        raise DomainError(f"unknown check {check_id!r}; known: {sorted(CHECKS)}")
    chk = CHECKS[check_id]
    g = grid or default_grid(check_id)
    rl, rh = chk.r_bounds
    if g.r_lo < rl - 1e-12 or g.r_hi > rh + 1e-12 or g.r_lo > g.r_hi:
        raise DomainError(f"{check_id}: b1/b2 range [{g.r_lo}, {g.r_hi}] outside [{rl}, {rh}]")
    if not chk.one_dim:
        sl, sh = chk.s_bounds
        if g.s_lo < sl - 1e-12 or g.s_hi > sh + 1e-12 or g.s_lo > g.s_hi:
            raise DomainError(f"{check_id}: c range [{g.s_lo}, {g.s_hi}] outside [{sl}, {sh}]")
    worst, wpt = math.inf, ()
    rows = []
    for r in g.rs():
        for s in ([1.0] if chk.one_dim else g.ss()):
            try:
                c, m = _point_margin(chk, float(s), float(r), b2)
            except (SolverError, ValueError, ZeroDivisionError) as e:
                c, m = float("nan"), -math.inf
            rows.append((float(c), float(r * b2), b2, float(m)))
            if m < worst:
                worst, wpt = float(m), (float(c), float(r * b2), b2)
    return SweepReport(check_id, g.describe(), worst, wpt, len(rows), rows)


def certify_all(grid_n: int = 50) -> list[SweepReport]:
    out = []
    for cid in CHECKS:
        g = default_grid(cid)
        g = GridSpec(g.r_lo, g.r_hi, grid_n, g.s_lo, g.s_hi, grid_n)
        out.append(certify_sweep(cid, g))
    return out


def reports_json(reports) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=2)
