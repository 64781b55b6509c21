"""Concrete menus, best responses, the type-space partition and revenue."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .domain import (EPS, DomainError, Menu, MenuItem, NULL_ITEM, Point, Polygon, SupportRect,
                     clip_halfplane, region_probability)
from .measure import (PiecewiseV, Profile, edge_densities, exclusion_profile, fit_piecewise,
                      piecewise_V, virtual_value_geometric)
from .solver import MechanismParams, Regime, solve_general_rect, solve_params

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Mechanism:
    rect: SupportRect
    regime: Regime
    params: MechanismParams
    menu: Menu
    exclusion: Polygon
    region_partition: tuple = ()
    # structure-native orientation (b1 >= b2); None when this mechanism is itself native
    canonical: Optional["Mechanism"] = field(default=None, compare=False, repr=False)
    profile: Optional[Profile] = field(default=None, compare=False, repr=False)

    @property
    def label(self) -> str:
        return self.regime.label

    @property
    def swapped(self) -> bool:
        return self.canonical is not None

    def native(self) -> "Mechanism":
        return self.canonical if self.canonical is not None else self

    def utility(self, z: Point) -> float:
        return max(0.0, max(it.utility(z) for it in self.menu.items)) if self.menu.items else 0.0

    def virtual_value(self) -> PiecewiseV:
        """V on [-b2, b1] (offset delta); exact for native mechanisms."""
        if self.profile is not None:
            return piecewise_V(self.rect, self.profile)
        brk = [-self.rect.b2, 0.0, self.rect.b1 - self.rect.b2, self.rect.b1]
        brk += [(x - self.rect.c1) - (y - self.rect.c2) for x, y in self.exclusion.vertices]
        lo, hi = -self.rect.b2, self.rect.b1
        brk = [min(max(b, lo), hi) for b in brk]
        return fit_piecewise(lambda t: virtual_value_geometric(self.rect, self.exclusion, t), brk)

    def to_dict(self) -> dict:
        items = list(self.menu.with_null())
        part = []
        for poly, item in self.region_partition:
            part.append({"item_index": items.index(item), "vertices": poly.to_list()})
        return {
            "schema_version": SCHEMA_VERSION,
            "support": self.rect.to_dict(),
            "regime": self.regime.label,
            "thresholds": _jsonable(self.regime.thresholds),
            "params": _jsonable(self.params.to_dict()),
            "menu": self.menu.to_list(),
            "revenue": revenue(self),
            "exclusion_vertices": self.exclusion.to_list(),
            "partition": part,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def _jsonable(d: dict) -> dict:
    out = {}
    for k, v in d.items():
        if isinstance(v, float) and math.isinf(v):
            out[k] = "inf"
        else:
            out[k] = v
    return out


def _unjson(d: dict) -> dict:
    return {k: (math.inf if v == "inf" else v) for k, v in d.items()}


# ---------------------------------------------------------------------------
# menus


def _prune(items: list[MenuItem]) -> list[MenuItem]:
    """Drop exact repeats of an allocation, keeping the cheapest."""
    best: dict = {}
    for it in items:
        key = (round(it.q1, 12), round(it.q2, 12))
        if key not in best or it.price < best[key].price:
            best[key] = it
    return list(best.values())


def menu_of(regime: Regime | str, params: MechanismParams, rect: SupportRect) -> Menu:
    """Menu of a structure on a symmetric rect with b1 >= b2 (prices absolute).

    Items bordering the exclusion region are priced by that border. The pure
    items that do not touch it are priced by continuity of u across the
    45-degree switch lines at delta = -b2/3 and delta = b1/3 (b1/2 - b2/4 in
    D', E'), which are the zeros of V where q1 steps.
    """
    lab = regime.label if isinstance(regime, Regime) else regime
    c, b1, b2 = rect.c, rect.b1, rect.b2
    p = params
    r1 = b1 / 2 - b2 / 4 if lab in ("Dp", "Ep") else b1 / 3
    if lab == "A":
        items = [MenuItem(1, 0, c + p.delta1), MenuItem(0, 1, c + p.delta2)]
    elif lab == "B":
        t = c + p.a2 * p.delta2
        items = [MenuItem(1, 0, c + p.delta1), MenuItem(0, 1, t + (1 - p.a2) * b2 / 3),
                 MenuItem(1 - p.a2, p.a2, t)]
    elif lab == "C":
        t2 = c + p.a2 * p.delta2
        t1 = c + p.a1 * p.delta1
        items = [MenuItem(1, 0, t1 + (1 - p.a1) * r1), MenuItem(0, 1, t2 + (1 - p.a2) * b2 / 3),
                 MenuItem(1 - p.a2, p.a2, t2), MenuItem(p.a1, 1 - p.a1, t1)]
    elif lab in ("D", "Dp"):
        t = c + p.a * p.delta2
        items = [MenuItem(1, 0, t + p.a * r1), MenuItem(0, 1, t + (1 - p.a) * b2 / 3),
                 MenuItem(1 - p.a, p.a, t)]
    elif lab in ("E", "Ep"):
        items = [MenuItem(1, 0, c + r1), MenuItem(0, 1, c)]
    else:
        raise DomainError(f"unknown structure {lab}")
    return Menu(tuple(_prune(items)))


def best_response(menu: Menu, z: Point, tol: float = 1e-12) -> MenuItem:
    """Utility maximizer; ties go to higher q1, then higher price."""
    items = menu.with_null()
    us = [it.utility(z) for it in items]
    top = max(us)
    scale = tol * max(1.0, abs(z[0]) + abs(z[1]))
    cands = [it for it, u in zip(items, us) if u >= top - scale]
    return max(cands, key=lambda it: (it.q1, it.price))


def partition(menu: Menu, rect: SupportRect) -> tuple:
    """(polygon, item) for every item with a nonempty region in D."""
    items = menu.with_null()
    out = []
    for i, it in enumerate(items):
        poly = rect.polygon()
        for j, jt in enumerate(items):
            if i == j:
                continue
            # u_i >= u_j  <=>  (q_j - q_i).z <= t_j - t_i
            poly = clip_halfplane(poly, (jt.q1 - it.q1, jt.q2 - it.q2), jt.price - it.price)
            if poly.is_empty():
                break
        if not poly.is_empty():
            out.append((poly, it))
    return tuple(out)


# ---------------------------------------------------------------------------
# construction


def _swap_item(it: MenuItem) -> MenuItem:
    return MenuItem(it.q2, it.q1, it.price)


def _assemble(rect, regime, params, menu, exclusion, profile=None, canonical=None) -> Mechanism:
    return Mechanism(rect, regime, params, menu, exclusion, partition(menu, rect),
                     canonical=canonical, profile=profile)


def build_mechanism(rect: SupportRect) -> Mechanism:
    """Optimal mechanism for a symmetric rect; swaps items internally when b1 < b2."""
    if not rect.symmetric():
        raise DomainError("build_mechanism needs c1 == c2; use build_extension_mechanism")
    if rect.b1 < rect.b2:
        nat = build_mechanism(rect.swapped())
        menu = Menu(tuple(_swap_item(it) for it in nat.menu.items))
        return _assemble(rect, nat.regime, nat.params, menu, nat.exclusion.swapped(), canonical=nat)
    regime, params = solve_params(rect.c, rect.b1, rect.b2)
    prof = exclusion_profile(regime.label, params, rect.b1, rect.b2)
    return _assemble(rect, regime, params, menu_of(regime, params, rect), prof.polygon(rect), prof)


def build_extension_mechanism(rect: SupportRect) -> Mechanism:
    """Structure-A mechanism on an asymmetric rect inside the proven region."""
    p = solve_general_rect(rect.c1, rect.c2, rect.b1, rect.b2)
    menu = Menu((MenuItem(1, 0, rect.c1 + p.delta1), MenuItem(0, 1, rect.c2 + p.delta2)))
    prof = Profile(((0.0, p.delta2), (p.delta1, p.delta2)))
    return _assemble(rect, Regime("A", {"extension": True}), p, menu, prof.polygon(rect), prof)


def from_dict(d: dict) -> Mechanism:
    """Rebuild a mechanism from its JSON form (partition is recomputed)."""
    if d.get("schema_version") != SCHEMA_VERSION:
        raise DomainError(f"unsupported schema_version {d.get('schema_version')}")
    rect = SupportRect(**d["support"])
    regime = Regime(d["regime"], _unjson(d.get("thresholds", {})))
    params = MechanismParams(**d["params"])
    menu = Menu(tuple(MenuItem(**it) for it in d["menu"]))
    excl = Polygon(tuple(tuple(v) for v in d["exclusion_vertices"]))
    prof = None
    canonical = None
    if rect.b1 >= rect.b2 or not rect.symmetric():
        lab = regime.label
        if regime.thresholds.get("extension"):
            prof = Profile(((0.0, params.delta2), (params.delta1, params.delta2)))
        else:
            prof = exclusion_profile(lab, params, rect.b1, rect.b2)
    else:
        canonical = build_mechanism(rect.swapped())
    return _assemble(rect, regime, params, menu, excl, prof, canonical)


# ---------------------------------------------------------------------------
# revenue


def _centroid(poly: Polygon) -> Point:
    vs = poly.vertices
    n = len(vs)
    a = cx = cy = 0.0
    for i in range(n):
        x0, y0 = vs[i]
        x1, y1 = vs[(i + 1) % n]
        w = x0 * y1 - x1 * y0
        a += w
        cx += (x0 + x1) * w
        cy += (y0 + y1) * w
    a *= 0.5
    return cx / (6 * a), cy / (6 * a)


def revenue_partition(mech: Mechanism) -> float:
    """Sum of price times region probability."""
    return sum(it.price * region_probability(poly, mech.rect) for poly, it in mech.region_partition)


def _edge_integral(items, p: Point, q: Point) -> float:
    """Exact integral of max(0, max_i u_i) along the segment p -> q."""
    L = math.dist(p, q)
    fs = [(0.0, 0.0)] + [(it.utility(p), it.utility(q)) for it in items]
    # u_i(s) = a_i + (b_i - a_i) s ; kinks where two lines cross
    ss = {0.0, 1.0}
    for i in range(len(fs)):
        for j in range(i + 1, len(fs)):
            da = fs[i][0] - fs[j][0]
            db = fs[i][1] - fs[j][1]
            if da != db:
                s = da / (da - db)
                if 0 < s < 1:
                    ss.add(s)
    ss = sorted(ss)

    def u(s):
        return max(a + (b - a) * s for a, b in fs)
    return L * sum(0.5 * (s1 - s0) * (u(s0) + u(s1)) for s0, s1 in zip(ss[:-1], ss[1:]))


def revenue_mu_bar(mech: Mechanism) -> float:
    """Integral of u against mu-bar (area term, boundary lines, corner atom)."""
    rect = mech.rect
    items = mech.menu.items
    area = 0.0
    for poly, it in mech.region_partition:
        if poly.area > 0:
            area += poly.area * max(0.0, it.utility(_centroid(poly)))
    total = -3.0 * area / rect.area
    dens = edge_densities(rect)
    (x0, y0), (x1, _), (_, y1), _ = rect.corners()
    total += dens["left"] * _edge_integral(items, (x0, y0), (x0, y1))
    total += dens["right"] * _edge_integral(items, (x1, y0), (x1, y1))
    total += dens["bottom"] * _edge_integral(items, (x0, y0), (x1, y0))
    total += dens["top"] * _edge_integral(items, (x0, y1), (x1, y1))
    total += mech.utility((x0, y0))
    return total


def revenue(mech: Mechanism) -> float:
    return revenue_partition(mech)


def revenue_monte_carlo(mech: Mechanism, n: int = 10 ** 6, seed: int = 0) -> tuple[float, float]:
    """(mean, standard error) of the realized price under uniform sampling."""
    rng = np.random.default_rng(seed)
    r = mech.rect
    z1 = r.c1 + r.b1 * rng.random(n)
    z2 = r.c2 + r.b2 * rng.random(n)
    items = mech.menu.with_null()
    U = np.stack([it.q1 * z1 + it.q2 * z2 - it.price for it in items])
    prices = np.array([it.price for it in items])
    t = prices[np.argmax(U, axis=0)]
    return float(t.mean()), float(t.std(ddof=1) / math.sqrt(n))


# ---------------------------------------------------------------------------
# one-dimensional reduction


def line_endpoints(rect: SupportRect, delta: float) -> tuple[Point, Point]:
    """Near and far ends of D's 45-degree line at offset delta = x - y."""
    b1, b2 = rect.b1, rect.b2
    if not (-b2 - EPS <= delta <= b1 + EPS):
        raise DomainError(f"delta={delta} outside [{-b2}, {b1}]")
    x_lo, y_lo = (delta, 0.0) if delta >= 0 else (0.0, -delta)
    x_hi, y_hi = (b2 + delta, b2) if delta <= b1 - b2 else (b1, b1 - delta)
    return ((rect.c1 + x_lo, rect.c2 + y_lo), (rect.c1 + x_hi, rect.c2 + y_hi))


def utility_profile(mech: Mechanism, delta: float) -> tuple[float, float, float]:
    """(u1, q1, z2*) on the 45-degree line at offset delta.

    q1 is read at the far end of the line, which lies outside the exclusion
    region whenever any of the line does. u1 = (z1 - z2) q1 - t, so that
    u(z) = z2 + u1 off the exclusion region, and z2* is the height where the
    line leaves the exclusion region.
    """
    near, far = line_endpoints(mech.rect, delta)
    it = best_response(mech.menu, far)
    if it.is_null():
        return 0.0, 0.0, far[1]
    dabs = far[0] - far[1]
    u1 = dabs * it.q1 - it.price
    z2 = min(max(-u1, near[1]), far[1])
    return u1, it.q1, z2


def q1_ladder(mech: Mechanism, n: int = 2001) -> list[tuple[float, float, float]]:
    """Maximal constant-q1 intervals (lo, hi, q1) of the 1-D reduction over [-b2, b1]."""
    b1, b2 = mech.rect.b1, mech.rect.b2
    nat = mech.native()
    # exact switch points: where the far-endpoint best response changes
    cand = {-b2, b1}
    items = nat.menu.with_null()
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            for top in (True, False):
                d = _switch_delta(nat.rect, items[i], items[j], top)
                if d is not None and -b2 < d < b1:
                    cand.add(d)
    pts = sorted(cand)
    segs = []
    for lo, hi in zip(pts[:-1], pts[1:]):
        if hi - lo <= 1e-13:
            continue
        q = utility_profile(nat, 0.5 * (lo + hi))[1]
        if segs and abs(segs[-1][2] - q) <= 1e-12:
            segs[-1] = (segs[-1][0], hi, q)
        else:
            segs.append((lo, hi, q))
    return segs


def _switch_delta(rect: SupportRect, a: MenuItem, b: MenuItem, top: bool) -> Optional[float]:
    """delta where items a and b tie at the far endpoint on the top (or right) edge."""
    # far point on top edge: (c1 + b2 + delta, c2 + b2); on right: (c1 + b1, c2 + b1 - delta)
    if top:
        base = (rect.c1 + rect.b2, rect.c2 + rect.b2)
        dirv = (1.0, 0.0)
    else:
        base = (rect.c1 + rect.b1, rect.c2 + rect.b1)
        dirv = (0.0, -1.0)
    ua0 = a.utility(base) - b.utility(base)
    slope = (a.q1 - b.q1) * dirv[0] + (a.q2 - b.q2) * dirv[1]
    if abs(slope) < 1e-15:
        return None
    d = -ua0 / slope
    lim = rect.b1 - rect.b2
    if top and d > lim + 1e-12:
        return None
    if not top and d < lim - 1e-12:
        return None
    return d
