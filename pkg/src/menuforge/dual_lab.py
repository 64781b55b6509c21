"""Dual certificates for three worked examples.

The dual variable gamma moves mass from the top/right boundary (and, in the
second example, from an anti-diagonal segment near the corner) along rays to
the negative part of mu_bar + shuffling measure. Everything here is 1-D: a
transfer is a one-parameter family of rays indexed by sigma (the offset
z1 - z2 for 45-degree rays, the height z2 for horizontal ones). On each ray
the source mass and the delivered target mass are computed geometrically, so
that per-ray balance is a genuine check of the construction rather than an
identity. Integrals over sigma use Gauss-Legendre on pieces between all
geometric breakpoints, which is exact for the piecewise-polynomial integrands
that arise.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .domain import DomainError, Point, Polygon, SupportRect, clip_halfplane, region_probability
from .mechanism import Mechanism, build_mechanism, revenue_mu_bar

GL_X, GL_W = np.polynomial.legendre.leggauss(8)


# --------------------------------------------------------------- segment measures

@dataclass(frozen=True)
class SegmentMeasure:
    """Signed measure on the segment p(s) = p0 + (s - s0)/(s1 - s0) (p1 - p0), s in [s0, s1].

    pieces are (lo, hi, slope, intercept): density slope*s + intercept per unit s.
    """

    name: str
    p0: Point
    p1: Point
    s0: float
    s1: float
    pieces: tuple = ()
    atoms: tuple = ()

    def point(self, s: float) -> Point:
        w = (s - self.s0) / (self.s1 - self.s0)
        return (self.p0[0] + w * (self.p1[0] - self.p0[0]), self.p0[1] + w * (self.p1[1] - self.p0[1]))

    @property
    def direction(self) -> Point:
        L = self.s1 - self.s0
        return ((self.p1[0] - self.p0[0]) / L, (self.p1[1] - self.p0[1]) / L)

    @property
    def monotone(self) -> bool:
        dx, dy = self.direction
        return dx >= -1e-15 and dy >= -1e-15

    def density(self, s: float) -> float:
        # half-open pieces [lo, hi), closed at the segment's far end
        end = max(self.s0, self.s1)
        return sum(k * s + b for lo, hi, k, b in self.pieces
                   if lo - 1e-15 <= s < hi - 1e-15 or (abs(s - hi) <= 1e-15 and abs(hi - end) <= 1e-15))

    def integral(self, f_moment: int = 0, lo: float | None = None, hi: float | None = None,
                 hinge: float | None = None) -> float:
        """Integral of g(s) dm over [lo, hi]; g = s**f_moment, or (s - hinge)_+ if hinge is given."""
        lo = self.s0 if lo is None else lo
        hi = self.s1 if hi is None else hi
        tot = 0.0
        for a, b, k, c in self.pieces:
            a2, b2 = max(a, lo), min(b, hi)
            if hinge is not None:
                a2 = max(a2, hinge)
            if b2 <= a2:
                continue
            if hinge is not None:
                # integral (s - h)(k s + c) ds
                P = np.polynomial.Polynomial([-hinge, 1.0]) * np.polynomial.Polynomial([c, k])
            else:
                P = np.polynomial.Polynomial([0.0] * f_moment + [1.0]) * np.polynomial.Polynomial([c, k])
            Q = P.integ()
            tot += Q(b2) - Q(a2)
        for s, m in self.atoms:
            if lo - 1e-15 <= s <= hi + 1e-15:
                g = max(s - hinge, 0.0) if hinge is not None else s ** f_moment
                tot += g * m
        return tot

    def mass(self, lo=None, hi=None) -> float:
        return self.integral(0, lo, hi)

    def moment(self, lo=None, hi=None) -> float:
        """First moment about s0."""
        return self.integral(1, lo, hi) - self.s0 * self.integral(0, lo, hi)

    def breaks(self) -> list[float]:
        out = {self.s0, self.s1}
        for a, b, _, _ in self.pieces:
            out |= {a, b}
        out |= {s for s, _ in self.atoms}
        return sorted(out)

    def plus(self, other: "SegmentMeasure", name: str | None = None) -> "SegmentMeasure":
        if (self.p0, self.p1, self.s0, self.s1) != (other.p0, other.p1, other.s0, other.s1):
            raise DomainError("measures live on different segments")
        return replace(self, name=name or f"{self.name}+{other.name}", pieces=self.pieces + other.pieces,
                       atoms=self.atoms + other.atoms)

    def scaled(self, k: float) -> "SegmentMeasure":
        return replace(self, pieces=tuple((a, b, k * s, k * c) for a, b, s, c in self.pieces),
                       atoms=tuple((s, k * m) for s, m in self.atoms))

    same_segment = property(lambda self: (self.p0, self.p1))


def _seg(name, p0, p1, s0, s1, pieces, scale=1.0, atoms=()):
    return SegmentMeasure(name, p0, p1, s0, s1, tuple((a, b, scale * k, scale * c) for a, b, k, c in pieces),
                          tuple(atoms))


@dataclass
class DominanceReport:
    name: str
    mass: float
    first_moment: float
    min_hinge: float
    monotone: bool
    passed: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def check_convex_dominance(m: SegmentMeasure, tol: float = 1e-9, n_hinge: int = 500) -> DominanceReport:
    """Does m dominate 0 against increasing convex test functions restricted to its segment?

    On an interval the increasing convex cone is generated by constants (both
    signs), the identity and the hinges (s - k)_+. When the segment runs against
    one coordinate, restrictions need not be monotone and the first moment must
    vanish as well.
    """
    mass = m.mass()
    mom = m.moment()
    ks = np.linspace(m.s0, m.s1, n_hinge)
    hinges = np.array([m.integral(hinge=float(k)) for k in ks])
    mono = m.monotone
    ok = abs(mass) <= tol and mom >= -tol and float(hinges.min()) >= -tol
    if not mono:
        # (k - s)_+ = (s - k)_+ - (s - k): with zero mass and moment both hinge families coincide
        ok = ok and abs(mom) <= tol
    return DominanceReport(m.name, mass, mom, float(hinges.min()), mono, ok)


# --------------------------------------------------------------- mu_bar edges

def mu_bar_edges(rect: SupportRect) -> dict[str, SegmentMeasure]:
    A = rect.area
    x0, y0, x1, y1 = rect.c1, rect.c2, rect.c1 + rect.b1, rect.c2 + rect.b2
    return {
        "top": _seg("mu_top", (x0, y1), (x1, y1), 0.0, rect.b1, [(0.0, rect.b1, 0.0, y1 / A)]),
        "right": _seg("mu_right", (x1, y0), (x1, y1), 0.0, rect.b2, [(0.0, rect.b2, 0.0, x1 / A)]),
        "left": _seg("mu_left", (x0, y0), (x0, y1), 0.0, rect.b2, [(0.0, rect.b2, 0.0, -x0 / A)]),
        "bottom": _seg("mu_bottom", (x0, y0), (x1, y0), 0.0, rect.b1, [(0.0, rect.b1, 0.0, -y0 / A)]),
    }


# --------------------------------------------------------------- transport plan

def _ray_clip_convex(x: np.ndarray, d: np.ndarray, poly: Polygon) -> Optional[tuple[float, float]]:
    """Parameter interval {r >= 0 : x + r d in poly} for a convex polygon (None if empty)."""
    vs = poly.vertices
    if len(vs) < 3:
        return None
    lo, hi = 0.0, math.inf
    for (ax, ay), (bx, by) in poly.edges():
        # inside: cross(b - a, p - a) >= 0 (ccw)
        ex, ey = bx - ax, by - ay
        f0 = ex * (x[1] - ay) - ey * (x[0] - ax)
        fd = ex * d[1] - ey * d[0]
        if abs(fd) < 1e-15:
            if f0 < -1e-13:
                return None
            continue
        r = -f0 / fd
        if fd > 0:
            lo = max(lo, r)
        else:
            hi = min(hi, r)
    if hi - lo <= 1e-14:
        return None
    return lo, hi


def _subtract(iv: tuple[float, float], cuts: list[tuple[float, float]]) -> list[tuple[float, float]]:
    out = [iv]
    for a, b in sorted(cuts):
        nxt = []
        for lo, hi in out:
            if b <= lo or a >= hi:
                nxt.append((lo, hi))
                continue
            if a > lo:
                nxt.append((lo, a))
            if b < hi:
                nxt.append((b, hi))
        out = nxt
    return [(a, b) for a, b in out if b - a > 1e-14]


@dataclass(frozen=True)
class Transfer:
    """A family of rays x(sigma) + r * direction, r >= 0, carrying mass to targets."""

    name: str
    kind: str  # "45" or "h"
    sigma: tuple[float, float]
    source_measures: tuple  # SegmentMeasures whose (positive) sum at x(sigma) is the source mass
    keep: Polygon  # convex region containing all targets
    exclude: tuple = ()  # convex polygons that receive nothing
    targets: tuple = ()  # SegmentMeasures whose negative part (per segment) absorbs mass
    area_density: float = 0.0  # negative area density magnitude absorbed
    offset: Point = (0.0, 0.0)  # perturbation of target locations (for negative tests)

    @property
    def direction(self) -> np.ndarray:
        return np.array([-1.0, -1.0]) if self.kind == "45" else np.array([-1.0, 0.0])

    def sigma_of(self, z: Point) -> float:
        return z[0] - z[1] if self.kind == "45" else z[1]

    def _dsigma_ds(self, m: SegmentMeasure) -> float:
        dx, dy = m.direction
        return dx - dy if self.kind == "45" else dy

    def _crossing(self, m: SegmentMeasure, sig: float) -> Optional[float]:
        g = self._dsigma_ds(m)
        if abs(g) < 1e-14:
            return None
        s = m.s0 + (sig - self.sigma_of(m.p0)) / g
        if s < min(m.s0, m.s1) - 1e-12 or s > max(m.s0, m.s1) + 1e-12:
            return None
        return min(max(s, m.s0), m.s1)

    def source(self, sig: float) -> tuple[Point, float]:
        m0 = self.source_measures[0]
        s = self._crossing(m0, sig)
        x = m0.point(s)
        tot = 0.0
        for m in self.source_measures:
            sm = self._crossing(m, sig)
            if sm is not None:
                tot += m.density(sm) / abs(self._dsigma_ds(m))
        return x, max(tot, 0.0)

    def ray(self, sig: float) -> dict:
        """Source point and mass, target intervals (area) and atoms (line crossings) on one ray."""
        x, msrc = self.source(sig)
        xa, d = np.array(x), self.direction
        iv = _ray_clip_convex(xa, d, self.keep)
        if iv is None:
            return {"x": x, "source": msrc, "intervals": [], "atoms": []}
        cuts = [c for c in (_ray_clip_convex(xa, d, p) for p in self.exclude) if c is not None]
        ivs = _subtract(iv, cuts)

        def inside(r):
            # line masses on the boundary of an excluded set belong to it (Z is closed)
            return iv[0] - 1e-12 <= r <= iv[1] + 1e-12 and not _in_any(xa + r * d, self.exclude)

        groups: dict = {}
        for m in self.targets:
            groups.setdefault(m.same_segment, []).append(m)
        atoms = []
        for ms in groups.values():
            s = self._crossing(ms[0], sig)
            if s is None:
                continue
            p = np.array(ms[0].point(s))
            r = float(np.dot(p - xa, d) / np.dot(d, d))
            if r < 1e-12 or np.linalg.norm(xa + r * d - p) > 1e-9 or not inside(r):
                continue
            dens = sum(m.density(self._crossing(m, sig)) for m in ms) / abs(self._dsigma_ds(ms[0]))
            if dens < 0:
                atoms.append((r, -dens))
        return {"x": x, "source": msrc, "intervals": ivs, "atoms": atoms}

    def breakpoints(self) -> list[float]:
        out = set(self.sigma)
        polys = [self.keep, *self.exclude]
        for p in polys:
            out |= {self.sigma_of(v) for v in p.vertices}
        for m in (*self.source_measures, *self.targets):
            for s in m.breaks():
                out.add(self.sigma_of(m.point(s)))
        lo, hi = self.sigma
        return sorted(v for v in out if lo - 1e-15 <= v <= hi + 1e-15)


def _in_any(p, polys) -> bool:
    return any(poly.contains((float(p[0]), float(p[1])), tol=1e-11) for poly in polys)


def _integrate(fn: Callable[[float], np.ndarray], breaks: list[float]) -> np.ndarray:
    tot = 0.0
    for a, b in zip(breaks[:-1], breaks[1:]):
        if b - a < 1e-15:
            continue
        xs = 0.5 * (b - a) * GL_X + 0.5 * (a + b)
        tot = tot + 0.5 * (b - a) * sum(w * fn(float(x)) for w, x in zip(GL_W, xs))
    return tot


@dataclass
class TransportPlan:
    rect: SupportRect
    exclusion: Polygon  # Z: identity kernel, no mass moves
    transfers: tuple
    area_density: float  # |mu| on D

    def ray_stats(self, tr: Transfer, sig: float) -> np.ndarray:
        """[source mass, target mass, cost] per unit sigma."""
        r = tr.ray(sig)
        ad = tr.area_density
        tgt = sum(ad * (b - a) for a, b in r["intervals"]) + sum(m for _, m in r["atoms"])
        cost = sum(ad * 0.5 * (b * b - a * a) for a, b in r["intervals"]) + sum(rr * m for rr, m in r["atoms"])
        return np.array([r["source"], tgt, cost])

    def balance(self, n: int = 400) -> float:
        """Largest per-ray |source - delivered| over a grid of sigma values in every transfer."""
        worst = 0.0
        for tr in self.transfers:
            lo, hi = tr.sigma
            for s in np.linspace(lo, hi, n + 2)[1:-1]:
                st = self.ray_stats(tr, float(s))
                worst = max(worst, abs(st[0] - st[1]))
        return worst

    def totals(self) -> np.ndarray:
        # (source mass, target mass, cost)
        return sum((_integrate(lambda s, tr=tr: self.ray_stats(tr, s), tr.breakpoints()) for tr in self.transfers),
                   np.zeros(3))

    def perturbed(self, shift: float = 0.01) -> "TransportPlan":
        trs = list(self.transfers)
        k = next(i for i, t in enumerate(trs) if t.kind == "45")
        trs[k] = replace(trs[k], offset=(shift, 0.0))
        return replace(self, transfers=tuple(trs))


def dual_cost(plan: TransportPlan) -> float:
    """Integral of ||z - z'||_inf against gamma (rays move by r in the sup norm; Z contributes 0)."""
    return float(plan.totals()[2])


# --------------------------------------------------------------- the examples

@dataclass
class DualExample:
    n: int
    mechanism: Mechanism
    shuffling: dict  # name -> SegmentMeasure (combined per segment where dominance is claimed jointly)
    plan: TransportPlan
    constants: dict = field(default_factory=dict)

    def density_csv(self, n: int = 200) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["measure", "s", "z1", "z2", "density"])
        for name, m in self.shuffling.items():
            for s in np.linspace(m.s0, m.s1, n):
                z = m.point(float(s))
                w.writerow([name, f"{s:.6g}", f"{z[0]:.6g}", f"{z[1]:.6g}", f"{m.density(float(s)):.9g}"])
        return buf.getvalue()


def _boundary_shuffles(rect: SupportRect, d2: float, a: float) -> dict[str, SegmentMeasure]:
    """alpha/beta pair on the top edge and its mirror on the right edge (unit square sides)."""
    c, top, right = rect.c, rect.c2 + rect.b2, rect.c1 + rect.b1
    al = [(0.0, 2 / 3, 3.0, -1.0)]
    # 3t + 3a(1 - t - d2) - c - 1
    be = [(2 / 3, 1 - d2, 3.0, -1.0), (1 - d2, 1.0, 3.0 - 3 * a, 3 * a * (1 - d2) - c - 1)]
    return {
        "alpha1": _seg("alpha1", (rect.c1, top), (right, top), 0.0, 1.0, al),
        "beta1": _seg("beta1", (rect.c1, top), (right, top), 0.0, 1.0, be),
        "alpha2": _seg("alpha2", (right, rect.c2), (right, top), 0.0, 1.0, al),
        "beta2": _seg("beta2", (right, rect.c2), (right, top), 0.0, 1.0, be),
    }


def _example_1() -> DualExample:
    rect = SupportRect.square(1.26, 1.0, 1.0)
    mech = build_mechanism(rect)
    p = mech.params
    sh = _boundary_shuffles(rect, p.delta2, p.a2)
    E = mu_bar_edges(rect)
    targets = (E["left"], E["bottom"])
    D = rect.polygon()
    top = Transfer("top", "45", (-1.0, 0.0), (E["top"], sh["alpha1"], sh["beta1"]), D, (mech.exclusion,),
                   targets, 3 / rect.area)
    right = Transfer("right", "45", (0.0, 1.0), (E["right"], sh["alpha2"], sh["beta2"]), D, (mech.exclusion,),
                     targets, 3 / rect.area)
    plan = TransportPlan(rect, mech.exclusion, (top, right), 3 / rect.area)
    return DualExample(1, mech, sh, plan, {"delta1": p.delta1, "delta2": p.delta2, "a": p.a2})


def example_2_constants() -> dict:
    s33 = math.sqrt(33.0)
    a = (27 - 3 * s33) / 32
    d = ((3 + s33) / 8 - 1) / a
    return {"a": a, "delta2": d, "delta1": d, "delta_prime": math.sqrt(5 / 3) - 1}


def _example_2() -> DualExample:
    rect = SupportRect.square(1.5, 1.0, 1.0)
    mech = build_mechanism(rect)
    k = example_2_constants()
    a, d2, dp = k["a"], k["delta2"], k["delta_prime"]
    c = rect.c
    sh = _boundary_shuffles(rect, d2, a)
    # lambda on z1 + z2 = 2c + d2, parameter t = 1 + (z1 - z2); symmetric about t = 1
    lam_left = [(1 - d2, 1 - dp, 3 * a, 3 * a * (-1 + d2) + c),
                (1 - dp, 1.0, 3 * (a - 0.5), 1.5 * (1 - dp) - 3 * a * (1 - d2))]
    lam_right = [(2 - hi, 2 - lo, -k_, k_ * 2 + b_) for lo, hi, k_, b_ in lam_left]
    lam = _seg("lambda", (c, c + d2), (c + d2, c), 1 - d2, 1 + d2, lam_left + lam_right)
    sh = dict(sh, **{"lambda": lam})
    # P2: dotted line (1-a) x + a y = a d2 meets x + y = dp (offset coords); P1 is its mirror
    xp = a * (d2 - dp) / (1 - 2 * a)
    P2 = (c + xp, c + dp - xp)
    P1 = (P2[1], P2[0])
    tri2 = Polygon(((c, c + dp), P2, (c, c + d2)))
    tri1 = Polygon(((c + dp, c), (c + d2, c), P1))
    E = mu_bar_edges(rect)
    D = rect.polygon()
    excl = (mech.exclusion, tri1, tri2)
    A3 = 3 / rect.area
    top = Transfer("top", "45", (-1.0, 0.0), (E["top"], sh["alpha1"], sh["beta1"]), D, excl,
                   (E["left"], E["bottom"], lam), A3)
    right = Transfer("right", "45", (0.0, 1.0), (E["right"], sh["alpha2"], sh["beta2"]), D, excl,
                     (E["left"], E["bottom"], lam), A3)
    sP2 = P2[0] - P2[1]
    lam_l = Transfer("lambda-left", "45", (-d2, sP2), (lam,), tri2, (), (E["left"],), A3)
    lam_r = Transfer("lambda-right", "45", (-sP2, d2), (lam,), tri1, (), (E["bottom"],), A3)
    plan = TransportPlan(rect, mech.exclusion, (top, right, lam_l, lam_r), A3)
    combined = {"alpha1": sh["alpha1"], "beta1": sh["beta1"], "alpha2": sh["alpha2"], "beta2": sh["beta2"],
                "lambda": lam}
    return DualExample(2, mech, combined, plan, dict(k, P1=P1, P2=P2))


def _example_3() -> DualExample:
    rect = SupportRect.square(0.0, 1.2, 1.0)
    mech = build_mechanism(rect)
    p = mech.params
    d1, d2 = p.delta1, p.delta2
    ds = d1 - d2
    b1, b2, A = rect.b1, rect.b2, rect.area
    cap = 3 * (1 - d2) - rect.c - 1
    top_al = _seg("alpha", (0.0, b2), (b1, b2), 0.0, b1, [(0.0, 1 - d2, 3.0, -1.0), (1 - d2, 1 + ds, 0.0, cap)],
                  1 / A)
    al_o = _seg("alpha_o", (b1, 0.0), (b1, b2), 0.0, b2, [(0.0, b1 - d1, 3.0, -b1), (b1 - d1, 1.0, 0.0, 2 * b1 - 3 * d1)],
                1 / A)
    al_h = _seg("alpha_h", (b1, 0.0), (b1, b2), 0.0, b2,
                [(d1 - 0.2, d2, 3.0, -3 * (d1 - 0.2)), (d2, 2 / 3, 0.0, 3 * (0.2 - ds))], 1 / A)
    E = mu_bar_edges(rect)
    D = rect.polygon()
    Z = mech.exclusion
    A3 = 3 / A
    tg = (E["left"], E["bottom"])
    t1 = Transfer("top", "45", (-b2, ds), (E["top"], top_al), D, (Z,), tg, A3)
    upper = clip_halfplane(D, (0.0, -1.0), -2 / 3)
    t2 = Transfer("top-upper", "45", (ds, b1 - b2), (E["top"], top_al), upper, (Z,), tg, A3)
    t3 = Transfer("right", "45", (b1 - b2, b1), (E["right"], al_o), D, (Z,), tg, A3)
    strip = clip_halfplane(clip_halfplane(D, (-1.0, 1.0), -ds), (1.0, -1.0), b1 - b2)
    h = Transfer("horizontal", "h", (d1 - 0.2, 2 / 3), (al_h,), strip, (Z,), (), A3)
    plan = TransportPlan(rect, Z, (t1, t2, t3, h), A3)
    shuffles = {"alpha": top_al, "alpha_o+alpha_h": al_o.plus(al_h, "alpha_o+alpha_h"),
                "alpha_o": al_o, "alpha_h": al_h}
    return DualExample(3, mech, shuffles, plan, {"delta1": d1, "delta2": d2, "delta_star": ds})


def build_example(n: int) -> DualExample:
    if n not in (1, 2, 3):
        raise DomainError("example must be 1, 2 or 3")
    return {1: _example_1, 2: _example_2, 3: _example_3}[n]()


def dominance_targets(ex: DualExample) -> list[str]:
    """Names of the shuffling measures whose dominance is claimed by the proofs."""
    return {1: ["alpha1", "beta1", "alpha2", "beta2"], 2: ["alpha1", "beta1", "alpha2", "beta2", "lambda"],
            3: ["alpha", "alpha_o+alpha_h"]}[ex.n]


# --------------------------------------------------------------- complementary slackness

@dataclass
class SlacknessReport:
    max_violation: float
    n_pairs: int
    lhs: float  # integral of u d(gamma1 - gamma2)
    rhs: float  # integral of u d(mu_bar)
    passed: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def check_complementary_slackness(mech: Mechanism, plan: TransportPlan, n_pairs: int = 10 ** 4, seed: int = 0,
                                  tol_pair: float = 1e-9, tol_int: float = 1e-6) -> SlacknessReport:
    rng = np.random.default_rng(seed)
    u = mech.utility
    worst, count = 0.0, 0
    per = max(1, n_pairs // len(plan.transfers))
    for tr in plan.transfers:
        lo, hi = tr.sigma
        off = np.array(tr.offset)
        d = tr.direction
        for sig in rng.uniform(lo, hi, per):
            r = tr.ray(float(sig))
            opts = [(a, b) for a, b in r["intervals"]] + [(rr, rr) for rr, _ in r["atoms"]]
            if not opts or r["source"] <= 0:
                continue
            a, b = opts[rng.integers(len(opts))]
            rr = rng.uniform(a, b) if b > a else a
            x = np.array(r["x"])
            y = x + rr * d + off
            gap = (u(tuple(x)) - u(tuple(y))) - float(np.max(np.abs(x - y)))
            worst = max(worst, abs(gap))
            count += 1

    def u_stats(tr, sig):
        r = tr.ray(sig)
        x, d = np.array(r["x"]), tr.direction
        ad = tr.area_density
        val = u(tuple(x)) * r["source"]
        for a, b in r["intervals"]:
            ys = 0.5 * (b - a) * GL_X + 0.5 * (a + b)
            val -= ad * 0.5 * (b - a) * sum(w * u(tuple(x + yy * d)) for w, yy in zip(GL_W, ys))
        for rr, m in r["atoms"]:
            val -= m * u(tuple(x + rr * d))
        return np.array([val])

    lhs = 0.0
    for tr in plan.transfers:
        brk = tr.breakpoints()
        # u has kinks along region boundaries; refine so GL stays accurate
        fine = sorted(set(brk) | set(np.linspace(tr.sigma[0], tr.sigma[1], 65).tolist()))
        lhs += float(_integrate(lambda s, tr=tr: u_stats(tr, s), fine)[0])
    rhs = revenue_mu_bar(mech)
    ok = worst <= tol_pair and abs(lhs - rhs) <= tol_int
    return SlacknessReport(worst, count, lhs, rhs, ok)


# --------------------------------------------------------------- marginal check on test boxes

def _segment_cuts(m: SegmentMeasure, box: tuple, polys) -> list[float]:
    """Parameters s where the segment crosses a box side or an edge of one of polys."""
    lines = [((box[0], box[1]), (box[0], box[3])), ((box[2], box[1]), (box[2], box[3])),
             ((box[0], box[1]), (box[2], box[1])), ((box[0], box[3]), (box[2], box[3]))]
    for poly in polys:
        lines += poly.edges()
    p0, d = np.array(m.p0), np.array(m.direction)
    out = [m.s0, m.s1, *m.breaks()]
    for a, b in lines:
        a, e = np.array(a), np.array(b) - np.array(a)
        den = d[0] * e[1] - d[1] * e[0]
        if abs(den) < 1e-15:
            continue
        w = a - p0
        s = m.s0 + (w[0] * e[1] - w[1] * e[0]) / den
        if m.s0 < s < m.s1:
            out.append(float(s))
    return sorted(set(out))


def _segment_in_box_mass(m: SegmentMeasure, box: tuple, Z: Polygon) -> float:
    x0, y0, x1, y1 = box
    tot = 0.0
    cuts = _segment_cuts(m, box, [Z] if len(Z.vertices) >= 3 else [])
    for a, b in zip(cuts[:-1], cuts[1:]):
        mid = m.point(0.5 * (a + b))
        if x0 <= mid[0] <= x1 and y0 <= mid[1] <= y1 and not Z.contains(mid, tol=1e-12):
            tot += m.mass(a, b)
    return tot


def marginal_check(ex: DualExample, n_boxes: int = 100, seed: int = 1) -> float:
    """max |(gamma1 - gamma2)(B) - (mu_bar + shuffle)(B minus Z)| over random boxes B.

    Both sides are computed exactly: segment masses are cut at the box sides and
    the plan side is integrated over sigma with every crossing of a box side as a
    breakpoint.
    """
    rng = np.random.default_rng(seed)
    plan, rect = ex.plan, ex.plan.rect
    Z = plan.exclusion
    E = mu_bar_edges(rect)
    segs = list(E.values()) + [m for k, m in ex.shuffling.items() if "+" not in k]
    worst = 0.0
    for _ in range(n_boxes):
        xs = np.sort(rng.uniform(rect.c1, rect.c1 + rect.b1, 2))
        ys = np.sort(rng.uniform(rect.c2, rect.c2 + rect.b2, 2))
        if rng.random() < 0.5:
            xs[1] = rect.c1 + rect.b1
        if rng.random() < 0.5:
            ys[1] = rect.c2 + rect.b2
        box = (xs[0], ys[0], xs[1], ys[1])
        bp = Polygon(((xs[0], ys[0]), (xs[1], ys[0]), (xs[1], ys[1]), (xs[0], ys[1])))
        inter = bp
        for (ax, ay), (bx, by) in rect.polygon().edges():
            inter = clip_halfplane(inter, (by - ay, ax - bx), (by - ay) * ax + (ax - bx) * ay)
        zin = inter
        for (ax, ay), (bx, by) in Z.edges() if len(Z.vertices) >= 3 else []:
            zin = clip_halfplane(zin, (by - ay, ax - bx), (by - ay) * ax + (ax - bx) * ay)
        zarea = zin.area if len(Z.vertices) >= 3 else 0.0
        direct = -plan.area_density * (inter.area - zarea)
        direct += sum(_segment_in_box_mass(m, box, Z) for m in segs)

        def in_box(p):
            return box[0] <= p[0] <= box[2] and box[1] <= p[1] <= box[3]

        def stats(tr, sig):
            r = tr.ray(sig)
            x, d = np.array(r["x"]), tr.direction
            v = r["source"] if in_box(x) else 0.0
            for a, b in r["intervals"]:
                # portion of [a, b] inside the box
                lo, hi = a, b
                for k in (0, 1):
                    if abs(d[k]) > 0:
                        r1 = (box[k] - x[k]) / d[k]
                        r2 = (box[k + 2] - x[k]) / d[k]
                        lo, hi = max(lo, min(r1, r2)), min(hi, max(r1, r2))
                    elif not (box[k] <= x[k] <= box[k + 2]):
                        lo, hi = 1.0, 0.0
                if hi > lo:
                    v -= tr.area_density * (hi - lo)
            for rr, m in r["atoms"]:
                if in_box(x + rr * d):
                    v -= m
            return np.array([v])

        net = 0.0
        for tr in plan.transfers:
            extra = [tr.sigma_of(p) for p in bp.vertices]
            for poly in (tr.keep, *tr.exclude):
                clipped = poly
                for (ax, ay), (bx, by) in bp.edges():
                    clipped = clip_halfplane(clipped, (by - ay, ax - bx), (by - ay) * ax + (ax - bx) * ay)
                extra += [tr.sigma_of(v) for v in clipped.vertices]
            for m in (*tr.source_measures, *tr.targets):
                extra += [tr.sigma_of(m.point(c)) for c in _segment_cuts(m, box, [])]
            lo, hi = tr.sigma
            fine = sorted(set(tr.breakpoints()) | {e for e in extra if lo < e < hi})
            net += float(_integrate(lambda s, tr=tr: stats(tr, s), fine)[0])
        worst = max(worst, abs(net - direct))
    return worst


# --------------------------------------------------------------- full report

def strong_duality_report(n: int) -> dict:
    ex = build_example(n)
    mech = ex.mechanism
    primal = revenue_mu_bar(mech)
    src, tgt, cost = ex.plan.totals()
    cs = check_complementary_slackness(mech, ex.plan)
    dom = [check_convex_dominance(ex.shuffling[k]) for k in dominance_targets(ex)]
    bal = ex.plan.balance()
    gap = abs(primal - cost)
    return {
        "example": n,
        "support": mech.rect.to_dict(),
        "regime": mech.label,
        "constants": {k: v for k, v in ex.constants.items() if isinstance(v, float)},
        "primal_revenue": primal,
        "dual_cost": float(cost),
        "gap": gap,
        "transported_mass": float(src),
        "ray_balance": bal,
        "dominance": [d.to_dict() for d in dom],
        "slackness": cs.to_dict(),
        "passed": gap <= 1e-4 and all(d.passed for d in dom) and cs.passed and bal <= 1e-8,
    }
