"""The signed revenue measure mu-bar and the virtual valuation V(delta).

mu-bar on D = [c1,c1+b1] x [c2,c2+b2] has
  area density      -3/(b1 b2)
  line density      -c1/(b1 b2) on the left edge, -c2/(b1 b2) on the bottom,
                    (c1+b1)/(b1 b2) on the right, (c2+b2)/(b1 b2) on the top
  a unit atom at the corner (c1, c2).
The 1/(b1 b2) factor is always kept, so every number here is a true mu-bar value.

delta is measured in offset coordinates x = z1 - c1, y = z2 - c2, so that
delta ranges over [-b2, b1] for any rectangle.

Two independent evaluation paths exist for V:
  virtual_value_geometric  polygon clipping + mu_bar_of
  virtual_value_exact      V = W - Zm with W the whole-rectangle term in closed
                           form and Zm evaluated by exact piecewise-linear
                           integration over the exclusion region's profile.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .domain import DomainError, Point, Polygon, SupportRect, clip_halfplane, clip_to_rect

TOL_ON_EDGE = 1e-9


def _edge_intervals(rect: SupportRect, region: Polygon):
    """Lengths of region's boundary lying on each rectangle edge."""
    x0, y0 = rect.c1, rect.c2
    x1, y1 = rect.c1 + rect.b1, rect.c2 + rect.b2
    tol = TOL_ON_EDGE * max(1.0, x1, y1)
    vs = region.vertices
    out = {}
    for name, axis, level in (("left", 0, x0), ("right", 0, x1), ("bottom", 1, y0), ("top", 1, y1)):
        on = [v[1 - axis] for v in vs if abs(v[axis] - level) <= tol]
        out[name] = (max(on) - min(on)) if len(on) >= 2 else 0.0
    return out


def edge_densities(rect: SupportRect) -> dict[str, float]:
    A = rect.area
    return {
        "left": -rect.c1 / A,
        "bottom": -rect.c2 / A,
        "right": (rect.c1 + rect.b1) / A,
        "top": (rect.c2 + rect.b2) / A,
    }


def mu_bar_of(rect: SupportRect, region: Polygon) -> float:
    """mu-bar of a convex polygonal subset of D (segments allowed)."""
    region = clip_to_rect(region, rect)
    if region.is_empty():
        return 0.0
    total = -3.0 * region.area / rect.area
    dens = edge_densities(rect)
    for name, length in _edge_intervals(rect, region).items():
        total += dens[name] * length
    tol = TOL_ON_EDGE * max(1.0, rect.c1 + rect.b1, rect.c2 + rect.b2)
    if region.contains((rect.c1, rect.c2), tol=tol):
        total += 1.0
    return total


def upper_set(rect: SupportRect, delta: float) -> Polygon:
    """{z in D : (z1-c1) - (z2-c2) >= delta}."""
    # -(z1 - z2) <= -(delta + d)
    return clip_halfplane(rect.polygon(), (-1.0, 1.0), -(delta + rect.d))


def _check_delta(rect: SupportRect, delta: float):
    slack = 1e-12 * max(1.0, rect.b1, rect.b2)
    if not (-rect.b2 - slack <= delta <= rect.b1 + slack):
        raise DomainError(f"delta={delta} outside [-b2, b1] = [{-rect.b2}, {rect.b1}]")


def virtual_value_geometric(rect: SupportRect, exclusion: Polygon, delta: float) -> float:
    """V(delta) = mu-bar({x - y >= delta} minus Z) by polygon clipping."""
    _check_delta(rect, delta)
    U = upper_set(rect, delta)
    UZ = clip_halfplane(exclusion, (-1.0, 1.0), -(delta + rect.d))
    return mu_bar_of(rect, U) - mu_bar_of(rect, UZ)


# ---------------------------------------------------------------------------
# exact path


def _clamp(v, lo, hi):
    return min(max(v, lo), hi)


def _pl_integral(f: Callable[[float], float], a: float, b: float, knots: Sequence[float]) -> float:
    """Exact integral of a continuous piecewise-linear f whose kinks lie in knots."""
    if b <= a:
        return 0.0
    pts = sorted({a, b, *(k for k in knots if a < k < b)})
    s = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        s += 0.5 * (hi - lo) * (f(lo) + f(hi))
    return s


@dataclass(frozen=True)
class Profile:
    """Exclusion region {0 <= x <= X, 0 <= y <= g(x)} in offset coordinates.

    g is the concave, decreasing, piecewise-linear curve through knots
    (x_0=0, y_0), ..., (x_n=X, y_n); the region drops vertically at X.
    All five exclusion shapes used here are of this form.
    """

    knots: tuple[Point, ...]

    @property
    def X(self) -> float:
        return self.knots[-1][0]

    def g(self, x: float) -> float:
        ks = self.knots
        if x <= ks[0][0]:
            return ks[0][1]
        for (xa, ya), (xb, yb) in zip(ks[:-1], ks[1:]):
            if x <= xb:
                if xb == xa:
                    return max(ya, yb)
                return ya + (yb - ya) * (x - xa) / (xb - xa)
        return ks[-1][1]

    def vertices(self) -> list[Point]:
        vs = [(0.0, 0.0), (self.X, 0.0)]
        vs += [k for k in reversed(self.knots)]
        return vs

    def polygon(self, rect: SupportRect) -> Polygon:
        return Polygon(tuple((rect.c1 + x, rect.c2 + y) for x, y in self.vertices()))

    def delta_breaks(self) -> list[float]:
        return [x - y for x, y in self.vertices()]


def _rect_part(rect: SupportRect, delta: float) -> float:
    """W(delta) = mu-bar({x - y >= delta}) on the whole rectangle, closed form."""
    b1, b2 = rect.b1, rect.b2
    dens = edge_densities(rect)
    area = _pl_integral(lambda y: b1 - _clamp(y + delta, 0.0, b1), 0.0, b2, (-delta, b1 - delta))
    bottom = b1 - _clamp(delta, 0.0, b1)
    left = _clamp(-delta, 0.0, b2)
    right = _clamp(b1 - delta, 0.0, b2)
    top = b1 - _clamp(b2 + delta, 0.0, b1)
    w = (-3.0 * area / rect.area + dens["bottom"] * bottom + dens["left"] * left
         + dens["right"] * right + dens["top"] * top)
    if delta <= 0:
        w += 1.0
    return w


def _profile_part(rect: SupportRect, prof: Profile, delta: float) -> float:
    """Zm(delta) = mu-bar(Z intersect {x - y >= delta}) for a profile region."""
    X = prof.X
    knots = [k[0] for k in prof.knots] + [delta]
    # crossings of g(x) with x - delta on each linear piece
    for (xa, ya), (xb, yb) in zip(prof.knots[:-1], prof.knots[1:]):
        if xb > xa:
            s = (yb - ya) / (xb - xa)
            if s != 1.0:
                xc = (ya - s * xa + delta) / (1.0 - s)
                knots.append(xc)
    area = _pl_integral(lambda x: max(0.0, min(prof.g(x), x - delta)), 0.0, X, knots)
    dens = edge_densities(rect)
    bottom = max(0.0, X - max(delta, 0.0))
    left = _clamp(-delta, 0.0, prof.knots[0][1])
    z = -3.0 * area / rect.area + dens["bottom"] * bottom + dens["left"] * left
    if delta <= 0:
        z += 1.0
    return z


def virtual_value_exact(rect: SupportRect, prof: Profile, delta: float) -> float:
    _check_delta(rect, delta)
    return _rect_part(rect, delta) - _profile_part(rect, prof, delta)


def mu_bar_profile(rect: SupportRect, prof: Profile) -> float:
    """mu-bar(Z) from the exact path (delta = -b2 covers all of Z)."""
    return _profile_part(rect, prof, -rect.b2 - 1.0)


# ---------------------------------------------------------------------------
# piecewise quadratic representation


@dataclass(frozen=True)
class PiecewiseV:
    """V(delta) = p0 + p1 delta + p2 delta^2 on each [breaks[i], breaks[i+1]]."""

    breaks: np.ndarray
    coeffs: np.ndarray  # shape (n_pieces, 3)

    def piece_index(self, delta: float) -> int:
        i = int(np.searchsorted(self.breaks, delta, side="right")) - 1
        return min(max(i, 0), len(self.coeffs) - 1)

    def __call__(self, delta: float) -> float:
        p = self.coeffs[self.piece_index(delta)]
        return float(p[0] + p[1] * delta + p[2] * delta * delta)

    def piece(self, i: int):
        return float(self.breaks[i]), float(self.breaks[i + 1]), tuple(float(v) for v in self.coeffs[i])

    @property
    def n_pieces(self) -> int:
        return len(self.coeffs)

    def continuity_gap(self) -> float:
        gap = 0.0
        for i in range(1, self.n_pieces):
            x = self.breaks[i]
            pl, pr = self.coeffs[i - 1], self.coeffs[i]
            gap = max(gap, abs((pl[0] + pl[1] * x + pl[2] * x * x) - (pr[0] + pr[1] * x + pr[2] * x * x)))
        return float(gap)

    def antiderivative_piece(self, i: int, x: float) -> float:
        p = self.coeffs[i]
        return float(p[0] * x + p[1] * x * x / 2 + p[2] * x ** 3 / 3)

    def zeros(self, lo: float, hi: float) -> list[float]:
        """Roots of V in [lo, hi], piece by piece (quadratic formula)."""
        out = []
        for i in range(self.n_pieces):
            a, b = max(lo, self.breaks[i]), min(hi, self.breaks[i + 1])
            if b < a:
                continue
            p0, p1, p2 = self.coeffs[i]
            if abs(p2) > 1e-14:
                disc = p1 * p1 - 4 * p2 * p0
                if disc >= 0:
                    r = math.sqrt(disc)
                    cand = [(-p1 - r) / (2 * p2), (-p1 + r) / (2 * p2)]
                else:
                    cand = []
            elif abs(p1) > 1e-14:
                cand = [-p0 / p1]
            else:
                cand = []
            out += [float(x) for x in cand if a <= x <= b]
        return sorted(out)


def integral_V(pv: PiecewiseV, a: float, b: float) -> float:
    """Exact integral of pv over [a, b]."""
    if a > b:
        raise DomainError(f"integral bounds reversed: a={a} > b={b}")
    lo_b, hi_b = float(pv.breaks[0]), float(pv.breaks[-1])
    slack = 1e-12 * max(1.0, abs(lo_b), abs(hi_b))
    if a < lo_b - slack or b > hi_b + slack:
        raise DomainError(f"[{a}, {b}] outside [{lo_b}, {hi_b}]")
    s = 0.0
    for i in range(pv.n_pieces):
        lo, hi = max(a, pv.breaks[i]), min(b, pv.breaks[i + 1])
        if hi > lo:
            s += pv.antiderivative_piece(i, hi) - pv.antiderivative_piece(i, lo)
    return s


def fit_piecewise(f: Callable[[float], float], breaks: Sequence[float]) -> PiecewiseV:
    """Recover exact quadratic pieces of f from three evaluations per piece."""
    bs = np.array(sorted(set(float(b) for b in breaks)))
    keep = [bs[0]]
    for b in bs[1:]:
        if b - keep[-1] > 1e-12 * max(1.0, abs(b)):
            keep.append(b)
    bs = np.array(keep)
    coeffs = np.zeros((len(bs) - 1, 3))
    for i in range(len(bs) - 1):
        lo, hi = bs[i], bs[i + 1]
        xs = np.array([lo + (hi - lo) * t for t in (0.2, 0.5, 0.8)])
        ys = np.array([f(x) for x in xs])
        # solve the Vandermonde system around the midpoint for conditioning
        m = 0.5 * (lo + hi)
        u = xs - m
        A = np.vstack([np.ones(3), u, u * u]).T
        q0, q1, q2 = np.linalg.solve(A, ys)
        coeffs[i] = (q0 - q1 * m + q2 * m * m, q1 - 2 * q2 * m, q2)
    return PiecewiseV(bs, coeffs)


def piecewise_V(rect: SupportRect, prof: Profile) -> PiecewiseV:
    """PiecewiseV for the exclusion profile; breaks at vertex delta-values of D and Z."""
    b1, b2 = rect.b1, rect.b2
    brk = [-b2, 0.0, b1 - b2, b1] + [_clamp(v, -b2, b1) for v in prof.delta_breaks()]
    return fit_piecewise(lambda t: virtual_value_exact(rect, prof, t), brk)


def exclusion_profile(label: str, params, b1: float, b2: float) -> Profile:
    """Exclusion region of a solved structure (b1 >= b2 orientation, offset coords)."""
    p = params
    if label == "A":
        return Profile(((0.0, p.delta2), (p.delta1, p.delta2)))
    if label == "B":
        return Profile(((0.0, p.delta2), (p.delta1, p.h)))
    if label == "C":
        return Profile(((0.0, p.delta2), (p.delta_star + p.h, p.h), (p.delta1, 0.0)))
    if label in ("D", "Dp"):
        return Profile(((0.0, p.delta2), (p.delta1, 0.0)))
    if label in ("E", "Ep"):
        # zero-area segment along the bottom edge; delta1 carries its length
        return Profile(((0.0, 0.0), (p.delta1, 0.0)))
    raise DomainError(f"unknown structure {label}")


def virtual_value_closed_form(label: str, params, rect: SupportRect) -> PiecewiseV:
    """Piecewise quadratic V for a solved structure on rect."""
    for name in ("delta1", "delta2"):
        v = getattr(params, name)
        if v is None or not math.isfinite(v) or v < -1e-12:
            raise DomainError(f"inconsistent parameters: {name}={v}")
    return piecewise_V(rect, exclusion_profile(label, params, rect.b1, rect.b2))
