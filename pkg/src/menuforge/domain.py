"""Core value types: support rectangles, convex polygons, menus.

Everything here is plain floating point. Polygons are stored open (the first
vertex is not repeated) and counterclockwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

EPS = 1e-12

Point = tuple[float, float]


class DomainError(ValueError):
    """Input outside the region where an operation is defined."""


class SolverError(RuntimeError):
    """A bracketed root search found no sign change."""

    def __init__(self, msg: str, residuals: dict | None = None):
        super().__init__(msg)
        self.residuals = residuals or {}


class UnsupportedRegime(DomainError):
    """Asymmetric support outside the proven extension region."""


@dataclass(frozen=True)
class SupportRect:
    """Valuation support [c1, c1+b1] x [c2, c2+b2] with uniform density."""

    c1: float
    c2: float
    b1: float
    b2: float

    def __post_init__(self):
        for name in ("c1", "c2", "b1", "b2"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise DomainError(f"{name} must be finite, got {v}")
        if self.b1 <= 0 or self.b2 <= 0:
            raise DomainError(f"side lengths must be positive, got b1={self.b1}, b2={self.b2}")
        if self.c1 < 0 or self.c2 < 0:
            raise DomainError(f"corner must be nonnegative, got ({self.c1}, {self.c2})")

    @classmethod
    def square(cls, c: float, b1: float, b2: float) -> "SupportRect":
        return cls(c, c, b1, b2)

    @property
    def c(self) -> float:
        if not self.symmetric():
            raise DomainError("rectangle is not symmetric (c1 != c2)")
        return self.c1

    @property
    def d(self) -> float:
        return self.c1 - self.c2

    @property
    def area(self) -> float:
        return self.b1 * self.b2

    def symmetric(self) -> bool:
        return self.c1 == self.c2

    def corners(self) -> list[Point]:
        x0, y0 = self.c1, self.c2
        x1, y1 = self.c1 + self.b1, self.c2 + self.b2
        return [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]

    def polygon(self) -> "Polygon":
        return Polygon(tuple(self.corners()))

    def swapped(self) -> "SupportRect":
        return SupportRect(self.c2, self.c1, self.b2, self.b1)

    def scaled(self, s: float) -> "SupportRect":
        return SupportRect(s * self.c1, s * self.c2, s * self.b1, s * self.b2)

    def contains(self, z: Point, tol: float = 1e-9) -> bool:
        return (self.c1 - tol <= z[0] <= self.c1 + self.b1 + tol
                and self.c2 - tol <= z[1] <= self.c2 + self.b2 + tol)

    def to_dict(self) -> dict:
        return {"c1": self.c1, "c2": self.c2, "b1": self.b1, "b2": self.b2}


def _signed_area(vs: Sequence[Point]) -> float:
    n = len(vs)
    s = 0.0
    for i in range(n):
        x0, y0 = vs[i]
        x1, y1 = vs[(i + 1) % n]
        s += x0 * y1 - x1 * y0
    return 0.5 * s


def _dedupe(vs: Iterable[Point], tol: float = EPS) -> list[Point]:
    out: list[Point] = []
    for p in vs:
        if out and abs(p[0] - out[-1][0]) <= tol and abs(p[1] - out[-1][1]) <= tol:
            continue
        out.append((float(p[0]), float(p[1])))
    while len(out) > 1 and abs(out[0][0] - out[-1][0]) <= tol and abs(out[0][1] - out[-1][1]) <= tol:
        out.pop()
    return out


@dataclass(frozen=True)
class Polygon:
    """Convex polygon (possibly degenerate: a segment or a point)."""

    vertices: tuple[Point, ...] = field(default_factory=tuple)

    def __post_init__(self):
        vs = _dedupe(self.vertices)
        if len(vs) >= 3 and _signed_area(vs) < 0:
            vs = vs[::-1]
        object.__setattr__(self, "vertices", tuple(vs))

    @property
    def area(self) -> float:
        if len(self.vertices) < 3:
            return 0.0
        return abs(_signed_area(self.vertices))

    def is_empty(self) -> bool:
        return len(self.vertices) == 0

    def edges(self) -> list[tuple[Point, Point]]:
        vs = self.vertices
        if len(vs) < 2:
            return []
        if len(vs) == 2:
            return [(vs[0], vs[1])]
        return [(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs))]

    def translated(self, v: Point) -> "Polygon":
        return Polygon(tuple((x + v[0], y + v[1]) for x, y in self.vertices))

    def scaled(self, s: float) -> "Polygon":
        return Polygon(tuple((s * x, s * y) for x, y in self.vertices))

    def swapped(self) -> "Polygon":
        return Polygon(tuple((y, x) for x, y in self.vertices))

    def contains(self, z: Point, tol: float = 1e-9) -> bool:
        vs = self.vertices
        if not vs:
            return False
        if len(vs) == 1:
            return math.dist(vs[0], z) <= tol
        if len(vs) == 2:
            (x0, y0), (x1, y1) = vs
            L = math.hypot(x1 - x0, y1 - y0)
            cross = (x1 - x0) * (z[1] - y0) - (y1 - y0) * (z[0] - x0)
            if abs(cross) > tol * L:
                return False
            t = ((z[0] - x0) * (x1 - x0) + (z[1] - y0) * (y1 - y0)) / (L * L)
            return -tol <= t <= 1 + tol
        for (x0, y0), (x1, y1) in self.edges():
            L = math.hypot(x1 - x0, y1 - y0)
            if (x1 - x0) * (z[1] - y0) - (y1 - y0) * (z[0] - x0) < -tol * L:
                return False
        return True

    def to_list(self) -> list[list[float]]:
        return [[x, y] for x, y in self.vertices]


def clip_halfplane(poly: Polygon, a: Point, b: float) -> Polygon:
    """Intersect poly with {z : a.z <= b} (Sutherland-Hodgman, one edge)."""
    vs = poly.vertices
    if not vs:
        return poly
    scale = max(1.0, abs(b), abs(a[0]) + abs(a[1]))

    def val(p):
        return a[0] * p[0] + a[1] * p[1] - b

    if len(vs) == 1:
        return poly if val(vs[0]) <= EPS * scale else Polygon(())
    ring = list(vs) if len(vs) > 2 else [vs[0], vs[1]]
    out: list[Point] = []
    n = len(ring)
    for i in range(n):
        p, q = ring[i], ring[(i + 1) % n]
        fp, fq = val(p), val(q)
        p_in = fp <= EPS * scale
        q_in = fq <= EPS * scale
        if p_in:
            out.append(p)
        if p_in != q_in and abs(fp - fq) > 0:
            t = fp / (fp - fq)
            t = min(max(t, 0.0), 1.0)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    return Polygon(tuple(out))


def clip_to_rect(poly: Polygon, rect: SupportRect) -> Polygon:
    x0, y0 = rect.c1, rect.c2
    x1, y1 = rect.c1 + rect.b1, rect.c2 + rect.b2
    p = clip_halfplane(poly, (-1.0, 0.0), -x0)
    p = clip_halfplane(p, (1.0, 0.0), x1)
    p = clip_halfplane(p, (0.0, -1.0), -y0)
    return clip_halfplane(p, (0.0, 1.0), y1)


def region_probability(poly: Polygon, rect: SupportRect) -> float:
    """Probability of poly under the uniform law on rect."""
    inside = clip_to_rect(poly, rect)
    return min(1.0, max(0.0, inside.area / rect.area))


@dataclass(frozen=True)
class MenuItem:
    q1: float
    q2: float
    price: float

    def __post_init__(self):
        if not (-EPS <= self.q1 <= 1 + EPS and -EPS <= self.q2 <= 1 + EPS):
            raise DomainError(f"allocation ({self.q1}, {self.q2}) not in [0,1]^2")
        if self.q1 + self.q2 > 1 + 1e-9:
            raise DomainError(f"unit demand violated: q1+q2={self.q1 + self.q2}")
        if self.price < -EPS:
            raise DomainError(f"negative price {self.price}")

    def utility(self, z: Point) -> float:
        return z[0] * self.q1 + z[1] * self.q2 - self.price

    def is_null(self) -> bool:
        return self.q1 == 0 and self.q2 == 0 and self.price == 0

    def to_dict(self) -> dict:
        return {"q1": self.q1, "q2": self.q2, "price": self.price}


NULL_ITEM = MenuItem(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class Menu:
    """Non-null menu items; the null item is always implicitly available."""

    items: tuple[MenuItem, ...]

    def __post_init__(self):
        items = tuple(i for i in self.items if not i.is_null())
        object.__setattr__(self, "items", items)
        if len(items) > 4:
            raise DomainError(f"at most 4 non-null items, got {len(items)}")
        keys = {(round(i.q1, 12), round(i.q2, 12), round(i.price, 12)) for i in items}
        if len(keys) != len(items):
            raise DomainError("duplicate menu items")

    def with_null(self) -> tuple[MenuItem, ...]:
        return (NULL_ITEM,) + self.items

    def __len__(self) -> int:
        return len(self.items)

    def to_list(self) -> list[dict]:
        return [i.to_dict() for i in self.items]
