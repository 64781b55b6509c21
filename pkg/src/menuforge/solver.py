"""Regime classification and parameter solving for the seven menu structures.

Every two-variable system is reduced to one variable along an explicit
solution curve of its first equation, then the second equation is bracketed
on the proven existence interval and solved with Brent's method.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

from .domain import DomainError, SolverError, SupportRect, UnsupportedRegime

T_CONST = 3 * (37 + 3 * math.sqrt(465)) / 176  # ~1.733379
LABELS = ("A", "B", "C", "D", "Dp", "E", "Ep")


def _k_const() -> float:
    # root >= 1 of 32k^3 - 54k^2 + 19
    return brentq(lambda k: 32 * k ** 3 - 54 * k ** 2 + 19, 1.0, 1.5, xtol=1e-15)


K_CONST = _k_const()


@dataclass(frozen=True)
class Regime:
    label: str
    thresholds: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.label not in LABELS:
            raise ValueError(f"unknown regime {self.label}")


@dataclass(frozen=True)
class MechanismParams:
    delta1: float
    delta2: float
    delta_star: Optional[float] = None
    h: Optional[float] = None
    a1: Optional[float] = None
    a2: Optional[float] = None
    a: Optional[float] = None

    def to_dict(self) -> dict:
        return asdict(self)

    def scaled(self, s: float) -> "MechanismParams":
        def sc(v):
            return None if v is None else s * v
        return MechanismParams(s * self.delta1, s * self.delta2, sc(self.delta_star), sc(self.h),
                               self.a1, self.a2, self.a)


# ---------------------------------------------------------------------------
# root bracketing


def _root(f: Callable[[float], float], lo: float, hi: float, name: str, scale: float = 1.0) -> float:
    """Root of f in [lo, hi]; scans for a sign change if the ends agree."""
    if hi < lo:
        lo, hi = hi, lo
    flo, fhi = f(lo), f(hi)
    tiny = 1e-13 * scale
    if abs(flo) <= tiny:
        return lo
    if abs(fhi) <= tiny:
        return hi
    if hi - lo <= 1e-14 * max(1.0, abs(hi)):
        if min(abs(flo), abs(fhi)) <= 1e-9 * scale:
            return lo if abs(flo) < abs(fhi) else hi
        raise SolverError(f"{name}: empty bracket", {"lo": lo, "f(lo)": flo})
    if flo * fhi > 0:
        n = 200
        xs = [lo + (hi - lo) * i / n for i in range(n + 1)]
        fs = [f(x) for x in xs]
        for i in range(n):
            if fs[i] == 0:
                return xs[i]
            if fs[i] * fs[i + 1] < 0:
                lo, hi = xs[i], xs[i + 1]
                break
        else:
            j = min(range(n + 1), key=lambda i: abs(fs[i]))
            if abs(fs[j]) <= 1e-9 * scale:
                return xs[j]
            raise SolverError(f"{name}: no sign change on [{lo}, {hi}]",
                              {"f(lo)": flo, "f(hi)": fhi, "min|f|": abs(fs[j])})
    return brentq(f, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=500)


# ---------------------------------------------------------------------------
# defining equations (all homogeneous; residuals compared against b2^k)


def eq_a(c, b1, b2, d1, d2):
    return (-3 * d1 * d2 - c * (d1 + d2) + b1 * b2,
            -1.5 * d2 ** 2 + 2 * b2 * d2 - b2 ** 2 / 2 + (c - 2 * b2 + 3 * d2) * d1)


def eq_b_first(c, b1, b2, h, ds):
    return 1.5 * h ** 2 + c * h + 2 * b2 * ds - b1 * b2 + b2 ** 2 / 2


def eq_b_second(c, b1, b2, h, ds):
    return 27 * (c + h + ds) * (b2 + ds) ** 2 - 4 * (4 * b2 + 3 * ds) * (1.5 * (h + ds) + c) ** 2


def eq_b_third(c, b1, b2, h, ds):
    return 2 * b1 ** 3 / 27 - (c + h) * h ** 2 / 2 + b2 * ds ** 2 - b2 * ds * (b1 - b2 / 2)


def b_integral_margin(c, b1, b2, h, ds):
    """Negated eq_b_third; nonnegative exactly on the B range c <= alpha1."""
    return -eq_b_third(c, b1, b2, h, ds)


def eq_c_second(c, b1, b2, h, ds):
    return ((2 * b1 ** 3 / 27 + b2 * ds ** 2 - b2 * ds * (b1 - b2 / 2)) * (1.5 * h + c) ** 2
            - (c + h) * (2 * b2 * ds + b2 ** 2 / 2 - b1 * b2) ** 2 / 2)


def eq_c_third(c, b1, b2, h, ds):
    """Left-hand side of the alpha2 equation in its displayed form."""
    return (2 * b1 * b2 * (b2 ** 2 + 4 * b2 * ds - 2 * c * (ds + h) - 3 * h * (2 * ds + h))
            - (b2 ** 2 + 4 * b2 * ds - 3 * ds * h) * (b2 ** 2 + 4 * b2 * ds - 2 * c * ds - 3 * ds * h))


def monotonicity_margin(c, b1, b2, h, ds):
    """(product) - 2 b1 b2 (...): nonnegative iff a1 + a2 >= 1."""
    return -eq_c_third(c, b1, b2, h, ds)


def eq_d(c, b1, b2, d1, d2):
    return (-1.5 * d1 * d2 - c * (d1 + d2) + b1 * b2,
            2 * (b1 ** 3 - b2 ** 3) / 27 + 0.5 * d1 * d2 * (d2 - d1) + 0.5 * c * (d2 ** 2 - d1 ** 2))


def eq_dp(c, b1, b2, d1, d2):
    return (-1.5 * d1 * d2 - c * (d1 + d2) + b1 * b2,
            2 * b2 ** 3 / 27 + 0.5 * (d1 - d2) * (d1 * d2 + c * (d1 + d2)) - b2 * (2 * b1 - b2) ** 2 / 16)


def eq_ext(c1, c2, b1, b2, d1, d2):
    d = c1 - c2
    return (-3 * d1 * d2 - c2 * d1 - c1 * d2 + b1 * b2,
            -1.5 * d2 ** 2 + 2 * b2 * d2 - b2 ** 2 / 2 - d * (b2 - d2) + (c2 - 2 * b2 + 3 * d2) * d1)


# ---------------------------------------------------------------------------
# thresholds


def compute_beta(b1: float, b2: float) -> float:
    """Root c >= b2 of the quadratic separating B from D' when b1 >= 1.5 b2."""
    _check_sides(b1, b2)
    A = -(96 * b1 + 208 * b2)
    B = -36 * b1 ** 2 + 84 * b1 * b2 + 399 * b2 ** 2
    C = 72 * b1 ** 2 * b2 + 144 * b1 * b2 ** 2 - 90 * b2 ** 3
    disc = B * B - 4 * A * C
    if disc < 0:
        raise DomainError(f"beta undefined: negative discriminant at b1={b1}, b2={b2}")
    roots = sorted([(-B + math.sqrt(disc)) / (2 * A), (-B - math.sqrt(disc)) / (2 * A)])
    ok = [r for r in roots if r >= b2 * (1 - 1e-12)]
    if not ok:
        raise DomainError(f"beta undefined: no root >= b2 at b1={b1}, b2={b2}")
    return ok[0]


def threshold_e(b1: float, b2: float) -> float:
    """D -> E boundary 27 b1^2 b2^2 / (4 (b1^3 - b2^3)); infinite when b1 = b2."""
    den = 4 * (b1 ** 3 - b2 ** 3)
    return math.inf if den <= 0 else 27 * b1 ** 2 * b2 ** 2 / den


def threshold_ep(b1: float, b2: float) -> float:
    """D' -> E' boundary 216 b1^2 b2 / (108 b1^2 - 108 b1 b2 - 5 b2^2)."""
    den = 108 * b1 ** 2 - 108 * b1 * b2 - 5 * b2 ** 2
    return math.inf if den <= 0 else 216 * b1 ** 2 * b2 / den


def _check_sides(b1, b2):
    if not (b1 > 0 and b2 > 0) or not (math.isfinite(b1) and math.isfinite(b2)):
        raise DomainError(f"side lengths must be positive and finite, got b1={b1}, b2={b2}")


def _bisect_c(sign_at: Callable[[float], Optional[float]], lo: float, hi: float, tol: float) -> float:
    """Largest c in [lo, hi] with sign_at(c) >= 0, assuming one crossing.

    sign_at returns None where the inner solve has no solution (treated as past
    the crossing).
    """
    def ok(c):
        v = sign_at(c)
        return v is not None and v >= 0
    if ok(hi):
        return hi
    while hi - lo > tol:
        m = 0.5 * (lo + hi)
        if ok(m):
            lo = m
        else:
            hi = m
    return lo


@lru_cache(maxsize=4096)
def _alpha1_unit(r: float) -> float:
    if r == 1.0:
        return 1.0

    def f(c):
        try:
            p = solve_structure_b(c, r, 1.0)
        except SolverError:
            return None
        return b_integral_margin(c, r, 1.0, p.h, p.delta_star)
    if r >= 1.5:
        return T_CONST
    return _bisect_c(f, 1.0, T_CONST, 1e-8)


@lru_cache(maxsize=4096)
def _alpha2_unit(r: float) -> float:
    def f(c):
        try:
            p = solve_structure_c(c, r, 1.0)
        except SolverError:
            return None
        return monotonicity_margin(c, r, 1.0, p.h, p.delta_star)
    if r >= 1.5:
        return T_CONST
    lo = _alpha1_unit(r)
    if f(lo) is None or f(lo) < 0:
        lo = 1.0
    return _bisect_c(f, lo, T_CONST, 1e-8)


def _ratio(b1, b2):
    _check_sides(b1, b2)
    if b1 < b2:
        raise DomainError("thresholds need b1 >= b2 (swap items first)")
    if b1 > 1.5 * b2 * (1 + 1e-12):
        raise DomainError("alpha thresholds are defined only for b1 <= 1.5 b2")
    return min(b1 / b2, 1.5)


def compute_alpha1(b1: float, b2: float) -> float:
    """B -> C boundary: outer bisection on c of the B-structure integral sign."""
    return b2 * _alpha1_unit(_ratio(b1, b2))


def compute_alpha2(b1: float, b2: float) -> float:
    """C -> D boundary: outer bisection on c of a1 + a2 - 1 along the C solution."""
    return b2 * _alpha2_unit(_ratio(b1, b2))


def thresholds(b1: float, b2: float) -> dict:
    th = {"c_low": b2}
    if b1 <= 1.5 * b2:
        th["alpha1"] = compute_alpha1(b1, b2)
        th["alpha2"] = compute_alpha2(b1, b2)
        th["c_high"] = threshold_e(b1, b2)
    else:
        th["beta"] = compute_beta(b1, b2)
        th["c_high"] = threshold_ep(b1, b2)
    return th


def classify_regime(c: float, b1: float, b2: float) -> Regime:
    """Regime label per the case table; ties go to the lower-c structure."""
    _check_sides(b1, b2)
    if c < 0 or not math.isfinite(c):
        raise DomainError(f"c must be finite and >= 0, got {c}")
    if b1 < b2:
        raise DomainError("classify_regime needs b1 >= b2 (swap items first)")
    if c <= b2:
        return Regime("A", {"c_low": b2})
    th = thresholds(b1, b2)
    if b1 <= 1.5 * b2:
        if c <= th["alpha1"]:
            lab = "B"
        elif c <= th["alpha2"]:
            lab = "C"
        elif c <= th["c_high"]:
            lab = "D"
        else:
            lab = "E"
    else:
        if c <= th["beta"]:
            lab = "B"
        elif c <= th["c_high"]:
            lab = "Dp"
        else:
            lab = "Ep"
    return Regime(lab, th)


# ---------------------------------------------------------------------------
# structure solvers


def _pre(c, b1, b2):
    _check_sides(b1, b2)
    if c < 0:
        raise DomainError(f"c must be >= 0, got {c}")


def solve_structure_a(c: float, b1: float, b2: float) -> MechanismParams:
    _pre(c, b1, b2)

    def d1_of(d2):
        return (b1 * b2 - c * d2) / (3 * d2 + c)

    lo, hi = b2 / 3, (2 * b2 - c) / 3
    d2 = _root(lambda t: eq_a(c, b1, b2, d1_of(t), t)[1], lo, hi, "structure A", b2 ** 2)
    d1 = d1_of(d2)
    return MechanismParams(d1, d2, delta_star=d1 - d2)


def _b_derived(c, b1, b2, h, ds):
    d1 = h + ds
    d2 = (b1 * b2 - (1.5 * h + c) * (h + ds)) / (1.5 * (h + ds) + c)
    a2 = (h + ds) / (d2 + ds)
    return MechanismParams(d1, d2, delta_star=ds, h=h, a2=a2)


def solve_structure_b(c: float, b1: float, b2: float) -> MechanismParams:
    _pre(c, b1, b2)

    def ds_of(h):
        return (b1 * b2 - b2 ** 2 / 2 - 1.5 * h ** 2 - c * h) / (2 * b2)

    h_hi = (2 * b2 - c) / 3
    if h_hi < 0:
        raise SolverError("structure B: empty h range (c > 2 b2)")
    h_lo = 0.0
    if b1 < 1.5 * b2:
        # delta* <= b1 - b2  <=>  h >= h(b1 - b2)
        disc = c * c + 3 * b2 * (3 * b2 - 2 * b1)
        h_lo = (-c + math.sqrt(disc)) / 3
        if h_lo > h_hi + 1e-14 * b2:
            raise SolverError("structure B: empty bracket", {"h_lo": h_lo, "h_hi": h_hi})
        h_lo = min(h_lo, h_hi)
    h = _root(lambda t: eq_b_second(c, b1, b2, t, ds_of(t)), h_lo, h_hi, "structure B", b2 ** 3)
    return _b_derived(c, b1, b2, h, ds_of(h))


def _c_ds_of(c, b1, b2, h):
    K = 2 * b2 ** 2 * (c + h) - b2 * (1.5 * h + c) ** 2
    if K <= 0:
        return math.nan
    return (b1 / 2 - b2 / 4
            - ((3 * b2 - 2 * b1) / 4) * ((1.5 * h + c) / 3) * math.sqrt(((8 * b1 - 3 * b2) / 3) / K))


def _c_derived(c, b1, b2, h, ds):
    d1 = ds + (b1 * b2 - 2 * b2 * ds - b2 ** 2 / 2) / (1.5 * h + c)
    d2 = (b1 * b2 - (1.5 * h + c) * d1) / (1.5 * (h + ds) + c)
    # at b1 = 1.5 b2, c = t b2 the C, D and D' structures meet with h = d1 - ds = 0
    a1 = h / (d1 - ds) if abs(d1 - ds) > 1e-14 * b2 else 1.0
    a2 = (h + ds) / (d2 + ds)
    return MechanismParams(d1, d2, delta_star=ds, h=h, a1=a1, a2=a2)


def solve_structure_c(c: float, b1: float, b2: float) -> MechanismParams:
    _pre(c, b1, b2)
    h_hi = (2 * b2 - c) / 3
    if h_hi <= 0:
        raise SolverError("structure C: empty h range (c >= 2 b2)")

    def ds(h):
        return _c_ds_of(c, b1, b2, h)

    bp = b1 - b2
    # the curve delta*(h) decreases; keep the part with 0 <= delta* <= b1 - b2
    lo, hi = 0.0, h_hi
    if ds(lo) > bp:
        lo = _root(lambda t: ds(t) - bp, 0.0, h_hi, "structure C entry", b2)
    if ds(hi) < 0:
        hi = _root(ds, lo, h_hi, "structure C exit", b2)
    h = _root(lambda t: eq_b_second(c, b1, b2, t, ds(t)), lo, hi, "structure C", b2 ** 3)
    s = ds(h)
    if abs(s) < 1e-15 * b2:
        s = 0.0
    return _c_derived(c, b1, b2, h, s)


# ---------------------------------------------------------------------------
# algebraic solution curves (valid past the structure's own c-range)


def _real_roots(coeffs_low_to_high) -> list[float]:
    r = np.roots(np.asarray(coeffs_low_to_high, dtype=float)[::-1])
    scale = max(1.0, float(np.max(np.abs(r)))) if len(r) else 1.0
    return sorted(float(x.real) for x in r if abs(x.imag) <= 1e-7 * scale)


def _polish(f, x0, width):
    lo, hi = x0 - width, x0 + width
    try:
        if f(lo) * f(hi) < 0:
            return brentq(f, lo, hi, xtol=1e-15, rtol=1e-15)
    except (ValueError, ZeroDivisionError):
        pass
    return x0


def b_quintic(c, b1, b2) -> list[float]:
    """Coefficients (constant first) of the quintic in h left after eliminating delta*."""
    return [
        -72 * b1**2 * b2**3 - 144 * b1 * b2**4 + 90 * b2**5 + 36 * b1**2 * b2**2 * c
        - 84 * b1 * b2**3 * c - 399 * b2**4 * c + 96 * b1 * b2**2 * c**2 + 208 * b2**3 * c**2,
        108 * b1**2 * b2**2 + 36 * b1 * b2**3 - 477 * b2**4 + 432 * b1 * b2**2 * c
        + 768 * b2**3 * c - 72 * b1 * b2 * c**2 + 84 * b2**2 * c**2 - 96 * b2 * c**3,
        432 * b1 * b2**2 + 684 * b2**3 - 324 * b1 * b2 * c + 90 * b2**2 * c - 504 * b2 * c**2 + 36 * c**3,
        -324 * b1 * b2 - 54 * b2**2 - 864 * b2 * c + 216 * c**2,
        -486 * b2 + 405 * c,
        243.0,
    ]


def b_curve(c: float, b1: float, b2: float) -> MechanismParams:
    """B-structure parameters from the 3rd real root of the quintic, any c in [b2, 2 b2]."""
    _pre(c, b1, b2)
    rts = _real_roots(b_quintic(c, b1, b2))
    if len(rts) < 3:
        raise SolverError("b_curve: fewer than 3 real roots", {"n_real": len(rts)})

    def ds_of(h):
        return (b1 * b2 - b2 ** 2 / 2 - 1.5 * h ** 2 - c * h) / (2 * b2)
    h = _polish(lambda t: eq_b_second(c, b1, b2, t, ds_of(t)), rts[2], 1e-7 * b2)
    return _b_derived(c, b1, b2, h, ds_of(h))


def c_octic(c, b1, b2) -> list[float]:
    """Coefficients (constant first) of the degree-8 polynomial in delta* for structure C."""
    co = [0.0] * 9
    co[0] = -16*(b1-b2)**2*b2**4*(b1**2-3*b1*b2+b2**2)**2*c**2
    co[1] = -4*(b1-b2)*b2**3*(b1**2-3*b1*b2+b2**2)*(108*b1**2*b2**3-108*b1*b2**4+27*b2**5+24*b1**3*b2*c+96*b1**2*b2**2*c-96*b1*b2**3*c+24*b2**4*c+16*b1**3*c**2-24*b1**2*b2*c**2+44*b1*b2**2*c**2-16*b2**3*c**2)
    co[2] = (-144*b1**6*b2**4+4176*b1**4*b2**6-13752*b1**3*b2**7+15660*b1**2*b2**8-7218*b1*b2**9+1152*b2**10-256*b1**6*b2**3*c+512*b1**5*b2**4*c+4384*b1**4*b2**5*c-18064*b1**3*b2**6*c+21888*b1**2*b2**7*c-10368*b1*b2**8*c+1680*b2**9*c-96*b1**6*b2**2*c**2+320*b1**5*b2**3*c**2-144*b1**4*b2**4*c**2-1392*b1**3*b2**5*c**2+1884*b1**2*b2**6*c**2-768*b1*b2**7*c**2+96*b2**8*c**2)
    co[3] = (-192*b1**6*b2**3+624*b1**5*b2**4+4128*b1**4*b2**5-24828*b1**3*b2**6+42984*b1**2*b2**7-27432*b1*b2**8+5580*b2**9-224*b1**6*b2**2*c+768*b1**5*b2**3*c+4960*b1**4*b2**4*c-31904*b1**3*b2**5*c+58680*b1**2*b2**6*c-38808*b1*b2**7*c+8064*b2**8*c-64*b1**6*b2*c**2+96*b1**5*b2**2*c**2+1216*b1**4*b2**3*c**2-4120*b1**3*b2**4*c**2+7632*b1**2*b2**5*c**2-5056*b1*b2**6*c**2+1016*b2**7*c**2)
    co[4] = (-64*b1**6*b2**2+288*b1**5*b2**3+2400*b1**4*b2**4-20496*b1**3*b2**5+55512*b1**2*b2**6-52650*b1*b2**7+14364*b2**8-64*b1**6*b2*c+288*b1**5*b2**2*c+2688*b1**4*b2**3*c-23560*b1**3*b2**4*c+69120*b1**2*b2**5*c-70320*b1*b2**6*c+20040*b2**7*c-16*b1**6*c**2+1344*b1**4*b2**2*c**2-3280*b1**3*b2**3*c**2+2592*b1**2*b2**4*c**2-4020*b1*b2**5*c**2+1424*b2**6*c**2)
    co[5] = (576*b1**4*b2**3-6864*b1**3*b2**4+33696*b1**2*b2**5-56628*b1*b2**6+24696*b2**7+576*b1**4*b2**2*c-7152*b1**3*b2**3*c+37584*b1**2*b2**4*c-70380*b1*b2**5*c+33360*b2**6*c+432*b1**4*b2*c**2-1560*b1**3*b2**2*c**2-5184*b1**2*b2**3*c**2+10224*b1*b2**4*c**2-2616*b2**5*c**2)
    co[6] = (-576*b1**3*b2**3+7776*b1**2*b2**4-32832*b1*b2**5+27396*b2**6-576*b1**3*b2**2*c+7776*b1**2*b2**3*c-36720*b1*b2**4*c+34272*b2**5*c-432*b1**3*b2*c**2-2916*b1**2*b2**2*c**2+15876*b1*b2**3*c**2-9729*b2**4*c**2)
    co[7] = -108*b2**2*(2*b2+3*c)*(36*b1*b2-76*b2**2-18*b1*c+29*b2*c)
    co[8] = 972*b2**2*(2*b2-c)*(2*b2+3*c)
    return co


def c_h_of(c, b2, ds):
    """h solving eq_b_second for given delta* (the branch through the C solution)."""
    disc = 9 * b2**2 + 16 * b2 * c + 6 * ds * (3 * b2 + 2 * c) + 9 * ds**2
    return ((9 * b2**2 - 16 * b2 * c - 6 * ds * (b2 + 2 * c) - 9 * ds**2
             + 3 * (b2 + ds) * math.sqrt(max(disc, 0.0))) / (6 * (4 * b2 + 3 * ds)))


def c_curve(c: float, b1: float, b2: float) -> MechanismParams:
    """C-structure parameters from the 5th real root of the octic, any c in [b2, 2 b2)."""
    _pre(c, b1, b2)
    def f(s):
        return eq_c_second(c, b1, b2, c_h_of(c, b2, s), s)
    allr = np.roots(np.asarray(c_octic(c, b1, b2), dtype=float)[::-1])
    rts = _real_roots(c_octic(c, b1, b2))
    # at c = 2 b2 the leading coefficient vanishes and the root at -infinity is lost
    k = 3 if abs(2 * b2 - c) <= 1e-12 * b2 else 4
    if len(rts) > k and abs(3 * b2 - 2 * b1) > 1e-2 * b2:
        gaps = [abs(z - rts[k]) for z in allr if abs(z - rts[k]) > 1e-12 * b2]
        ds = _polish(f, rts[k], 0.5 * min(gaps + [b2]))
    else:
        # near b1 = 1.5 b2 four roots cluster at b1 - b2 and np.roots loses them;
        # solve the unsquared fixed point delta* = delta*(h(delta*)) instead
        def g(s):
            return s - _c_ds_of(c, b1, b2, c_h_of(c, b2, s))
        ds = _root(g, 0.5 * (b1 - b2), b1 - b2, "c_curve", b2)
    return _c_derived(c, b1, b2, c_h_of(c, b2, ds), ds)


def _d_like(c, b1, b2, d1_cap, second, name):
    def d1_of(d2):
        return (b1 * b2 - c * d2) / (c + 1.5 * d2)

    lo, hi = 0.0, b2 / 3
    # delta1 decreases along the curve; enforce delta1 <= d1_cap
    if d1_of(lo) > d1_cap:
        lo = (b1 * b2 - c * d1_cap) / (c + 1.5 * d1_cap)
    if lo > hi:
        raise SolverError(f"{name}: empty bracket", {"lo": lo, "hi": hi})
    d2 = _root(lambda t: second(c, b1, b2, d1_of(t), t)[1], lo, hi, name, b2 ** 3)
    d1 = d1_of(d2)
    return MechanismParams(d1, d2, a=d1 / (d1 + d2) if d1 + d2 > 0 else 1.0)


def solve_structure_d(c: float, b1: float, b2: float) -> MechanismParams:
    _pre(c, b1, b2)
    if c == 0:
        raise SolverError("structure D needs c > 0")
    return _d_like(c, b1, b2, b1 / 3, eq_d, "structure D")


def solve_structure_dp(c: float, b1: float, b2: float) -> MechanismParams:
    _pre(c, b1, b2)
    if c == 0:
        raise SolverError("structure D' needs c > 0")
    return _d_like(c, b1, b2, b1 / 2 - b2 / 4, eq_dp, "structure D'")


def solve_structure_e(c: float, b1: float, b2: float) -> MechanismParams:
    """No free parameters; delta1 records the zero-measure exclusion length b1 b2 / c."""
    _pre(c, b1, b2)
    if c <= 0:
        raise DomainError("structure E needs c > 0")
    return MechanismParams(b1 * b2 / c, 0.0)


solve_structure_ep = solve_structure_e


def check_extension_region(c1, c2, b1, b2):
    if not (b1 >= b2 and c2 >= 0 and c1 >= c2 and 2 * c1 - c2 <= b2):
        raise UnsupportedRegime(
            f"asymmetric support (c1={c1}, c2={c2}, b1={b1}, b2={b2}) outside the region "
            "b1 >= b2, c1 >= c2 >= 0, 2 c1 - c2 <= b2")


def solve_general_rect(c1: float, c2: float, b1: float, b2: float) -> MechanismParams:
    _check_sides(b1, b2)
    check_extension_region(c1, c2, b1, b2)
    d = c1 - c2

    def d1_of(d2):
        return (b1 * b2 - c1 * d2) / (3 * d2 + c2)

    lo, hi = (b2 + 2 * d) / 3, (2 * b2 - c2) / 3
    d2 = _root(lambda t: eq_ext(c1, c2, b1, b2, d1_of(t), t)[1], lo, hi, "extension", b2 ** 2)
    d1 = d1_of(d2)
    return MechanismParams(d1, d2, delta_star=d1 - d2)


SOLVERS = {
    "A": solve_structure_a,
    "B": solve_structure_b,
    "C": solve_structure_c,
    "D": solve_structure_d,
    "Dp": solve_structure_dp,
    "E": solve_structure_e,
    "Ep": solve_structure_ep,
}


def residuals(label: str, c: float, b1: float, b2: float, p: MechanismParams) -> dict[str, float]:
    """Defining-equation residuals divided by the natural power of b2."""
    if label == "A":
        r = eq_a(c, b1, b2, p.delta1, p.delta2)
        return {"area": r[0] / b2 ** 2, "V(delta*)": r[1] / b2 ** 2}
    if label == "B":
        return {"b_first": eq_b_first(c, b1, b2, p.h, p.delta_star) / b2 ** 2,
                "b_second": eq_b_second(c, b1, b2, p.h, p.delta_star) / b2 ** 3}
    if label == "C":
        return {"b_second": eq_b_second(c, b1, b2, p.h, p.delta_star) / b2 ** 3,
                "c_second": eq_c_second(c, b1, b2, p.h, p.delta_star) / b2 ** 5}
    if label == "D":
        r = eq_d(c, b1, b2, p.delta1, p.delta2)
        return {"area": r[0] / b2 ** 2, "integral": r[1] / b2 ** 3}
    if label == "Dp":
        r = eq_dp(c, b1, b2, p.delta1, p.delta2)
        return {"area": r[0] / b2 ** 2, "integral": r[1] / b2 ** 3}
    return {}


def solve_params(c: float, b1: float, b2: float) -> tuple[Regime, MechanismParams]:
    """Regime and parameters for b1 >= b2 (no item swap)."""
    reg = classify_regime(c, b1, b2)
    return reg, SOLVERS[reg.label](c, b1, b2)


def solve(c: float | None = None, b1: float | None = None, b2: float | None = None, *,
          c1: float | None = None, c2: float | None = None):
    """Solve the optimal mechanism; returns a mechanism.Mechanism."""
    from .mechanism import build_mechanism, build_extension_mechanism

    if b1 is None or b2 is None:
        raise DomainError("b1 and b2 are required")
    if c1 is not None or c2 is not None:
        if c1 is None or c2 is None:
            raise DomainError("give both c1 and c2")
        if c1 == c2:
            return build_mechanism(SupportRect(c1, c1, b1, b2))
        return build_extension_mechanism(SupportRect(c1, c2, b1, b2))
    if c is None:
        raise DomainError("c is required")
    return build_mechanism(SupportRect(c, c, b1, b2))
