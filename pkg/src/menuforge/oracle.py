"""Brute-force lower bound on optimal revenue over gridded unit-demand menus.

Items are (a, 1-a, t) with a on the allocation grid and t on the price grid.
For such menus u(z) = max(0, z2 + U1(z1 - z2)) with U1 the upper envelope of
the lines a*d - t, so the active items form a chain of increasing a whose
switch points s_k = (t_{k+1} - t_k) / (a_{k+1} - a_k) increase. Writing
G(a, t, s) = P(z1 - z2 <= s, a z1 + (1-a) z2 >= t), the revenue of a chain
is

    sum_k [t_k G(k, s_k) - t_{k+1} G(k+1, s_k)] + t_K G(K, +inf),

a sum over consecutive pairs. Maximizing over all chains of at most
max_items items is then an exact dynamic program over pairs, with a
prefix-max over switch points enforcing convexity. Every menu in the grid is
covered; menus whose envelope drops an item coincide with a shorter chain.
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .domain import DomainError, Menu, MenuItem, SupportRect
from .mechanism import Mechanism, partition, revenue, revenue_monte_carlo


@dataclass(frozen=True)
class OracleConfig:
    allocation_grid: float = 0.05
    price_grid: float = 0.02
    max_items: int = 4
    sampler: str = "polygon-exact"
    n_samples: int = 10 ** 6
    workers: int = 1
    max_items_in_grid: int = 20000
    top_k: int = 0

    def __post_init__(self):
        if not (self.allocation_grid > 0 and self.price_grid > 0):
            raise DomainError("grid steps must be positive")
        if not (1 <= self.max_items <= 4):
            raise DomainError("max_items must be in 1..4")
        if self.sampler not in ("polygon-exact", "monte-carlo"):
            raise DomainError(f"unknown sampler {self.sampler!r}")

    def epsilon(self, rect: SupportRect) -> float:
        return 2 * (self.price_grid + self.allocation_grid * (rect.b1 + rect.b2))


@dataclass
class OracleResult:
    menu: Menu
    revenue: float
    n_items_grid: int
    partial: bool = False
    mc_revenue: float | None = None
    mc_stderr: float | None = None
    top: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"revenue": self.revenue, "menu": self.menu.to_list(), "n_items_grid": self.n_items_grid,
                "partial": self.partial, "mc_revenue": self.mc_revenue, "mc_stderr": self.mc_stderr}

    def top_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["menu", "revenue"])
        for enc, rev in self.top:
            w.writerow([enc, f"{rev:.12g}"])
        return buf.getvalue()


def _grid(lo: float, hi: float, step: float) -> np.ndarray:
    n = int(math.floor((hi - lo) / step + 1e-9))
    return lo + step * np.arange(n + 1)


def G(rect: SupportRect, a, t, s) -> np.ndarray:
    """P(z1 - z2 <= s and a z1 + (1-a) z2 >= t), vectorized and exact.

    The z1-length of the set at height z2 is piecewise linear in z2; it is
    integrated exactly by the trapezoid rule between all kinks.
    """
    a, t, s = np.broadcast_arrays(np.asarray(a, float), np.asarray(t, float), np.asarray(s, float))
    x0, y0 = rect.c1, rect.c2
    x1, y1 = rect.c1 + rect.b1, rect.c2 + rect.b2
    pos = a > 0
    one = a < 1
    with np.errstate(divide="ignore", invalid="ignore"):
        k1 = np.where(one, (t - a * x0) / np.where(one, 1 - a, 1), y0)
        k2 = np.where(one, (t - a * x1) / np.where(one, 1 - a, 1), y0)
    ylo = np.where(pos, y0, np.maximum(y0, t))
    cols = [ylo, np.full_like(a, y1), k1, k2, x0 - s, x1 - s, t - a * s]
    K = np.stack([np.clip(cc, ylo, y1) for cc in cols], axis=-1)
    K.sort(axis=-1)

    def length(z2):
        with np.errstate(divide="ignore", invalid="ignore"):
            lb = np.where(pos[..., None], (t[..., None] - (1 - a[..., None]) * z2) / np.where(pos, a, 1)[..., None],
                          x0)
        lb = np.maximum(lb, x0)
        ub = np.minimum(x1, z2 + s[..., None])
        return np.maximum(0.0, ub - lb)

    L = length(K)
    area = 0.5 * np.sum((K[..., 1:] - K[..., :-1]) * (L[..., 1:] + L[..., :-1]), axis=-1)
    area = np.where(ylo >= y1, 0.0, area)
    return area / rect.area


def chain_revenue(rect: SupportRect, items) -> float:
    """Revenue of a menu of (a, 1-a, t) items through the pair decomposition."""
    its = sorted(((float(i.q1), float(i.price)) for i in items), key=lambda p: (p[0], p[1]))
    # reduce to the active chain of the envelope a*d - t
    chain: list = []
    for a, t in its:
        if chain and abs(chain[-1][0] - a) < 1e-15:
            if t < chain[-1][1]:
                chain.pop()
            else:
                continue
        while len(chain) >= 2:
            (a0, t0), (a1, t1) = chain[-2], chain[-1]
            if (t1 - t0) / (a1 - a0) >= (t - t1) / (a - a1):
                chain.pop()
            else:
                break
        chain.append((a, t))
    big = rect.c1 + rect.b1 - rect.c2 + 1.0
    total = 0.0
    for (a0, t0), (a1, t1) in zip(chain[:-1], chain[1:]):
        s = (t1 - t0) / (a1 - a0)
        total += t0 * float(G(rect, a0, t0, s)) - t1 * float(G(rect, a1, t1, s))
    if chain:
        a, t = chain[-1]
        total += t * float(G(rect, a, t, big))
    return total


def _item_grid(rect: SupportRect, cfg: OracleConfig):
    A = _grid(0.0, 1.0, cfg.allocation_grid)
    if A[-1] < 1 - 1e-12:
        A = np.append(A, 1.0)
    T = _grid(rect.c2, rect.c1 + rect.b1, cfg.price_grid)
    a, t = (v.ravel() for v in np.meshgrid(A, T, indexing="ij"))
    # never bought: negative utility at the best corner
    top = np.maximum(a * (rect.c1 + rect.b1) + (1 - a) * (rect.c2 + rect.b2), 0)
    keep = top - t > 1e-12
    a, t = a[keep], t[keep]
    return a, t


def oracle_search(rect: SupportRect, config: OracleConfig | None = None) -> OracleResult:
    """Best gridded menu with at most max_items non-null (a, 1-a, t) items."""
    cfg = config or OracleConfig()
    if not rect.symmetric():
        raise DomainError("oracle_search needs a symmetric support (c1 == c2)")
    a, t = _item_grid(rect, cfg)
    partial = False
    if len(a) > cfg.max_items_in_grid:
        stride = int(math.ceil(len(a) / cfg.max_items_in_grid))
        a, t = a[::stride], t[::stride]
        partial = True
    N = len(a)
    big = rect.c1 + rect.b1 - rect.c2 + 1.0
    last = t * G(rect, a, t, np.full(N, big))

    # pair tables: S[i, j] switch point, P[i, j] pair revenue term (a_i < a_j only)
    S = np.full((N, N), np.nan)
    P = np.full((N, N), -np.inf)

    def fill(j):
        i = np.nonzero(a < a[j] - 1e-12)[0]
        if len(i) == 0:
            return
        s = (t[j] - t[i]) / (a[j] - a[i])
        S[i, j] = s
        P[i, j] = t[i] * G(rect, a[i], t[i], s) - t[j] * G(rect, a[j], t[j], s)

    workers = int(os.environ.get("MENUFORGE_WORKERS", cfg.workers) or 1)
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            list(ex.map(fill, range(N)))
    else:
        for j in range(N):
            fill(j)

    # L[n][i, j]: best revenue of an n-item chain ending with the pair (i, j), excluding the tail term
    best_val = last.copy()
    best_key = [("1", j) for j in range(N)]
    stages = [None, None]
    back = [None, None]
    if cfg.max_items >= 2:
        stages.append(P.copy())
        back.append(None)
    for n in range(3, cfg.max_items + 1):
        prev = stages[-1]
        cur = np.full((N, N), -np.inf)
        arg = np.full((N, N), -1, dtype=np.int64)
        for j in range(N):
            col = prev[:, j]
            ok = np.isfinite(col)
            if not ok.any():
                continue
            ii = np.nonzero(ok)[0]
            order = np.argsort(S[ii, j], kind="stable")
            ii = ii[order]
            sv = S[ii, j]
            pm = np.maximum.accumulate(col[ii])
            pa = ii[_running_argmax(col[ii])]
            kk = np.nonzero(np.isfinite(P[j]))[0]
            if len(kk) == 0:
                continue
            pos = np.searchsorted(sv, S[j, kk] + 1e-15, side="right") - 1
            good = pos >= 0
            kk, pos = kk[good], pos[good]
            cur[j, kk] = pm[pos] + P[j, kk]
            arg[j, kk] = pa[pos]
        stages.append(cur)
        back.append(arg)

    cand = [(float(best_val.max()), ("chain", 1, int(best_val.argmax()), -1))]
    for n in range(2, cfg.max_items + 1):
        tot = stages[n] + last[None, :]
        k = int(np.nanargmax(np.where(np.isfinite(tot), tot, -np.inf)))
        i, j = divmod(k, N)
        cand.append((float(tot[i, j]), ("chain", n, i, j)))
    rev, key = max(cand, key=lambda c: c[0])
    chain = _backtrack(key, back)
    menu = Menu(tuple(MenuItem(float(a[k]), float(1 - a[k]), float(t[k])) for k in chain))
    res = OracleResult(menu, rev, N, partial)
    if cfg.top_k:
        res.top = _top_k(stages, last, back, a, t, cfg.top_k)
    if cfg.sampler == "monte-carlo":
        mech = _menu_mechanism(rect, menu)
        res.mc_revenue, res.mc_stderr = revenue_monte_carlo(mech, cfg.n_samples)
    return res


def _running_argmax(v: np.ndarray) -> np.ndarray:
    idx = np.arange(len(v))
    best = np.where(v == np.maximum.accumulate(v), idx, 0)
    return np.maximum.accumulate(best)


def _backtrack(key, back) -> list[int]:
    _, n, i, j = key
    if n == 1:
        return [i]
    chain = [j, i]
    while n > 2:
        k = int(back[n][i, j])
        chain.append(k)
        i, j = k, i
        n -= 1
    return chain[::-1]


def _top_k(stages, last, back, a, t, k) -> list:
    out = []
    N = len(last)
    for n in range(1, len(stages)):
        if n == 1:
            vals = last
            idx = np.argsort(-vals)[:k]
            out += [(_encode([int(x)], a, t), float(vals[x])) for x in idx]
            continue
        tot = stages[n] + last[None, :]
        flat = np.where(np.isfinite(tot), tot, -np.inf).ravel()
        idx = np.argsort(-flat)[:k]
        for x in idx:
            if not np.isfinite(flat[x]):
                continue
            i, j = divmod(int(x), N)
            out.append((_encode(_backtrack(("chain", n, i, j), back), a, t), float(flat[x])))
    out.sort(key=lambda r: -r[1])
    return out[:k]


def _encode(chain, a, t) -> str:
    return ";".join(f"({a[k]:.4g},{1 - a[k]:.4g},{t[k]:.6g})" for k in chain)


def _menu_mechanism(rect: SupportRect, menu: Menu) -> Mechanism:
    from .solver import MechanismParams, Regime
    from .domain import Polygon
    return Mechanism(rect, Regime("A"), MechanismParams(0.0, 0.0), menu, Polygon(()), partition(menu, rect))


def menu_revenue(rect: SupportRect, menu: Menu) -> float:
    """Exact revenue of an arbitrary menu via the best-response partition."""
    return revenue(_menu_mechanism(rect, menu))


def oracle_search_unrestricted(rect: SupportRect, allocation_grid: float = 0.25, price_grid: float = 0.05,
                               max_items: int = 2) -> OracleResult:
    """Skeptic mode: arbitrary (q1, q2) with q1 + q2 <= 1 on a coarse grid, exact partitions."""
    qs = _grid(0.0, 1.0, allocation_grid)
    T = _grid(rect.c2, rect.c1 + rect.b1 + rect.c2, price_grid)
    items = [MenuItem(q1, q2, p) for q1, q2 in product(qs, qs) if q1 + q2 <= 1 + 1e-12 and q1 + q2 > 0
             for p in T]
    best = (0.0, Menu(()))
    from itertools import combinations
    for n in range(1, max_items + 1):
        for combo in combinations(items, n):
            m = Menu(combo)
            r = menu_revenue(rect, m)
            if r > best[0]:
                best = (r, m)
    return OracleResult(best[1], best[0], len(items))


def compare(mech: Mechanism, config: OracleConfig | None = None) -> dict:
    """revenue(mech) - oracle best, with the grid tolerance epsilon."""
    cfg = config or OracleConfig()
    res = oracle_search(mech.rect, cfg)
    rev = revenue(mech)
    eps = cfg.epsilon(mech.rect)
    margin = rev - res.revenue
    return {"analytic": rev, "oracle": res.revenue, "margin": margin, "epsilon": eps,
            "passed": margin >= -eps, "relative_gap": (rev - res.revenue) / rev if rev else 0.0,
            "oracle_menu": res.menu.to_list(), "partial": res.partial}
