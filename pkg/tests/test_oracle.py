import numpy as np
import pytest

from menuforge import DomainError, Menu, MenuItem, SupportRect, revenue, solve
from menuforge.domain import clip_halfplane, region_probability
from menuforge.oracle import (G, OracleConfig, chain_revenue, compare, menu_revenue, oracle_search,
                              oracle_search_unrestricted)

COARSE = OracleConfig(allocation_grid=0.25, price_grid=0.1)


def _g_clip(rect, a, t, s):
    poly = clip_halfplane(rect.polygon(), (1.0, -1.0), s)
    poly = clip_halfplane(poly, (-a, -(1 - a)), -t)
    return region_probability(poly, rect)


def test_g_matches_polygon_clipping():
    rng = np.random.default_rng(4)
    rect = SupportRect(0.7, 0.7, 1.3, 1.0)
    for _ in range(300):
        a = rng.choice([0.0, 1.0, rng.uniform()])
        t = rng.uniform(0.5, 2.2)
        s = rng.uniform(-1.2, 1.5)
        assert G(rect, a, t, s) == pytest.approx(_g_clip(rect, a, t, s), abs=1e-13)


def test_g_vectorized_shape():
    rect = SupportRect(0, 0, 1, 1)
    out = G(rect, np.array([0.2, 0.5]), np.array([0.3, 0.4]), 0.1)
    assert out.shape == (2,)


def test_chain_revenue_equals_partition_revenue(regime_point):
    _, pt = regime_point
    m = solve(*pt)
    assert chain_revenue(m.rect, m.menu.items) == pytest.approx(revenue(m), abs=1e-12)


def test_chain_revenue_drops_dominated_items():
    rect = SupportRect(1, 1, 1, 1)
    items = [MenuItem(1, 0, 1.4), MenuItem(0, 1, 1.4), MenuItem(0.5, 0.5, 1.9)]
    assert chain_revenue(rect, items) == pytest.approx(menu_revenue(rect, Menu(tuple(items))), abs=1e-12)


def test_config_validation():
    with pytest.raises(DomainError):
        OracleConfig(allocation_grid=0)
    with pytest.raises(DomainError):
        OracleConfig(max_items=5)
    with pytest.raises(DomainError):
        OracleConfig(sampler="grid")
    cfg = OracleConfig()
    assert cfg.epsilon(SupportRect(0, 0, 1, 1)) == pytest.approx(2 * (0.02 + 0.05 * 2))


def test_search_is_lower_bound_and_exact():
    m = solve(1.26, 1, 1)
    res = oracle_search(m.rect, COARSE)
    assert res.revenue <= revenue(m) + 1e-12
    assert menu_revenue(m.rect, res.menu) == pytest.approx(res.revenue, abs=1e-12)


def test_more_items_never_hurt():
    rect = SupportRect(2, 2, 1.2, 1)
    revs = [oracle_search(rect, OracleConfig(0.25, 0.1, max_items=k)).revenue for k in (1, 2, 3)]
    assert revs == sorted(revs)


def test_workers_do_not_change_result():
    rect = SupportRect(0.5, 0.5, 1.2, 1)
    a = oracle_search(rect, COARSE)
    b = oracle_search(rect, OracleConfig(0.25, 0.1, workers=3))
    assert a.revenue == b.revenue and a.menu == b.menu


def test_top_k_sorted():
    res = oracle_search(SupportRect(1, 1, 1, 1), OracleConfig(0.25, 0.1, top_k=5))
    revs = [r for _, r in res.top]
    assert len(revs) == 5 and revs == sorted(revs, reverse=True)
    assert revs[0] == pytest.approx(res.revenue)
    assert res.top_csv().startswith("menu,revenue")


def test_grid_cap_marks_partial():
    res = oracle_search(SupportRect(1, 1, 1, 1), OracleConfig(0.25, 0.1, max_items_in_grid=20))
    assert res.partial and res.n_items_grid <= 20


def test_monte_carlo_sampler():
    res = oracle_search(SupportRect(1, 1, 1, 1), OracleConfig(0.25, 0.1, sampler="monte-carlo", n_samples=50_000))
    assert abs(res.mc_revenue - res.revenue) < 5 * res.mc_stderr


def test_asymmetric_rect_rejected():
    with pytest.raises(DomainError):
        oracle_search(SupportRect(0.4, 0.2, 1.2, 1), COARSE)


def test_unrestricted_skeptic_mode():
    m = solve(1.0, 1, 1)
    res = oracle_search_unrestricted(m.rect, allocation_grid=0.5, price_grid=0.25, max_items=2)
    assert res.revenue <= revenue(m) + 1e-12


def test_compare_fields():
    rep = compare(solve(2.0, 1.2, 1), COARSE)
    assert rep["passed"] and rep["margin"] >= -rep["epsilon"]
    assert 0 <= rep["relative_gap"] < 0.05


def test_unit_square_bracket():
    res = oracle_search(SupportRect(0, 0, 1, 1))
    assert 0.375 <= res.revenue <= 2 / (3 * np.sqrt(3))


def test_single_item_menus():
    # best single lottery on [0,1]^2 is (1/2,1/2) at 1/sqrt(6): revenue t (1 - 2 t^2) = 2/(3 sqrt 6)
    cfg = OracleConfig(max_items=1)
    res = oracle_search(SupportRect(0, 0, 1, 1), cfg)
    best = 2 / (3 * np.sqrt(6))
    assert best - cfg.epsilon(SupportRect(0, 0, 1, 1)) <= res.revenue <= best + 1e-12
    assert res.revenue < oracle_search(SupportRect(0, 0, 1, 1)).revenue


def test_example_2_lottery_found():
    res = oracle_search(SupportRect(1.5, 1.5, 1, 1))
    lot = [it for it in res.menu.items if abs(it.q1 - 0.5) < 1e-12]
    assert lot and abs(lot[0].price - 1.6455) < 0.02
