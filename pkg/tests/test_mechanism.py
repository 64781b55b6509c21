import json

import numpy as np
import pytest

from menuforge import Menu, MenuItem, SupportRect, from_dict, menu_of, revenue, solve
from menuforge.mechanism import (SCHEMA_VERSION, best_response, line_endpoints, partition, q1_ladder,
                                 revenue_monte_carlo, revenue_mu_bar, revenue_partition, utility_profile)

from conftest import DELTA_EG, REGIME_POINTS

N_ITEMS = {"A": 2, "B": 3, "C": 4, "D": 3, "Dp": 3, "E": 2, "Ep": 2}


def test_menu_sizes(regime_point):
    label, pt = regime_point
    assert len(solve(*pt).menu) == N_ITEMS[label]


def test_partition_covers_support(regime_point):
    _, pt = regime_point
    m = solve(*pt)
    assert sum(poly.area for poly, _ in m.region_partition) == pytest.approx(m.rect.area, abs=1e-12)


def test_revenue_paths_agree(regime_point):
    _, pt = regime_point
    m = solve(*pt)
    assert revenue_partition(m) == pytest.approx(revenue_mu_bar(m), abs=1e-12)


def test_revenue_monte_carlo(regime_point):
    _, pt = regime_point
    m = solve(*pt)
    mc, se = revenue_monte_carlo(m, n=200_000, seed=3)
    assert abs(mc - revenue(m)) < 5 * se + 1e-12


def test_exclusion_region_gets_null():
    m = solve(1.5, 1, 1)
    c = 1.5
    z = (c + 0.1 * DELTA_EG, c + 0.1 * DELTA_EG)
    assert best_response(m.menu, z).is_null()
    assert m.utility((c, c)) == 0.0


def test_example_2_lottery_item():
    m = solve(1.5, 1, 1)
    lot = [it for it in m.menu.items if 0 < it.q1 < 1]
    assert len(lot) == 1
    assert lot[0].q1 == pytest.approx(0.5) and lot[0].price == pytest.approx(1.5 + 0.5 * DELTA_EG)


def test_example_1_item_prices():
    m = solve(1.26, 1, 1)
    d = 20 / 63
    lots = sorted((it for it in m.menu.items if 0 < it.q1 < 1), key=lambda it: it.q1)
    assert len(lots) == 2
    for it in lots:
        assert it.price == pytest.approx(1.26 + 0.6615 * d, abs=1e-9)


def test_menu_of_matches_mechanism(regime_point):
    _, pt = regime_point
    m = solve(*pt)
    again = menu_of(m.regime, m.params, m.rect)
    assert again == m.menu


def test_prices_continuous_across_switch_lines(regime_point):
    # incentive compatibility in u: adjacent regions agree on their shared boundary
    _, pt = regime_point
    m = solve(*pt)
    rng = np.random.default_rng(0)
    for poly, it in m.region_partition:
        for v in poly.vertices:
            u = m.utility(v)
            assert u >= it.utility(v) - 1e-12
            assert u == pytest.approx(max(0.0, it.utility(v)), abs=1e-9)
    pts = rng.uniform(0, 1, (500, 2)) * (m.rect.b1, m.rect.b2) + (m.rect.c1, m.rect.c2)
    for z in pts:
        it = best_response(m.menu, tuple(z))
        assert it.utility(tuple(z)) == pytest.approx(m.utility(tuple(z)), abs=1e-12)


def test_q1_ladder_covers_range(regime_point):
    _, pt = regime_point
    m = solve(*pt)
    lad = q1_ladder(m)
    assert lad[0][0] == -m.rect.b2 and lad[-1][1] == m.rect.b1
    for (lo, hi, _), (lo2, _, _) in zip(lad, lad[1:]):
        assert hi == pytest.approx(lo2)
    qs = [q for *_, q in lad]
    assert qs == sorted(qs)


def test_line_endpoints():
    rect = SupportRect(1, 1, 1.2, 1)
    near, far = line_endpoints(rect, 0.1)
    assert near == pytest.approx((1.1, 1.0)) and far == pytest.approx((2.1, 2.0))
    near, far = line_endpoints(rect, 0.5)
    assert far == pytest.approx((2.2, 1.7))


def test_utility_profile_outside_exclusion():
    m = solve(0.5, 1.2, 1)
    u1, q, z2 = utility_profile(m, 0.9)
    assert q == 1.0
    _, far = line_endpoints(m.rect, 0.9)
    assert far[1] + u1 == pytest.approx(m.utility(far))


def test_json_round_trip(regime_point):
    _, pt = regime_point
    m = solve(*pt)
    d = json.loads(m.to_json())
    assert d["schema_version"] == SCHEMA_VERSION
    back = from_dict(d)
    assert back.label == m.label
    assert back.menu == m.menu
    assert revenue(back) == pytest.approx(revenue(m), abs=1e-12)


def test_swapped_mechanism_revenue():
    a, b = solve(2.0, 1.2, 1.0), solve(2.0, 1.0, 1.2)
    assert revenue(a) == pytest.approx(revenue(b), abs=1e-12)


def test_partition_arbitrary_menu():
    rect = SupportRect(0, 0, 1, 1)
    menu = Menu((MenuItem(1, 0, 0.5), MenuItem(0, 1, 0.5)))
    parts = partition(menu, rect)
    areas = {(it.q1, it.q2): poly.area for poly, it in parts}
    assert areas[(0, 0)] == pytest.approx(0.25)
    assert areas[(1, 0)] == pytest.approx(0.375)
    assert revenue_partition(solve(0.0, 1, 1)) > 0


def test_unit_square_at_zero():
    m = solve(0.0, 1, 1)
    s = 1 / np.sqrt(3)
    assert m.params.delta1 == pytest.approx(s, abs=1e-12) and m.params.delta_star == pytest.approx(0, abs=1e-12)
    # the exclusion square has area 1/3, every other type buys at 1/sqrt(3)
    assert revenue(m) == pytest.approx(s * 2 / 3, abs=1e-12)
    it = best_response(m.menu, (0.9, 0.2))
    assert (it.q1, it.q2) == (1, 0) and it.price == pytest.approx(s)


def test_posted_price_captions():
    assert sorted(it.price for it in solve(7, 1.5, 1).menu.items) == pytest.approx([7.0, 7.5])
    assert sorted(it.price for it in solve(10, 2, 1).menu.items) == pytest.approx([10.0, 10.75])
