import math

import numpy as np
import pytest

from menuforge import SupportRect
from menuforge.dual_lab import (SegmentMeasure, TransportPlan, build_example, check_complementary_slackness,
                                check_convex_dominance, dominance_targets, dual_cost, example_2_constants,
                                marginal_check, mu_bar_edges, strong_duality_report)
from menuforge.domain import DomainError
from menuforge.mechanism import revenue_mu_bar


@pytest.fixture(scope="module", params=[1, 2, 3])
def example(request):
    return build_example(request.param)


def _seg(pieces=(), atoms=(), p1=(1.0, 0.0)):
    return SegmentMeasure("m", (0.0, 0.0), p1, 0.0, 1.0, tuple(pieces), tuple(atoms))


def test_dominance_zero_measure():
    assert check_convex_dominance(_seg()).passed


def test_dominance_atom_right_minus_left():
    # moving mass to larger values dominates; the reverse does not
    assert check_convex_dominance(_seg(atoms=((0.2, -1.0), (0.8, 1.0)))).passed
    assert not check_convex_dominance(_seg(atoms=((0.2, 1.0), (0.8, -1.0)))).passed


def test_dominance_mean_preserving_spread():
    # -2 at the middle, +1 at each end: a spread, which convex functions prefer
    assert check_convex_dominance(_seg(atoms=((0.0, 1.0), (0.5, -2.0), (1.0, 1.0)))).passed
    assert not check_convex_dominance(_seg(atoms=((0.0, -1.0), (0.5, 2.0), (1.0, -1.0)))).passed


def test_dominance_needs_zero_mass():
    assert not check_convex_dominance(_seg(pieces=((0.0, 1.0, 0.0, 1.0),))).passed


def test_dominance_non_monotone_segment_needs_zero_moment():
    m = _seg(atoms=((0.2, -1.0), (0.8, 1.0)), p1=(1.0, -1.0))
    assert not m.monotone
    assert not check_convex_dominance(m).passed


def test_segment_measure_integrals():
    m = _seg(pieces=((0.0, 0.5, 2.0, 0.0), (0.5, 1.0, 0.0, 1.0)))
    assert m.mass() == pytest.approx(0.25 + 0.5)
    assert m.density(0.5) == pytest.approx(1.0)
    assert m.density(1.0) == pytest.approx(1.0)
    assert m.integral(hinge=0.5) == pytest.approx(0.125)
    assert m.scaled(-2).mass() == pytest.approx(-1.5)
    with pytest.raises(DomainError):
        m.plus(_seg(p1=(0.0, 1.0)))


def test_mu_bar_edges_masses():
    rect = SupportRect(1.5, 1.5, 1, 1)
    E = mu_bar_edges(rect)
    assert E["top"].mass() == pytest.approx(2.5)
    assert E["left"].mass() == pytest.approx(-1.5)
    # edges + area + atom = 0
    assert sum(m.mass() for m in E.values()) - 3 + 1 == pytest.approx(0.0)


def test_empty_plan_costs_nothing():
    rect = SupportRect(1, 1, 1, 1)
    from menuforge.domain import Polygon
    plan = TransportPlan(rect, Polygon(()), (), 3.0)
    assert dual_cost(plan) == 0.0


def test_example_2_constants():
    k = example_2_constants()
    assert k["delta_prime"] == pytest.approx(math.sqrt(5 / 3) - 1)
    assert 0 < k["a"] < 0.5
    assert k["delta_prime"] < k["delta2"]


def test_example_1_exclusion_balance():
    ex = build_example(1)
    Z = ex.mechanism.exclusion
    rect = ex.mechanism.rect
    E = mu_bar_edges(rect)
    d2 = ex.constants["delta2"]
    negative = 3 * Z.area / rect.area - E["left"].mass(0, d2) - E["bottom"].mass(0, d2)
    assert negative == pytest.approx(1.0, abs=1e-9)


def test_shuffling_dominates_zero(example):
    for name in dominance_targets(example):
        rep = check_convex_dominance(example.shuffling[name])
        assert rep.passed, (name, rep)


def test_ray_balance(example):
    assert example.plan.balance(200) < 1e-10


def test_duality_gap(example):
    primal = revenue_mu_bar(example.mechanism)
    assert abs(primal - dual_cost(example.plan)) < 1e-10


def test_marginals_on_boxes(example):
    assert marginal_check(example, n_boxes=40) < 1e-10


def test_complementary_slackness(example):
    rep = check_complementary_slackness(example.mechanism, example.plan, n_pairs=2000)
    assert rep.passed, rep


def test_perturbed_plan_fails_slackness():
    ex = build_example(1)
    rep = check_complementary_slackness(ex.mechanism, ex.plan.perturbed(0.02), n_pairs=2000)
    assert not rep.passed


def test_density_csv():
    rows = build_example(2).density_csv(n=5).splitlines()
    assert rows[0] == "measure,s,z1,z2,density"
    assert any(r.startswith("lambda,") for r in rows)


def test_report_passes():
    rep = strong_duality_report(3)
    assert rep["passed"] and rep["gap"] < 1e-4 and rep["regime"] == "A"


def test_unknown_example():
    with pytest.raises(DomainError):
        build_example(4)
