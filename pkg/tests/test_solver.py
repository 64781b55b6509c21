import math

import pytest

from menuforge import (DomainError, UnsupportedRegime, classify_regime, compute_alpha1, compute_alpha2,
                       compute_beta, solve)
from menuforge.solver import (K_CONST, SOLVERS, T_CONST, b_curve, c_curve, residuals, solve_structure_b,
                              solve_structure_c, threshold_e, threshold_ep, thresholds)

from conftest import DELTA_EG, REGIME_POINTS


def test_example_1_values():
    p = solve(1.26, 1, 1).params
    assert p.delta1 == pytest.approx(20 / 63, abs=1e-12)
    assert p.delta2 == pytest.approx(20 / 63, abs=1e-12)
    assert p.a1 == pytest.approx(0.6615, abs=1e-9)
    assert p.a2 == pytest.approx(p.a1, abs=1e-12)


def test_example_2_values():
    m = solve(1.5, 1, 1)
    assert m.label == "D"
    assert m.params.delta1 == pytest.approx(DELTA_EG, abs=1e-12)
    assert m.params.delta2 == pytest.approx(DELTA_EG, abs=1e-12)
    assert m.params.a == pytest.approx(0.5, abs=1e-12)


def test_example_3_values():
    m = solve(0, 1.2, 1)
    assert m.label == "A"
    assert m.params.delta1 == pytest.approx(0.678837, abs=1e-6)
    assert m.params.delta2 == pytest.approx(0.589243, abs=1e-6)


def test_constants():
    assert T_CONST == pytest.approx(1.733379, abs=1e-6)
    assert 32 * K_CONST ** 3 - 54 * K_CONST ** 2 + 19 == pytest.approx(0, abs=1e-12)
    assert compute_beta(1.5, 1) == pytest.approx(T_CONST, abs=1e-12)


def test_high_thresholds_meet_at_ratio_one_and_a_half():
    assert threshold_e(1.5, 1) == pytest.approx(243 / 38, abs=1e-12)
    assert threshold_ep(1.5, 1) == pytest.approx(243 / 38, abs=1e-12)
    assert threshold_e(1, 1) == math.inf


@pytest.mark.parametrize("r", [1.0, 1.1, 1.25, 1.4, 1.5])
def test_alpha_ordering(r):
    a1, a2 = compute_alpha1(r, 1), compute_alpha2(r, 1)
    assert 1.0 <= a1 <= a2 + 1e-9 <= T_CONST + 1e-8
    assert a2 <= threshold_e(r, 1)


def test_alpha_at_square_and_at_ratio_limit():
    assert compute_alpha1(1, 1) == 1.0
    assert compute_alpha1(1.5, 1) == pytest.approx(T_CONST)
    assert compute_alpha2(1.5, 1) == pytest.approx(T_CONST)


def test_thresholds_scale_with_b2():
    t1, t2 = thresholds(1.3, 1.0), thresholds(2.6, 2.0)
    for k in t1:
        assert t2[k] == pytest.approx(2 * t1[k], rel=1e-7)


def test_classification_labels(regime_point):
    label, pt = regime_point
    assert classify_regime(*pt).label == label


def test_classification_ties_go_low():
    assert classify_regime(1.0, 1.2, 1.0).label == "A"
    th = thresholds(1.2, 1.0)
    assert classify_regime(th["c_high"], 1.2, 1.0).label == "D"


def test_classification_rejects_bad_input():
    with pytest.raises(DomainError):
        classify_regime(-0.1, 1.2, 1)
    with pytest.raises(DomainError):
        classify_regime(1, 0.8, 1)
    with pytest.raises(DomainError):
        compute_alpha1(2.0, 1.0)


def test_residuals_small(regime_point):
    label, (c, b1, b2) = regime_point
    p = SOLVERS[label](c, b1, b2)
    for k, v in residuals(label, c, b1, b2, p).items():
        assert abs(v) < 1e-10, k


@pytest.mark.parametrize("c,b1", [(1.1, 1.2), (1.05, 1.4), (1.2, 1.3)])
def test_quintic_root_matches_b_solver(c, b1):
    p, q = solve_structure_b(c, b1, 1.0), b_curve(c, b1, 1.0)
    assert q.h == pytest.approx(p.h, abs=1e-9)
    assert q.delta_star == pytest.approx(p.delta_star, abs=1e-9)


@pytest.mark.parametrize("c,b1", [(1.3, 1.05), (1.26, 1.0), (1.45, 1.2)])
def test_octic_root_matches_c_solver(c, b1):
    p, q = solve_structure_c(c, b1, 1.0), c_curve(c, b1, 1.0)
    assert q.delta_star == pytest.approx(p.delta_star, abs=1e-9)
    assert q.a1 == pytest.approx(p.a1, abs=1e-9)


def test_solve_swaps_items():
    a, b = solve(0.5, 1.2, 1.0), solve(0.5, 1.0, 1.2)
    assert b.swapped and b.label == a.label
    assert a.menu.items[0].q1 == b.menu.items[0].q2


def test_extension_region():
    m = solve(b1=1.2, b2=1, c1=0.4, c2=0.2)
    assert m.label == "A"
    assert m.params.delta1 > 0 and m.params.delta2 > 0
    with pytest.raises(UnsupportedRegime):
        solve(b1=1.2, b2=1, c1=0.9, c2=0.2)
    with pytest.raises(DomainError):
        solve(b1=1.2, b2=1, c1=0.4)


def test_missing_arguments():
    with pytest.raises(DomainError):
        solve(1.0, None, 1.0)
    with pytest.raises(DomainError):
        solve(None, 1.0, 1.0)
