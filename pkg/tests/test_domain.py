import math

import pytest

from menuforge.domain import (DomainError, Menu, MenuItem, Polygon, SupportRect, clip_halfplane, clip_to_rect,
                              region_probability)


def test_rect_validation():
    with pytest.raises(DomainError):
        SupportRect(0, 0, 0, 1)
    with pytest.raises(DomainError):
        SupportRect(-1, 0, 1, 1)
    with pytest.raises(DomainError):
        SupportRect(0, 0, math.inf, 1)


def test_rect_basics():
    r = SupportRect(1, 2, 3, 4)
    assert r.area == 12
    assert not r.symmetric()
    with pytest.raises(DomainError):
        r.c
    s = r.swapped()
    assert (s.c1, s.c2, s.b1, s.b2) == (2, 1, 4, 3)
    assert r.scaled(2).area == 48
    assert r.contains((1, 2)) and not r.contains((0.5, 2))


def test_polygon_orientation_and_area():
    cw = Polygon([(0, 0), (0, 1), (1, 1), (1, 0)])
    assert cw.area == pytest.approx(1.0)
    assert cw.contains((0.5, 0.5))
    assert cw.contains((1.0, 0.5))
    assert not cw.contains((1.5, 0.5))


def test_clip_halfplane_triangle():
    sq = SupportRect(0, 0, 1, 1).polygon()
    tri = clip_halfplane(sq, (1.0, 1.0), 1.0)
    assert tri.area == pytest.approx(0.5, abs=1e-15)
    assert clip_halfplane(sq, (1.0, 0.0), -1.0).is_empty()


def test_clip_to_rect_and_probability():
    rect = SupportRect(0, 0, 2, 1)
    big = Polygon([(-1, -1), (3, -1), (3, 0.5), (-1, 0.5)])
    assert clip_to_rect(big, rect).area == pytest.approx(1.0)
    assert region_probability(big, rect) == pytest.approx(0.5)


def test_menu_item_checks():
    with pytest.raises(DomainError):
        MenuItem(0.7, 0.7, 1.0)
    with pytest.raises(DomainError):
        MenuItem(0.5, 0.5, -1.0)
    it = MenuItem(0.25, 0.75, 1.0)
    assert it.utility((2, 4)) == pytest.approx(2.5)


def test_menu_drops_null_and_rejects_duplicates():
    m = Menu((MenuItem(0, 0, 0), MenuItem(1, 0, 1)))
    assert len(m) == 1 and m.with_null()[0].is_null()
    with pytest.raises(DomainError):
        Menu((MenuItem(1, 0, 1), MenuItem(1, 0, 1)))
    with pytest.raises(DomainError):
        Menu(tuple(MenuItem(1, 0, p) for p in range(5)))
