import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from umbrella import (Box, InvalidInput, detect_degeneracy, levels_through_point, make_special,
                      solve_singular_points, tangency_search)
from umbrella.foliation import WIDE_INFLATION, centers_box, match_point_sets, stretched_axis


def test_levels_worked(worked):
    levels = levels_through_point(worked, (2, -1))
    assert [lv.level for lv in levels] == [6, 2, 8]
    assert [lv.kind for lv in levels] == ["ellipse", "circle", "circle"]


def test_level_at_center_is_point(worked):
    assert levels_through_point(worked, (0, 0))[0].kind == "single_point"


def test_lorentzian_level_is_hyperbolic():
    m = make_special("lorentzian", [(0, 0), (1, 0), (0, 1)])
    kind = levels_through_point(m, (0.7, -1.3))[0].kind
    assert kind in {"hyperbola", "rectangular_hyperbola", "intersecting_lines"}


@settings(max_examples=60)
@given(st.integers(0, 2 ** 32 - 1), st.floats(-10, 10), st.floats(-10, 10))
def test_levels_vanish_at_point(seed, x1, x2):
    m = make_special("ellipse_circle", np.random.default_rng(seed).uniform(-3, 3, size=(4, 2)), 0.5, 1.5)
    for lv in levels_through_point(m, (x1, x2)):
        assert abs(lv.conic.normalized()(x1, x2)) < 1e-12


def test_oracle_worked(worked):
    r = tangency_search(worked, Box(-5, -5, 5, 5), 200)
    assert len(r.points) == 1
    assert np.allclose(r.points[0], (2, -1), atol=1e-7)
    assert r.objective[0] < 1e-7


def test_oracle_default_box_contains_worked_point(worked):
    assert centers_box(worked).contains((2, -1))
    assert len(tangency_search(worked).points) == 1


def test_oracle_extension_is_empty(worked4):
    assert tangency_search(worked4, Box(-5, -5, 5, 5), 200).points == []


def test_oracle_collinear_excludes_first_center(collinear):
    r = tangency_search(collinear, Box(-5, -5, 5, 5), 200)
    assert any(np.allclose(p, (0, 0)) for p in r.excluded)
    assert not any(np.hypot(*p) < 1e-6 for p in r.points)
    assert r.to_dict()["excluded_regions"] == len(r.excluded)


def test_oracle_rejects_small_grid(worked):
    with pytest.raises(InvalidInput):
        tangency_search(worked, Box(-5, -5, 5, 5), 8)


def test_oracle_json(worked):
    d = tangency_search(worked, Box(-5, -5, 5, 5)).to_dict()
    assert set(d) >= {"tangency_points", "excluded_regions", "objective_at_points"}
    assert d["tangency_points"][0] == pytest.approx([2, -1], abs=1e-7)


def test_stretched_axis():
    xs = stretched_axis(-1000.0, 1000.0, 201, 2.0)
    assert xs[0] == pytest.approx(-1000) and xs[-1] == pytest.approx(1000)
    assert np.all(np.diff(xs) > 0)
    mid = np.diff(xs)[100]
    # central spacing matches a uniform grid over [-2, 2]
    assert mid == pytest.approx(4.0 / 200, rel=0.01)


def test_degeneracy_examples(collinear, worked):
    assert detect_degeneracy(collinear).sigma_flags[0]
    clean = detect_degeneracy(worked)
    assert clean.sigma_flags == (False, False, False) and clean.clean
    dup = detect_degeneracy(make_special("ellipse_circle", [(0, 0), (0, 0), (1, 2)], 1, 2))
    assert (0, 1) in dup.coincident_centers
    assert detect_degeneracy(make_special("distance_squared", [(0, 0), (1, 0), (0, 1)])).rank_deficient_A


def test_match_point_sets():
    assert match_point_sets([(0, 0), (1, 1)], [(1, 1 + 1e-7), (0, 0)])
    assert not match_point_sets([(0, 0)], [(0, 0), (1, 1)])
    assert not match_point_sets([(0, 0)], [(0, 1e-3)])
    assert match_point_sets([], [])


@pytest.mark.parametrize("seed", range(5))
def test_oracle_agrees_with_solver(seed):
    m = make_special("ellipse_circle", np.random.default_rng(seed).uniform(-2, 2, size=(3, 2)), 1, 2)
    solver = [r.location for r in solve_singular_points(m)]
    report = tangency_search(m, centers_box(m, WIDE_INFLATION))
    assert match_point_sets(solver, report.points)


def test_uniqueness_under_box_doubling():
    rng = np.random.default_rng(11)
    checked = 0
    while checked < 6:
        P = rng.uniform(-2, 2, size=(3, 2))
        m = make_special("ellipse_circle", P, 1, 2)
        lo, hi = P.min(axis=0), P.max(axis=0)
        diam = float(np.hypot(*(hi - lo)))
        box = Box(lo[0] - diam, lo[1] - diam, hi[0] + diam, hi[1] + diam)
        q = solve_singular_points(m)[0].location
        if not box.contains(q):
            continue
        first = tangency_search(m, box).points
        doubled = tangency_search(m, box.inflated(2.0)).points
        assert len(first) == 1 and match_point_sets(first, doubled)
        checked += 1
