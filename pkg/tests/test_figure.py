import xml.etree.ElementTree as ET

import pytest

from umbrella import InvalidInput, make_special, render_figure, solve_singular_points
from umbrella.figure import fit_viewport

NS = "{http://www.w3.org/2000/svg}"


def _parse(svg: str):
    return ET.fromstring(svg)


def _by_class(root, name):
    return [e for e in root.iter() if name in e.get("class", "").split()]


def test_worked_figure(worked, tmp_path):
    points = [r.location for r in solve_singular_points(worked)]
    out = tmp_path / "f.svg"
    svg = render_figure(worked, points, out=out)
    assert out.read_text() == svg
    root = _parse(svg)
    curves = _by_class(root, "level-curve")
    assert len(curves) == 3
    assert len(_by_class(root, "ellipse")) == 1 and root.find(f".//{NS}ellipse") is not None
    assert len(_by_class(root, "circle")) == 2
    assert len(_by_class(root, "center")) == 3
    markers = _by_class(root, "tangency-marker")
    assert len(markers) == 1
    vp = fit_viewport(worked, points)
    u, v = vp.to_image((2.0, -1.0))
    assert float(markers[0].get("cx")) == pytest.approx(u, abs=1e-3)
    assert float(markers[0].get("cy")) == pytest.approx(v, abs=1e-3)
    assert float(markers[0].get("data-x1")) == pytest.approx(2.0)


def test_probe_figure(worked4):
    root = _parse(render_figure(worked4, [], probe=(2, -1)))
    assert len(_by_class(root, "level-curve")) == 4
    assert _by_class(root, "tangency-marker") == []
    assert len(_by_class(root, "probe")) == 1


def test_hyperbolic_levels_render_as_paths():
    m = make_special("lorentzian", [(0, 0), (1, 0), (0, 1)])
    root = _parse(render_figure(m, [], probe=(0.7, -1.3)))
    curves = _by_class(root, "level-curve")
    assert len(curves) == 3
    assert all(c.tag == f"{NS}path" and c.get("d").startswith("M ") for c in curves)


def test_viewport_contains_curves(worked):
    vp = fit_viewport(worked, [(2.0, -1.0)])
    # the ellipse through (2,-1) reaches x1 = sqrt(6)
    assert vp.xmin < -6 ** 0.5 and vp.xmax > 6 ** 0.5
    u, v = vp.to_image((vp.xmin, vp.ymax))
    assert (u, v) == (0.0, 0.0)


def test_nothing_to_draw(worked4):
    with pytest.raises(InvalidInput):
        render_figure(worked4, [])
