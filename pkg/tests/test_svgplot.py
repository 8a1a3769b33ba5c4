import xml.etree.ElementTree as ET

import pytest

from primordial_qg.svgplot import line_plot


def test_two_series_log_plot_is_valid_xml():
    svg = line_plot([("a", [1, 10, 100], [1e3, 1e2, 1e1]), ("b", [1, 100], [5e2, 5e2])],
                    "T [K]", "t [s]", "title & more", logx=True, logy=True)
    root = ET.fromstring(svg.split("\n", 1)[1])
    assert root.get("version") == "1.1"
    assert len(root.findall("{http://www.w3.org/2000/svg}polyline")) == 2
    assert "title &amp; more" in svg


def test_series_count_and_log_domain():
    with pytest.raises(ValueError):
        line_plot([], "x", "y")
    with pytest.raises(ValueError):
        line_plot([("a", [0, 1], [1, 2])], "x", "y", logx=True)


def test_deterministic():
    args = ([("a", [0, 1, 2], [3, 1, 2])], "x", "y")
    assert line_plot(*args) == line_plot(*args)
