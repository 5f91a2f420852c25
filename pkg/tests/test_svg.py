import xml.etree.ElementTree as ET

import pytest

from capped_nn.svg import line_chart


def test_one_polyline_per_series_and_valid_xml():
    svg = line_chart({"a": ([256, 512, 20000], [0.9, 0.8, 0.7]), "b & c": ([256, 20000], [0.1, 0.2])},
                     title="t <1>")
    root = ET.fromstring(svg)
    lines = root.findall("{http://www.w3.org/2000/svg}polyline")
    assert len(lines) == 2
    assert lines[0].get("points").count(",") == 3


def test_deterministic():
    s = {"x": ([1, 10, 100], [0.5, 0.25, 0.125])}
    assert line_chart(s) == line_chart(s)


def test_empty_rejected():
    with pytest.raises(ValueError):
        line_chart({})
