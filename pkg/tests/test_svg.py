from __future__ import annotations

import json
import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from accelfatigue.errors import EmptyData
from accelfatigue.svg import colormap, emit_svg

NS = {"s": "http://www.w3.org/2000/svg"}


def parse(svg: bytes):
    root = ET.fromstring(svg)
    meta = json.loads(root.find("s:metadata", NS).text)
    return root, meta


def test_single_cell_heatmap():
    svg = emit_svg("heatmap", {"power": [[1.0]], "times_ms": [0], "freqs_hz": [0.0]})
    root, meta = parse(svg)
    assert root.get("version") == "1.1"
    assert meta["cells"] == [1, 1]
    cells = [r for r in root.iter("{%s}rect" % NS["s"]) if r.get("fill") not in ("#ffffff", "none")]
    assert len(cells) == 1
    assert root.findall(".//s:text", NS)


def test_empty_heatmap():
    with pytest.raises(EmptyData):
        emit_svg("heatmap", {"power": np.zeros((0, 3)), "times_ms": [], "freqs_hz": [0, 1, 2]})


def test_colormap_ends():
    assert colormap(0.0) == "#0000ff"
    assert colormap(1.0) == "#ff0000"
    assert colormap(-3) == colormap(0.0)


def test_heatmap_log_scale():
    power = np.array([[1e-6, 1e-3, 1.0]])
    root, _ = parse(emit_svg("heatmap", {"power": power, "times_ms": [0], "freqs_hz": [0, 1, 2]}))
    fills = [r.get("fill") for r in root.iter("{%s}rect" % NS["s"]) if r.get("fill") not in ("#ffffff", "none")]
    # Equal log steps: lowest is blue, highest red, the middle one is the mid colour.
    assert fills[0] == colormap(0.0) and fills[2] == colormap(1.0) and fills[1] == colormap(0.5)


def _cloud_data(seed=0):
    g = np.random.default_rng(seed)
    pts = np.column_stack([np.ones(200), 1.6 + 0.03 * g.standard_normal(200), 4 + 0.25 * g.standard_normal(200)])
    return {"points": pts, "reference": (math.sqrt(8 / 3), 4.0), "centroid": tuple(pts[:, 1:].mean(axis=0))}


def test_cloud_bytes_deterministic():
    assert emit_svg("cloud", _cloud_data()) == emit_svg("cloud", _cloud_data())
    assert emit_svg("cloud", _cloud_data()) != emit_svg("cloud", _cloud_data(1))


def test_rest_marker_position():
    data = _cloud_data()
    root, meta = parse(emit_svg("cloud", data))
    m = meta["panels"][0]
    (x0, x1), (px0, px1) = m["x"]["data"], m["x"]["px"]
    (y0, y1), (py0, py1) = m["y"]["data"], m["y"]["px"]
    sx, sk = data["reference"]
    want_x = px0 + (sx - x0) / (x1 - x0) * (px1 - px0)
    want_y = py0 + (sk - y0) / (y1 - y0) * (py1 - py0)
    marker = root.find(".//s:g[@id='rest-reference']/s:circle", NS)
    assert float(marker.get("cx")) == pytest.approx(want_x, abs=0.01)
    assert float(marker.get("cy")) == pytest.approx(want_y, abs=0.01)


def test_moments_panels_labelled():
    feats = np.random.default_rng(0).random((30, 3))
    svg = emit_svg(
        "moments",
        {
            "features": feats,
            "names": ["std:mag2", "skewness:mag2", "exkurtosis:mag2"],
            "clusters": [i % 3 for i in range(30)],
            "panels": [("std:mag2", "skewness:mag2")],
        },
    )
    root, meta = parse(svg)
    labels = [t.text for t in root.iter("{%s}text" % NS["s"])]
    assert "std of mag2 ((m/s²)²)" in labels
    assert "skewness of mag2 (dimensionless)" in labels
    assert len(root.findall(".//s:circle", NS)) == 30


def test_no_external_resources():
    svg = emit_svg("cloud", _cloud_data()).decode()
    assert "href" not in svg and "<image" not in svg and "<script" not in svg


def test_unknown_kind():
    with pytest.raises(Exception):
        emit_svg("pie", {})
