import json

import numpy as np
import pytest

from gvd import cli
from gvd.errors import ParseError, InvalidInputError, UnsupportedError
from gvd.quadric import compute_diagram

from conftest import dataset

TRIANGLE = {"dimension": 2, "mode": "extremal", "sites": [
    {"type": "point_outside", "coords": [0, 0]},
    {"type": "point_outside", "coords": [2, 0]},
    {"type": "point_outside", "coords": [0, 2]}]}


def write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return p


def test_parse_extremal(tmp_path):
    ds = cli.parse_input(write(tmp_path, "in.json", TRIANGLE))
    assert len(ds.sites) == 3 and [s.id for s in ds.sites] == [1, 2, 3]


def test_parse_affine(tmp_path):
    doc = {"dimension": 2, "mode": "affine", "functions": [
        {"a": 1, "q": [0, 0], "b": [0, 0], "c": 0}, {"a": 1, "q": [1, 0], "b": [0, 0], "c": 0}]}
    fs = cli.parse_input(write(tmp_path, "in.json", doc))
    assert len(fs) == 2 and fs[1].q[0] == 1


@pytest.mark.parametrize("site, exc, text", [
    ({"type": "sphere_power", "center": [0, 0], "radius": -1}, InvalidInputError, "sites\\[0\\]"),
    ({"type": "blob", "coords": [0, 0]}, ParseError, "type"),
    ({"type": "point_outside"}, ParseError, "coords"),
    ({"type": "halfspace", "normal": [1, 0]}, ParseError, "height"),
])
def test_parse_errors(tmp_path, site, exc, text):
    doc = {"dimension": 2, "sites": [site, {"type": "point_outside", "coords": [1, 1]}]}
    with pytest.raises(exc, match=text):
        cli.parse_input(write(tmp_path, "bad.json", doc))


def test_compute_and_exit_codes(tmp_path, capsys):
    src = write(tmp_path, "in.json", TRIANGLE)
    out, svg = tmp_path / "out.json", tmp_path / "out.svg"
    assert cli.main(["compute", "--input", str(src), "--output", str(out), "--svg", str(svg)]) == 0
    doc = json.loads(out.read_text())
    assert len(doc["vertices"]) == 1 and len(doc["edges"]) == 3
    text = svg.read_text()
    assert text.count('class="vertex"') == 1 and text.count("<polyline") == 3

    bad = dict(TRIANGLE, sites=[{"type": "point_outside", "coords": [0, 0]},
                                {"type": "point_outside", "coords": [1, 0]},
                                {"type": "point_inside", "coords": [0, 0]},
                                {"type": "point_inside", "coords": [1, 0]}])
    assert cli.main(["compute", "--input", str(write(tmp_path, "b.json", bad)),
                     "--output", str(out)]) == 2
    assert "empty sphere family" in capsys.readouterr().err
    neg = dict(TRIANGLE, sites=[{"type": "sphere_power", "center": [0, 0], "radius": -1}])
    assert cli.main(["compute", "--input", str(write(tmp_path, "n.json", neg)),
                     "--output", str(out)]) == 1
    (tmp_path / "junk.json").write_text("{")
    assert cli.main(["compute", "--input", str(tmp_path / "junk.json"), "--output", str(out)]) == 1


def test_byte_identical(tmp_path):
    src = write(tmp_path, "in.json", TRIANGLE)
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert cli.main(["compute", "--input", str(src), "--output", str(p), "--seed", "3"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_round_trip(tmp_path, triangle):
    D = compute_diagram(triangle)
    path = tmp_path / "d.json"
    cli.emit(D, path)
    assert cli.load_diagram(path) == cli.diagram_to_dict(D)


def test_seventeen_digits():
    assert cli._num(0.1) == "0.10000000000000001"
    assert cli._num(2.0) == "2.0"
    assert float(cli._num(np.pi)) == np.pi


def test_affine_order_two(tmp_path):
    doc = {"dimension": 2, "mode": "affine", "order_k": 2, "functions": [
        {"a": 1, "q": q, "b": [0, 0], "c": 0} for q in ([0, 0], [2, 0], [0, 2])]}
    src, out = write(tmp_path, "a.json", doc), tmp_path / "o.json"
    assert cli.main(["compute", "--input", str(src), "--output", str(out)]) == 0
    assert json.loads(out.read_text())["cells"] == [[1, 2], [1, 3], [2, 3]]


def test_verify(tmp_path, capsys):
    src = write(tmp_path, "in.json", TRIANGLE)
    assert cli.main(["verify", "--input", str(src), "--grid", "40"]) == 0
    assert capsys.readouterr().out.startswith("mismatches: 0 ")


def test_svg_glyphs(tmp_path):
    ds = dataset([(0, 0)], halfspaces=[((0, 1), -2)], power=[((-2, 2), 0.5)],
                 exterior=[((3, 1), 1)])
    text = cli.render_svg(compute_diagram(ds))
    for glyph in ('class="site point"', 'class="site sphere"', 'class="site plane"'):
        assert glyph in text


def test_svg_needs_plane():
    ds = dataset([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)])
    with pytest.raises(UnsupportedError):
        cli.render_svg(compute_diagram(ds))
