import json
import re
import subprocess
import sys
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from eulerplane import cli, report, svg, zoo
from eulerplane.curve import hermite_chain, push_forward, signed_intersections
from eulerplane.scene import parse_scene


def scene_text(recipe, method="all", **params):
    lines = ["euler-plane-scene 1", "[group]", f"genus = {2 if recipe == 'genus2_smooth' else 1}",
             "[recipe]", f"name = {recipe}"]
    lines += [f"{k} = {v}" for k, v in params.items()]
    lines += ["[method]", f"name = {method}"]
    return "\n".join(lines) + "\n"


def write(tmp_path, text, name="s.scene"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_run_bestvina_lift(tmp_path, capsys):
    path = write(tmp_path, scene_text("bestvina", "lift", n=2))
    out = tmp_path / "r.json"
    assert cli.main(["run", path, "--report", str(out)]) == 0
    assert "lift: 2" in capsys.readouterr().out
    doc = json.loads(out.read_text())
    assert doc["body"]["values"] == {"lift": 2}
    assert doc["body"]["expected"] == 2


def test_run_torus_shear_all_agree(tmp_path):
    doc = report.run(parse_scene(scene_text("torus_shear")))
    assert doc.body["agreement"] is True
    assert set(doc.values.values()) == {0}
    assert set(doc.values) == {"lift", "graphical", "signed_sum", "writhe_difference"}


def test_run_genus2_graphical_reports_wind():
    doc = report.run(parse_scene(scene_text("genus2_smooth", "graphical", n=1)))
    rep = doc.body["reports"][0]
    assert rep["value"] == 1 and rep["diagnostics"]["wind"] == 4


def test_method_override_and_seed(tmp_path):
    s = parse_scene(scene_text("torus_twist_chain", seed=2))
    doc = report.run(s, method="signed-sum", seed=12345)
    assert list(doc.values) == ["signed_sum"]
    assert doc.body["inputs"]["seed"] == 12345


def test_covering_trick_in_report():
    text = scene_text("torus_twist_chain", seed=1) + "n = 2\n"
    doc = report.run(parse_scene(text))
    assert doc.body["covering_trick"]["passed"] is True


def test_report_bodies_are_byte_identical(tmp_path):
    path = write(tmp_path, scene_text("torus_twist_chain", seed=3))
    r1, r2 = tmp_path / "a.json", tmp_path / "b.json"
    assert cli.main(["run", path, "--report", str(r1), "--seed", "7"]) == 0
    assert cli.main(["run", path, "--report", str(r2), "--seed", "7"]) == 0
    d1, d2 = json.loads(r1.read_text()), json.loads(r2.read_text())
    assert report.canonical_json(d1["body"]) == report.canonical_json(d2["body"])
    assert d1["body_sha256"] == d2["body_sha256"]
    assert "total" in d1["timings"]
    assert list(d1["body"]) == sorted(d1["body"])


def test_exit_code_parse_error(tmp_path, capsys):
    path = write(tmp_path, "euler-plane-scene 1\n[group]\ngenus = x\n")
    assert cli.main(["run", path]) == 2
    assert "line 3, column 9" in capsys.readouterr().err


def test_exit_code_missing_file(tmp_path):
    assert cli.main(["run", str(tmp_path / "missing.scene")]) == 2


def test_exit_code_numerical(tmp_path, capsys):
    path = write(tmp_path, scene_text("torus_shear", "signed-sum") + "N = 2\n")
    assert cli.main(["run", path]) == 3
    assert "increase N" in capsys.readouterr().err


def test_exit_code_identity_violation(tmp_path):
    text = """euler-plane-scene 1
[group]
genus = 1
[primitives]
s = translation vector=(1,0)
r = rotation angle=0.5
[generators]
a1 = s
b1 = r
[method]
name = lift
lift = puncture
center = (0,0)
"""
    assert cli.main(["run", write(tmp_path, text)]) == 4


def test_exit_code_not_applicable(tmp_path):
    path = write(tmp_path, scene_text("bestvina", "signed-sum"))
    assert cli.main(["run", path]) == 2


def test_zoo_list(capsys):
    assert cli.main(["zoo", "list"]) == 0
    out = capsys.readouterr().out
    for name in zoo.REGISTRY:
        assert name in out


def test_svg_from_run(tmp_path):
    path = write(tmp_path, scene_text("torus_twist_chain", seed=0))
    out = tmp_path / "f.svg"
    assert cli.main(["run", path, "--svg", str(out)]) == 0
    root = ET.fromstring(out.read_text())
    assert root.tag.endswith("svg")
    assert len(root.findall(".//{http://www.w3.org/2000/svg}polyline")) >= 2
    # deterministic
    out2 = tmp_path / "g.svg"
    assert cli.main(["run", path, "--svg", str(out2)]) == 0
    assert out.read_text() == out2.read_text()


def test_svg_crossing_marks_match_events(tmp_path):
    action = zoo.torus_shear()
    finger = hermite_chain([(0, 0), (0.5, 0.6), (2.03, 0.3), (1.97, -0.2), (1.3, 0.45), (1.0, 0.0)],
                           [(0.3, 0), (0.3, 0), (0, -0.3), (-0.3, 0), (-0.3, 0), (0.3, 0)])
    arcs = [push_forward(zoo.torus_shear()["b1"], action.tau)]
    arcs.append(push_forward(action["b1"], arcs[0]))
    events = []
    fig = svg.Figure()
    fig.add_curve(finger)
    for a in arcs:
        fig.add_curve(a)
        events += signed_intersections(finger, a)[1]
    fig.add_crossings(events)
    text = svg.emit_svg(fig, tmp_path / "c.svg")
    assert len(events) > 0
    assert text.count('class="crossing"') == len(events)
    signs = re.findall(r'data-sign="([+-]\d)"', text)
    assert [int(s) for s in signs] == [e.sign for e in events]


def test_xn_graph_plateau():
    fig = svg.xn_figure(3)
    pts = fig.polylines[0][0]
    assert pts[:, 1].max() == 7 and pts[:, 1].min() == -7
    assert np.all(pts[np.abs(pts[:, 0]) >= 7, 1] == np.sign(pts[np.abs(pts[:, 0]) >= 7, 0]) * 7)
    text = svg.render(fig)
    ET.fromstring(text)
    assert 'class="graph"' in text


def test_empty_svg_is_valid():
    text = svg.render(svg.Figure())
    root = ET.fromstring(text)
    assert root.tag.endswith("svg") and len(list(root)) == 1   # only the marker definitions


def test_supports_drawn_for_bestvina():
    fig = svg.Figure()
    fig.add_curve(np.array([[-3.0, -3.0], [3.0, 3.0]]))
    lo, hi = svg._bounds(fig)
    ann = svg.supports_in_view(zoo.bestvina(1)["a1"], lo, hi)
    radii = sorted(a[2] for a in ann)
    assert any(abs(r - 1.1) < 1e-12 for r in radii) and any(abs(r - 2.2) < 1e-12 for r in radii)


def test_console_script_help():
    out = subprocess.run([sys.executable, "-m", "eulerplane.cli", "zoo", "list"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and "bestvina" in out.stdout
