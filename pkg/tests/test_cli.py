import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from semiplanar.cli import RunConfig, main, run
from semiplanar.surface import planar_layout
from semiplanar.tilings import load


@pytest.fixture(scope="module")
def square_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "z2.json"
    assert main(["gen", "--kind", "4^4", "--radius", "12", "--out", str(path)]) == 0
    return path


def read_csv(path):
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# config: ")
    config = json.loads(lines[0][len("# config: "):])
    body = [line.split(",") for line in lines if not line.startswith("#")]
    return config, body[0], body[1:]


def test_gen_hexagonal(tmp_path):
    out = tmp_path / "g.json"
    assert main(["gen", "--kind", "6.3", "--radius", "4", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["config"]["kind"] == "6.3"
    g = load(out)
    assert g.vertex_count == data["vertices"]
    assert 0 <= data["center"] < g.vertex_count


def test_gen_unknown_pattern(tmp_path):
    assert main(["gen", "--kind", "5.5.5", "--radius", "2", "--out", str(tmp_path / "x")]) == 2


def test_curvature_csv(square_file, tmp_path):
    out = tmp_path / "c.csv"
    assert main(["curvature", "--graph", str(square_file), "--out", str(out)]) == 0
    config, header, rows = read_csv(out)
    assert config["command"] == "curvature"
    assert header == ["vertex", "curvature", "total_angle"]
    assert {r[1] for r in rows} == {"0"}


def test_curvature_json_on_cap(tmp_path):
    cap = Path(__file__).parent / "data" / "dodecahedral_cap.json"
    out = tmp_path / "c.json"
    assert main(["curvature", "--graph", str(cap), "--format", "json", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    center = json.loads(cap.read_text())["center"]
    assert data["curvature"][str(center)] == "1/10"
    assert data["nonnegative"]


def test_solve_expression(square_file, tmp_path):
    out = tmp_path / "f.json"
    assert main(["solve", "--graph", str(square_file), "--ball", "%d,5" % json.loads(
        square_file.read_text())["center"], "--boundary", "x*y", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    vals = np.array([np.nan if v is None else v for v in data["values"]])
    g = load(square_file)
    c = json.loads(square_file.read_text())["center"]
    xy = planar_layout(g, c)
    inside = np.isfinite(vals)
    # closed ball B_6: 2R^2 + 2R + 1 vertices
    assert inside.sum() == 2 * 36 + 2 * 6 + 1
    assert np.max(np.abs(vals[inside] - (xy[:, 0] * xy[:, 1])[inside])) < 1e-9


def test_solve_bad_expression(square_file):
    assert main(["solve", "--graph", str(square_file), "--ball", "0,2",
                 "--boundary", "__import__('os')"]) == 2
    assert main(["solve", "--graph", str(square_file), "--ball", "nonsense",
                 "--boundary", "x"]) == 2


def test_extend_roundtrip(square_file, tmp_path):
    c = json.loads(square_file.read_text())["center"]
    f = tmp_path / "f.json"
    fbar = tmp_path / "fbar.json"
    assert main(["solve", "--graph", str(square_file), "--ball", f"{c},4", "--boundary", "x",
                 "--out", str(f)]) == 0
    assert main(["extend", "--graph", str(square_file), "--field", str(f), "--K", "16",
                 "--M", "256", "--out", str(fbar)]) == 0
    data = json.loads(fbar.read_text())
    assert data["K"] == 16 and data["faces"]
    assert set(data["faces"][0]) == {"id", "a0", "a", "b"}
    assert main(["extend", "--graph", str(square_file), "--field", str(f), "--K", "16",
                 "--M", "64"]) == 2


def test_surface_ball_volume(square_file, tmp_path):
    c = json.loads(square_file.read_text())["center"]
    out = tmp_path / "s.csv"
    assert main(["surface", "--graph", str(square_file), "--ball-volume", f"{c},2",
                 "--out", str(out)]) == 0
    _, header, rows = read_csv(out)
    assert header == ["p", "R", "value", "eps_quad"]
    assert float(rows[0][2]) == pytest.approx(4 * np.pi, rel=0.01)
    assert main(["surface", "--graph", str(square_file), "--ball-volume", f"{c},40"]) == 2


def test_verify_rvc_passes(square_file, tmp_path):
    out = tmp_path / "r.csv"
    assert main(["verify", "--graph", str(square_file), "--suite", "rvc", "--out", str(out)]) == 0
    config, header, rows = read_csv(out)
    assert header == ["inequality_id", "graph", "params", "measured", "bound", "pass"]
    assert config["suite"] == "rvc" and config["seed"] == 0
    flagged = [r for r in rows if r[-1]]
    assert flagged and all(r[-1] == "pass" for r in flagged)


def test_dim_reports_three(square_file, tmp_path):
    out = tmp_path / "d.csv"
    assert main(["dim", "--graph", str(square_file), "--d", "1", "--out", str(out)]) == 0
    _, header, rows = read_csv(out)
    assert rows[0][header.index("k")] == "3"
    assert main(["dim", "--graph", str(square_file), "--radii", "4,6"]) == 2


def test_invalid_parameters():
    assert run(RunConfig("verify", kind="4^4", radius=6, eps=0.7)) == 2
    assert run(RunConfig("nope")) == 2
    assert run(RunConfig("curvature")) == 2
    with pytest.raises(SystemExit):
        main(["nope"])


def test_identical_configs_identical_output(square_file, tmp_path):
    # the output path is part of the echoed config, so both runs write the same file
    out = tmp_path / "r.csv"
    runs = []
    for _ in range(2):
        assert main(["verify", "--graph", str(square_file), "--suite", "rvc",
                     "--out", str(out)]) == 0
        runs.append(out.read_bytes())
    assert runs[0] == runs[1]


def test_module_entry_point(tmp_path):
    out = tmp_path / "g.json"
    proc = subprocess.run([sys.executable, "-m", "semiplanar.cli", "gen", "--kind", "4.8.8",
                           "--radius", "2", "--out", str(out)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert json.loads(out.read_text())["config"]["radius"] == 2
