import json
import subprocess
import sys

import pytest

from pdwtile.cli import main
from pdwtile.maps import to_planar_code
from pdwtile.quadgen import enumerate_quadrangulations


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gen(capsys):
    code, out, _ = run(capsys, "gen", "--faces", "12")
    assert code == 0
    assert "F=12 Q2: 12 maps" in out and "Δ=2: 7, Δ=3: 5" in out


def test_gen_q3_and_verify(capsys, tmp_path):
    f = tmp_path / "q.pc"
    code, out, _ = run(capsys, "gen", "--faces", "12", "--class", "Q3", "--out", str(f))
    assert code == 0
    code, out, _ = run(capsys, "gen", "--verify", str(f), "--class", "Q3")
    rep = json.loads(out)
    assert code == 0 and rep["duplicates"] == 0
    maps = enumerate_quadrangulations(10)
    f.write_bytes(to_planar_code(maps + maps[:1]))
    code, out, _ = run(capsys, "gen", "--verify", str(f))
    assert code == 2 and json.loads(out)["duplicates"] == 1


@pytest.mark.parametrize("argv", [
    ["gen", "--faces", "7"],
    ["gen"],
    ["classify"],
    ["classify", "--pdw", "4"],
    ["classify", "--pdw", "8", "--workers", "0"],
    ["realize", "--named", "Z_3"],
    ["realize", "--named", "P_8", "--angles", "1,2"],
    ["realize", "--named", "P_8", "--fix", "a=b"],
    ["render"],
    ["nonsense"],
])
def test_usage_errors(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 1


def test_classify_and_replay(capsys, tmp_path):
    out_file = tmp_path / "c.jsonl"
    code, out, _ = run(capsys, "classify", "--pdw", "8", "--convex", "--out", str(out_file))
    assert code == 0 and "survivor P_8: isohedral (1 tile orbit)" in out
    lines = [json.loads(x) for x in out_file.read_text().splitlines()]
    assert lines[0]["schema"] == "pdwtile.config/1"
    assert lines[-1]["schema"] == "pdwtile.summary/1" and lines[-1]["survivors"] == ["P_8"]
    code, out, _ = run(capsys, "classify", "--replay", str(out_file))
    assert code == 0 and "0 mismatches" in out
    # corrupt one record
    rec = lines[1]
    rec["stage"] = "survivor" if rec["stage"] != "survivor" else "linear"
    out_file.write_text("\n".join(json.dumps(x) for x in lines) + "\n")
    code, out, _ = run(capsys, "classify", "--replay", str(out_file))
    assert code == 2


def test_replay_rejects_garbage(capsys, tmp_path):
    f = tmp_path / "bad.jsonl"
    f.write_text("{not json\n")
    assert run(capsys, "classify", "--replay", str(f))[0] == 1


def test_classify_concave_reports_A(capsys):
    code, out, _ = run(capsys, "classify", "--pdw", "12")
    assert code == 0
    assert "survivor A: non-isohedral (3 tile orbits)" in out


def test_all_maps(capsys, tmp_path):
    f = tmp_path / "all.jsonl"
    code, out, _ = run(capsys, "classify", "--all-maps", "--faces", "10", "--convex", "--out", str(f))
    assert code == 0 and "maps excluded" in out
    code, out, _ = run(capsys, "classify", "--replay", str(f))
    assert code == 0 and "0 mismatches" in out


def test_realize(capsys, tmp_path):
    prefix = tmp_path / "p12"
    code, out, _ = run(capsys, "realize", "--named", "P_12", "--out", str(prefix))
    rep = json.loads(out)
    assert code == 0 and rep["ok"] and rep["closure_residual"] < 1e-9
    assert rep["chart_isohedral"]["isohedral"] and rep["geometric_isohedral"]["isohedral"]
    assert (tmp_path / "p12.svg").read_text().startswith("<svg")
    code, out, _ = run(capsys, "render", "--tiling", str(tmp_path / "p12.json"))
    assert code == 0 and out.startswith("<svg")


def test_realize_Q_reports_rejection(capsys):
    code, out, _ = run(capsys, "realize", "--named", "Q_8")
    rep = json.loads(out)
    assert code == 0 and rep["schema"] == "pdwtile.rejection/1" and rep["rejected_all"]


def test_realize_bad_angles(capsys):
    code, out, _ = run(capsys, "realize", "--named", "P_8", "--angles", "0.5,0.5,0.5,0.6")
    rep = json.loads(out)
    assert code == 1 and rep["schema"] == "pdwtile.realize-failure/1" and rep["residual"] > 0


def test_render_named(capsys):
    code, out, _ = run(capsys, "render", "--named", "P_12")
    assert code == 0 and out.count('class="edge b"') == 6
    code2, out2, _ = run(capsys, "render", "--named", "P_12")
    assert out == out2


def test_render_chart_file(capsys, tmp_path):
    from pdwtile.chart import build_A, chart_to_json

    f = tmp_path / "a.json"
    f.write_text(json.dumps(chart_to_json(build_A())))
    code, out, _ = run(capsys, "render", "--chart", str(f))
    assert code == 0 and out.count('class="edge b"') == 6


def test_console_script():
    res = subprocess.run([sys.executable, "-m", "pdwtile.cli", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip()
