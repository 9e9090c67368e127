import json
import subprocess
import sys

import pytest

from hambif import cli

ZERO_MODEL = """
[model]
name = "zero"
n = 1
k = 2
[blocks]
A = [["0"]]
B = [["0"]]
"""

EMPTY_MODEL = """
[model]
name = "empty"
n = 1
k = 2
[blocks]
A = [["3"]]
B = [["1"]]
"""


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_detect_exdeg(capsys):
    code, rep = run(capsys, "detect", "--model", "exdeg")
    assert code == 0
    assert rep["candidates"] == [3, 5] and rep["f0_identically_zero"] is True
    assert set(rep["polynomials"]) == {"3", "5"}
    assert rep["timings"] == {}


def test_detect_surfdeg(capsys):
    code, rep = run(capsys, "detect", "--model", "surfdeg")
    assert code == 0 and rep["candidates"] == [4, 7]


def test_detect_zero_model(tmp_path, capsys):
    path = tmp_path / "zero.toml"
    path.write_text(ZERO_MODEL)
    code, rep = run(capsys, "detect", "--model", str(path))
    assert code == 0 and rep["candidates"] == [0]


@pytest.mark.parametrize("model,g,j,value", [("exdeg", "g1", "5", 1), ("exstat", "g4", "2", -2)])
def test_index(capsys, model, g, j, value):
    code, rep = run(capsys, "index", "--model", model, "--g", g, "--j", j)
    assert code == 0 and rep["value"] == value
    assert [r["value"] for r in rep["index"]["radii"]] == [value] * 3


def test_index_self_test(capsys):
    code, rep = run(capsys, "index", "--self-test")
    assert code == 0 and rep["value"] == 1


def test_classify_empty(tmp_path, capsys):
    path = tmp_path / "empty.toml"
    path.write_text(EMPTY_MODEL)
    code, rep = run(capsys, "classify", "--model", str(path))
    assert code == 0
    assert rep["candidates"] == [] and rep["frequencies"] == []
    assert rep["symmetry_breaking"] is False


def test_classify_is_byte_stable_and_writes_figures(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    svg, png = tmp_path / "f.svg", tmp_path / "f.png"
    assert cli.main(["classify", "--model", "exdeg", "--out", str(a), "--svg", str(svg), "--png", str(png)]) == 0
    assert cli.main(["classify", "--model", "exdeg", "--out", str(b), "--jobs", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()
    rep = json.loads(a.read_text())
    assert rep["total_branches"] == 6 and rep["symmetry_breaking"] is True
    assert svg.read_text().count('class="component"') == 6
    assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_trace_obj(tmp_path, capsys):
    obj = tmp_path / "s.obj"
    code, rep = run(capsys, "trace", "--model", "surfdeg", "--grid", "24", "--obj", str(obj))
    assert code == 0
    assert [t["j"] for t in rep["traced"]] == [4, 7]
    assert all(t["triangles"] > 0 and t["open_edges"] == 0 for t in rep["traced"])
    assert "g freq_4" in obj.read_text()


def test_timings_flag(capsys):
    code, rep = run(capsys, "detect", "--model", "exdeg", "--timings")
    assert code == 0 and "candidates" in rep["timings"]


def test_missing_model_file(capsys):
    assert cli.main(["detect", "--model", "/nonexistent/model.toml"]) == 1
    assert "cannot read" in capsys.readouterr().err


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["detect", "--model", "exdeg", "--disk-radius", "1"])
    assert info.value.code == 2
    with pytest.raises(SystemExit):
        cli.main(["index", "--model", "exdeg", "--g", "g7", "--j", "3"])
    with pytest.raises(SystemExit):
        cli.main(["detect"])


def test_svg_needs_planar_model(tmp_path, capsys):
    with pytest.raises(SystemExit):
        cli.main(["trace", "--model", "surfdeg", "--grid", "8", "--svg", str(tmp_path / "x.svg")])
    assert not (tmp_path / "x.svg").exists()


def test_inconsistent_report_exit_status(monkeypatch, capsys):
    real = cli.classify_disk

    def broken(*args, **kw):
        rep = real(*args, **kw)
        rep.consistent = False
        return rep

    monkeypatch.setattr(cli, "classify_disk", broken)
    code, rep = run(capsys, "branches", "--model", "exdeg")
    assert code == cli.EXIT_INCONSISTENT and rep["consistent"] is False


def test_console_entry_point():
    p = subprocess.run([sys.executable, "-m", "hambif.cli", "detect", "--model", "exdeg"], capture_output=True, text=True)
    assert p.returncode == 0
    assert json.loads(p.stdout)["candidates"] == [3, 5]
