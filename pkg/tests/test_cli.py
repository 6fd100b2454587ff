import json
import subprocess
import sys

import pytest

from dulac import corpus
from dulac.cli import EXIT_DISPROVED, EXIT_INPUT, EXIT_NOT_FOUND, EXIT_OK, main
from dulac.expr import is_identically_zero
from dulac.inputfile import parse_input

SIS_ONES = """[system]
x1' = "lam - mu*x1 - alpha*x2"
x2' = "beta*(x1 - x2)*x2 - (alpha + mu + delta)*x2"

[params]
lam = 1
mu = 1
alpha = 1
beta = 1
delta = 1

[region]
kind = "positive-quadrant-box"
x1 = [1/10, 10]
x2 = [1/10, 10]
"""


@pytest.fixture
def sis_file(tmp_path):
    p = tmp_path / "sis.toml"
    p.write_text(SIS_ONES)
    return str(p)


def export(tmp_path, name):
    p = tmp_path / f"{name}.toml"
    assert main(["corpus", "export", name, "-o", str(p)]) == EXIT_OK
    return str(p)


def test_search_found(sis_file, tmp_path, capsys):
    js = tmp_path / "out.json"
    assert main(["search", sis_file, "--max-depth", "16", "--json", str(js)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "h = 1/x2" in out and "c = -x2 - 1" in out
    block = json.loads(js.read_text())
    assert set(block) == {
        "claim", "status", "counterexample", "boxes_total", "undecided_volume_fraction",
        "max_depth", "h", "c", "k", "region", "params",
    }
    assert block["status"] == "Proved" and block["claim"] == "negative"


def test_search_not_found_and_transcript_exit(tmp_path, capsys):
    f = export(tmp_path, "vanderpol")
    args = ["search", f, "--kappa-grid", "±1"]
    assert main(args) == EXIT_NOT_FOUND
    assert "result: not found" in capsys.readouterr().out
    assert main(args + ["--transcript"]) == EXIT_DISPROVED
    assert "transcript:" in capsys.readouterr().out


def test_search_user_c(sis_file, capsys):
    assert main(["search", sis_file, "--c", "-(1 + x2)"]) == EXIT_OK
    assert "h = 1/x2" in capsys.readouterr().out


def test_verify_exit_codes(sis_file, capsys):
    assert main(["verify", sis_file, "--h", "1/x2"]) == EXIT_OK
    assert main(["verify", sis_file, "--h", "1"]) == EXIT_DISPROVED
    out = capsys.readouterr().out
    assert "Disproved" in out and "counterexample" in out
    assert main(["verify", sis_file, "--h", "1/x2", "--c", "-1"]) == EXIT_DISPROVED


def test_verify_pole_is_input_error(tmp_path, capsys):
    p = tmp_path / "pole.toml"
    p.write_text(SIS_ONES.replace('kind = "positive-quadrant-box"\n', "").replace("x2 = [1/10, 10]", "x2 = [-1, 1]"))
    assert main(["verify", str(p), "--h", "1/x2"]) == EXIT_INPUT
    assert "pole" in capsys.readouterr().err


def test_verify_vanderpol_counterexample(tmp_path, capsys):
    f = export(tmp_path, "vanderpol")
    js = tmp_path / "v.json"
    assert main(["verify", f, "--h", "1", "--json", str(js)]) == EXIT_DISPROVED
    block = json.loads(js.read_text())
    assert block["status"] == "Disproved"
    assert block["counterexample"] is not None


@pytest.mark.parametrize(
    "text,line",
    [
        (SIS_ONES.replace('x1\' = "lam', 'x1\' = "lam +* '), 2),
        (SIS_ONES.replace("delta = 1", "delta = [2, 1]"), 10),
        (SIS_ONES.replace("lam = 1\n", ""), 2),
        (SIS_ONES.replace("x1 = [1/10, 10]", "x1 = [1/10 10]"), 14),
    ],
)
def test_malformed_input_reports_line(tmp_path, capsys, text, line):
    p = tmp_path / "bad.toml"
    p.write_text(text)
    assert main(["search", str(p)]) == EXIT_INPUT
    err = capsys.readouterr().err
    assert f"bad.toml:{line}:" in err, err


def test_usage_errors_exit_3(sis_file, capsys):
    assert main(["verify", sis_file]) == EXIT_INPUT
    assert main(["search", "/nonexistent/file.toml"]) == EXIT_INPUT
    assert main(["verify", sis_file, "--h", "1/(x1"]) == EXIT_INPUT
    assert main(["verify", sis_file, "--h", "q*x1"]) == EXIT_INPUT
    assert main(["corpus", "export", "nope"]) == EXIT_INPUT
    capsys.readouterr()


def test_sample_outputs(sis_file, tmp_path, capsys):
    assert main(["sample", sis_file, "--grid", "2"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "x1,x2,value"
    # div F = -1 + x1 - 2*x2 - 3 at the four corners, x1-major
    assert lines[1:] == ["0.1,0.1,-4.1", "0.1,10.0,-23.9", "10.0,0.1,5.8", "10.0,10.0,-14.0"]
    out = tmp_path / "k.csv"
    assert main(["sample", sis_file, "--expr", "k", "--h", "1/x2", "--grid", "5", "-o", str(out)]) == EXIT_OK
    rows = out.read_text().splitlines()[1:]
    assert len(rows) == 25 and all(float(r.split(",")[2]) < 0 for r in rows)
    assert main(["sample", sis_file, "--grid", "1"]) == EXIT_OK
    assert capsys.readouterr().out.splitlines()[1] == "5.05,5.05,-9.05"


def test_sample_marks_poles_nan(tmp_path, capsys):
    p = tmp_path / "pole.toml"
    p.write_text(SIS_ONES.replace('kind = "positive-quadrant-box"\n', "").replace("x2 = [1/10, 10]", "x2 = [-1, 1]"))
    assert main(["sample", str(p), "--expr", "h", "--h", "1/x2", "--grid", "3"]) == EXIT_OK
    assert capsys.readouterr().out.splitlines()[2] == "0.1,0.0,nan"


def test_report_echo_reparses(tmp_path, capsys):
    f = export(tmp_path, "lv-harvest")
    main(["search", f])
    out = capsys.readouterr().out
    lines = out.splitlines()
    i = lines.index("system:")
    body = "[system]\n" + "\n".join(s.strip() for s in lines[i + 1:i + 3]) + "\n"
    params = []
    for s in lines[lines.index("params:") + 1:]:
        if not s.startswith("  "):
            break
        params.append(s.strip())
    body += "[params]\n" + "\n".join(params) + "\n[region]\nx1 = [1/10, 10]\nx2 = [1/10, 10]\n"
    inp = parse_input(body, "echo")
    e = corpus.load("lv-harvest")
    assert is_identically_zero(inp.field.f1 - e.field.f1)
    assert is_identically_zero(inp.field.f2 - e.field.f2)


def test_reports_are_deterministic(tmp_path, capsys):
    f = export(tmp_path, "graves")
    outs = []
    for workers in ("1", "1", "2"):
        main(["search", f, "--seed", "7", "--workers", workers, "--transcript"])
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1] == outs[2]


def test_corpus_list(capsys):
    assert main(["corpus", "list"]) == EXIT_OK
    out = capsys.readouterr().out
    assert len(out.splitlines()) == len(corpus.names())


def test_module_entry_point(sis_file):
    r = subprocess.run(
        [sys.executable, "-m", "dulac", "verify", sis_file, "--h", "1/x2"],
        capture_output=True,
        text=True,
    )
    assert r.returncode == 0, r.stderr
    assert "conclusion:" in r.stdout
