import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from pgv import cli

GOLDEN = Path(__file__).parent / "golden"
GOLDEN_ARGS = {
    "a4": ["--family", "A", "-p", "3", "-n", "4"],
    "a5": ["--family", "A", "-p", "3", "-n", "5"],
    "a6": ["--family", "A", "-p", "3", "-n", "6"],
    "b": ["--family", "B", "-p", "3"],
    "c": ["--family", "C", "-p", "3"],
    "heisenberg": ["--family", "heisenberg", "-p", "3"],
}


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def run_json(*argv):
    code, out, _ = run(*argv, "--json")
    return code, json.loads(out)


def test_verify_family_a():
    code, d = run_json("verify", "--family", "A", "-p", "3", "-n", "4")
    assert code == 0 and d["exit_code"] == 0 and d["passed"]
    assert d["solver"]["verdict"] == "AllCentral"
    assert d["aut"] == {"order": [3, 24], "abelian": True, "elementary_abelian": False}
    assert all(c["check"] for c in d["checks"])


def test_verify_heisenberg_counterexample():
    code, d = run_json("verify", "--family", "heisenberg", "-p", "3")
    assert code == 2
    assert d["solver"]["verdict"] == "CounterexampleFound"
    assert any(not c["passed"] and "central" in c["name"] for c in d["checks"])


def test_analyze_family_b():
    code, d = run_json("analyze", "--family", "B", "-p", "3")
    assert code == 0
    s = d["structure"]
    assert s["center_vs_frattini"] == "B<A" and s["derived_vs_frattini"] == "equal"
    assert s["derived"] == "(3,3,3,3)"


@pytest.mark.parametrize("name", sorted(GOLDEN_ARGS))
def test_golden_reports(name):
    code, d = run_json("verify", *GOLDEN_ARGS[name])
    golden = json.loads((GOLDEN / f"{name}_p3.verify.json").read_text())
    assert d == golden
    assert code == golden["exit_code"]


@pytest.mark.parametrize("name", sorted(GOLDEN_ARGS))
def test_golden_presentations(name, tmp_path):
    code, out, _ = run("build", *GOLDEN_ARGS[name])
    assert code == 0 and out == (GOLDEN / f"{name}_p3.pcp").read_text()
    target = tmp_path / "g.pcp"
    assert run("build", *GOLDEN_ARGS[name], "-o", str(target))[0] == 0
    assert target.read_text() == out


def test_reruns_are_byte_identical():
    args = ("verify", "--family", "B", "-p", "3", "--json", "--seed", "5")
    first, second = run(*args), run(*args)
    assert first[0] == second[0] == 0 and first[1] == second[1]
    assert "time" in first[2]


def test_environment_fallbacks(monkeypatch):
    monkeypatch.setenv("PGV_BUDGET_NODES", "100")
    code, d = run_json("verify", "--family", "A", "-p", "3", "-n", "4")
    assert code == 3 and d["solver"]["verdict"] == "Inconclusive"
    assert run("verify", "--family", "A", "-p", "3", "-n", "4", "--budget-nodes", "1000000")[0] == 0
    monkeypatch.delenv("PGV_BUDGET_NODES")
    monkeypatch.setenv("PGV_SEED", "17")
    _, d = run_json("verify", "--family", "C", "-p", "3", "--trials", "3")
    assert d["sampled_central_automorphisms"]["seed"] == 17
    _, d = run_json("verify", "--family", "C", "-p", "3", "--trials", "3", "--seed", "2")
    assert d["sampled_central_automorphisms"]["seed"] == 2
    monkeypatch.setenv("PGV_BUDGET_SECONDS", "not-a-number")
    assert run("verify", "--family", "C", "-p", "3")[0] == 1


def test_file_input(tmp_path):
    path = tmp_path / "h.pcp"
    path.write_text((GOLDEN / "heisenberg_p3.pcp").read_text())
    code, d = run_json("oracle", "--file", str(path))
    assert code == 0
    assert d["oracle"] == {"aut_count": 432, "central_aut_count": 9, "solver_verdict": "CounterexampleFound"}


def test_malformed_file_reports_line(tmp_path):
    path = tmp_path / "bad.pcp"
    path.write_text("p 3\nd 2\norders 1 x\n")
    code, out, err = run("analyze", "--file", str(path))
    assert code == 1 and out == ""
    assert "line 3" in err
    assert run("analyze", "--file", str(tmp_path / "missing.pcp"))[0] == 1


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["verify"],
        ["verify", "--family", "D", "-p", "3"],
        ["verify", "--family", "A", "-p", "3"],
        ["verify", "--family", "A", "-p", "3", "-n", "3"],
        ["verify", "--family", "B", "-p", "4"],
        ["verify", "--family", "B", "-p", "3", "--workers", "0"],
        ["build", "--file", "x.pcp"],
        ["oracle", "--family", "B", "-p", "3"],
        ["fixtures", "--family", "heisenberg", "-p", "3"],
        ["frobnicate"],
    ],
)
def test_usage_errors(argv):
    code, out, err = run(*argv)
    assert code == 1 and err.startswith("pgv: error")


def test_markdown_and_json_carry_the_same_data():
    args = ("verify", "--family", "C", "-p", "3")
    _, md, _ = run(*args)
    _, d = run_json(*args)
    lines = set(md.splitlines())
    for section, body in d.items():
        if isinstance(body, dict) and section != "source":
            assert f"## {section}" in lines
            for k, v in body.items():
                assert f"- {k}: {cli._md_value(v)}" in lines
    for c in d["checks"]:
        assert f"- [{'PASS' if c['passed'] else 'FAIL'}] {c['name']}  ({c['check']})" in lines
    assert f"exit_code: {d['exit_code']}" in lines
    assert "- order: 3^16" in lines


def test_fixtures_command():
    code, d = run_json("fixtures", "--family", "B", "-p", "3")
    assert code == 0
    f = d["fixtures"]
    assert f["residue_solutions"] == 262 and f["automorphism_residues"] == 1
    assert f["violations_on_endomorphism_residues"] == {"c4": 162}
    assert f["violations_on_automorphism_residues"] == {}


def test_p2_verify():
    code, d = run_json("verify", "--family", "C", "-p", "2")
    assert code == 0 and d["aut"]["order"] == [2, 16]
    assert d["criteria"]["jafari_two_conditions"] == [2]


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "pgv", "build", "--family", "heisenberg", "-p", "3"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert proc.stdout == (GOLDEN / "heisenberg_p3.pcp").read_text()
