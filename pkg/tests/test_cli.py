import csv
import json

import pytest
from click.testing import CliRunner

from lnsprove.cli import main
from lnsprove.derivio import from_json

NORMALITY = "[](p -> q) -> []p -> []q"


@pytest.fixture
def run():
    runner = CliRunner()

    def invoke(*args, env=None):
        return runner.invoke(main, list(args), env=env)

    return invoke


@pytest.mark.parametrize("calculus", ["lns", "seq", "lls", "bipole"])
def test_prove_writes_a_checkable_document(run, calculus):
    r = run("prove", "-l", "K", "-f", NORMALITY, "--calculus", calculus)
    assert r.exit_code == 0, r.output
    doc = from_json(r.stdout)
    assert doc.derivation.size() >= 5
    assert doc.annotations["depth_bound"] == 20


def test_block_is_the_default_strategy(run):
    data = json.loads(run("prove", "-l", "K", "-f", NORMALITY).stdout)
    assert data["strategy"] == "block" and len(data["nodes"]) == 9
    assert data["annotations"]["search"]["nodes"] == 9


def test_exhausted_search_exits_1_with_stats(run):
    r = run("prove", "-l", "K", "-f", "[]p -> p", "--depth", "12")
    assert r.exit_code == 1
    stats = json.loads(r.stdout)
    assert stats["result"] == "exhausted" and stats["depth"] == 12 and stats["nodes"] > 0


def test_budget_comes_from_the_environment(run):
    r = run("prove", "-l", "K", "-f", NORMALITY, env={"LNSPROVE_BUDGET": "depth=3"})
    assert r.exit_code == 1 and json.loads(r.stdout)["depth"] == 3
    assert run("prove", "-l", "K", "-f", NORMALITY, "--depth", "9",
               env={"LNSPROVE_BUDGET": "depth=3"}).exit_code == 0
    assert run("prove", "-l", "K", "-f", NORMALITY, env={"LNSPROVE_BUDGET": "colour=3"}).exit_code == 2


@pytest.mark.parametrize("args", [
    ["prove", "-l", "MD5", "-f", "p"],
    ["prove", "-l", "S5", "-f", "p"],
    ["prove", "-l", "K", "-f", "p ->"],
    ["prove", "-l", "KT+S4", "-f", "[3]p"],
    ["prove", "-l", "K"],
    ["prove", "-l", "K", "-f", "p", "--strategy", "greedy"],
    ["prove", "-l", "M.T", "-f", "[]p -> p", "--calculus", "bipole"],
    ["emit", "-l", "M5C"],
])
def test_usage_and_specification_errors_exit_2(run, args):
    assert run(*args).exit_code == 2


def test_unsupported_five_combination_is_named(run):
    r = run("prove", "-l", "MD5", "-f", "p")
    assert "UnsupportedFiveCombination" in r.output


def test_goal_file_and_output(run, tmp_path):
    goal = tmp_path / "goal.txt"
    goal.write_text("[]p, [](p -> q) |- []q\n")
    out = tmp_path / "d.json"
    r = run("prove", "-l", "K", "--goal-file", str(goal), "-o", str(out))
    assert r.exit_code == 0
    assert "written to" in r.stderr
    assert from_json(out.read_text()).derivation.conclusion.comps[0].right[0].body.name == "q"
    assert run("prove", "-l", "K", "--goal-file", str(goal), "-f", "p").exit_code == 2


@pytest.mark.parametrize("fmt, marker", [("text", "[box_R]"), ("latex", "\\begin{prooftree}")])
def test_rendered_output(run, fmt, marker):
    r = run("prove", "-l", "K", "-f", NORMALITY, "--format", fmt)
    assert r.exit_code == 0 and marker in r.stdout


def test_check_accepts_and_rejects(run, tmp_path):
    path = tmp_path / "d.json"
    path.write_text(run("prove", "-l", "K", "-f", NORMALITY).stdout)
    ok = run("check", "-d", str(path))
    assert ok.exit_code == 0 and "9 nodes" in ok.stdout
    assert run("check", "-d", str(path), "-l", "E").exit_code == 1
    data = json.loads(path.read_text())
    data["nodes"][4]["rule"] = "init"
    path.write_text(json.dumps(data))
    bad = run("check", "-d", str(path))
    assert bad.exit_code == 1 and "check failed" in bad.output
    data["version"] = 0
    path.write_text(json.dumps(data))
    assert run("check", "-d", str(path)).exit_code == 2


def test_emit_warns_about_monotone_t(run):
    r = run("emit", "-l", "M.T")
    assert r.exit_code == 0
    assert "NonSpecifiableRule(T)" in r.stderr
    assert "box_R^m:" in r.stdout and "\nT:" not in r.stdout


def test_emit_k(run):
    r = run("emit", "-l", "K")
    assert r.exit_code == 0 and not r.stderr
    assert "box_R: exists A,x,z." in r.stdout


def test_translate_lists_the_goal_and_rules(run):
    r = run("translate", "-l", "EC", "-f", "[]p -> []p")
    assert r.exit_code == 0
    assert r.stdout.startswith("goal: x0 R x1 | |- x1: []p -> []p")
    assert "box_R^e" in r.stdout


def test_crosscheck_command(run, tmp_path):
    table, plot = tmp_path / "cases.csv", tmp_path / "nodes.png"
    r = run("crosscheck", "-l", "K", "-l", "EC", "--count", "8", "--size", "5", "--csv", str(table),
            "--plot", str(plot))
    assert r.exit_code == 0, r.output
    assert "16 cases, 0 disagreements" in r.stdout
    rows = list(csv.DictReader(table.open()))
    assert len(rows) == 16 and {row["logic"] for row in rows} == {"K", "EC"}
    assert plot.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
