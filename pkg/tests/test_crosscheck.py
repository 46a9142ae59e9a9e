import csv

from lnsprove.budget import SearchBudget
from lnsprove.crosscheck import ACCEPTANCE_LOGICS, PROVERS, crosscheck, provers_for, run_case
from lnsprove.formula import parse_formula
from lnsprove.logic import preset
from lnsprove.randomgen import random_formulas


def test_seeded_corpora_are_reproducible():
    assert random_formulas(4, 30, 7) == random_formulas(4, 30, 7)
    assert random_formulas(4, 30, 7) != random_formulas(5, 30, 7)
    assert all(len(f.atoms()) <= 2 for f in random_formulas(4, 30, 7))


def test_bipoles_join_only_when_specifiable():
    assert set(provers_for(preset("K"))) == set(PROVERS)
    assert "bipole" not in provers_for(preset("M.T"))
    assert set(ACCEPTANCE_LOGICS) <= {"K", "KD", "KT", "S4", "KT+S4", "E", "EC", "EN", "ECN", "M", "MC", "MN",
                                      "MCN", "M.P", "M.D4", "M45", "K45"}


def test_single_case():
    case = run_case(preset("MC"), 0, parse_formula("[]p & []q -> [](p & q)"), SearchBudget(depth=12))
    assert case.agree and all(case.proved.values())
    assert set(case.depth.values()) == {12}


def test_small_run_and_reports(tmp_path):
    report = crosscheck(["S4", "MN", "M.T"], seed=2, count=15, size=6)
    assert len(report.cases) == 45 and not report.disagreements
    assert [c.index for c in report.cases[:15]] == list(range(15))
    totals = report.node_totals()
    assert set(totals) == {"S4", "MN", "MT"}
    assert "bipole" not in totals["MT"]
    path = tmp_path / "r.csv"
    report.write_csv(str(path))
    rows = list(csv.DictReader(path.open()))
    assert len(rows) == 45 and rows[0]["agree"] == "1"
    assert rows[-1]["bipole_proved"] == ""
    png = tmp_path / "r.png"
    report.plot(str(png))
    assert png.stat().st_size > 1000


def test_parallel_run_matches_serial():
    serial = crosscheck(["K", "EC"], seed=3, count=10, size=6)
    parallel = crosscheck(["K", "EC"], seed=3, count=10, size=6, jobs=2)
    assert [(c.logic, c.index, c.proved) for c in serial.cases] == \
        [(c.logic, c.index, c.proved) for c in parallel.cases]
