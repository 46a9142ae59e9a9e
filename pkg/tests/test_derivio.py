import json
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lnsprove.bipoles import bipole_prove, emit_bipoles, parse_clause
from lnsprove.budget import SearchBudget
from lnsprove.derivio import (
    FORMAT, VERSION, CheckFailure, SchemaError, UnsupportedVersion, from_json, render, tex_formula, to_json,
)
from lnsprove.formula import parse_formula
from lnsprove.labelled import lls_prove
from lnsprove.lns import BLOCK_MODE, MODES
from lnsprove.logic import preset
from lnsprove.oracle import seq_prove
from lnsprove.search import lns_prove
from lnsprove.sequent import goal
from strategies import formulas

GOLDEN = Path(__file__).parent / "golden"
NORMALITY = parse_formula("[](p -> q) -> []p -> []q")


def block_normality():
    return lns_prove(goal(NORMALITY), preset("K"), BLOCK_MODE).derivation


def test_block_document_of_normality():
    text = to_json(block_normality(), preset("K"), strategy=BLOCK_MODE)
    data = json.loads(text)
    assert list(data) == ["format", "version", "kind", "logic", "strategy", "structural", "theory", "goal",
                          "nodes", "annotations"]
    assert data["format"] == FORMAT and data["version"] == VERSION
    assert data["kind"] == "lns" and data["strategy"] == "block"
    assert [n["rule"] for n in data["nodes"]] == ["impR", "impR", "box_R", "box_L", "box_L", "close", "impL",
                                                  "init", "init"]
    assert [n["id"] for n in data["nodes"]] == list(range(9))
    assert data["nodes"][6]["premises"] == [7, 8]
    assert data["goal"] == data["nodes"][0]["conclusion"]


def _documents(name, f):
    spec = preset(name)
    budget = SearchBudget(depth=30)
    out = []
    r = seq_prove(goal(f), spec, budget)
    if r.proved:
        out.append(to_json(r.derivation, spec))
        for mode in MODES:
            out.append(to_json(lns_prove(goal(f), spec, mode, budget).derivation, spec, strategy=mode))
        out.append(to_json(lls_prove(goal(f), spec, budget).derivation, spec))
        theory = emit_bipoles(spec)
        out.append(to_json(bipole_prove(goal(f), theory, budget, spec=spec).derivation, spec, theory=theory))
    return out


@settings(max_examples=25)
@given(formulas(max_leaves=5), st.sampled_from(["K", "S4", "EC", "M.D4", "K45"]))
def test_documents_round_trip(f, name):
    for text in _documents(name, f):
        doc = from_json(text)
        theory = None if doc.theory is None else [parse_clause(c) for c in doc.theory]
        again = to_json(doc.derivation, doc.logic, strategy=doc.strategy, structural=doc.structural, theory=theory)
        assert again == text


@pytest.mark.parametrize("name, text", [("KT+S4", "[2]p -> [1][2]p"), ("MC", "[]p & []q -> [](p & q)"),
                                        ("KD45", "<>p -> []<>p")])
def test_every_kind_round_trips(name, text):
    docs = _documents(name, parse_formula(text, preset(name).indices))
    assert len(docs) == 6
    kinds = [from_json(t).kind for t in docs]
    assert kinds == ["sequent", "lns", "lns", "lns", "lls", "bipole-trace"]


def test_versions():
    data = json.loads(to_json(block_normality(), preset("K"), strategy=BLOCK_MODE))
    for v in (0, 2, None):
        data["version"] = v
        with pytest.raises(UnsupportedVersion):
            from_json(json.dumps(data))


@pytest.mark.parametrize("mutate", [
    lambda d: d.update(format="other"),
    lambda d: d.update(kind="tableau"),
    lambda d: d.update(nodes=[]),
    lambda d: d["nodes"][0].update(premises=[42]),
    lambda d: d.update(goal={"components": [{"left": [], "right": ["p"]}], "joints": [], "side": None}),
    lambda d: d["logic"].update(family="exotic"),
    lambda d: d["nodes"][3]["conclusion"]["components"][0]["left"].append("p ->"),
])
def test_schema_errors(mutate):
    data = json.loads(to_json(block_normality(), preset("K"), strategy=BLOCK_MODE))
    mutate(data)
    with pytest.raises(SchemaError):
        from_json(json.dumps(data))


def test_not_json():
    with pytest.raises(SchemaError):
        from_json("{")


def test_tampering_is_caught():
    data = json.loads(to_json(block_normality(), preset("K"), strategy=BLOCK_MODE))
    data["nodes"][3]["rule"] = "box_R"
    with pytest.raises(CheckFailure) as e:
        from_json(json.dumps(data))
    assert e.value.report.path == (0, 0, 0)
    assert from_json(json.dumps(data), check=False).derivation.rules()[3] == "box_R"


def test_wrong_logic_is_caught():
    data = json.loads(to_json(block_normality(), preset("K"), strategy=BLOCK_MODE))
    data["logic"] = {"family": "classical-cube", "name": "E", "axioms": []}
    with pytest.raises(CheckFailure):
        from_json(json.dumps(data))


@pytest.mark.parametrize("fmt, suffix", [("text", "txt"), ("latex", "tex")])
def test_rendering_matches_golden_files(fmt, suffix):
    assert render(block_normality(), fmt) == (GOLDEN / f"k_normality.{suffix}").read_text()


def test_latex_fragment_and_formulas():
    body = render(block_normality(), "latex", standalone=False)
    assert body.startswith("\\begin{prooftree}") and "documentclass" not in body
    assert body.count("\\AxiomC") == 2 and body.count("\\BinaryInfC") == 1
    assert tex_formula(parse_formula("~[2]p | q & top")) == "\\neg \\Box_{2} p \\lor (q \\land \\top)"
    assert tex_formula(parse_formula("(p -> q) -> []bot")) == "(p \\to q) \\to \\Box \\bot"
    with pytest.raises(ValueError):
        render(block_normality(), "html")
