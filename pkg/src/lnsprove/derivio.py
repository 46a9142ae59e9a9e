"""JSON documents for derivations of every calculus, and text and LaTeX
renderings.

Document layout (version 1), fields in this order::

    format      "lnsprove-derivation"
    version     1
    kind        "sequent" | "lns" | "lls" | "bipole-trace"
    logic       logic snapshot (family, name, axioms, ...)
    strategy    nested-sequent strategy, or null
    structural  whether Con/W are rules of the calculus
    theory      clause lines for bipole traces, else null
    goal        the root conclusion
    nodes       pre-order list of {id, rule, conclusion, premises, annotations}
    annotations free-form metadata such as search statistics

Formulas are strings in the concrete syntax; sequents are
``{"left": [...], "right": [...]}``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .formula import And, Atom, Bottom, Box, Formula, Imp, Neg, Or, Top, parse_formula
from .labelled import LLS, Relation, check_lls_derivation
from .lns import BIN, END_ACTIVE, LNS, Joint, check_lns_derivation
from .logic import LogicSpec, spec_from_dict, spec_to_dict
from .sequent import Sequent
from .tree import CheckReport, Node

FORMAT = "lnsprove-derivation"
VERSION = 1
KINDS = ("sequent", "lns", "lls", "bipole-trace")


class SchemaError(ValueError):
    pass


class UnsupportedVersion(SchemaError):
    def __init__(self, version: Any):
        super().__init__(f"derivation document version {version!r} is not supported (this build reads version {VERSION})")
        self.version = version


class CheckFailure(ValueError):
    def __init__(self, report: CheckReport):
        super().__init__(f"derivation does not check at node path {list(report.path)}: {report.message}")
        self.report = report


@dataclass
class DerivationDocument:
    kind: str
    logic: LogicSpec
    derivation: Node
    strategy: str | None = None
    structural: bool | None = None
    theory: tuple[str, ...] | None = None
    annotations: dict = field(default_factory=dict)

    def check(self) -> CheckReport:
        if self.kind == "sequent":
            from .oracle import check_seq_derivation
            return check_seq_derivation(self.derivation, self.logic)
        if self.kind == "lns":
            return check_lns_derivation(self.derivation, self.logic, self.strategy, self.structural)
        if self.kind == "lls":
            return check_lls_derivation(self.derivation, self.logic, self.structural)
        from .bipoles import check_bipole_derivation, parse_clause
        return check_bipole_derivation(self.derivation, [parse_clause(c) for c in self.theory or ()])


def kind_of(conclusion: Any) -> str:
    if isinstance(conclusion, Sequent):
        return "sequent"
    if isinstance(conclusion, LNS):
        return "lns"
    if isinstance(conclusion, LLS):
        return "lls"
    raise TypeError(f"no document kind for {type(conclusion).__name__}")


# structures

def _seq(s: Sequent) -> dict:
    return {"left": [str(f) for f in s.left], "right": [str(f) for f in s.right]}


def _formula(text: Any) -> Formula:
    if not isinstance(text, str):
        raise SchemaError(f"formula must be a string, got {text!r}")
    try:
        return parse_formula(text)
    except ValueError as e:
        raise SchemaError(f"bad formula {text!r}: {e}") from None


def _unseq(data: Any) -> Sequent:
    try:
        return Sequent(tuple(_formula(f) for f in data["left"]), tuple(_formula(f) for f in data["right"]))
    except (KeyError, TypeError) as e:
        raise SchemaError(f"bad sequent {data!r}") from e


def encode_structure(x: Any) -> dict:
    if isinstance(x, Sequent):
        return _seq(x)
    if isinstance(x, LNS):
        return {
            "components": [_seq(c) for c in x.comps],
            "joints": [{"kind": j.kind, "index": j.index} for j in x.joints],
            "side": _seq(x.side) if x.side is not None else None,
        }
    if isinstance(x, LLS):
        r = x.relation
        return {
            "relation": {"kind": r.kind, "src": r.src, "dst": r.dst, "dst2": r.dst2, "index": r.index},
            "left": [[label, str(f)] for label, f in x.left],
            "right": [[label, str(f)] for label, f in x.right],
        }
    raise TypeError(f"cannot serialise {type(x).__name__}")


def decode_structure(kind: str, data: Any) -> Any:
    try:
        if kind == "sequent":
            return _unseq(data)
        if kind == "lns":
            side = data["side"]
            return LNS(tuple(_unseq(c) for c in data["components"]),
                       tuple(Joint(j["kind"], j["index"]) for j in data["joints"]),
                       _unseq(side) if side is not None else None)
        r = data["relation"]
        return LLS(Relation(r["kind"], r["src"], r["dst"], r["dst2"], r["index"]),
                   [(x, _formula(f)) for x, f in data["left"]],
                   [(x, _formula(f)) for x, f in data["right"]])
    except SchemaError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise SchemaError(f"bad {kind} structure: {e}") from e


# documents

def to_document(d: Node, spec: LogicSpec, *, strategy: str | None = None, structural: bool | None = None,
                theory: Any = None, annotations: dict | None = None) -> DerivationDocument:
    kind = kind_of(d.conclusion)
    lines = None
    if theory is not None:
        kind = "bipole-trace"
        lines = tuple(str(c) for c in theory)
    if structural is None and kind in ("lns", "lls"):
        from .lns import lns_rules_for
        structural = lns_rules_for(spec).structural
    if kind == "lns" and strategy is None:
        strategy = END_ACTIVE
    return DerivationDocument(kind, spec, d, strategy if kind == "lns" else None, structural, lines,
                              dict(annotations or {}))


def document_to_json(doc: DerivationDocument) -> str:
    nodes: list[dict] = []

    def visit(n: Node) -> int:
        me = len(nodes)
        entry: dict = {"id": me, "rule": n.rule, "conclusion": encode_structure(n.conclusion),
                       "premises": [], "annotations": {}}
        nodes.append(entry)
        entry["premises"] = [visit(p) for p in n.premises]
        return me

    visit(doc.derivation)
    out = {
        "format": FORMAT,
        "version": VERSION,
        "kind": doc.kind,
        "logic": spec_to_dict(doc.logic),
        "strategy": doc.strategy,
        "structural": doc.structural,
        "theory": list(doc.theory) if doc.theory is not None else None,
        "goal": encode_structure(doc.derivation.conclusion),
        "nodes": nodes,
        "annotations": doc.annotations,
    }
    return json.dumps(out, indent=2, ensure_ascii=False) + "\n"


def to_json(d: Node, spec: LogicSpec, **kwargs: Any) -> str:
    """Serialise ``d``; see ``to_document`` for the keyword arguments."""
    return document_to_json(to_document(d, spec, **kwargs))


def from_json(data: str | bytes, check: bool = True) -> DerivationDocument:
    """Parse a document and, unless ``check`` is false, re-check it;
    raises SchemaError, UnsupportedVersion or CheckFailure."""
    try:
        raw = json.loads(data)
    except json.JSONDecodeError as e:
        raise SchemaError(f"not JSON: {e}") from None
    if not isinstance(raw, dict) or raw.get("format") != FORMAT:
        raise SchemaError("not a derivation document")
    if raw.get("version") != VERSION:
        raise UnsupportedVersion(raw.get("version"))
    kind = raw.get("kind")
    if kind not in KINDS:
        raise SchemaError(f"unknown kind {kind!r}")
    try:
        logic = spec_from_dict(raw["logic"])
        entries = raw["nodes"]
        if not entries:
            raise SchemaError("a derivation needs at least one node")
        struct_kind = "lls" if kind == "bipole-trace" else kind
        built: dict[int, Node] = {}
        for entry in reversed(entries):
            prems = tuple(built[p] for p in entry["premises"])
            built[entry["id"]] = Node(entry["rule"], decode_structure(struct_kind, entry["conclusion"]), prems)
        root = built[entries[0]["id"]]
        if decode_structure(struct_kind, raw["goal"]) != root.conclusion:
            raise SchemaError("goal differs from the root conclusion")
        theory = raw.get("theory")
        doc = DerivationDocument(kind, logic, root, raw.get("strategy"), raw.get("structural"),
                                 tuple(theory) if theory is not None else None, raw.get("annotations") or {})
    except SchemaError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise SchemaError(f"malformed document: {e}") from e
    if check:
        report = doc.check()
        if not report:
            raise CheckFailure(report)
    return doc


# rendering

def render(d: Node, format: str = "text", standalone: bool = True) -> str:
    if format == "text":
        return render_text(d)
    if format == "latex":
        return render_latex(d, standalone)
    raise ValueError(f"unknown render format {format!r}")


def render_text(d: Node) -> str:
    """One line per node, premises indented below their conclusion."""
    lines: list[str] = []

    def visit(n: Node, depth: int) -> None:
        lines.append(f"{'  ' * depth}{n.conclusion}   [{n.rule}]")
        for p in n.premises:
            visit(p, depth + 1)

    visit(d, 0)
    return "\n".join(lines) + "\n"


_TEX_RULE = {"ConL": "Con_L", "ConR": "Con_R", "WL": "W_L", "WR": "W_R"}


def tex_formula(f: Formula) -> str:
    match f:
        case Atom(name=name):
            return name if len(name) == 1 else rf"\mathit{{{name}}}"
        case Bottom():
            return r"\bot"
        case Top():
            return r"\top"
        case Neg(body=b):
            return r"\neg " + _tex_operand(b)
        case Box(index=i, body=b):
            return (r"\Box " if i == 0 else rf"\Box_{{{i}}} ") + _tex_operand(b)
        case Imp(left=l, right=r):
            return rf"{_tex_operand(l)} \to {_tex_operand(r)}"
        case And(left=l, right=r):
            return rf"{_tex_operand(l)} \land {_tex_operand(r)}"
        case Or(left=l, right=r):
            return rf"{_tex_operand(l)} \lor {_tex_operand(r)}"
    raise TypeError(f"not a formula: {f!r}")


def _tex_operand(f: Formula) -> str:
    s = tex_formula(f)
    return f"({s})" if isinstance(f, (And, Or, Imp)) else s


def _tex_multiset(items: Any) -> str:
    return ", ".join(tex_formula(f) for f in items)


def tex_structure(x: Any) -> str:
    if isinstance(x, Sequent):
        return rf"{_tex_multiset(x.left)} \Rightarrow {_tex_multiset(x.right)}"
    if isinstance(x, LNS):
        parts = [tex_structure(x.comps[0])]
        for k, j in enumerate(x.joints, 1):
            mark = r"\mathbin{/\!\!/}" + ({"plain": "", "block": "^{b}", "m": "^{m}", "r": "^{r}", "e": "^{e}"}[j.kind])
            if j.index:
                mark += f"_{{{j.index}}}"
            if j.kind == BIN:
                parts.append(rf"{mark} ({tex_structure(x.comps[k])};\ {tex_structure(x.side)})")
            else:
                parts.append(f"{mark} {tex_structure(x.comps[k])}")
        return " ".join(parts)
    if isinstance(x, LLS):
        def lab(label: str) -> str:
            return f"{label[0]}_{{{label[1:]}}}"

        r = x.relation
        rel = {"R": "R", "Rm": "R_m", "Re": "R_e"}[r.kind] + (f"^{{{r.index}}}" if r.index else "")
        target = f"({lab(r.dst)},{lab(r.dst2)})" if r.dst2 else lab(r.dst)
        left = ", ".join(f"{lab(l)}{{:}}{tex_formula(f)}" for l, f in x.left)
        right = ", ".join(f"{lab(l)}{{:}}{tex_formula(f)}" for l, f in x.right)
        return rf"{lab(r.src)} {rel} {target}, {left} \Rightarrow {right}".replace(", \\Rightarrow", r" \Rightarrow")
    return str(x)


def render_latex(d: Node, standalone: bool = True) -> str:
    """bussproofs-style proof tree; ``standalone`` wraps it in a document."""
    out: list[str] = []
    infer = {0: None, 1: "UnaryInfC", 2: "BinaryInfC", 3: "TrinaryInfC", 4: "QuaternaryInfC", 5: "QuinaryInfC"}

    def rule_name(rule: str) -> str:
        rule = _TEX_RULE.get(rule, rule)
        return r"\textsf{" + rule.replace("_", r"\_").replace("^", r"\^{}") + "}"

    def visit(n: Node) -> None:
        for p in n.premises:
            visit(p)
        if not n.premises:
            out.append(r"\AxiomC{}")
            cmd = "UnaryInfC"
        else:
            cmd = infer.get(len(n.premises))
            if cmd is None:
                raise ValueError("proof trees with more than five premises are not supported")
        out.append(rf"\RightLabel{{\scriptsize {rule_name(n.rule)}}}")
        out.append(rf"\{cmd}{{${tex_structure(n.conclusion)}$}}")

    visit(d)
    body = "\\begin{prooftree}\n" + "\n".join(out) + "\n\\end{prooftree}\n"
    if not standalone:
        return body
    return ("\\documentclass{article}\n\\usepackage{amssymb}\n\\usepackage{bussproofs}\n"
            "\\begin{document}\n" + body + "\\end{document}\n")
