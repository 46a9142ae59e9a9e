"""Proof search and proof objects for linear nested sequent calculi of
normal, simply dependent and non-normal modal logics."""

from .bipoles import (
    BipoleClause, IllFormedTheory, NonSpecifiableRule, alpha_equivalent, bipole_prove, check_bipole,
    emit_bipoles, emit_report, parse_clause, parse_theory,
)
from .budget import Exhausted, ProofResult, Proved, SearchBudget
from .crosscheck import crosscheck
from .derivio import DerivationDocument, from_json, render, to_json
from .formula import Formula, parse_formula
from .labelled import LLS, Relation, lls_prove, tl_translate
from .lns import LNS, interpret
from .logic import LogicSpec, parse_logic_spec, preset, resolve_logic
from .oracle import seq_prove
from .search import lns_prove
from .sequent import Sequent, goal, parse_sequent
from .translate import extract_sequent_derivation, simulate_sequent_derivation

__all__ = [
    "BipoleClause", "DerivationDocument", "Exhausted", "Formula", "IllFormedTheory", "LLS", "LNS",
    "LogicSpec", "NonSpecifiableRule", "ProofResult", "Proved", "Relation", "SearchBudget", "Sequent",
    "alpha_equivalent", "bipole_prove", "check_bipole", "crosscheck", "emit_bipoles", "emit_report",
    "extract_sequent_derivation", "from_json", "goal", "interpret", "lls_prove", "lns_prove",
    "parse_clause", "parse_formula", "parse_logic_spec", "parse_sequent", "parse_theory", "preset",
    "render", "resolve_logic", "seq_prove", "simulate_sequent_derivation", "tl_translate", "to_json",
]
