"""Differential testing of every prover on seeded random formulas."""

from __future__ import annotations

import csv
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .bipoles import bipole_prove, emit_report
from .budget import ProofResult, SearchBudget
from .formula import Formula
from .labelled import lls_prove
from .lns import BLOCK_MODE, END_ACTIVE, FREE
from .logic import LogicSpec, preset, resolve_logic
from .oracle import seq_prove
from .randomgen import random_formulas
from .search import lns_prove
from .sequent import goal

PROVERS = ("seq", "lns-free", "lns-end_active", "lns-block", "lls", "bipole")
ESCALATION = (2, 3, 4)


Runner = Callable[[Formula, SearchBudget], ProofResult]


def provers_for(spec: LogicSpec) -> dict[str, Runner]:
    """Every prover that applies to ``spec``; bipoles only when every
    labelled rule is specifiable."""
    out: dict[str, Runner] = {
        "seq": lambda f, b: seq_prove(goal(f), spec, b),
        "lns-free": lambda f, b: lns_prove(goal(f), spec, FREE, b),
        "lns-end_active": lambda f, b: lns_prove(goal(f), spec, END_ACTIVE, b),
        "lns-block": lambda f, b: lns_prove(goal(f), spec, BLOCK_MODE, b),
        "lls": lambda f, b: lls_prove(goal(f), spec, b),
    }
    theory, problems = emit_report(spec)
    if not problems:
        out["bipole"] = lambda f, b: bipole_prove(goal(f), theory, b, spec=spec)
    return out


@dataclass
class CaseResult:
    logic: str
    index: int
    formula: Formula
    proved: dict[str, bool] = field(default_factory=dict)
    nodes: dict[str, int] = field(default_factory=dict)
    depth: dict[str, int] = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def agree(self) -> bool:
        return len(set(self.proved.values())) <= 1


def run_case(spec: LogicSpec, index: int, f: Formula, budget: SearchBudget,
             runners: dict[str, Runner] | None = None) -> CaseResult:
    """Run every prover at ``budget``.  When they disagree, the provers
    that failed are retried at multiples of the depth before the case
    counts as a disagreement: nested and labelled searches feed one boxed
    formula per step, so their derivations can be deeper than sequent
    derivations of the same formula."""
    runners = runners or provers_for(spec)
    out = CaseResult(spec.name, index, f)
    start = time.perf_counter()
    for name, run in runners.items():
        r = run(f, budget)
        out.proved[name], out.nodes[name], out.depth[name] = r.proved, r.stats.nodes, budget.depth
    for factor in ESCALATION:
        if out.agree:
            break
        deeper = budget.scaled(factor)
        for name, run in runners.items():
            if not out.proved[name]:
                r = run(f, deeper)
                out.proved[name] = r.proved
                out.nodes[name] += r.stats.nodes
                out.depth[name] = deeper.depth
    out.seconds = time.perf_counter() - start
    return out


@dataclass
class Report:
    cases: list[CaseResult]
    seconds: float

    @property
    def disagreements(self) -> list[CaseResult]:
        return [c for c in self.cases if not c.agree]

    def write_csv(self, path: str) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["logic", "case", "formula", "agree"]
                       + [f"{p}_proved" for p in PROVERS] + [f"{p}_nodes" for p in PROVERS]
                       + [f"{p}_depth" for p in PROVERS] + ["seconds"])
            for c in self.cases:
                w.writerow([c.logic, c.index, str(c.formula), int(c.agree)]
                           + [("" if p not in c.proved else int(c.proved[p])) for p in PROVERS]
                           + [c.nodes.get(p, "") for p in PROVERS]
                           + [c.depth.get(p, "") for p in PROVERS] + [f"{c.seconds:.4f}"])

    def node_totals(self) -> dict[str, dict[str, int]]:
        """logic -> prover -> nodes expanded over all cases."""
        out: dict[str, dict[str, int]] = {}
        for c in self.cases:
            row = out.setdefault(c.logic, {})
            for p, n in c.nodes.items():
                row[p] = row.get(p, 0) + n
        return out

    def plot(self, path: str) -> None:
        """Grouped bar chart (log scale) of nodes expanded per prover."""
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        totals = self.node_totals()
        logics = list(totals)
        fig, ax = plt.subplots(figsize=(max(6, 0.9 * len(logics) + 2), 4.5))
        width = 0.8 / len(PROVERS)
        for k, p in enumerate(PROVERS):
            xs = [i + (k - (len(PROVERS) - 1) / 2) * width for i in range(len(logics))]
            ys = [totals[l].get(p, 0) for l in logics]
            ax.bar(xs, [max(y, 1) if y else 0 for y in ys], width, label=p)
        ax.set_xticks(range(len(logics)))
        ax.set_xticklabels(logics, rotation=45, ha="right")
        ax.set_yscale("log")
        ax.set_ylabel("nodes expanded")
        ax.set_title(f"search effort over {len(self.cases)} cases")
        ax.legend(fontsize="small", ncol=3)
        fig.tight_layout()
        fig.savefig(path, dpi=120)
        plt.close(fig)


def _job(args: tuple) -> CaseResult:
    logic, index, f, budget = args
    return run_case(resolve_logic(logic), index, f, budget)


def crosscheck(logics: Sequence[LogicSpec | str], seed: int = 1, count: int = 200, size: int = 7,
               budget: SearchBudget | None = None, jobs: int = 1,
               atoms: Sequence[str] = ("p", "q")) -> Report:
    """``count`` formulas of at most ``size`` symbols per logic, drawn
    from ``seed``; cases come back in index order."""
    budget = budget or SearchBudget.from_env()
    start = time.perf_counter()
    specs = [preset(l) if isinstance(l, str) else l for l in logics]
    cases: list[CaseResult] = []
    for spec in specs:
        formulas = random_formulas(seed, count, size, atoms, sorted(spec.indices))
        if jobs > 1 and _rebuildable(spec):
            with ProcessPoolExecutor(jobs) as pool:
                cases += pool.map(_job, [(spec.name, k, f, budget) for k, f in enumerate(formulas)])
        else:
            runners = provers_for(spec)
            cases += [run_case(spec, k, f, budget, runners) for k, f in enumerate(formulas)]
    return Report(cases, time.perf_counter() - start)


def _rebuildable(spec: LogicSpec) -> bool:
    """Worker processes rebuild the logic from its name."""
    try:
        return preset(spec.name) == spec
    except ValueError:
        return False


ACCEPTANCE_LOGICS = ("K", "KD", "KT", "S4", "KT+S4", "E", "EC", "EN", "ECN",
                     "M", "MC", "MN", "MCN", "M.P", "M.D4", "M45", "K45")
