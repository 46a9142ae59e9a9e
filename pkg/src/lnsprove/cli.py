"""Command-line frontend.

Exit codes: 0 proved / ok, 1 exhausted / check failed, 2 usage or
logic-specification errors.
"""

from __future__ import annotations

import json
import sys

import click

from . import bipoles, derivio
from .budget import SearchBudget
from .crosscheck import ACCEPTANCE_LOGICS, crosscheck
from .formula import FormulaSyntaxError, UndeclaredIndexError
from .labelled import lls_prove, lls_rules_for, tl_translate
from .lns import LNS, MODES, MalformedLNS
from .logic import LogicSpec, LogicSpecError, resolve_logic
from .oracle import seq_prove
from .search import lns_prove
from .sequent import Sequent, parse_sequent


class Failure(click.ClickException):
    """Exit 1 with a message."""

    exit_code = 1


class SpecError(click.ClickException):
    exit_code = 2


def _logic(source: str) -> LogicSpec:
    try:
        return resolve_logic(source)
    except LogicSpecError as e:
        raise SpecError(f"{type(e).__name__}: {e}") from None


def _goal(spec: LogicSpec, formula: str | None, goal_file: str | None) -> Sequent:
    if (formula is None) == (goal_file is None):
        raise click.UsageError("give exactly one of --formula and --goal-file")
    text = formula if formula is not None else open(goal_file, encoding="utf-8").read().strip()
    if not text.strip():
        raise click.UsageError("the goal is empty")
    try:
        return parse_sequent(text, spec.indices)
    except (FormulaSyntaxError, UndeclaredIndexError) as e:
        raise SpecError(f"{type(e).__name__}: {e}") from None


def _budget(depth: int | None, contraction_cap: int | None, node_cap: int | None) -> SearchBudget:
    try:
        base = SearchBudget.from_env()
        return SearchBudget(depth if depth is not None else base.depth,
                            contraction_cap if contraction_cap is not None else base.contraction_cap,
                            node_cap if node_cap is not None else base.node_cap)
    except ValueError as e:
        raise SpecError(str(e)) from None


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


_goal_options = [
    click.option("--logic", "-l", required=True, help="Preset name (K, EC, M.P, KT+S4, ...) or a spec file."),
    click.option("--formula", "-f", help="Goal formula, or a sequent 'A, B |- C'."),
    click.option("--goal-file", type=click.Path(exists=True, dir_okay=False), help="File holding the goal."),
]


def goal_options(fn):
    for opt in reversed(_goal_options):
        fn = opt(fn)
    return fn


@click.group()
@click.version_option(package_name="artifact")
def main() -> None:
    """Proof search and proof objects for linear nested sequent calculi."""


@main.command()
@goal_options
@click.option("--calculus", type=click.Choice(["lns", "seq", "lls", "bipole"]), default="lns", show_default=True)
@click.option("--strategy", "-s", type=click.Choice(MODES), default="block", show_default=True,
              help="Rule discipline for the nested calculus.")
@click.option("--depth", type=int, help="Depth bound (default from LNSPROVE_BUDGET, else 20).")
@click.option("--contraction-cap", type=int)
@click.option("--node-cap", type=int)
@click.option("--format", "fmt", type=click.Choice(["json", "text", "latex"]), default="json", show_default=True)
@click.option("--output", "-o", type=click.Path(dir_okay=False), help="Write the derivation here.")
def prove(logic, formula, goal_file, calculus, strategy, depth, contraction_cap, node_cap, fmt, output):
    """Search for a derivation of the goal."""
    spec = _logic(logic)
    g = _goal(spec, formula, goal_file)
    budget = _budget(depth, contraction_cap, node_cap)
    theory = None
    if calculus == "lns":
        try:
            result = lns_prove(g, spec, strategy, budget)
        except MalformedLNS as e:
            raise SpecError(str(e)) from None
    elif calculus == "seq":
        result = seq_prove(g, spec, budget)
    elif calculus == "lls":
        result = lls_prove(g, spec, budget)
    else:
        try:
            theory = bipoles.emit_bipoles(spec)
        except bipoles.NonSpecifiableRule as e:
            raise SpecError(f"NonSpecifiableRule: {e}") from None
        result = bipoles.bipole_prove(g, theory, budget, spec=spec)
    stats = result.stats.as_dict()
    if not result.proved:
        click.echo(json.dumps({"result": "exhausted", "goal": str(g), "depth": budget.depth, **stats}))
        sys.exit(1)
    d = result.derivation
    if fmt == "json":
        text = derivio.to_json(d, spec, strategy=strategy if calculus == "lns" else None, theory=theory,
                               annotations={"search": stats, "depth_bound": budget.depth})
    else:
        text = derivio.render(d, fmt)
    _emit(text, output)
    if output:
        click.echo(f"proved: {d.size()} nodes, {stats['nodes']} expanded; written to {output}", err=True)


@main.command()
@goal_options
@click.option("--to", "target", type=click.Choice(["lls"]), default="lls", show_default=True)
def translate(logic, formula, goal_file, target):
    """Print the labelled translation of the goal and the labelled rules."""
    spec = _logic(logic)
    g = _goal(spec, formula, goal_file)
    reg = lls_rules_for(spec)
    click.echo(f"goal: {tl_translate(LNS.single(g))}")
    click.echo(f"rules of the labelled calculus for {spec.name}:")
    for name in reg.names:
        click.echo(f"  {name}: {reg.schema(name)}")


@main.command()
@click.option("--logic", "-l", required=True)
@click.option("--to", "target", type=click.Choice(["bipoles"]), default="bipoles", show_default=True)
@click.option("--output", "-o", type=click.Path(dir_okay=False))
def emit(logic, target, output):
    """Print the bipole clauses of the labelled calculus; rules that cannot
    be specified are reported on stderr and skipped."""
    spec = _logic(logic)
    clauses, problems = bipoles.emit_report(spec)
    for p in problems:
        click.echo(f"warning: NonSpecifiableRule({p.rule}): {p}", err=True)
    _emit(bipoles.format_theory(clauses), output)


@main.command()
@click.option("--derivation", "-d", "path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--logic", "-l", help="Check under this logic instead of the recorded one.")
def check(path, logic):
    """Re-check a derivation document."""
    with open(path, "rb") as fh:
        data = fh.read()
    try:
        doc = derivio.from_json(data, check=False)
    except derivio.SchemaError as e:
        raise SpecError(f"{type(e).__name__}: {e}") from None
    if logic:
        doc.logic = _logic(logic)
    try:
        report = doc.check()
    except (ValueError, KeyError) as e:
        raise Failure(f"check failed: {e}") from None
    if not report:
        raise Failure(f"check failed at node {list(report.path)}: {report.message}")
    click.echo(f"ok: {doc.kind} derivation with {doc.derivation.size()} nodes checks under {doc.logic.name}")


@main.command(name="crosscheck")
@click.option("--logic", "-l", "logics", multiple=True, help="Repeatable; defaults to the acceptance set.")
@click.option("--seed", type=int, default=1, show_default=True)
@click.option("--count", type=click.IntRange(min=0), default=200, show_default=True)
@click.option("--size", type=click.IntRange(min=1), default=7, show_default=True)
@click.option("--depth", type=int)
@click.option("--jobs", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False), help="Per-case report.")
@click.option("--plot", "plot_path", type=click.Path(dir_okay=False), help="PNG of nodes expanded per prover.")
def crosscheck_cmd(logics, seed, count, size, depth, jobs, csv_path, plot_path):
    """Run every prover on seeded random formulas and report disagreements."""
    specs = [_logic(l) for l in (logics or ACCEPTANCE_LOGICS)]
    report = crosscheck(specs, seed, count, size, _budget(depth, None, None), jobs)
    if csv_path:
        report.write_csv(csv_path)
    if plot_path and report.cases:
        report.plot(plot_path)
    by_logic: dict[str, list] = {}
    for c in report.cases:
        by_logic.setdefault(c.logic, []).append(c)
    for name, cases in by_logic.items():
        bad = sum(not c.agree for c in cases)
        click.echo(f"{name:8} cases={len(cases):4} theorems={sum(any(c.proved.values()) for c in cases):4} "
                   f"disagreements={bad}")
    for c in report.disagreements:
        click.echo(f"DISAGREE {c.logic} #{c.index} {c.formula}: {c.proved}")
    click.echo(f"{len(report.cases)} cases, {len(report.disagreements)} disagreements, {report.seconds:.1f}s")
    if report.disagreements:
        sys.exit(1)


if __name__ == "__main__":
    main()
