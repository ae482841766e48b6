"""
Command-line entry point for c2lab.

Subcommands: ``gen`` writes a generated graph, ``c2`` computes one invariant,
``scan`` runs a family over a parameter range, ``recur`` solves a recursive
family and ``schema`` prints the JSON schema of the run report.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
import uuid
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from datetime import UTC, datetime
from pathlib import Path
from typing import Any

import structlog
from rich.console import Console
from rich.table import Table

from c2lab import __version__
from c2lab.config import Settings, get_settings
from c2lab.engine import ALL_METHODS, cross_check, run_method
from c2lab.exceptions import C2LabError, FamilyParameterError
from c2lab.families import FamilyId
from c2lab.graph.core import LabeledGraph
from c2lab.logging_setup import setup_structured_logging
from c2lab.models import (
    C2Result,
    GraphSummary,
    RecurrenceSolution,
    RowReport,
    RunInputs,
    RunReport,
    ScanReport,
)
from c2lab.recurrence import RecursiveFamilySpec, builtin_families, solve_family

logger = structlog.get_logger(__name__)

SCAN_FAMILIES = ("nonskew", "skew", "circulant", "capped-x-ladder", "symmetric-x-ladder")


@dataclass
class Outcome:
    """What a subcommand hands back to ``main``."""

    result: Any = None
    inputs: RunInputs = field(default_factory=RunInputs)
    methods: list[str] = field(default_factory=list)
    cross_check: dict[str, int] = field(default_factory=dict)
    exit_code: int = 0
    table: Table | None = None
    text: str | None = None


# -----------------------------------------------------------------------------
# Argument parsing
# -----------------------------------------------------------------------------


def _range(text: str) -> range:
    try:
        if ":" in text:
            low, high = (int(part) for part in text.split(":", 1))
        else:
            low = high = int(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"{text!r} is not 'a:b' or an integer") from e
    if high < low:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return range(low, high + 1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="c2lab", description=__doc__.splitlines()[1])
    parser.add_argument("--version", action="version", version=f"c2lab {__version__}")
    parser.add_argument("--threads", type=int, help="Worker threads for data-parallel kernels")
    parser.add_argument("--budget", type=int, help="Maximum point evaluations (C2LAB_BUDGET)")
    parser.add_argument("--json", action="store_true", help="Emit JSON log lines")
    parser.add_argument(
        "--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="Log level"
    )
    parser.add_argument("--output", type=Path, help="Write the report (or graph) to this file")
    parser.add_argument(
        "--format",
        choices=["table", "json"],
        default="table",
        help="What to print on stdout",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="Generate a graph file")
    gen.add_argument("family", choices=["toroidal", "circulant", "x-ladder"])
    gen.add_argument("params", nargs="+", help="toroidal: k l m; circulant: n gaps...; x-ladder: capped|symmetric size")
    gen.add_argument(
        "--decomplete", nargs="?", type=int, const=0, default=None, metavar="V",
        help="Remove vertex V (default 0) after generating",
    )
    gen.add_argument(
        "--exceptional", action="store_true",
        help="Decomplete a capped X-ladder at its middle-rung vertex",
    )

    c2 = sub.add_parser("c2", help="Compute c2 of a graph file")
    c2.add_argument("graph", help="Graph file, or '-' for stdin")
    c2.add_argument("--p", type=int, default=2)
    c2.add_argument("--method", choices=ALL_METHODS)
    c2.add_argument("--edges", type=int, nargs="+", help="Edge ids for the formula")
    c2.add_argument("--cross-check", action="store_true", help="Run every feasible method")

    scan = sub.add_parser("scan", help="Compute c2 over a family parameter range")
    scan.add_argument("family", choices=SCAN_FAMILIES)
    scan.add_argument("--range", dest="values", type=_range, required=True, help="a:b (inclusive)")
    scan.add_argument("--m", type=int, default=3, help="Grid height for nonskew/skew")
    scan.add_argument("--l", dest="skew", type=int, default=1, help="Skew shift for skew")
    scan.add_argument("--gaps", type=int, nargs="+", default=[1, 3], help="Circulant gaps")
    scan.add_argument("--p", type=int, default=2)
    scan.add_argument("--method", choices=ALL_METHODS)
    scan.add_argument("--cross-check", action="store_true")
    scan.add_argument("--complete", action="store_true", help="Do not decomplete")

    recur = sub.add_parser("recur", help="Solve a recursive family")
    recur.add_argument("spec", help=f"Family spec file or built-in name ({', '.join(builtin_families())})")
    recur.add_argument("--p", type=int, default=2)
    recur.add_argument("--state-cap", type=int)
    recur.add_argument("--experimental-odd-p", action="store_true")

    sub.add_parser("schema", help="Print the JSON schema of run reports")
    return parser


def _settings(args: argparse.Namespace) -> Settings:
    overrides: dict[str, Any] = {}
    if args.threads is not None:
        overrides["threads"] = args.threads
    if args.budget is not None:
        overrides["budget"] = args.budget
    if args.log_level is not None:
        overrides["log_level"] = args.log_level
    if args.json:
        overrides["json_logs"] = True
    if getattr(args, "state_cap", None) is not None:
        overrides["state_cap"] = args.state_cap
    if getattr(args, "experimental_odd_p", False):
        overrides["experimental_odd_p"] = True
    return get_settings().model_copy(update=overrides)


# -----------------------------------------------------------------------------
# Subcommands
# -----------------------------------------------------------------------------


def _default_method(p: int) -> str:
    return "assign" if p == 2 else "formula1"


def _family_from_gen(args: argparse.Namespace) -> FamilyId:
    params = args.params
    decompleted = args.decomplete is not None
    vertex = args.decomplete or 0
    try:
        if args.family == "x-ladder":
            kind, size = params
            if kind not in ("capped", "symmetric"):
                raise FamilyParameterError(detail=f"X-ladder kind must be capped or symmetric, got {kind!r}")
            if args.exceptional:
                return FamilyId.x_ladder(int(size), kind == "capped", exceptional=True)
            return FamilyId(f"{kind}_x_ladder", (int(size),), decompleted, vertex)  # type: ignore[arg-type]
        if args.exceptional:
            raise FamilyParameterError(detail="--exceptional applies to X-ladders only")
        return FamilyId(args.family, tuple(int(x) for x in params), decompleted, vertex)
    except ValueError as e:
        raise FamilyParameterError(detail=f"Bad parameters {params}: {e}") from e


def cmd_gen(args: argparse.Namespace, settings: Settings) -> Outcome:
    family = _family_from_gen(args)
    g = family.build()
    comment = family.label + (f" = {family.census_name}" if family.census_name else "")
    logger.info("graph_generated", family=family.label, vertices=g.vertex_count, edges=g.edge_count)
    return Outcome(
        result=GraphSummary(
            vertices=g.vertex_count,
            edges=g.edge_count,
            path=str(args.output) if args.output else None,
        ),
        inputs=RunInputs(graph_hash=g.text_hash(), parameters={"family": family.label}),
        text=g.to_text(comment),
    )


def _read_graph(path: str) -> LabeledGraph:
    text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    return LabeledGraph.from_text(text)


def _compute(
    g: LabeledGraph, p: int, method: str, edges: Sequence[int] | None, check: bool, settings: Settings
) -> tuple[C2Result, dict[str, int]]:
    if not check:
        return run_method(g, p, method, edges, settings), {}  # type: ignore[arg-type]
    results = cross_check(g, p, settings=settings)
    values = {name: r.value for name, r in results.items()}
    return results.get(method, next(iter(results.values()))), values


def cmd_c2(args: argparse.Namespace, settings: Settings) -> Outcome:
    g = _read_graph(args.graph)
    method = args.method or _default_method(args.p)
    result, checked = _compute(g, args.p, method, args.edges, args.cross_check, settings)
    table = Table(title=f"c2 at p = {args.p}")
    table.add_column("method")
    table.add_column("value", justify="right")
    table.add_column("diagnostics")
    rows = checked or {result.method: result.value}
    for name, value in rows.items():
        diag = ", ".join(f"{k}={v}" for k, v in result.diagnostics.items()) if value == result.value else ""
        table.add_row(name, str(value), diag)
    return Outcome(
        result=result,
        inputs=RunInputs(
            graph_hash=g.text_hash(),
            parameters={"method": method, "edges": list(args.edges) if args.edges else None},
            p=args.p,
        ),
        methods=list(checked) or [method],
        cross_check=checked,
        table=table,
    )


def _scan_families(args: argparse.Namespace) -> list[FamilyId]:
    decompleted = not args.complete
    out = []
    for value in args.values:
        if args.family == "nonskew":
            out.append(FamilyId("toroidal", (value, 0, args.m), decompleted))
        elif args.family == "skew":
            out.append(FamilyId("toroidal", (value, args.skew, args.m), decompleted))
        elif args.family == "circulant":
            out.append(FamilyId("circulant", (value, *args.gaps), decompleted))
        elif value % 2 == 0:
            kind = "capped_x_ladder" if args.family == "capped-x-ladder" else "symmetric_x_ladder"
            out.append(FamilyId(kind, (value,), decompleted))  # type: ignore[arg-type]
    return out


def cmd_scan(args: argparse.Namespace, settings: Settings) -> Outcome:
    method = args.method or _default_method(args.p)
    report = ScanReport(family=args.family, p=args.p, method=method)
    exit_code = 0
    table = Table(title=f"{args.family} at p = {args.p} ({method})")
    for column in ("graph", "|V|", "|E|", "census", "c2", "error"):
        table.add_column(column, justify="right" if column in ("|V|", "|E|", "c2") else "left")

    for family in _scan_families(args):
        log = logger.bind(family=family.label)
        row: RowReport
        try:
            g = family.build()
        except C2LabError as e:
            row = RowReport(label=family.label, vertices=0, edges=0, error=e.to_dict())
            exit_code = max(exit_code, e.exit_code)
        else:
            row = RowReport(
                label=family.label,
                parameters={"params": list(family.params), "decompleted": family.decompleted},
                graph_hash=g.text_hash(),
                vertices=g.vertex_count,
                edges=g.edge_count,
                census_name=family.census_name,
            )
            try:
                row.result, _ = _compute(g, args.p, method, None, args.cross_check, settings)
            except C2LabError as e:
                log.warning("scan_row_failed", **e.to_dict())
                row.error = e.to_dict()
                exit_code = max(exit_code, e.exit_code)
        report.rows.append(row)
        table.add_row(
            row.label,
            str(row.vertices),
            str(row.edges),
            row.census_name or "",
            str(row.result.value) if row.result else "-",
            row.error["error_code"] if row.error else "",
        )
    return Outcome(
        result=report,
        inputs=RunInputs(parameters={"family": args.family, "method": method}, p=args.p),
        methods=[method],
        exit_code=exit_code,
        table=table,
    )


def _load_spec(reference: str) -> RecursiveFamilySpec:
    path = Path(reference)
    if path.suffix == ".toml" or path.exists():
        return RecursiveFamilySpec.load(path)
    return RecursiveFamilySpec.builtin(reference)


def cmd_recur(args: argparse.Namespace, settings: Settings) -> Outcome:
    spec = _load_spec(args.spec)
    solution: RecurrenceSolution = solve_family(spec, args.p, settings)
    table = Table(
        title=f"{solution.family} at p = {solution.p}: preperiod {solution.preperiod}, "
        f"period {solution.period}"
    )
    for column in ("n", "index", "direct", "recurrence"):
        table.add_column(column, justify="right")
    for v in solution.verified:
        table.add_row(str(v.n), str(v.index), str(v.direct), "" if v.predicted is None else str(v.predicted))
    return Outcome(
        result=solution,
        inputs=RunInputs(parameters={"family": spec.name, "spec": args.spec}, p=args.p),
        methods=["recurrence", "assign" if args.p == 2 else "formula1"],
        table=table,
    )


def cmd_schema(args: argparse.Namespace, settings: Settings) -> Outcome:
    return Outcome(text=json.dumps(RunReport.json_schema(), indent=2) + "\n")


HANDLERS: dict[str, Callable[[argparse.Namespace, Settings], Outcome]] = {
    "gen": cmd_gen,
    "c2": cmd_c2,
    "scan": cmd_scan,
    "recur": cmd_recur,
    "schema": cmd_schema,
}


# -----------------------------------------------------------------------------
# Entry point
# -----------------------------------------------------------------------------


def _emit(report: RunReport, outcome: Outcome | None, args: argparse.Namespace, console: Console) -> None:
    if outcome is not None and outcome.text is not None:
        if args.output:
            args.output.write_text(outcome.text, encoding="utf-8")
        else:
            console.file.write(outcome.text)
        return
    payload = report.model_dump_json(indent=2)
    if args.output:
        args.output.write_text(payload + "\n", encoding="utf-8")
    if args.format == "json":
        console.file.write(payload + "\n")
    elif outcome is not None and outcome.table is not None:
        console.print(outcome.table)
    elif report.error:
        console.print(f"[red]{report.error['error_code']}[/red]: {report.error['detail']}")


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    settings = _settings(args)
    setup_structured_logging(settings)

    structlog.contextvars.clear_contextvars()
    structlog.contextvars.bind_contextvars(command=args.command, run_id=uuid.uuid4().hex[:12])
    console = Console(soft_wrap=True)
    started = datetime.now(UTC)
    clock = time.perf_counter()

    outcome: Outcome | None = None
    error: dict[str, str] | None = None
    exit_code = 0
    try:
        outcome = HANDLERS[args.command](args, settings)
        exit_code = outcome.exit_code
    except C2LabError as e:
        logger.error("command_failed", **e.to_dict())
        error = e.to_dict()
        exit_code = e.exit_code

    report = RunReport(
        command=["c2lab", *argv],
        inputs=outcome.inputs if outcome else RunInputs(),
        result=outcome.result if outcome else None,
        cross_check=outcome.cross_check if outcome else {},
        methods=outcome.methods if outcome else [],
        started_at=started,
        elapsed_seconds=time.perf_counter() - clock,
        ok=exit_code == 0,
        error=error,
    )
    _emit(report, outcome, args, console)
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
