"""Command-line front door for the four-stage pipeline.

Subcommands map one-to-one to the pipeline stages: ``threats`` (threat
modeling), ``atree`` (attack scenario analysis), ``risk`` (risk analysis),
``cm`` (countermeasure evaluation, what-if, and recommendation), plus
``validate`` for model checking and ``serve`` for the interactive what-if
service.

Exit codes: 0 success, 1 validation error, 2 parse or usage error,
3 infeasible optimization, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import report
from .atree import category_exploitability, evaluate_forest, extract_risks
from .ddp import (
    InfeasiblePortfolioError,
    analyze,
    evaluate_portfolio,
    optimize_portfolio,
)
from .model import StrideCategory, SystemModel, validate_model
from .service import run_service
from .textio import (
    ParseError,
    ValidationError,
    parse_attack_trees,
    parse_effect_csv,
    parse_impact_csv,
    parse_system_model,
)
from .threats import default_rules, generate_threats, load_rules

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_PARSE = 2
EXIT_INFEASIBLE = 3
EXIT_IO = 4

DEFAULT_PORT = 7430
DEFAULT_THRESHOLD = 0.8
DEFAULT_CUTOFF = 0.0


class _CliError(Exception):
    def __init__(self, exit_code: int, message: str):
        self.exit_code = exit_code
        self.message = message
        super().__init__(message)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _CliError(EXIT_IO, f"cannot read {path}: {exc.strerror or exc}") from exc


def _load_model(path: str) -> SystemModel:
    return parse_system_model(_read(path), path)


def _load_forest(paths: list[str]):
    forest = []
    for path in paths:
        forest.extend(parse_attack_trees(_read(path), path))
    return forest


def _load_risks(paths: list[str]):
    evaluated = evaluate_forest(_load_forest(paths))
    risks = extract_risks(evaluated)
    seen: set[str] = set()
    for risk in risks:
        if risk.name in seen:
            raise _CliError(
                EXIT_VALIDATION, f"duplicate risk name across tree files: {risk.name!r}"
            )
        seen.add(risk.name)
    return evaluated, risks


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="strideflow",
        description="STRIDE threat modeling, attack-tree, and risk analysis toolchain",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse and validate a model and optional trees")
    p.add_argument("model")
    p.add_argument("trees", nargs="*")

    p = sub.add_parser("threats", help="generate the STRIDE threat report")
    p.add_argument("model")
    p.add_argument("--scope", choices=["all", "boundary"], default="all")
    p.add_argument("--rules", help="CSV overriding the per-kind category rules")
    p.add_argument("--format", choices=["text", "csv", "json"], default="text")

    p = sub.add_parser("atree", help="attack-tree operations")
    atree_sub = p.add_subparsers(dest="atree_command", required=True)
    pe = atree_sub.add_parser("eval", help="evaluate exploitability bottom-up")
    pe.add_argument("tree_file")
    pe.add_argument("--asset")
    pe.add_argument("--category", choices=list("STRIDE"))
    pe.add_argument("--format", choices=["text", "json"], default="text")

    p = sub.add_parser("risk", help="risk impact analysis over a model and trees")
    p.add_argument("model")
    p.add_argument("trees", nargs="+")
    p.add_argument("--impact", required=True)
    p.add_argument("--format", choices=["text", "csv", "json"], default="text")

    p = sub.add_parser("cm", help="countermeasure effectiveness and recommendation")
    p.add_argument("cm_command", choices=["eval", "whatif", "optimize"])
    p.add_argument("--effect", required=True)
    p.add_argument("--select", help="comma-separated countermeasure names")
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    p.add_argument("--cutoff", type=float, default=DEFAULT_CUTOFF)
    p.add_argument("--format", choices=["text", "csv", "json"], default="text")

    p = sub.add_parser("serve", help="run the local what-if service")
    p.add_argument("model")
    p.add_argument("trees", nargs="+")
    p.add_argument("--impact", required=True)
    p.add_argument("--effect", required=True)
    p.add_argument("--port", type=int, default=DEFAULT_PORT)

    return parser


def _cmd_validate(args, out) -> int:
    model = _load_model(args.model)
    if args.trees:
        _load_risks(args.trees)
    diagnostics = validate_model(model)
    for diag in diagnostics:
        out.write(f"{diag}\n")
    if not diagnostics:
        out.write(f"model {model.name!r}: ok\n")
    errors = [d for d in diagnostics if d.severity == "error"]
    return EXIT_VALIDATION if errors else EXIT_OK


def _cmd_threats(args, out) -> int:
    model = _load_model(args.model)
    rules = load_rules(_read(args.rules)) if args.rules else default_rules()
    threatset = generate_threats(model, rules, args.scope)
    if args.format == "csv":
        out.write(report.threats_csv(threatset))
    elif args.format == "json":
        out.write(report.threats_json(threatset, model.name))
    else:
        out.write(report.threats_text(threatset, model.name))
    return EXIT_OK


def _cmd_atree(args, out) -> int:
    evaluated = evaluate_forest(_load_forest([args.tree_file]))
    if args.asset is not None and args.category is not None:
        value = category_exploitability(
            evaluated, args.asset, StrideCategory.from_tag(args.category)
        )
        out.write(("N/A" if value is None else report.fmt2(value)) + "\n")
        return EXIT_OK
    if args.category is not None:
        category = StrideCategory.from_tag(args.category)
        assets: list[str] = []
        for ev in evaluated:
            if ev.tree.asset not in assets:
                assets.append(ev.tree.asset)
        for asset in sorted(assets):
            value = category_exploitability(evaluated, asset, category)
            out.write(f"{asset}  {'N/A' if value is None else report.fmt2(value)}\n")
        return EXIT_OK
    if args.format == "json":
        out.write(report.forest_json(evaluated))
        return EXIT_OK
    if args.asset is not None:
        evaluated = [ev for ev in evaluated if ev.tree.asset == args.asset]
    out.write(report.forest_text(evaluated))
    return EXIT_OK


def _cmd_risk(args, out) -> int:
    model = _load_model(args.model)
    _, risks = _load_risks(args.trees)
    matrix = parse_impact_csv(_read(args.impact), model, risks, args.impact)
    analysis = analyze(matrix)
    if args.format == "csv":
        out.write(report.risk_csv(analysis))
    elif args.format == "json":
        out.write(report.risk_json(analysis, model.name))
    else:
        out.write(report.risk_text(analysis, model.name))
        out.write("\n")
        out.write("\n".join(report.rollup_text(analysis)) + "\n")
    return EXIT_OK


def _parse_selection(select: str | None, matrix) -> set[str]:
    if select is None:
        return set()
    names = [n.strip() for n in select.split(",") if n.strip()]
    known = set(matrix.countermeasure_names())
    for name in names:
        if name not in known:
            raise _CliError(EXIT_VALIDATION, f"unknown countermeasure {name!r}")
    return set(names)


def _cmd_cm(args, out, err) -> int:
    if not 0.0 <= args.threshold <= 1.0:
        raise _CliError(EXIT_PARSE, f"--threshold must be in [0, 1], got {args.threshold}")
    if args.cutoff < 0.0:
        raise _CliError(EXIT_PARSE, f"--cutoff must be >= 0, got {args.cutoff}")
    matrix = parse_effect_csv(_read(args.effect), filename=args.effect)
    if args.cm_command == "optimize":
        try:
            portfolio = optimize_portfolio(matrix, args.threshold, args.cutoff)
        except InfeasiblePortfolioError as exc:
            err.write(f"infeasible: {exc}\n")
            return EXIT_INFEASIBLE
    elif args.cm_command == "whatif":
        portfolio = evaluate_portfolio(matrix, _parse_selection(args.select, matrix))
    else:  # eval: full selection unless narrowed
        if args.select is None:
            selected = set(matrix.countermeasure_names())
        else:
            selected = _parse_selection(args.select, matrix)
        portfolio = evaluate_portfolio(matrix, selected)
    if args.format == "csv":
        out.write(report.cm_csv(matrix))
    elif args.format == "json":
        out.write(report.cm_json(matrix, portfolio))
    else:
        out.write(report.cm_text(matrix, portfolio))
    return EXIT_OK


def _cmd_serve(args, out) -> int:
    model = _load_model(args.model)
    evaluated, risks = _load_risks(args.trees)
    matrix = parse_impact_csv(_read(args.impact), model, risks, args.impact)
    analysis = analyze(matrix)
    # The effectiveness file's @criticality row wins when present; otherwise
    # the freshly computed criticalities back the matrix.
    effect = parse_effect_csv(_read(args.effect), matrix.risks, analysis.criticality, args.effect)
    run_service(model, evaluated, analysis, effect, args.port, out)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out, err = sys.stdout, sys.stderr
    try:
        if args.command == "validate":
            return _cmd_validate(args, out)
        if args.command == "threats":
            return _cmd_threats(args, out)
        if args.command == "atree":
            return _cmd_atree(args, out)
        if args.command == "risk":
            return _cmd_risk(args, out)
        if args.command == "cm":
            return _cmd_cm(args, out, err)
        if args.command == "serve":
            return _cmd_serve(args, out)
        raise AssertionError(f"unhandled command {args.command!r}")
    except ValidationError as exc:
        err.write(f"{exc}\n")
        return EXIT_VALIDATION
    except ParseError as exc:
        err.write(f"{exc}\n")
        return EXIT_PARSE
    except _CliError as exc:
        err.write(f"{exc.message}\n")
        return exc.exit_code
    except ValueError as exc:
        err.write(f"{exc}\n")
        return EXIT_VALIDATION
    except OSError as exc:
        err.write(f"I/O error: {exc}\n")
        return EXIT_IO
    except KeyboardInterrupt:
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
