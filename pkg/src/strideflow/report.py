"""Report rendering: text grids, CSV, and JSON.

Text reports show numbers at two decimals; CSV and JSON carry full double
precision. Rendering never consults clocks, locales, or map iteration
order, so identical inputs produce byte-identical reports.
"""

from __future__ import annotations

import json

from .atree import EvaluatedTree
from .ddp import EffectivenessMatrix, PortfolioEvaluation, RiskAnalysis
from .model import StrideCategory
from .textio.matrices import (
    serialize_effect_csv,
    serialize_impact_csv,
    serialize_threat_report_csv,
)
from .threats import ThreatSet


def fmt2(value: float) -> str:
    """Two-decimal display form used everywhere a human reads a number."""
    return f"{value:.2f}"


def to_json(payload) -> str:
    return json.dumps(payload, ensure_ascii=False, indent=2) + "\n"


# -- threats ---------------------------------------------------------------


def threats_text(threatset: ThreatSet, model_name: str) -> str:
    lines = [
        f"Threat report: model {model_name!r}, scope {threatset.scope}, "
        f"{len(threatset.threats)} threats"
    ]
    for t in threatset.threats:
        marker = "x" if t.boundary_crossing else "."
        lines.append(f"{t.id:>4}  {t.category.tag}  {marker}  {t.title}")
    return "\n".join(lines) + "\n"


def threats_csv(threatset: ThreatSet) -> str:
    return serialize_threat_report_csv(threatset.threats, threatset.scope)


def threats_json(threatset: ThreatSet, model_name: str) -> str:
    return to_json(
        {
            "model": model_name,
            "scope": threatset.scope,
            "threats": [
                {
                    "id": t.id,
                    "category": t.category.tag,
                    "subject": t.subject,
                    "title": t.title,
                    "boundaryCrossing": t.boundary_crossing,
                }
                for t in threatset.threats
            ],
        }
    )


# -- attack trees ----------------------------------------------------------


def tree_node_payload(evaluated: EvaluatedTree, node) -> dict:
    return {
        "name": node.name,
        "kind": node.kind,
        "value": evaluated.values[node],
        "category": node.category.tag if node.category else None,
        "risk": node.is_risk,
        "children": [tree_node_payload(evaluated, c) for c in node.children],
    }


def forest_json(forest: list[EvaluatedTree]) -> str:
    return to_json(
        {
            "trees": [
                {
                    "goal": ev.tree.goal,
                    "asset": ev.tree.asset,
                    "root": tree_node_payload(ev, ev.tree.root),
                }
                for ev in forest
            ]
        }
    )


def forest_text(forest: list[EvaluatedTree]) -> str:
    lines: list[str] = []
    for ev in forest:
        lines.append(f"tree {ev.tree.goal!r} asset {ev.tree.asset!r}")
        _node_text(ev, ev.tree.root, 1, lines)
    lines.append("")
    lines.extend(exploitability_table(forest))
    return "\n".join(lines) + "\n"


def _node_text(ev: EvaluatedTree, node, depth: int, lines: list[str]) -> None:
    pad = "  " * depth
    tags = ""
    if node.category is not None:
        tags += f" [{node.category.tag}]"
    if node.is_risk:
        tags += " (risk)"
    label = node.name if node.name else node.kind
    lines.append(f"{pad}{node.kind} {label!r}{tags} = {fmt2(ev.values[node])}")
    for child in node.children:
        _node_text(ev, child, depth + 1, lines)


def exploitability_table(forest: list[EvaluatedTree]) -> list[str]:
    """Asset x category exploitability grid, N/A where no subgoal carries a tag."""
    from .atree import category_exploitability

    assets: list[str] = []
    for ev in forest:
        if ev.tree.asset not in assets:
            assets.append(ev.tree.asset)
    assets.sort()
    width = max([len("Asset"), *(len(a) for a in assets)], default=5)
    lines = ["Exploitability by asset and category"]
    header = "Asset".ljust(width) + "".join(f"  {c.tag:>5}" for c in StrideCategory)
    lines.append(header)
    for asset in assets:
        row = asset.ljust(width)
        for category in StrideCategory:
            value = category_exploitability(forest, asset, category)
            cell = "N/A" if value is None else fmt2(value)
            row += f"  {cell:>5}"
        lines.append(row)
    return lines


# -- risk analysis ---------------------------------------------------------


def risk_legend(analysis: RiskAnalysis) -> list[str]:
    lines = []
    for i, risk in enumerate(analysis.risks, start=1):
        lines.append(f"  [{i}] {risk.name}  ({risk.category.tag}, {risk.asset})")
    return lines


def risk_text(analysis: RiskAnalysis, model_name: str) -> str:
    matrix = analysis.matrix
    weights = matrix.weights()
    n = len(matrix.risks)
    lines = [
        f"Risk impact matrix: model {model_name!r}, "
        f"{n} risks, {len(matrix.objectives)} objectives",
        "",
    ]
    lines.extend(risk_legend(analysis))
    lines.append("")

    name_width = max(
        len("Risk Criticality"), *(len(o.name) for o in matrix.objectives)
    )
    meta_blank = " " * 15  # width of the Imp/Weight block
    head = "Objective".ljust(name_width) + f"  {'Imp':>5}  {'Weight':>6}"
    head += "".join(f"  {f'[{i}]':>4}" for i in range(1, n + 1)) + f"  {'Loss':>6}"
    lines.append(head)
    likelihood_row = "Likelihood".ljust(name_width) + meta_blank
    likelihood_row += "".join(f"  {fmt2(r.likelihood):>4}" for r in matrix.risks)
    lines.append(likelihood_row)
    for obj in matrix.objectives:
        row = obj.name.ljust(name_width)
        row += f"  {fmt2(obj.importance):>5}  {fmt2(weights[obj.name]):>6}"
        for risk in matrix.risks:
            row += f"  {fmt2(matrix.impact[(risk.name, obj.name)]):>4}"
        row += f"  {fmt2(analysis.loss[obj.name]):>6}"
        lines.append(row)
    crit_row = "Risk Criticality".ljust(name_width) + meta_blank
    crit_row += "".join(f"  {fmt2(analysis.criticality[r.name]):>4}" for r in matrix.risks)
    lines.append(crit_row)
    return "\n".join(lines) + "\n"


def risk_csv(analysis: RiskAnalysis) -> str:
    return serialize_impact_csv(analysis.matrix, derived=True)


def risk_payload(analysis: RiskAnalysis, model_name: str) -> dict:
    weights = analysis.matrix.weights()
    return {
        "model": model_name,
        "objectives": [
            {
                "name": o.name,
                "importance": o.importance,
                "weight": weights[o.name],
                "loss": analysis.loss[o.name],
            }
            for o in analysis.objectives
        ],
        "risks": [
            {
                "name": r.name,
                "category": r.category.tag,
                "asset": r.asset,
                "likelihood": r.likelihood,
                "criticality": analysis.criticality[r.name],
            }
            for r in analysis.risks
        ],
    }


def risk_json(analysis: RiskAnalysis, model_name: str) -> str:
    return to_json(risk_payload(analysis, model_name))


def rollup_text(analysis: RiskAnalysis) -> list[str]:
    """Per-category totals: the data series behind the overview charts."""
    rollup = analysis.rollup()
    lines = ["Criticality by category"]
    for category in rollup.categories:
        lines.append(f"  {category.tag}  {fmt2(rollup.total_criticality[category])}")
    lines.append("Loss contribution by objective and category")
    for name in rollup.objectives:
        for category in rollup.categories:
            lines.append(f"  {name}  {category.tag}  {fmt2(rollup.loss_contribution[(name, category)])}")
    return lines


# -- countermeasures -------------------------------------------------------


def cm_text(matrix: EffectivenessMatrix, portfolio: PortfolioEvaluation) -> str:
    n = len(matrix.risk_names)
    lines = [
        f"Countermeasure effectiveness: {n} risks, "
        f"{len(matrix.countermeasures)} countermeasures, "
        f"selected {len(portfolio.selected)}, total cost {fmt2(portfolio.total_cost)}",
        "",
    ]
    for i, name in enumerate(matrix.risk_names, start=1):
        lines.append(f"  [{i}] {name}  criticality {fmt2(matrix.criticality[name])}")
    lines.append("")

    name_width = max(
        len("Combined Risk Reduction"), *(len(cm.name) for cm in matrix.countermeasures)
    )
    meta_blank = " " * 12  # width of the Cost/Sel block
    head = "Countermeasure".ljust(name_width) + f"  {'Cost':>5}  {'Sel':>3}"
    head += "".join(f"  {f'[{i}]':>4}" for i in range(1, n + 1)) + f"  {'OE':>6}"
    lines.append(head)
    for cm in matrix.countermeasures:
        marker = "x" if cm.name in portfolio.selected else "."
        row = cm.name.ljust(name_width) + f"  {fmt2(cm.cost):>5}  {marker:>3}"
        for risk_name in matrix.risk_names:
            row += f"  {fmt2(matrix.reduction[(cm.name, risk_name)]):>4}"
        row += f"  {fmt2(portfolio.oe[cm.name]):>6}"
        lines.append(row)
    crr_row = "Combined Risk Reduction".ljust(name_width) + meta_blank
    crr_row += "".join(f"  {fmt2(portfolio.crr[name]):>4}" for name in matrix.risk_names)
    lines.append(crr_row)
    residual_row = "Residual Criticality".ljust(name_width) + meta_blank
    residual_row += "".join(f"  {fmt2(portfolio.residual[name]):>4}" for name in matrix.risk_names)
    lines.append(residual_row)
    lines.append("")
    lines.append(f"Total residual criticality: {fmt2(portfolio.total_residual)}")
    return "\n".join(lines) + "\n"


def cm_payload(matrix: EffectivenessMatrix, portfolio: PortfolioEvaluation) -> dict:
    return {
        "countermeasures": [
            {
                "name": cm.name,
                "cost": cm.cost,
                "oe": portfolio.oe[cm.name],
                "selected": cm.name in portfolio.selected,
            }
            for cm in matrix.countermeasures
        ],
        "risks": [
            {
                "name": name,
                "criticality": matrix.criticality[name],
                "crr": portfolio.crr[name],
                "residual": portfolio.residual[name],
            }
            for name in matrix.risk_names
        ],
        "portfolio": {
            "totalCost": portfolio.total_cost,
            "totalResidual": portfolio.total_residual,
            "feasible": True,
        },
    }


def cm_json(matrix: EffectivenessMatrix, portfolio: PortfolioEvaluation) -> str:
    return to_json(cm_payload(matrix, portfolio))


def cm_csv(matrix: EffectivenessMatrix) -> str:
    return serialize_effect_csv(matrix)
