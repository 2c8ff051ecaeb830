"""Risk impact and countermeasure effectiveness analytics.

The two matrices and the metrics over them:

* ``Crit(r) = L(r) * sum_obj I(r,obj) * W(obj)`` with W the normalized
  objective weights,
* ``Loss(obj) = W(obj) * sum_r I(r,obj) * L(r)``,
* ``CRR(r) = 1 - prod_cm (1 - R(cm,r))`` over the selected countermeasures,
* ``OE(cm) = sum_r R(cm,r) * C(r)``,
* residual criticality ``Crit(r) * (1 - CRR(r))``, a toolchain extension
  for what-if exploration rather than part of the published metric set.

All computation is full double precision; rounding happens only in report
rendering. The portfolio optimizer is exact: branch and bound on cost with
an exhaustive tie-break ordering, capped at 24 countermeasures.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import Countermeasure, Risk, SecurityObjective, StrideCategory, normalize_weights

# Impact levels used in published matrices; any value in [0, 1] is accepted.
IMPACT_NONE = 0.0
IMPACT_PARTIAL = 0.5
IMPACT_FULL = 1.0

# Reduction levels; 0.8 caps the scale because perfect security does not exist.
REDUCTION_NONE = 0.0
REDUCTION_PARTIAL = 0.5
REDUCTION_HIGH = 0.8

OPTIMIZER_SIZE_LIMIT = 24


@dataclass(frozen=True)
class RiskImpactMatrix:
    """Objectives x risks impact table; cells keyed by (risk name, objective name)."""

    objectives: tuple[SecurityObjective, ...]
    risks: tuple[Risk, ...]
    impact: dict[tuple[str, str], float]

    def __post_init__(self):
        if not self.objectives:
            raise ValueError("no objectives")
        for risk in self.risks:
            for obj in self.objectives:
                key = (risk.name, obj.name)
                if key not in self.impact:
                    raise ValueError(f"missing impact cell {key!r}")
                value = self.impact[key]
                if not 0.0 <= value <= 1.0:
                    raise ValueError(f"impact {value!r} for {key!r} outside [0, 1]")

    def weights(self) -> dict[str, float]:
        values = normalize_weights(self.objectives)
        return {obj.name: w for obj, w in zip(self.objectives, values)}


@dataclass(frozen=True)
class RiskAnalysis:
    """Computed criticality and loss for one impact matrix."""

    matrix: RiskImpactMatrix
    criticality: dict[str, float]
    loss: dict[str, float]

    @property
    def risks(self) -> tuple[Risk, ...]:
        return self.matrix.risks

    @property
    def objectives(self) -> tuple[SecurityObjective, ...]:
        return self.matrix.objectives

    def rollup(self) -> "CategoryRollup":
        return stride_rollup([self])


@dataclass(frozen=True)
class CategoryRollup:
    """The data series behind the per-category overview charts.

    ``total_criticality`` maps each category to the summed criticality of its
    risks; ``loss_contribution`` maps (objective name, category) to the part
    of that objective's loss caused by that category's risks.
    """

    categories: tuple[StrideCategory, ...]
    objectives: tuple[str, ...]
    total_criticality: dict[StrideCategory, float]
    loss_contribution: dict[tuple[str, StrideCategory], float]


@dataclass(frozen=True)
class EffectivenessMatrix:
    """Countermeasures x risks reduction table with per-risk criticality."""

    countermeasures: tuple[Countermeasure, ...]
    risk_names: tuple[str, ...]
    criticality: dict[str, float]
    reduction: dict[tuple[str, str], float]
    risks: tuple[Risk, ...] | None = None  # full risk objects when known

    def __post_init__(self):
        for cm in self.countermeasures:
            for name in self.risk_names:
                key = (cm.name, name)
                if key not in self.reduction:
                    raise ValueError(f"missing reduction cell {key!r}")
                value = self.reduction[key]
                if not 0.0 <= value <= 1.0:
                    raise ValueError(f"reduction {value!r} for {key!r} outside [0, 1]")
        for name in self.risk_names:
            if name not in self.criticality:
                raise ValueError(f"missing criticality for risk {name!r}")

    def countermeasure_names(self) -> tuple[str, ...]:
        return tuple(cm.name for cm in self.countermeasures)


@dataclass(frozen=True)
class PortfolioEvaluation:
    """Metrics for one countermeasure selection."""

    selected: frozenset[str]
    crr: dict[str, float]
    oe: dict[str, float]
    residual: dict[str, float]
    total_cost: float

    @property
    def total_residual(self) -> float:
        return sum(self.residual.values())


class InfeasiblePortfolioError(Exception):
    """No countermeasure subset can reach the threshold for every covered risk."""

    def __init__(self, threshold: float, uncoverable: list[str]):
        self.threshold = threshold
        self.uncoverable = list(uncoverable)
        names = ", ".join(repr(n) for n in self.uncoverable)
        super().__init__(f"no portfolio reaches risk reduction {threshold} for: {names}")


def risk_criticality(matrix: RiskImpactMatrix) -> dict[str, float]:
    """Per-risk ``Crit(r)``, in matrix risk order."""
    weights = matrix.weights()
    out: dict[str, float] = {}
    for risk in matrix.risks:
        impact_sum = sum(
            matrix.impact[(risk.name, obj.name)] * weights[obj.name] for obj in matrix.objectives
        )
        out[risk.name] = risk.likelihood * impact_sum
    return out


def loss_of_objectives(matrix: RiskImpactMatrix) -> dict[str, float]:
    """Per-objective ``Loss(obj)``, in matrix objective order."""
    weights = matrix.weights()
    out: dict[str, float] = {}
    for obj in matrix.objectives:
        risk_sum = sum(
            matrix.impact[(risk.name, obj.name)] * risk.likelihood for risk in matrix.risks
        )
        out[obj.name] = weights[obj.name] * risk_sum
    return out


def analyze(matrix: RiskImpactMatrix) -> RiskAnalysis:
    return RiskAnalysis(matrix, risk_criticality(matrix), loss_of_objectives(matrix))


def stride_rollup(analyses: list[RiskAnalysis]) -> CategoryRollup:
    """Aggregate criticality and loss contributions per STRIDE category.

    All analyses must share one objective set (same names, same weights);
    risks group by their own category, so one analysis per category and one
    analysis holding mixed categories roll up identically.
    """
    if not analyses:
        return CategoryRollup((), (), {}, {})
    reference = [(o.name, o.importance) for o in analyses[0].objectives]
    for analysis in analyses[1:]:
        if [(o.name, o.importance) for o in analysis.objectives] != reference:
            raise ValueError("mismatched objective sets across analyses")
    objective_names = tuple(name for name, _ in reference)

    present: list[StrideCategory] = []
    total: dict[StrideCategory, float] = {}
    contribution: dict[tuple[str, StrideCategory], float] = {}
    for analysis in analyses:
        weights = analysis.matrix.weights()
        for risk in analysis.risks:
            category = risk.category
            if category not in total:
                total[category] = 0.0
                present.append(category)
                for name in objective_names:
                    contribution[(name, category)] = 0.0
            total[category] += analysis.criticality[risk.name]
            for obj in analysis.objectives:
                contribution[(obj.name, category)] += (
                    weights[obj.name]
                    * analysis.matrix.impact[(risk.name, obj.name)]
                    * risk.likelihood
                )
    ordered = tuple(sorted(present, key=lambda c: c.order))
    return CategoryRollup(ordered, objective_names, total, contribution)


def combined_risk_reduction(
    matrix: EffectivenessMatrix, selected: set[str] | frozenset[str]
) -> dict[str, float]:
    """Per-risk ``CRR(r)`` for a selection; the empty selection reduces nothing."""
    known = set(matrix.countermeasure_names())
    for name in sorted(selected):
        if name not in known:
            raise ValueError(f"unknown countermeasure {name!r}")
    out: dict[str, float] = {}
    for risk_name in matrix.risk_names:
        unreduced = 1.0
        for cm in matrix.countermeasures:
            if cm.name in selected:
                unreduced *= 1.0 - matrix.reduction[(cm.name, risk_name)]
        out[risk_name] = 1.0 - unreduced
    return out


def overall_effectiveness(matrix: EffectivenessMatrix) -> dict[str, float]:
    """Per-countermeasure ``OE(cm)`` against the matrix criticalities."""
    out: dict[str, float] = {}
    for cm in matrix.countermeasures:
        out[cm.name] = sum(
            matrix.reduction[(cm.name, name)] * matrix.criticality[name]
            for name in matrix.risk_names
        )
    return out


def evaluate_portfolio(
    matrix: EffectivenessMatrix, selected: set[str] | frozenset[str]
) -> PortfolioEvaluation:
    crr = combined_risk_reduction(matrix, selected)
    oe = overall_effectiveness(matrix)
    residual = {
        name: matrix.criticality[name] * (1.0 - crr[name]) for name in matrix.risk_names
    }
    total_cost = sum(cm.cost for cm in matrix.countermeasures if cm.name in selected)
    return PortfolioEvaluation(frozenset(selected), crr, oe, residual, total_cost)


def optimize_portfolio(
    matrix: EffectivenessMatrix, threshold: float, criticality_cutoff: float = 0.0
) -> PortfolioEvaluation:
    """Minimum-cost selection with ``CRR(r) >= threshold`` for every risk whose
    criticality is at least the cutoff.

    Ties break toward higher summed overall effectiveness, then the
    lexicographically smallest name set. Raises
    :class:`InfeasiblePortfolioError` listing the uncoverable risks when even
    the full selection falls short.
    """
    cms = matrix.countermeasures
    if len(cms) > OPTIMIZER_SIZE_LIMIT:
        raise ValueError(
            f"too many countermeasures for exact search ({len(cms)} > {OPTIMIZER_SIZE_LIMIT})"
        )
    constrained = [
        name for name in matrix.risk_names if matrix.criticality[name] >= criticality_cutoff
    ]
    full_crr = combined_risk_reduction(matrix, set(matrix.countermeasure_names()))
    uncoverable = [name for name in constrained if full_crr[name] < threshold]
    if uncoverable:
        raise InfeasiblePortfolioError(threshold, uncoverable)

    oe = overall_effectiveness(matrix)
    # Stable candidate order; the result is a function of the comparison key
    # alone, so any traversal order yields the same portfolio.
    order = sorted(cms, key=lambda cm: cm.name)
    best: list[tuple[float, float, tuple[str, ...]] | None] = [None]

    def key_for(selected: list[str]) -> tuple[float, float, tuple[str, ...]]:
        cost = sum(cm.cost for cm in cms if cm.name in selected)
        gain = sum(oe[name] for name in selected)
        return (cost, -gain, tuple(sorted(selected)))

    def feasible(selected: list[str]) -> bool:
        for risk_name in constrained:
            unreduced = 1.0
            for name in selected:
                unreduced *= 1.0 - matrix.reduction[(name, risk_name)]
            if 1.0 - unreduced < threshold:
                return False
        return True

    def search(index: int, selected: list[str], cost: float) -> None:
        if best[0] is not None and cost > best[0][0]:
            return  # cost-only lower bound: adding countermeasures never lowers cost
        if index == len(order):
            if feasible(selected):
                candidate = key_for(selected)
                if best[0] is None or candidate < best[0]:
                    best[0] = candidate
            return
        cm = order[index]
        search(index + 1, selected + [cm.name], cost + cm.cost)
        search(index + 1, selected, cost)

    search(0, [], 0.0)
    assert best[0] is not None  # feasibility of the full set was established above
    return evaluate_portfolio(matrix, set(best[0][2]))
