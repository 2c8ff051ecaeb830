from __future__ import annotations

import itertools
import random

import pytest

from strideflow import (
    Countermeasure,
    EffectivenessMatrix,
    InfeasiblePortfolioError,
    Risk,
    RiskImpactMatrix,
    SecurityObjective,
    StrideCategory,
    analyze,
    combined_risk_reduction,
    evaluate_portfolio,
    loss_of_objectives,
    optimize_portfolio,
    overall_effectiveness,
    risk_criticality,
    stride_rollup,
)

T = StrideCategory.TAMPERING

ALL_FOUR = {
    "Use cryptography",
    "Use appropriate access control mechanisms",
    "Validate and sanitize untrusted input",
    "Use file integrity monitoring",
}
BEST_THREE = ALL_FOUR - {"Use file integrity monitoring"}


def make_matrix(rng: random.Random, n_risks: int, n_objectives: int) -> RiskImpactMatrix:
    objectives = tuple(
        SecurityObjective(f"o{i}", rng.uniform(0.05, 1.0)) for i in range(n_objectives)
    )
    risks = tuple(
        Risk(f"r{i}", rng.random(), rng.choice(list(StrideCategory)), "a") for i in range(n_risks)
    )
    impact = {
        (r.name, o.name): rng.choice([0.0, 0.5, 1.0, round(rng.random(), 3)])
        for r in risks
        for o in objectives
    }
    return RiskImpactMatrix(objectives, risks, impact)


def make_effect(rng: random.Random, n_cms: int, n_risks: int) -> EffectivenessMatrix:
    cms = tuple(Countermeasure(f"c{i}", round(rng.uniform(0, 3), 2)) for i in range(n_cms))
    names = tuple(f"r{i}" for i in range(n_risks))
    reduction = {
        (cm.name, r): rng.choice([0.0, 0.0, 0.5, 0.8, round(rng.random(), 2)])
        for cm in cms
        for r in names
    }
    criticality = {r: round(rng.random(), 3) for r in names}
    return EffectivenessMatrix(cms, names, criticality, reduction)


class TestRiskCriticality:
    def test_sql_injection(self, impact_matrix):
        crit = risk_criticality(impact_matrix)
        value = crit["Perform SQL Injection Attacks"]
        assert value == pytest.approx(0.81 * (0.5 * 2 / 7 + 0.5 * 2 / 7), abs=1e-12)
        assert f"{value:.2f}" == "0.23"

    def test_modify_phi_at_rest(self, impact_matrix):
        value = risk_criticality(impact_matrix)["Modify PHI at Rest"]
        assert value == pytest.approx(0.1 * (2 / 7 + 2 / 7 + 0.5 / 3.5), abs=1e-12)
        assert f"{value:.2f}" == "0.07"

    def test_json_dataflow(self, impact_matrix):
        value = risk_criticality(impact_matrix)["Tamper with Dataflow containing JSON"]
        assert value == pytest.approx(0.19 * 0.5 * 2 / 7, abs=1e-12)
        assert f"{value:.2f}" == "0.03"

    def test_zero_likelihood_means_zero_criticality(self):
        matrix = RiskImpactMatrix(
            (SecurityObjective("o", 1.0),),
            (Risk("r", 0.0, T, "a"),),
            {("r", "o"): 1.0},
        )
        assert risk_criticality(matrix) == {"r": 0.0}


class TestLossOfObjectives:
    def test_immunization_records(self, impact_matrix):
        value = loss_of_objectives(impact_matrix)["Protecting the (User) Immunization Records"]
        expected = (2 / 7) * (0.5 * 0.81 + 0.1 + 0.1 + 0.5 * 0.19 + 0.5 * 0.1)
        assert value == pytest.approx(expected, abs=1e-12)
        assert f"{value:.2f}" == "0.21"

    def test_user_records(self, impact_matrix):
        value = loss_of_objectives(impact_matrix)["Protecting the User Records"]
        assert value == pytest.approx(0.1443, abs=5e-5)
        assert f"{value:.2f}" == "0.14"

    def test_push_notifications_lose_nothing(self, impact_matrix):
        value = loss_of_objectives(impact_matrix)["Ensuring that the Push Notification Requests work"]
        assert value == 0.0


class TestRollup:
    def test_fixture_total_criticality(self, risk_analysis):
        rollup = risk_analysis.rollup()
        assert rollup.categories == (T,)
        assert rollup.total_criticality[T] == pytest.approx(0.5228571428571428, abs=1e-12)

    def test_single_category_rollup_equals_analysis(self, risk_analysis):
        rollup = risk_analysis.rollup()
        total = sum(risk_analysis.criticality.values())
        assert rollup.total_criticality[T] == pytest.approx(total, abs=1e-12)
        for name, loss in risk_analysis.loss.items():
            assert rollup.loss_contribution[(name, T)] == pytest.approx(loss, abs=1e-12)

    def test_empty_analysis_list_rolls_up_to_nothing(self):
        rollup = stride_rollup([])
        assert rollup.categories == ()
        assert rollup.total_criticality == {}

    def test_matrix_without_risks_rolls_up_to_zero(self):
        matrix = RiskImpactMatrix((SecurityObjective("o", 1.0),), (), {})
        rollup = stride_rollup([analyze(matrix)])
        assert rollup.categories == ()

    def test_mismatched_objective_sets_rejected(self):
        a = analyze(
            RiskImpactMatrix((SecurityObjective("o", 1.0),), (Risk("r", 0.5, T, "a"),), {("r", "o"): 1.0})
        )
        b = analyze(
            RiskImpactMatrix((SecurityObjective("p", 1.0),), (Risk("q", 0.5, T, "a"),), {("q", "p"): 1.0})
        )
        with pytest.raises(ValueError, match="mismatched objective sets"):
            stride_rollup([a, b])

    def test_contributions_sum_to_loss_across_categories(self):
        rng = random.Random(3)
        for _ in range(20):
            analysis = analyze(make_matrix(rng, rng.randint(1, 6), rng.randint(1, 4)))
            rollup = analysis.rollup()
            for obj in analysis.objectives:
                total = sum(
                    rollup.loss_contribution[(obj.name, c)] for c in rollup.categories
                )
                assert total == pytest.approx(analysis.loss[obj.name], abs=1e-9)


class TestCombinedRiskReduction:
    def test_all_four_reach_ninety_five_percent_on_phi(self, effect_matrix):
        crr = combined_risk_reduction(effect_matrix, ALL_FOUR)
        assert crr["Modify PHI at Rest"] == pytest.approx(0.95, abs=1e-12)

    def test_dropping_file_integrity_monitoring_gives_ninety(self, effect_matrix):
        crr = combined_risk_reduction(effect_matrix, BEST_THREE)
        assert crr["Modify PHI at Rest"] == pytest.approx(0.90, abs=1e-12)

    def test_empty_selection_reduces_nothing(self, effect_matrix):
        crr = combined_risk_reduction(effect_matrix, set())
        assert all(v == 0.0 for v in crr.values())

    def test_unknown_countermeasure_rejected(self, effect_matrix):
        with pytest.raises(ValueError, match="unknown countermeasure"):
            combined_risk_reduction(effect_matrix, {"Wish harder"})

    def test_growing_the_selection_never_lowers_crr(self):
        rng = random.Random(17)
        for _ in range(30):
            matrix = make_effect(rng, rng.randint(1, 6), rng.randint(1, 5))
            names = list(matrix.countermeasure_names())
            rng.shuffle(names)
            selected: set[str] = set()
            previous = combined_risk_reduction(matrix, selected)
            for name in names:
                selected.add(name)
                current = combined_risk_reduction(matrix, selected)
                for risk_name in matrix.risk_names:
                    assert current[risk_name] >= previous[risk_name] - 1e-12
                previous = current


class TestOverallEffectiveness:
    def test_cryptography(self, effect_matrix):
        value = overall_effectiveness(effect_matrix)["Use cryptography"]
        assert f"{value:.2f}" == "0.21"

    def test_input_validation(self, effect_matrix):
        value = overall_effectiveness(effect_matrix)["Validate and sanitize untrusted input"]
        assert value == pytest.approx(0.8 * 0.81 * 2 / 7, abs=1e-12)
        assert f"{value:.2f}" == "0.19"

    def test_zero_row_scores_zero(self):
        matrix = EffectivenessMatrix(
            (Countermeasure("idle", 1.0),), ("r",), {"r": 0.9}, {("idle", "r"): 0.0}
        )
        assert overall_effectiveness(matrix) == {"idle": 0.0}


def exhaustive_best(matrix, threshold, cutoff):
    """Independent oracle: try every subset, rank by (cost, -oe sum, names)."""
    oe = {
        cm.name: sum(
            matrix.reduction[(cm.name, r)] * matrix.criticality[r] for r in matrix.risk_names
        )
        for cm in matrix.countermeasures
    }
    constrained = [r for r in matrix.risk_names if matrix.criticality[r] >= cutoff]
    best = None
    names = [cm.name for cm in matrix.countermeasures]
    costs = {cm.name: cm.cost for cm in matrix.countermeasures}
    for size in range(len(names) + 1):
        for subset in itertools.combinations(names, size):
            ok = True
            for r in constrained:
                unreduced = 1.0
                for n in subset:
                    unreduced *= 1.0 - matrix.reduction[(n, r)]
                if 1.0 - unreduced < threshold:
                    ok = False
                    break
            if not ok:
                continue
            key = (
                sum(costs[n] for n in subset),
                -sum(oe[n] for n in subset),
                tuple(sorted(subset)),
            )
            if best is None or key < best:
                best = key
    return None if best is None else frozenset(best[2])


class TestOptimizePortfolio:
    def test_fixture_recommends_three_countermeasures(self, effect_matrix):
        portfolio = optimize_portfolio(effect_matrix, 0.8, 0.0)
        assert portfolio.selected == frozenset(BEST_THREE)
        assert portfolio.total_cost == 3.0
        assert "Use file integrity monitoring" not in portfolio.selected

    def test_higher_threshold_is_infeasible_and_names_sql_injection(self, effect_matrix):
        with pytest.raises(InfeasiblePortfolioError) as err:
            optimize_portfolio(effect_matrix, 0.9)
        assert "Perform SQL Injection Attacks" in err.value.uncoverable

    def test_zero_threshold_selects_nothing(self, effect_matrix):
        portfolio = optimize_portfolio(effect_matrix, 0.0)
        assert portfolio.selected == frozenset()
        assert portfolio.total_cost == 0.0

    def test_residuals_follow_selection(self, effect_matrix):
        portfolio = evaluate_portfolio(effect_matrix, ALL_FOUR)
        for name in effect_matrix.risk_names:
            expected = effect_matrix.criticality[name] * (1 - portfolio.crr[name])
            assert portfolio.residual[name] == pytest.approx(expected, abs=1e-15)
            assert portfolio.residual[name] <= effect_matrix.criticality[name] + 1e-15

    def test_too_many_countermeasures_refused(self):
        rng = random.Random(0)
        matrix = make_effect(rng, 25, 2)
        with pytest.raises(ValueError, match="too many countermeasures"):
            optimize_portfolio(matrix, 0.1)

    def test_matches_exhaustive_search_on_random_instances(self):
        rng = random.Random(41)
        infeasible_seen = 0
        for _ in range(100):
            matrix = make_effect(rng, rng.randint(1, 7), rng.randint(1, 5))
            threshold = rng.choice([0.0, 0.3, 0.5, 0.8, 0.9])
            cutoff = rng.choice([0.0, 0.2, 0.5])
            expected = exhaustive_best(matrix, threshold, cutoff)
            if expected is None:
                infeasible_seen += 1
                with pytest.raises(InfeasiblePortfolioError):
                    optimize_portfolio(matrix, threshold, cutoff)
            else:
                assert optimize_portfolio(matrix, threshold, cutoff).selected == expected
        assert infeasible_seen > 0, "instance mix should exercise infeasibility"


class TestNormalizationInvariance:
    def test_scaling_importances_changes_no_metric(self):
        rng = random.Random(13)
        for _ in range(20):
            matrix = make_matrix(rng, rng.randint(1, 5), rng.randint(1, 4))
            k = rng.uniform(0.1, 1.0)
            scaled = RiskImpactMatrix(
                tuple(
                    SecurityObjective(o.name, o.importance * k, o.protects)
                    for o in matrix.objectives
                ),
                matrix.risks,
                matrix.impact,
            )
            base_crit, scaled_crit = risk_criticality(matrix), risk_criticality(scaled)
            base_loss, scaled_loss = loss_of_objectives(matrix), loss_of_objectives(scaled)
            for name in base_crit:
                assert scaled_crit[name] == pytest.approx(base_crit[name], abs=1e-12)
            for name in base_loss:
                assert scaled_loss[name] == pytest.approx(base_loss[name], abs=1e-12)

    def test_criticality_bounded_by_likelihood(self):
        rng = random.Random(29)
        for _ in range(30):
            matrix = make_matrix(rng, rng.randint(1, 6), rng.randint(1, 5))
            crit = risk_criticality(matrix)
            for risk in matrix.risks:
                assert 0.0 <= crit[risk.name] <= risk.likelihood + 1e-12

    def test_permuting_rows_and_columns_changes_no_value(self):
        rng = random.Random(31)
        matrix = make_matrix(rng, 5, 4)
        shuffled = RiskImpactMatrix(
            tuple(reversed(matrix.objectives)), tuple(reversed(matrix.risks)), matrix.impact
        )
        assert risk_criticality(shuffled) == pytest.approx(risk_criticality(matrix), abs=1e-12)
        assert loss_of_objectives(shuffled) == pytest.approx(loss_of_objectives(matrix), abs=1e-12)
