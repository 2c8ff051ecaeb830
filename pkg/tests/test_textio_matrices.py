from __future__ import annotations

import pytest

from strideflow import (
    ParseError,
    Risk,
    SecurityObjective,
    StrideCategory,
    SystemModel,
    parse_effect_csv,
    parse_impact_csv,
)
from strideflow.model import Asset
from strideflow.textio import (
    parse_threat_report_csv,
    serialize_effect_csv,
    serialize_impact_csv,
    serialize_threat_report_csv,
)

T = StrideCategory.TAMPERING


def tiny_model(n_objectives=2):
    return SystemModel(
        "m",
        assets=(Asset("A"),),
        objectives=tuple(
            SecurityObjective(f"o{i}", 1.0, "A" if i == 0 else None) for i in range(n_objectives)
        ),
    )


def tiny_risks():
    return [Risk("r1", 0.5, T, "A"), Risk("r2", 0.9, T, "A")]


class TestImpactCsv:
    def test_table_fixture_cells_as_printed(self, impact_matrix):
        cell = impact_matrix.impact[
            ("Perform SQL Injection Attacks", "Protecting the (User) Immunization Records")
        ]
        assert cell == 0.5
        assert impact_matrix.impact[("Modify PHI at Rest", "Protecting the User Records")] == 1.0
        assert impact_matrix.impact[
            ("Overlap Data in OIS Memory", "Protecting the User Information")
        ] == 1.0
        assert len(impact_matrix.risks) == 7
        assert len(impact_matrix.objectives) == 5
        assert [r.likelihood for r in impact_matrix.risks] == [0.81, 0.1, 0.1, 0.19, 0.1, 0.5, 0.5]

    def test_all_zero_matrix_is_valid(self):
        text = "objective,r1,r2\no0,0,0\no1,0,0\n"
        matrix = parse_impact_csv(text, tiny_model(), tiny_risks())
        assert all(v == 0.0 for v in matrix.impact.values())

    def test_cell_out_of_range_names_the_cell(self):
        text = "objective,r1,r2\no0,0,1.5\no1,0,0\n"
        with pytest.raises(ParseError) as err:
            parse_impact_csv(text, tiny_model(), tiny_risks())
        assert "'r2'" in err.value.expected and "'o0'" in err.value.expected

    def test_unknown_objective_rejected(self):
        text = "objective,r1,r2\nmystery,0,0\no1,0,0\n"
        with pytest.raises(ParseError, match="unknown objective"):
            parse_impact_csv(text, tiny_model(), tiny_risks())

    def test_unknown_risk_without_declarations_rejected(self):
        text = "objective,r1,rX\no0,0,0\no1,0,0\n"
        with pytest.raises(ParseError, match="unknown risk"):
            parse_impact_csv(text, tiny_model(), tiny_risks())

    def test_missing_objective_row_rejected(self):
        text = "objective,r1,r2\no0,0,0\n"
        with pytest.raises(ParseError, match="every model objective"):
            parse_impact_csv(text, tiny_model(), tiny_risks())

    def test_duplicate_rows_rejected(self):
        text = "objective,r1,r2\no0,0,0\no0,0,0\no1,0,0\n"
        with pytest.raises(ParseError, match="unique objective row"):
            parse_impact_csv(text, tiny_model(), tiny_risks())

    def test_duplicate_columns_rejected(self):
        text = "objective,r1,r1\no0,0,0\no1,0,0\n"
        with pytest.raises(ParseError, match="unique risk column"):
            parse_impact_csv(text, tiny_model(), tiny_risks())

    def test_likelihood_row_overrides_tree_values(self):
        text = "objective,r1,r2\n@likelihood,0.25,\no0,0,0\no1,0,0\n"
        matrix = parse_impact_csv(text, tiny_model(), tiny_risks())
        assert matrix.risks[0].likelihood == 0.25
        assert matrix.risks[1].likelihood == 0.9  # empty cell keeps the tree value

    def test_extra_column_declared_inline(self):
        text = (
            "objective,r1,extra\n"
            "@likelihood,,0.4\n@category,,D\n@asset,,A\n"
            "o0,0,1\no1,0,0\n"
        )
        matrix = parse_impact_csv(text, tiny_model(), tiny_risks()[:1])
        extra = matrix.risks[1]
        assert extra.name == "extra"
        assert extra.likelihood == 0.4
        assert extra.category is StrideCategory.DENIAL_OF_SERVICE
        assert extra.asset == "A"

    def test_category_row_must_agree_with_tree(self):
        text = "objective,r1,r2\n@category,D,\no0,0,0\no1,0,0\n"
        with pytest.raises(ParseError, match="from the attack tree"):
            parse_impact_csv(text, tiny_model(), tiny_risks())

    def test_stale_derived_criticality_rejected(self):
        text = "objective,r1,r2\n@criticality,0.9,0.9\no0,0,0\no1,0,0\n"
        with pytest.raises(ParseError, match="recomputed"):
            parse_impact_csv(text, tiny_model(), tiny_risks())

    def test_serialized_form_reparses_and_is_canonical(self, impact_matrix, ois_model, tampering_risks):
        once = serialize_impact_csv(impact_matrix)
        again = parse_impact_csv(once, ois_model, tampering_risks)
        assert again == impact_matrix
        assert serialize_impact_csv(again) == once


class TestEffectCsv:
    def test_table_fixture_cells_as_printed(self, effect_matrix):
        assert effect_matrix.reduction[("Use cryptography", "Modify PHI at Rest")] == 0.8
        assert effect_matrix.reduction[
            ("Use appropriate access control mechanisms", "Overlap Data in OIS Memory")
        ] == 0.8
        assert len(effect_matrix.countermeasures) == 4
        assert len(effect_matrix.risk_names) == 7
        assert [cm.cost for cm in effect_matrix.countermeasures] == [1.0] * 4

    def test_all_zero_row_is_a_valid_useless_countermeasure(self):
        text = "countermeasure,cost,r1\nnothing,1,0\n"
        matrix = parse_effect_csv(text)
        assert matrix.reduction[("nothing", "r1")] == 0.0

    def test_negative_cost_rejected(self):
        text = "countermeasure,cost,r1\ncm,-1,0.5\n"
        with pytest.raises(ParseError, match="negative cost"):
            parse_effect_csv(text)

    def test_reduction_out_of_range_rejected(self):
        text = "countermeasure,cost,r1\ncm,1,1.2\n"
        with pytest.raises(ParseError, match=r"in \[0, 1\]"):
            parse_effect_csv(text)

    def test_unknown_risk_column_rejected_when_risks_given(self):
        text = "countermeasure,cost,rX\ncm,1,0.5\n"
        with pytest.raises(ParseError, match="unknown risk"):
            parse_effect_csv(text, tiny_risks())

    def test_duplicate_countermeasure_rejected(self):
        text = "countermeasure,cost,r1\ncm,1,0.5\ncm,1,0.5\n"
        with pytest.raises(ParseError, match="unique countermeasure"):
            parse_effect_csv(text)

    def test_criticality_row_populates_matrix(self, effect_matrix):
        assert effect_matrix.criticality["Perform SQL Injection Attacks"] == pytest.approx(
            0.81 * 2 / 7, abs=1e-12
        )

    def test_criticality_argument_is_fallback_only(self):
        text = "countermeasure,cost,r1,r2\n@criticality,,0.4,\ncm,1,0.5,0.5\n"
        matrix = parse_effect_csv(text, criticality={"r1": 0.1, "r2": 0.2})
        assert matrix.criticality == {"r1": 0.4, "r2": 0.2}

    def test_serialized_form_reparses_and_is_canonical(self, effect_matrix):
        once = serialize_effect_csv(effect_matrix)
        again = parse_effect_csv(once)
        assert again.countermeasures == effect_matrix.countermeasures
        assert again.reduction == effect_matrix.reduction
        assert again.criticality == effect_matrix.criticality
        assert serialize_effect_csv(again) == once


class TestThreatReportCsv:
    def test_round_trip(self, ois_model):
        from strideflow import generate_threats

        threats = generate_threats(ois_model).threats
        text = serialize_threat_report_csv(threats, "all")
        assert list(parse_threat_report_csv(text)) == list(threats)


class TestCsvSafetyGuards:
    def test_names_that_cannot_round_trip_are_refused(self):
        from strideflow import Countermeasure, EffectivenessMatrix

        matrix = EffectivenessMatrix(
            (Countermeasure("safe", 1.0),), ("a,b",), {"a,b": 0.0}, {("safe", "a,b"): 0.0}
        )
        with pytest.raises(ValueError, match="comma"):
            serialize_effect_csv(matrix)
        padded = EffectivenessMatrix(
            (Countermeasure(" padded ", 1.0),), ("r",), {"r": 0.0}, {(" padded ", "r"): 0.0}
        )
        with pytest.raises(ValueError, match="whitespace"):
            serialize_effect_csv(padded)
        reserved = EffectivenessMatrix(
            (Countermeasure("@odd", 1.0),), ("r",), {"r": 0.0}, {("@odd", "r"): 0.0}
        )
        with pytest.raises(ValueError, match="reserved"):
            serialize_effect_csv(reserved)
