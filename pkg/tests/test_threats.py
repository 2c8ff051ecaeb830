from __future__ import annotations

import random

import pytest

from strideflow import (
    DataFlow,
    Element,
    StrideCategory,
    SystemModel,
    TrustBoundary,
    default_rules,
    generate_threats,
    load_rules,
    threats_by_asset,
)
from strideflow.model import Asset, UNASSIGNED

# Counted once by running the generator on the frozen OIS fixture; the totals
# also follow from the rule table by hand: 4 externals x 2 + 2 processes x 6 +
# 2 stores x 4 + 13 flows x 3 = 67, of which 7 crossing flows and 6 elements
# incident to them survive the boundary filter (21 + 22 = 43).
OIS_THREATS_ALL = 67
OIS_THREATS_BOUNDARY = 43


class TestLoadRules:
    def test_full_category_string(self):
        rules = load_rules("process,STRIDE")
        assert rules.rules["process"] == frozenset(StrideCategory)

    def test_default_restated(self):
        rules = load_rules("data-flow,TID")
        assert rules.rules["data-flow"] == default_rules().rules["data-flow"]

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError, match="unknown kind 'widget'"):
            load_rules("widget,S")

    def test_unknown_letter_rejected(self):
        with pytest.raises(ValueError, match="unknown category letter"):
            load_rules("process,SX")

    def test_duplicate_kind_rejected(self):
        with pytest.raises(ValueError, match="duplicate kind"):
            load_rules("process,S\nprocess,T")

    def test_unmentioned_kinds_keep_defaults(self):
        rules = load_rules("external-entity,STRIDE")
        assert rules.rules["process"] == default_rules().rules["process"]


class TestGenerateThreats:
    def test_single_process_yields_one_threat_per_category(self):
        model = SystemModel("m", elements=(Element("P", "process"),))
        threats = generate_threats(model).threats
        assert len(threats) == 6
        assert [t.category.tag for t in threats] == list("STRIDE")
        assert [t.id for t in threats] == [1, 2, 3, 4, 5, 6]

    def test_single_external_entity_yields_spoofing_and_repudiation(self):
        model = SystemModel("m", elements=(Element("X", "external-entity"),))
        threats = generate_threats(model).threats
        assert [(t.category.tag, t.subject) for t in threats] == [("S", "X"), ("R", "X")]

    def test_ois_fixture_counts_frozen(self, ois_model):
        assert len(generate_threats(ois_model, scope="all").threats) == OIS_THREATS_ALL
        assert len(generate_threats(ois_model, scope="boundary").threats) == OIS_THREATS_BOUNDARY

    def test_boundary_scope_keeps_crossing_flow_threats(self, ois_model):
        threats = generate_threats(ois_model, scope="boundary").threats
        assert threats, "fixture has boundary-crossing flows"
        assert all(t.boundary_crossing for t in threats)
        submit = [t for t in threats if t.subject.startswith("Submit User Information (")]
        assert [t.category.tag for t in submit] == ["T", "I", "D"]

    def test_membership_versus_none_counts_as_crossing(self):
        model = SystemModel(
            "m",
            boundaries=(TrustBoundary("B"),),
            elements=(Element("In", "process", "B"), Element("Out", "process")),
            flows=(DataFlow("F", "Out", "In"),),
        )
        threats = generate_threats(model, scope="boundary").threats
        subjects = {t.subject for t in threats}
        assert "F (Out -> In)" in subjects
        assert {"In", "Out"} <= subjects  # incident elements are in scope too

    def test_titles_are_category_of_or_against_subject(self):
        model = SystemModel("m", elements=(Element("P", "process"),))
        titles = [t.title for t in generate_threats(model).threats]
        assert "Spoofing of P" in titles
        assert "Denial of Service against P" in titles

    def test_output_independent_of_declaration_order(self):
        a = Element("A", "process")
        b = Element("B", "data-store")
        flow = DataFlow("F", "A", "B", None)
        forward = generate_threats(SystemModel("m", elements=(a, b), flows=(flow,)))
        reversed_ = generate_threats(SystemModel("m", elements=(b, a), flows=(flow,)))
        assert forward == reversed_

    def test_boundary_scope_never_exceeds_all(self, ois_model):
        assert OIS_THREATS_BOUNDARY <= OIS_THREATS_ALL

    def test_ids_survive_a_serialization_round_trip(self, ois_model):
        from strideflow import parse_system_model, serialize_system_model

        reparsed = parse_system_model(serialize_system_model(ois_model))
        assert generate_threats(reparsed) == generate_threats(ois_model)


def test_threat_count_matches_rule_table_formula_on_random_models():
    rng = random.Random(7)
    rules = default_rules()
    sizes = {"external-entity": 2, "process": 6, "data-store": 4}
    for _ in range(50):
        elements = tuple(
            Element(f"e{i}", rng.choice(list(sizes)))
            for i in range(rng.randint(1, 10))
        )
        flows = tuple(
            DataFlow(f"f{i}", rng.choice(elements).name, rng.choice(elements).name)
            for i in range(rng.randint(0, 10))
        )
        model = SystemModel("m", elements=elements, flows=flows)
        expected = sum(sizes[e.kind] for e in elements) + 3 * len(flows)
        assert len(generate_threats(model).threats) == expected


class TestThreatsByAsset:
    def test_flow_threats_attach_to_carried_asset(self):
        model = SystemModel(
            "m",
            elements=(Element("P", "process"), Element("Q", "process")),
            flows=(DataFlow("F", "P", "Q", "A"),),
            assets=(Asset("A"),),
        )
        buckets = threats_by_asset(generate_threats(model), model)
        flow_subject = "F (P -> Q)"
        assert any(t.subject == flow_subject for t in buckets["A"])

    def test_isolated_element_threats_land_unassigned(self):
        model = SystemModel("m", elements=(Element("P", "process"),), assets=(Asset("A"),))
        buckets = threats_by_asset(generate_threats(model), model)
        assert buckets["A"] == []
        assert len(buckets[UNASSIGNED]) == 6

    def test_fixture_immunization_bucket_covers_every_applicable_category(self, ois_model):
        buckets = threats_by_asset(generate_threats(ois_model), ois_model)
        categories = {t.category.tag for t in buckets["Immunization Records"]}
        assert categories == set("STRIDE")
