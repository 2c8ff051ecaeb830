from __future__ import annotations

from pathlib import Path

import pytest

from strideflow import (
    analyze,
    evaluate_forest,
    extract_risks,
    parse_attack_trees,
    parse_effect_csv,
    parse_impact_csv,
    parse_system_model,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

MODEL_PATH = FIXTURES / "ois.ssm"
TREE_PATH = FIXTURES / "tampering.atd"
IMPACT_PATH = FIXTURES / "impact_tampering.csv"
EFFECT_PATH = FIXTURES / "effect_tampering.csv"


@pytest.fixture(scope="session")
def ois_model():
    return parse_system_model(MODEL_PATH.read_text(encoding="utf-8"), str(MODEL_PATH))


@pytest.fixture(scope="session")
def tampering_forest():
    return parse_attack_trees(TREE_PATH.read_text(encoding="utf-8"), str(TREE_PATH))


@pytest.fixture(scope="session")
def evaluated_forest(tampering_forest):
    return evaluate_forest(tampering_forest)


@pytest.fixture(scope="session")
def tampering_risks(evaluated_forest):
    return extract_risks(evaluated_forest)


@pytest.fixture(scope="session")
def impact_matrix(ois_model, tampering_risks):
    return parse_impact_csv(
        IMPACT_PATH.read_text(encoding="utf-8"), ois_model, tampering_risks, str(IMPACT_PATH)
    )


@pytest.fixture(scope="session")
def risk_analysis(impact_matrix):
    return analyze(impact_matrix)


@pytest.fixture(scope="session")
def effect_matrix(impact_matrix):
    return parse_effect_csv(
        EFFECT_PATH.read_text(encoding="utf-8"), impact_matrix.risks, None, str(EFFECT_PATH)
    )
