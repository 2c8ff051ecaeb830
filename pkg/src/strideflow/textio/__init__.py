"""Parsers and serializers for the model DSL, tree DSL, and matrix CSVs."""

from .atd import LEVEL_VALUES, parse_attack_trees, serialize_attack_trees
from .errors import ParseError, SourceSpan, ValidationError
from .lexer import format_number
from .matrices import (
    parse_effect_csv,
    parse_impact_csv,
    parse_threat_report_csv,
    serialize_effect_csv,
    serialize_impact_csv,
    serialize_threat_report_csv,
)
from .ssm import parse_system_model, serialize_system_model

__all__ = [
    "LEVEL_VALUES",
    "ParseError",
    "SourceSpan",
    "ValidationError",
    "format_number",
    "parse_attack_trees",
    "parse_effect_csv",
    "parse_impact_csv",
    "parse_system_model",
    "parse_threat_report_csv",
    "serialize_attack_trees",
    "serialize_effect_csv",
    "serialize_impact_csv",
    "serialize_system_model",
    "serialize_threat_report_csv",
]
