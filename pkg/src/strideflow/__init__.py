"""strideflow: threat modeling and quantitative risk analysis as code.

A declarative system model (data-flow diagram plus weighted security
objectives) feeds a four-stage pipeline: STRIDE threat generation,
attack-tree exploitability analysis, risk impact analytics, and
countermeasure portfolio evaluation and optimization. See the ``cli``
module for the command-line front door and ``service`` for the local
what-if API.
"""

from .atree import (
    AttackNode,
    AttackTree,
    EvaluatedTree,
    brute_force_value,
    category_exploitability,
    evaluate,
    evaluate_forest,
    extract_risks,
)
from .ddp import (
    CategoryRollup,
    EffectivenessMatrix,
    InfeasiblePortfolioError,
    PortfolioEvaluation,
    RiskAnalysis,
    RiskImpactMatrix,
    analyze,
    combined_risk_reduction,
    evaluate_portfolio,
    loss_of_objectives,
    optimize_portfolio,
    overall_effectiveness,
    risk_criticality,
    stride_rollup,
)
from .model import (
    Asset,
    Countermeasure,
    DataFlow,
    Diagnostic,
    Element,
    Risk,
    SecurityObjective,
    StrideCategory,
    SystemModel,
    Threat,
    TrustBoundary,
    normalize_weights,
    validate_model,
)
from .textio import (
    ParseError,
    SourceSpan,
    ValidationError,
    parse_attack_trees,
    parse_effect_csv,
    parse_impact_csv,
    parse_system_model,
    serialize_attack_trees,
    serialize_effect_csv,
    serialize_impact_csv,
    serialize_system_model,
)
from .threats import (
    DEFAULT_RULES,
    RuleTable,
    ThreatSet,
    default_rules,
    generate_threats,
    load_rules,
    threats_by_asset,
)

__version__ = "0.1.0"
