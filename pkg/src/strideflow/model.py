"""Core domain types for the threat-modeling pipeline.

Everything here is an immutable value: models, threats, risks, and
countermeasures are frozen dataclasses holding tuples, safe to share
between threads. The only arithmetic that lives at this layer is
security-objective weight normalization, because every downstream risk
metric depends on it.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

EXTERNAL_ENTITY = "external-entity"
PROCESS = "process"
DATA_STORE = "data-store"
DATA_FLOW = "data-flow"

ELEMENT_KINDS = (EXTERNAL_ENTITY, PROCESS, DATA_STORE)

#: Reserved bucket name for threats that cannot be attributed to an asset.
UNASSIGNED = "(unassigned)"


class StrideCategory(Enum):
    """The six threat categories and the security objective each one violates.

    Declaration order is the canonical S, T, R, I, D, E ordering used for
    sorting and report layout.
    """

    SPOOFING = ("S", "Spoofing", "Authentication")
    TAMPERING = ("T", "Tampering", "Integrity")
    REPUDIATION = ("R", "Repudiation", "Non-repudiation")
    INFORMATION_DISCLOSURE = ("I", "Information Disclosure", "Confidentiality")
    DENIAL_OF_SERVICE = ("D", "Denial of Service", "Availability")
    ELEVATION_OF_PRIVILEGE = ("E", "Elevation of Privilege", "Authorization")

    def __init__(self, tag: str, title: str, related_objective: str):
        self.tag = tag
        self.title = title
        self.related_objective = related_objective

    @property
    def order(self) -> int:
        return _CATEGORY_ORDER[self.tag]

    @classmethod
    def from_tag(cls, tag: str) -> "StrideCategory":
        try:
            return _CATEGORY_BY_TAG[tag]
        except KeyError:
            raise ValueError(f"unknown category letter {tag!r}") from None

    def __repr__(self) -> str:  # keep asserts readable
        return f"StrideCategory.{self.name}"


_CATEGORY_BY_TAG = {c.value[0]: c for c in StrideCategory}
_CATEGORY_ORDER = {c.value[0]: i for i, c in enumerate(StrideCategory)}

CATEGORY_TAGS = "STRIDE"


@dataclass(frozen=True)
class TrustBoundary:
    name: str


@dataclass(frozen=True)
class Element:
    """A DFD node: external entity, process, or data store."""

    name: str
    kind: str
    boundary: str | None = None

    def __post_init__(self):
        if self.kind not in ELEMENT_KINDS:
            raise ValueError(f"unknown element kind {self.kind!r}")
        if self.kind == EXTERNAL_ENTITY and self.boundary is not None:
            raise ValueError(
                f"external entity {self.name!r} cannot belong to a trust boundary"
            )


@dataclass(frozen=True)
class DataFlow:
    name: str
    source: str
    target: str
    carries: str | None = None

    @property
    def identity(self) -> str:
        """Stable textual identity; (name, source, target) is the unique key."""
        return f"{self.name} ({self.source} -> {self.target})"


@dataclass(frozen=True)
class Asset:
    name: str


@dataclass(frozen=True)
class SecurityObjective:
    """A weighted security objective; ``importance`` is the raw weight in (0, 1].

    Raw importances are stored as authored and normalized only at analysis
    time, so scaling every importance by the same factor never changes a
    downstream metric.
    """

    name: str
    importance: float
    protects: str | None = None

    def __post_init__(self):
        if not 0.0 < self.importance <= 1.0:
            raise ValueError(
                f"invalid importance {self.importance!r} for objective {self.name!r}"
            )


@dataclass(frozen=True)
class SystemModel:
    name: str
    boundaries: tuple[TrustBoundary, ...] = ()
    elements: tuple[Element, ...] = ()
    flows: tuple[DataFlow, ...] = ()
    assets: tuple[Asset, ...] = ()
    objectives: tuple[SecurityObjective, ...] = ()

    def element(self, name: str) -> Element | None:
        for e in self.elements:
            if e.name == name:
                return e
        return None

    def asset_names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.assets)


@dataclass(frozen=True)
class Threat:
    """One generated threat: a STRIDE category applied to an element or flow."""

    id: int
    category: StrideCategory
    subject: str
    title: str
    boundary_crossing: bool


@dataclass(frozen=True)
class Risk:
    """An attack scenario that directly realizes a STRIDE goal on an asset."""

    name: str
    likelihood: float
    category: StrideCategory
    asset: str

    def __post_init__(self):
        if not 0.0 <= self.likelihood <= 1.0:
            raise ValueError(f"risk {self.name!r} likelihood {self.likelihood!r} outside [0, 1]")


@dataclass(frozen=True)
class Countermeasure:
    name: str
    cost: float = 1.0

    def __post_init__(self):
        if self.cost < 0:
            raise ValueError(f"negative cost {self.cost!r} for countermeasure {self.name!r}")


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" or "warning"
    subject: str
    message: str

    def __str__(self) -> str:
        return f"{self.severity}: {self.subject}: {self.message}"


def normalize_weights(objectives: list[SecurityObjective] | tuple[SecurityObjective, ...]) -> list[float]:
    """Normalize raw objective importances so they sum to 1, order preserved."""
    if not objectives:
        raise ValueError("no objectives")
    for obj in objectives:
        if not 0.0 < obj.importance <= 1.0:
            raise ValueError(f"invalid importance {obj.importance!r} for objective {obj.name!r}")
    total = sum(obj.importance for obj in objectives)
    return [obj.importance / total for obj in objectives]


def validate_model(model: SystemModel) -> list[Diagnostic]:
    """Check every cross-reference and uniqueness rule of a system model.

    Returns error diagnostics for broken invariants and warning diagnostics
    for suspicious-but-legal modeling (flows that carry nothing, assets no
    objective protects, models without objectives).
    """
    out: list[Diagnostic] = []

    def error(subject: str, message: str) -> None:
        out.append(Diagnostic("error", subject, message))

    def warning(subject: str, message: str) -> None:
        out.append(Diagnostic("warning", subject, message))

    seen: set[str] = set()
    for b in model.boundaries:
        if b.name in seen:
            error(b.name, "duplicate boundary name")
        seen.add(b.name)
    boundary_names = seen

    element_names: set[str] = set()
    for e in model.elements:
        if e.name in element_names:
            error(e.name, "duplicate element name")
        element_names.add(e.name)
        if e.boundary is not None and e.boundary not in boundary_names:
            error(e.name, f"unknown boundary {e.boundary!r}")

    asset_names: set[str] = set()
    for a in model.assets:
        if a.name in asset_names:
            error(a.name, "duplicate asset name")
        asset_names.add(a.name)

    flow_keys: set[tuple[str, str, str]] = set()
    for f in model.flows:
        key = (f.name, f.source, f.target)
        if key in flow_keys:
            error(f.identity, "duplicate flow")
        flow_keys.add(key)
        if f.source not in element_names:
            error(f.identity, f"unknown element {f.source!r}")
        if f.target not in element_names:
            error(f.identity, f"unknown element {f.target!r}")
        if f.carries is None:
            warning(f.identity, "flow carries no asset")
        elif f.carries not in asset_names:
            error(f.identity, f"unknown asset {f.carries!r}")

    objective_names: set[str] = set()
    for o in model.objectives:
        if o.name in objective_names:
            error(o.name, "duplicate objective name")
        objective_names.add(o.name)
        if o.protects is not None and o.protects not in asset_names:
            error(o.name, f"unknown asset {o.protects!r}")

    protected = {o.protects for o in model.objectives if o.protects is not None}
    for a in model.assets:
        if a.name not in protected:
            warning(a.name, "asset protected by no objective")

    if not model.objectives:
        warning(model.name, "no objectives declared; risk analysis unavailable")

    return out
