"""Rule-based STRIDE-per-element threat generation.

Each element kind maps to the categories that apply to it; every element
and flow yields one threat per applicable category. The default table is
the classic per-element mapping and can be overridden per kind from a
small CSV (``kind,categories``).
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import (
    DATA_FLOW,
    DATA_STORE,
    EXTERNAL_ENTITY,
    PROCESS,
    UNASSIGNED,
    StrideCategory,
    SystemModel,
    Threat,
)

_S = StrideCategory.SPOOFING
_T = StrideCategory.TAMPERING
_R = StrideCategory.REPUDIATION
_I = StrideCategory.INFORMATION_DISCLOSURE
_D = StrideCategory.DENIAL_OF_SERVICE
_E = StrideCategory.ELEVATION_OF_PRIVILEGE

DEFAULT_RULES = {
    EXTERNAL_ENTITY: frozenset({_S, _R}),
    PROCESS: frozenset({_S, _T, _R, _I, _D, _E}),
    DATA_STORE: frozenset({_T, _R, _I, _D}),
    DATA_FLOW: frozenset({_T, _I, _D}),
}

# Wording is mechanical on purpose so threat ids and titles are reproducible.
_PREPOSITION = {
    _S: "of",
    _T: "of",
    _R: "of",
    _I: "of",
    _D: "against",
    _E: "against",
}


@dataclass(frozen=True)
class RuleTable:
    rules: dict[str, frozenset[StrideCategory]]

    def __post_init__(self):
        for kind in DEFAULT_RULES:
            if kind not in self.rules:
                raise ValueError(f"rule table missing kind {kind!r}")
            if not self.rules[kind]:
                raise ValueError(f"empty category set for kind {kind!r}")

    def categories(self, kind: str) -> list[StrideCategory]:
        return sorted(self.rules[kind], key=lambda c: c.order)


def default_rules() -> RuleTable:
    return RuleTable(dict(DEFAULT_RULES))


def load_rules(text: str) -> RuleTable:
    """Parse rule overrides; kinds not mentioned keep their defaults."""
    rules = dict(DEFAULT_RULES)
    seen: set[str] = set()
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'kind,categories'")
        kind, letters = parts
        if kind not in DEFAULT_RULES:
            raise ValueError(f"line {lineno}: unknown kind {kind!r}")
        if kind in seen:
            raise ValueError(f"line {lineno}: duplicate kind {kind!r}")
        seen.add(kind)
        categories = set()
        for letter in letters:
            try:
                categories.add(StrideCategory.from_tag(letter))
            except ValueError:
                raise ValueError(f"line {lineno}: unknown category letter {letter!r}") from None
        if not categories:
            raise ValueError(f"line {lineno}: empty category set for kind {kind!r}")
        rules[kind] = frozenset(categories)
    return RuleTable(rules)


@dataclass(frozen=True)
class ThreatSet:
    threats: tuple[Threat, ...]
    scope: str  # "all" or "boundary"


def _crossing_flows(model: SystemModel) -> set[tuple[str, str, str]]:
    """Flows whose endpoints differ in boundary membership (none counts)."""
    membership = {e.name: e.boundary for e in model.elements}
    return {
        (f.name, f.source, f.target)
        for f in model.flows
        if membership.get(f.source) != membership.get(f.target)
    }


def generate_threats(model: SystemModel, rules: RuleTable | None = None, scope: str = "all") -> ThreatSet:
    """One threat per (subject, applicable category), deterministically ordered.

    Subjects are sorted by name, categories in S, T, R, I, D, E order, and
    ids number that sequence from 1, so identical models always produce
    identical reports. ``scope="boundary"`` keeps only threats on
    boundary-crossing flows and on elements incident to one.
    """
    if scope not in ("all", "boundary"):
        raise ValueError(f"unknown scope {scope!r}")
    table = rules if rules is not None else default_rules()

    crossing = _crossing_flows(model)
    touched: set[str] = set()
    for name, source, target in crossing:
        touched.add(source)
        touched.add(target)

    subjects: list[tuple[str, str, bool]] = []  # (subject, kind, crossing)
    for e in model.elements:
        subjects.append((e.name, e.kind, e.name in touched))
    for f in model.flows:
        subjects.append((f.identity, DATA_FLOW, (f.name, f.source, f.target) in crossing))
    subjects.sort(key=lambda s: s[0])

    threats: list[Threat] = []
    next_id = 1
    for subject, kind, crosses in subjects:
        for category in table.categories(kind):
            threats.append(
                Threat(
                    id=next_id,
                    category=category,
                    subject=subject,
                    title=f"{category.title} {_PREPOSITION[category]} {subject}",
                    boundary_crossing=crosses,
                )
            )
            next_id += 1
    if scope == "boundary":
        threats = [t for t in threats if t.boundary_crossing]
    return ThreatSet(tuple(threats), scope)


def threats_by_asset(threatset: ThreatSet, model: SystemModel) -> dict[str, list[Threat]]:
    """Bucket threats under the assets they can reach.

    A flow threat lands on the asset the flow carries; an element threat
    lands on every asset carried by a flow incident to the element. Threats
    with no reachable asset land under the reserved ``(unassigned)`` key.
    """
    flow_assets = {f.identity: f.carries for f in model.flows}
    element_assets: dict[str, set[str]] = {e.name: set() for e in model.elements}
    for f in model.flows:
        if f.carries is None:
            continue
        for endpoint in (f.source, f.target):
            if endpoint in element_assets:
                element_assets[endpoint].add(f.carries)

    buckets: dict[str, list[Threat]] = {name: [] for name in sorted(model.asset_names())}
    unassigned: list[Threat] = []
    for threat in threatset.threats:
        if threat.subject in flow_assets:
            carried = flow_assets[threat.subject]
            if carried is None:
                unassigned.append(threat)
            else:
                buckets[carried].append(threat)
        else:
            reachable = sorted(element_assets.get(threat.subject, ()))
            if not reachable:
                unassigned.append(threat)
            for name in reachable:
                buckets[name].append(threat)
    if unassigned:
        buckets[UNASSIGNED] = unassigned
    return buckets
