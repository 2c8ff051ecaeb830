"""Quantitative attack-tree evaluation.

Exploitability propagates bottom-up: an AND gate succeeds with the product
of its children's success probabilities, an OR gate with the complement of
the product of their failure probabilities. Leaves are treated as
statistically independent attacker actions; a shared sub-event must be
modeled as a single leaf.

``brute_force_value`` is an intentionally naive oracle that enumerates all
leaf outcome vectors; it exists so the fast evaluator can be checked
against an independent computation.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import Risk, StrideCategory

LEAF = "leaf"
AND = "and"
OR = "or"

BRUTE_FORCE_LEAF_LIMIT = 20


@dataclass(frozen=True)
class AttackNode:
    name: str
    kind: str  # "leaf", "and", "or"
    category: StrideCategory | None = None
    is_risk: bool = False
    leaf_value: float | None = None  # leaves only
    children: tuple["AttackNode", ...] = ()

    def __post_init__(self):
        if self.kind == LEAF:
            if self.children:
                raise ValueError(f"leaf {self.name!r} cannot have children")
            if self.leaf_value is None or not 0.0 <= self.leaf_value <= 1.0:
                raise ValueError(f"leaf {self.name!r} value {self.leaf_value!r} outside [0, 1]")
        elif self.kind in (AND, OR):
            if not self.children:
                raise ValueError(f"empty gate {self.name!r}")
            if self.leaf_value is not None:
                raise ValueError(f"gate {self.name!r} cannot carry a leaf value")
        else:
            raise ValueError(f"unknown node kind {self.kind!r}")
        if self.is_risk and not self.name:
            raise ValueError("risk node requires a name")

    def walk(self):
        """Yield this node and all descendants in document (pre-) order."""
        yield self
        for child in self.children:
            yield from child.walk()


@dataclass(frozen=True)
class AttackTree:
    goal: str
    asset: str
    root: AttackNode

    def leaves(self) -> list[AttackNode]:
        return [n for n in self.root.walk() if n.kind == LEAF]


@dataclass(frozen=True)
class EvaluatedTree:
    """A tree plus the exploitability of every node.

    Nodes compare structurally, and a node's value is a function of its
    subtree alone, so structurally equal nodes sharing a map slot is sound.
    """

    tree: AttackTree
    values: dict[AttackNode, float]

    @property
    def root_value(self) -> float:
        return self.values[self.tree.root]


def evaluate(tree: AttackTree) -> EvaluatedTree:
    """Single bottom-up pass assigning every node its success probability."""
    values: dict[AttackNode, float] = {}

    def visit(node: AttackNode) -> float:
        if node.kind == LEAF:
            value = node.leaf_value
        elif node.kind == AND:
            value = 1.0
            for child in node.children:
                value *= visit(child)
        else:
            failure = 1.0
            for child in node.children:
                failure *= 1.0 - visit(child)
            value = 1.0 - failure
        values[node] = value
        return value

    visit(tree.root)
    return EvaluatedTree(tree, values)


def evaluate_forest(forest: list[AttackTree] | tuple[AttackTree, ...]) -> list[EvaluatedTree]:
    return [evaluate(t) for t in forest]


def category_exploitability(
    forest: list[EvaluatedTree], asset: str, category: StrideCategory
) -> float | None:
    """Value of the category-tagged subgoal for ``asset``, or None when absent."""
    hits: list[float] = []
    for ev in forest:
        if ev.tree.asset != asset:
            continue
        for node in ev.tree.root.walk():
            if node.category is category:
                hits.append(ev.values[node])
    if not hits:
        return None
    if len(hits) > 1:
        raise ValueError(
            f"ambiguous category subgoal: {len(hits)} nodes tagged {category.tag} "
            f"for asset {asset!r}"
        )
    return hits[0]


def extract_risks(forest: list[EvaluatedTree]) -> list[Risk]:
    """One risk per risk-tagged node, in document order.

    A risk's likelihood is the node's evaluated value and its category is the
    node's own tag or the nearest tagged ancestor.
    """
    risks: list[Risk] = []
    for ev in forest:

        def visit(node: AttackNode, inherited: StrideCategory | None) -> None:
            category = node.category if node.category is not None else inherited
            if node.is_risk:
                if category is None:
                    raise ValueError(f"uncategorized risk {node.name!r}")
                risks.append(Risk(node.name, ev.values[node], category, ev.tree.asset))
            for child in node.children:
                visit(child, category)

        visit(ev.tree.root, None)
    return risks


def brute_force_value(tree: AttackTree) -> float:
    """Root success probability by exhaustive enumeration of leaf outcomes.

    Exponential by design; refuses trees with more than
    ``BRUTE_FORCE_LEAF_LIMIT`` leaves.
    """
    leaves = tree.leaves()
    n = len(leaves)
    if n > BRUTE_FORCE_LEAF_LIMIT:
        raise ValueError(f"too many leaves for brute force ({n} > {BRUTE_FORCE_LEAF_LIMIT})")
    probs = [leaf.leaf_value for leaf in leaves]

    def succeeds(node: AttackNode, outcomes: list[bool], cursor: list[int]) -> bool:
        if node.kind == LEAF:
            result = outcomes[cursor[0]]
            cursor[0] += 1
            return result
        # No short-circuiting: the cursor must advance past every leaf.
        if node.kind == AND:
            result = True
            for child in node.children:
                result = succeeds(child, outcomes, cursor) and result
            return result
        result = False
        for child in node.children:
            result = succeeds(child, outcomes, cursor) or result
        return result

    total = 0.0
    for mask in range(1 << n):
        outcomes = [bool(mask >> i & 1) for i in range(n)]
        weight = 1.0
        for p, ok in zip(probs, outcomes):
            weight *= p if ok else 1.0 - p
        if weight == 0.0:
            continue
        if succeeds(tree.root, outcomes, [0]):
            total += weight
    return total
