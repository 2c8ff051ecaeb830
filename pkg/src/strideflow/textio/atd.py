"""Parser and serializer for the attack-tree language.

Grammar::

    forest := tree+
    tree   := "tree" STRING "asset" STRING "{" node "}"
    node   := gate | leaf
    gate   := ("or" | "and") [STRING] ["category" LETTER] ["risk"] "{" node+ "}"
    leaf   := "leaf" STRING ("low" | "moderate" | "high" | NUMBER) ["risk"]

Named likelihood levels map to 0.1 / 0.5 / 0.9. A leaf holding exactly one
of those values serializes back to its level name; any other value in
[0, 1] serializes as a number.
"""

from __future__ import annotations

from ..atree import AttackNode, AttackTree
from ..model import StrideCategory
from .errors import ValidationError
from .lexer import NUMBER, TokenStream, format_number, quote, tokenize

LEVEL_VALUES = {"low": 0.1, "moderate": 0.5, "high": 0.9}
_LEVEL_NAMES = {v: k for k, v in LEVEL_VALUES.items()}


def parse_attack_trees(text: str, filename: str = "<string>") -> list[AttackTree]:
    stream = TokenStream(tokenize(text, filename))
    trees: list[AttackTree] = []
    risk_names: dict[str, str] = {}  # risk name -> tree goal, for duplicate reporting

    if not stream.at_word("tree"):
        raise stream.fail("'tree'")
    while stream.at_word("tree"):
        trees.append(_parse_tree(stream, risk_names))
    stream.expect_eof()
    return trees


def _parse_tree(stream: TokenStream, risk_names: dict[str, str]) -> AttackTree:
    stream.expect_word("tree")
    goal = stream.expect_string("tree goal").text
    stream.expect_word("asset")
    asset = stream.expect_string("asset name").text
    stream.expect_punct("{")
    root = _parse_node(stream, goal, risk_names)
    stream.expect_punct("}")
    return AttackTree(goal, asset, root)


def _parse_node(stream: TokenStream, goal: str, risk_names: dict[str, str]) -> AttackNode:
    if stream.at_word("leaf"):
        return _parse_leaf(stream, goal, risk_names)
    if stream.at_word("or", "and"):
        return _parse_gate(stream, goal, risk_names)
    raise stream.fail("'or', 'and' or 'leaf'")


def _parse_gate(stream: TokenStream, goal: str, risk_names: dict[str, str]) -> AttackNode:
    kind_tok = stream.next()
    name = ""
    if stream.peek().kind == "string":
        name = stream.next().text
    category = None
    if stream.at_word("category"):
        stream.next()
        letter = stream.peek()
        if letter.kind != "word" or letter.text not in "STRIDE" or len(letter.text) != 1:
            raise stream.fail("category letter S, T, R, I, D or E")
        stream.next()
        category = StrideCategory.from_tag(letter.text)
    is_risk = False
    if stream.at_word("risk"):
        risk_tok = stream.next()
        is_risk = True
        if not name:
            raise ValidationError(risk_tok.span, "a name on this risk gate", "'risk'")
        _claim_risk_name(name, goal, risk_names, risk_tok)
    open_tok = stream.expect_punct("{")
    children: list[AttackNode] = []
    while not (stream.peek().kind == "punct" and stream.peek().text == "}"):
        children.append(_parse_node(stream, goal, risk_names))
    stream.expect_punct("}")
    if not children:
        raise ValidationError(open_tok.span, "at least one child node", "empty gate")
    return AttackNode(
        name=name,
        kind=kind_tok.text,
        category=category,
        is_risk=is_risk,
        children=tuple(children),
    )


def _parse_leaf(stream: TokenStream, goal: str, risk_names: dict[str, str]) -> AttackNode:
    stream.expect_word("leaf")
    name = stream.expect_string("leaf name").text
    tok = stream.peek()
    if tok.kind == NUMBER:
        stream.next()
        value = float(tok.text)
        if not 0.0 <= value <= 1.0:
            raise ValidationError(tok.span, "leaf value in [0, 1]", tok.text)
    elif stream.at_word(*LEVEL_VALUES):
        stream.next()
        value = LEVEL_VALUES[tok.text]
    else:
        raise stream.fail("'low', 'moderate', 'high' or a number")
    is_risk = False
    if stream.at_word("risk"):
        risk_tok = stream.next()
        if not name:
            raise ValidationError(risk_tok.span, "a name on this risk leaf", "'risk'")
        is_risk = True
        _claim_risk_name(name, goal, risk_names, risk_tok)
    return AttackNode(name=name, kind="leaf", leaf_value=value, is_risk=is_risk)


def _claim_risk_name(name: str, goal: str, risk_names: dict[str, str], tok) -> None:
    if name in risk_names:
        raise ValidationError(
            tok.span,
            "a unique risk name across the forest",
            f"duplicate risk name {name!r} (first used in tree {risk_names[name]!r})",
        )
    risk_names[name] = goal


def serialize_attack_trees(forest: list[AttackTree] | tuple[AttackTree, ...]) -> str:
    lines: list[str] = []
    for tree in forest:
        lines.append(f"tree {quote(tree.goal)} asset {quote(tree.asset)} {{")
        _emit_node(tree.root, 1, lines)
        lines.append("}")
    return "\n".join(lines) + "\n"


def _emit_node(node: AttackNode, depth: int, lines: list[str]) -> None:
    pad = "  " * depth
    if node.kind == "leaf":
        if node.category is not None:
            # only gates can carry a category tag in the grammar; dropping
            # the tag silently would make serialization lossy
            raise ValueError(
                f"leaf {node.name!r} carries a category tag the tree grammar cannot express"
            )
        value = _LEVEL_NAMES.get(node.leaf_value, None)
        rendered = value if value is not None else format_number(node.leaf_value)
        line = f"{pad}leaf {quote(node.name)} {rendered}"
        if node.is_risk:
            line += " risk"
        lines.append(line)
        return
    head = f"{pad}{node.kind}"
    if node.name:
        head += f" {quote(node.name)}"
    if node.category is not None:
        head += f" category {node.category.tag}"
    if node.is_risk:
        head += " risk"
    lines.append(head + " {")
    for child in node.children:
        _emit_node(child, depth + 1, lines)
    lines.append(pad + "}")
