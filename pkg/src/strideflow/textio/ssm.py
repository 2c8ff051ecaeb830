"""Parser and serializer for the system-model language.

Grammar::

    model := "system" STRING "{" item* "}"
    item  := "boundary" STRING
           | ("external" | "process" | "store") STRING ["in" STRING]
           | "flow" STRING "from" STRING "to" STRING ["carries" STRING]
           | "asset" STRING
           | "objective" STRING "importance" NUMBER ["protects" STRING]

Cross-references may be forward; the parsed model is fully validated and
reference errors are reported at the declaration that made them, with the
exact source position.
"""

from __future__ import annotations

from ..model import (
    Asset,
    DataFlow,
    Element,
    SecurityObjective,
    SystemModel,
    TrustBoundary,
    validate_model,
)
from .errors import SourceSpan, ValidationError
from .lexer import TokenStream, format_number, quote, tokenize

_KIND_KEYWORD = {
    "external": "external-entity",
    "process": "process",
    "store": "data-store",
}
_KEYWORD_BY_KIND = {v: k for k, v in _KIND_KEYWORD.items()}


def parse_system_model(text: str, filename: str = "<string>") -> SystemModel:
    stream = TokenStream(tokenize(text, filename))

    stream.expect_word("system")
    name = stream.expect_string("system name").text
    stream.expect_punct("{")

    boundaries: list[TrustBoundary] = []
    elements: list[Element] = []
    flows: list[DataFlow] = []
    assets: list[Asset] = []
    objectives: list[SecurityObjective] = []
    spans: dict[tuple[str, str], SourceSpan] = {}

    def remember(kind: str, key: str, span: SourceSpan) -> None:
        spans.setdefault((kind, key), span)

    while not (stream.peek().kind == "punct" and stream.peek().text == "}"):
        if stream.at_word("boundary"):
            stream.next()
            s = stream.expect_string("boundary name")
            boundaries.append(TrustBoundary(s.text))
            remember("boundary", s.text, s.span)
        elif stream.at_word("external", "process", "store"):
            kw = stream.next()
            s = stream.expect_string(f"{kw.text} name")
            boundary = None
            if stream.at_word("in"):
                in_tok = stream.next()
                boundary = stream.expect_string("boundary name").text
                if kw.text == "external":
                    raise ValidationError(
                        in_tok.span,
                        "no boundary membership for an external entity",
                        "'in'",
                    )
            elements.append(Element(s.text, _KIND_KEYWORD[kw.text], boundary))
            remember("element", s.text, s.span)
        elif stream.at_word("flow"):
            stream.next()
            s = stream.expect_string("flow name")
            stream.expect_word("from")
            src = stream.expect_string("source element name")
            stream.expect_word("to")
            dst = stream.expect_string("target element name")
            carries = None
            if stream.at_word("carries"):
                stream.next()
                carries = stream.expect_string("asset name")
            flow = DataFlow(s.text, src.text, dst.text, carries.text if carries else None)
            flows.append(flow)
            remember("flow", flow.identity, s.span)
            remember("flow-source", flow.identity, src.span)
            remember("flow-target", flow.identity, dst.span)
            if carries is not None:
                remember("flow-carries", flow.identity, carries.span)
        elif stream.at_word("asset"):
            stream.next()
            s = stream.expect_string("asset name")
            assets.append(Asset(s.text))
            remember("asset", s.text, s.span)
        elif stream.at_word("objective"):
            stream.next()
            s = stream.expect_string("objective name")
            stream.expect_word("importance")
            num_tok = stream.peek()
            importance = stream.expect_number("importance value")
            if not 0.0 < importance <= 1.0:
                raise ValidationError(num_tok.span, "importance in (0, 1]", num_tok.text)
            protects = None
            if stream.at_word("protects"):
                stream.next()
                protects = stream.expect_string("asset name")
            objectives.append(
                SecurityObjective(s.text, importance, protects.text if protects else None)
            )
            remember("objective", s.text, s.span)
            if protects is not None:
                remember("objective-protects", s.text, protects.span)
        else:
            raise stream.fail(
                "'boundary', 'external', 'process', 'store', 'flow', 'asset', 'objective' or '}'"
            )
    stream.expect_punct("}")
    stream.expect_eof()

    model = SystemModel(
        name,
        tuple(boundaries),
        tuple(elements),
        tuple(flows),
        tuple(assets),
        tuple(objectives),
    )
    _raise_validation_errors(model, spans, filename)
    return model


def _raise_validation_errors(
    model: SystemModel, spans: dict[tuple[str, str], SourceSpan], filename: str
) -> None:
    """Surface model-level errors as parse errors at the offending declaration."""
    diagnostics = [d for d in validate_model(model) if d.severity == "error"]
    if not diagnostics:
        return
    diag = diagnostics[0]
    span = None
    if diag.message.startswith("unknown element"):
        ref = diag.message.split("'")[1]
        flow = next(f for f in model.flows if f.identity == diag.subject)
        which = "flow-source" if flow.source == ref else "flow-target"
        span = spans.get((which, diag.subject))
    elif diag.message.startswith("unknown asset"):
        span = spans.get(("flow-carries", diag.subject)) or spans.get(
            ("objective-protects", diag.subject)
        )
    elif diag.message.startswith("unknown boundary"):
        span = spans.get(("element", diag.subject))
    else:
        for kind in ("boundary", "element", "flow", "asset", "objective"):
            if (kind, diag.subject) in spans:
                span = spans[(kind, diag.subject)]
                break
    if span is None:
        span = SourceSpan(filename, 1, 1)
    raise ValidationError(span, f"a valid model ({diag.message})", repr(diag.subject))


def serialize_system_model(model: SystemModel) -> str:
    """Canonical source text; parsing it back yields an equal model."""
    lines = [f"system {quote(model.name)} {{"]
    for b in model.boundaries:
        lines.append(f"  boundary {quote(b.name)}")
    for e in model.elements:
        item = f"  {_KEYWORD_BY_KIND[e.kind]} {quote(e.name)}"
        if e.boundary is not None:
            item += f" in {quote(e.boundary)}"
        lines.append(item)
    for f in model.flows:
        item = f"  flow {quote(f.name)} from {quote(f.source)} to {quote(f.target)}"
        if f.carries is not None:
            item += f" carries {quote(f.carries)}"
        lines.append(item)
    for a in model.assets:
        lines.append(f"  asset {quote(a.name)}")
    for o in model.objectives:
        item = f"  objective {quote(o.name)} importance {format_number(o.importance)}"
        if o.protects is not None:
            item += f" protects {quote(o.protects)}"
        lines.append(item)
    lines.append("}")
    return "\n".join(lines) + "\n"
