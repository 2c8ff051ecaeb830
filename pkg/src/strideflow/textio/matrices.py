"""CSV formats for the two DDP matrices.

Both dialects are plain comma-separated UTF-8 with an LF canonical form:
first row is the header, cells are trimmed of surrounding whitespace, no
quoting (matrix names must not contain commas), and ``#`` starts a comment
line.

Risk impact matrix::

    objective,<risk name>,...
    @likelihood,<value>,...        # optional; overrides tree-derived values
    @category,<letter>,...         # optional; required for columns with no tree risk
    @asset,<asset name>,...        # optional; required for columns with no tree risk
    @criticality,<value>,...       # derived annotation, verified on input
    <objective name>,<impact>,...  # one row per model objective, impacts in [0,1]

An optional trailing ``loss`` column on the header adds a derived
per-objective loss cell to each row; like ``@criticality`` it is verified
against recomputation so stale analysis values cannot circulate.

Countermeasure effectiveness matrix::

    countermeasure,cost,<risk name>,...
    @criticality,,<value>,...          # per-risk criticality input
    <countermeasure>,<cost>,<reduction in [0,1]>,...
"""

from __future__ import annotations

from dataclasses import dataclass

from ..ddp import EffectivenessMatrix, RiskImpactMatrix, loss_of_objectives, risk_criticality
from ..model import Countermeasure, Risk, StrideCategory, SystemModel, Threat
from .errors import ParseError, SourceSpan, ValidationError
from .lexer import format_number

_DERIVED_TOLERANCE = 1e-9


@dataclass(frozen=True)
class _Cell:
    text: str
    span: SourceSpan


def _csv_cell(value: str, what: str) -> str:
    """The dialect has no quoting, so a name that cannot survive the
    round-trip (commas, newlines, surrounding whitespace, or the reserved
    ``@`` prefix) is refused rather than silently corrupted."""
    if not value:
        raise ValueError(f"{what} cannot be empty in CSV output")
    if "," in value or "\n" in value:
        raise ValueError(f"{what} {value!r} cannot be written to CSV: contains a comma or newline")
    if value != value.strip():
        raise ValueError(f"{what} {value!r} cannot be written to CSV: surrounding whitespace")
    if value.startswith("@") or value.startswith("#"):
        raise ValueError(f"{what} {value!r} cannot be written to CSV: reserved prefix")
    return value


def _read_rows(text: str, filename: str) -> list[list[_Cell]]:
    rows: list[list[_Cell]] = []
    for lineno, raw in enumerate(text.split("\n"), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        cells: list[_Cell] = []
        col = 1
        for piece in raw.split(","):
            lead = len(piece) - len(piece.lstrip())
            cells.append(_Cell(piece.strip(), SourceSpan(filename, lineno, col + lead)))
            col += len(piece) + 1
        rows.append(cells)
    return rows


def _parse_unit_value(cell: _Cell, what: str) -> float:
    try:
        value = float(cell.text)
    except ValueError:
        raise ParseError(cell.span, f"a number for {what}", repr(cell.text)) from None
    if not 0.0 <= value <= 1.0:
        raise ValidationError(cell.span, f"{what} in [0, 1]", cell.text)
    return value


def _check_width(row: list[_Cell], expected: int, filename: str) -> None:
    if len(row) != expected:
        raise ParseError(
            row[0].span, f"{expected} cells in this row", f"{len(row)} cells"
        )


def parse_impact_csv(
    text: str,
    model: SystemModel,
    risks: list[Risk] | tuple[Risk, ...],
    filename: str = "<string>",
) -> RiskImpactMatrix:
    """Parse a risk impact matrix against a model and the tree-derived risks.

    Columns that do not name a known risk declare scenarios analyzed outside
    the parsed trees; they need ``@likelihood``, ``@category`` and ``@asset``
    cells to stand alone.
    """
    rows = _read_rows(text, filename)
    if not rows:
        raise ParseError(SourceSpan(filename, 1, 1), "a header row", "end of input")
    header = rows[0]
    if header[0].text != "objective":
        raise ParseError(header[0].span, "'objective' in the header", repr(header[0].text))

    has_loss_column = len(header) > 1 and header[-1].text == "loss"
    risk_cells = header[1 : -1 if has_loss_column else len(header)]
    risk_names = [c.text for c in risk_cells]
    for i, cell in enumerate(risk_cells):
        if cell.text in risk_names[:i]:
            raise ValidationError(cell.span, "a unique risk column", f"duplicate {cell.text!r}")
    known = {r.name: r for r in risks}
    width = len(header)
    body_width = 1 + len(risk_names)  # @-rows never carry the loss column

    special: dict[str, list[_Cell]] = {}
    body: list[list[_Cell]] = []
    for row in rows[1:]:
        if row[0].text.startswith("@"):
            key = row[0].text
            if key not in ("@likelihood", "@category", "@asset", "@criticality"):
                raise ParseError(row[0].span, "a known @-row", repr(key))
            if key in special:
                raise ParseError(row[0].span, "a single @-row per kind", f"duplicate {key}")
            _check_width(row, body_width, filename)
            special[key] = row[1:]
        else:
            body.append(row)

    resolved: list[Risk] = []
    for i, cell in enumerate(risk_cells):
        base = known.get(cell.text)
        likelihood = base.likelihood if base else None
        category = base.category if base else None
        asset = base.asset if base else None
        if "@likelihood" in special and special["@likelihood"][i].text:
            likelihood = _parse_unit_value(special["@likelihood"][i], "likelihood")
        if "@category" in special and special["@category"][i].text:
            letter_cell = special["@category"][i]
            try:
                declared = StrideCategory.from_tag(letter_cell.text)
            except ValueError:
                raise ValidationError(
                    letter_cell.span, "category letter S, T, R, I, D or E", repr(letter_cell.text)
                ) from None
            if base is not None and declared is not base.category:
                raise ValidationError(
                    letter_cell.span,
                    f"category {base.category.tag} (from the attack tree)",
                    letter_cell.text,
                )
            category = declared
        if "@asset" in special and special["@asset"][i].text:
            asset_cell = special["@asset"][i]
            if asset_cell.text not in {a.name for a in model.assets}:
                raise ValidationError(asset_cell.span, "a model asset", repr(asset_cell.text))
            if base is not None and asset_cell.text != base.asset:
                raise ValidationError(
                    asset_cell.span, f"asset {base.asset!r} (from the attack tree)", asset_cell.text
                )
            asset = asset_cell.text
        if likelihood is None or category is None or asset is None:
            raise ValidationError(
                cell.span,
                "a risk from the attack trees, or @likelihood/@category/@asset cells for it",
                f"unknown risk {cell.text!r}",
            )
        resolved.append(Risk(cell.text, likelihood, category, asset))

    objectives = {o.name: o for o in model.objectives}
    impact: dict[tuple[str, str], float] = {}
    seen_rows: dict[str, SourceSpan] = {}
    row_order: list[str] = []
    loss_cells: dict[str, _Cell] = {}
    for row in body:
        name_cell = row[0]
        if name_cell.text not in objectives:
            raise ValidationError(name_cell.span, "a model objective", f"unknown objective {name_cell.text!r}")
        if name_cell.text in seen_rows:
            raise ValidationError(name_cell.span, "a unique objective row", f"duplicate {name_cell.text!r}")
        seen_rows[name_cell.text] = name_cell.span
        row_order.append(name_cell.text)
        _check_width(row, width, filename)
        for i, cell in enumerate(row[1 : 1 + len(risk_names)]):
            impact[(risk_names[i], name_cell.text)] = _parse_unit_value(
                cell, f"impact of {risk_names[i]!r} on {name_cell.text!r}"
            )
        if has_loss_column:
            loss_cells[name_cell.text] = row[-1]

    missing = [name for name in objectives if name not in seen_rows]
    if missing:
        raise ValidationError(
            rows[0][0].span, "a row for every model objective", f"missing {missing[0]!r}"
        )

    matrix = RiskImpactMatrix(
        objectives=tuple(objectives[name] for name in row_order),
        risks=tuple(resolved),
        impact=impact,
    )
    _verify_derived(matrix, special.get("@criticality"), loss_cells)
    return matrix


def _verify_derived(
    matrix: RiskImpactMatrix,
    criticality_row: list[_Cell] | None,
    loss_cells: dict[str, _Cell],
) -> None:
    """Derived annotations are allowed in the file but must match recomputation."""
    if criticality_row is not None:
        expected = risk_criticality(matrix)
        for risk, cell in zip(matrix.risks, criticality_row):
            if not cell.text:
                continue
            value = _parse_unit_value(cell, "criticality")
            if abs(value - expected[risk.name]) > _DERIVED_TOLERANCE:
                raise ValidationError(
                    cell.span,
                    f"criticality {format_number(expected[risk.name])} (recomputed)",
                    cell.text,
                )
    if loss_cells:
        expected_loss = loss_of_objectives(matrix)
        for name, cell in loss_cells.items():
            value = _parse_unit_value(cell, "loss")
            if abs(value - expected_loss[name]) > _DERIVED_TOLERANCE:
                raise ValidationError(
                    cell.span, f"loss {format_number(expected_loss[name])} (recomputed)", cell.text
                )


def serialize_impact_csv(matrix: RiskImpactMatrix, derived: bool = True) -> str:
    """Canonical impact CSV; with ``derived`` the verified criticality row and
    loss column are included."""
    risk_names = [_csv_cell(r.name, "risk name") for r in matrix.risks]
    header = ["objective", *risk_names]
    if derived:
        header.append("loss")
    lines = [",".join(header)]
    lines.append(",".join(["@likelihood", *(format_number(r.likelihood) for r in matrix.risks)]))
    lines.append(",".join(["@category", *(r.category.tag for r in matrix.risks)]))
    lines.append(",".join(["@asset", *(_csv_cell(r.asset, "asset name") for r in matrix.risks)]))
    if derived:
        crit = risk_criticality(matrix)
        lines.append(
            ",".join(["@criticality", *(format_number(crit[name]) for name in risk_names)])
        )
        loss = loss_of_objectives(matrix)
    for obj in matrix.objectives:
        cells = [_csv_cell(obj.name, "objective name")]
        cells += [format_number(matrix.impact[(obj_risk, obj.name)]) for obj_risk in risk_names]
        if derived:
            cells.append(format_number(loss[obj.name]))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def parse_effect_csv(
    text: str,
    risks: list[Risk] | tuple[Risk, ...] | None = None,
    criticality: dict[str, float] | None = None,
    filename: str = "<string>",
) -> EffectivenessMatrix:
    """Parse a countermeasure effectiveness matrix.

    When ``risks`` is given every column must name one of them; otherwise the
    matrix stands alone and column names are taken as-is. Per-risk criticality
    comes from the ``@criticality`` row when present, else from the
    ``criticality`` argument, else defaults to zero.
    """
    rows = _read_rows(text, filename)
    if not rows:
        raise ParseError(SourceSpan(filename, 1, 1), "a header row", "end of input")
    header = rows[0]
    if header[0].text != "countermeasure" or len(header) < 2 or header[1].text != "cost":
        raise ParseError(header[0].span, "'countermeasure,cost' in the header", repr(header[0].text))
    risk_cells = header[2:]
    risk_names = [c.text for c in risk_cells]
    for i, cell in enumerate(risk_cells):
        if cell.text in risk_names[:i]:
            raise ValidationError(cell.span, "a unique risk column", f"duplicate {cell.text!r}")
    if risks is not None:
        known = {r.name for r in risks}
        for cell in risk_cells:
            if cell.text not in known:
                raise ValidationError(cell.span, "a risk from the analysis", f"unknown risk {cell.text!r}")

    crit = {name: 0.0 for name in risk_names}
    if criticality is not None:
        for name in risk_names:
            if name in criticality:
                crit[name] = criticality[name]

    countermeasures: list[Countermeasure] = []
    reduction: dict[tuple[str, str], float] = {}
    width = len(header)
    seen: set[str] = set()
    for row in rows[1:]:
        name_cell = row[0]
        if name_cell.text == "@criticality":
            _check_width(row, width, filename)
            if row[1].text:
                raise ParseError(row[1].span, "an empty cost cell on @criticality", repr(row[1].text))
            for i, cell in enumerate(row[2:]):
                if cell.text:
                    crit[risk_names[i]] = _parse_unit_value(cell, "criticality")
            continue
        if name_cell.text.startswith("@"):
            raise ParseError(name_cell.span, "a countermeasure row or @criticality", repr(name_cell.text))
        if name_cell.text in seen:
            raise ValidationError(name_cell.span, "a unique countermeasure row", f"duplicate {name_cell.text!r}")
        seen.add(name_cell.text)
        _check_width(row, width, filename)
        cost_cell = row[1]
        try:
            cost = float(cost_cell.text)
        except ValueError:
            raise ParseError(cost_cell.span, "a cost number", repr(cost_cell.text)) from None
        if cost < 0:
            raise ValidationError(cost_cell.span, "a cost >= 0", f"negative cost {cost_cell.text}")
        countermeasures.append(Countermeasure(name_cell.text, cost))
        for i, cell in enumerate(row[2:]):
            reduction[(name_cell.text, risk_names[i])] = _parse_unit_value(
                cell, f"reduction of {risk_names[i]!r} by {name_cell.text!r}"
            )

    matrix_risks = None
    if risks is not None:
        by_name = {r.name: r for r in risks}
        matrix_risks = tuple(by_name[name] for name in risk_names)
    return EffectivenessMatrix(
        countermeasures=tuple(countermeasures),
        risk_names=tuple(risk_names),
        criticality=crit,
        reduction=reduction,
        risks=matrix_risks,
    )


def serialize_effect_csv(matrix: EffectivenessMatrix) -> str:
    header = [
        "countermeasure",
        "cost",
        *(_csv_cell(n, "risk name") for n in matrix.risk_names),
    ]
    lines = [",".join(header)]
    lines.append(
        ",".join(
            ["@criticality", "", *(format_number(matrix.criticality[n]) for n in matrix.risk_names)]
        )
    )
    for cm in matrix.countermeasures:
        cells = [_csv_cell(cm.name, "countermeasure name"), format_number(cm.cost)]
        cells += [format_number(matrix.reduction[(cm.name, n)]) for n in matrix.risk_names]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def serialize_threat_report_csv(threats: list[Threat] | tuple[Threat, ...], scope: str) -> str:
    lines = [f"# scope: {scope}", "id,category,subject,title,boundary_crossing"]
    for t in threats:
        lines.append(
            ",".join(
                [
                    str(t.id),
                    t.category.tag,
                    _csv_cell(t.subject, "threat subject"),
                    _csv_cell(t.title, "threat title"),
                    "true" if t.boundary_crossing else "false",
                ]
            )
        )
    return "\n".join(lines) + "\n"


def parse_threat_report_csv(text: str, filename: str = "<string>") -> list[Threat]:
    """Reader for the tool's own threat report CSV (round-trip support)."""
    rows = _read_rows(text, filename)
    if not rows or [c.text for c in rows[0]] != ["id", "category", "subject", "title", "boundary_crossing"]:
        raise ParseError(SourceSpan(filename, 1, 1), "the threat report header", "something else")
    threats = []
    for row in rows[1:]:
        _check_width(row, 5, filename)
        id_cell, cat_cell, subject, title, crossing = row
        try:
            threat_id = int(id_cell.text)
        except ValueError:
            raise ParseError(id_cell.span, "an integer id", repr(id_cell.text)) from None
        if crossing.text not in ("true", "false"):
            raise ParseError(crossing.span, "'true' or 'false'", repr(crossing.text))
        try:
            category = StrideCategory.from_tag(cat_cell.text)
        except ValueError:
            raise ParseError(cat_cell.span, "a category letter", repr(cat_cell.text)) from None
        threats.append(
            Threat(threat_id, category, subject.text, title.text, crossing.text == "true")
        )
    return threats
