"""Source positions and the parse error shared by every text format."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int  # 1-based
    column: int  # 1-based

    def __post_init__(self):
        if self.line < 1 or self.column < 1:
            raise ValueError("source positions are 1-based")

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


class ParseError(Exception):
    """Syntax or reference error at an exact position in an input document."""

    def __init__(self, span: SourceSpan, expected: str, found: str):
        self.span = span
        self.expected = expected
        self.found = found
        super().__init__(f"{span}: expected {expected}, found {found}")


class ValidationError(ParseError):
    """The document is well-formed but violates a model-level invariant.

    Kept as a ParseError subclass so every validation failure still points
    at an exact source position; the CLI reports the two classes under
    different exit codes.
    """

