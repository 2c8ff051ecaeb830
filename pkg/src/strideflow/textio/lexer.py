"""Tokenizer shared by the system-model and attack-tree grammars.

Both grammars are LL(1) over the same token set: double-quoted strings with
``\\"`` and ``\\\\`` escapes, decimal numbers, bare words (keywords and
category letters), braces, and ``#`` comments running to end of line.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError, SourceSpan

STRING = "string"
NUMBER = "number"
WORD = "word"
PUNCT = "punct"
EOF = "end of input"

_WORD_CHARS = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ-_")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str  # decoded value for strings, literal text otherwise
    span: SourceSpan

    def describe(self) -> str:
        if self.kind == EOF:
            return EOF
        if self.kind == STRING:
            return f'"{self.text}"'
        return f"'{self.text}'"


def tokenize(text: str, filename: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i, n = 0, len(text)

    def span() -> SourceSpan:
        return SourceSpan(filename, line, col)

    def advance(ch: str) -> None:
        nonlocal line, col
        if ch == "\n":
            line += 1
            col = 1
        else:
            col += 1

    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            advance(ch)
            i += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                advance(text[i])
                i += 1
            continue
        start = span()
        if ch == '"':
            i += 1
            advance(ch)
            value: list[str] = []
            while True:
                if i >= n or text[i] == "\n":
                    raise ParseError(span(), "closing '\"'", "end of line")
                c = text[i]
                if c == "\\":
                    if i + 1 >= n or text[i + 1] not in ('"', "\\"):
                        raise ParseError(span(), "escape '\\\"' or '\\\\'", repr(text[i : i + 2]))
                    value.append(text[i + 1])
                    advance(c)
                    advance(text[i + 1])
                    i += 2
                    continue
                if c == '"':
                    advance(c)
                    i += 1
                    break
                value.append(c)
                advance(c)
                i += 1
            tokens.append(Token(STRING, "".join(value), start))
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == ".":
                j += 1
                if j >= n or not text[j].isdigit():
                    raise ParseError(start, "digit after decimal point", text[j : j + 1] or EOF)
                while j < n and text[j].isdigit():
                    j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    j = k
                    while j < n and text[j].isdigit():
                        j += 1
            lexeme = text[i:j]
            for c in lexeme:
                advance(c)
            i = j
            tokens.append(Token(NUMBER, lexeme, start))
            continue
        if ch in _WORD_CHARS:
            j = i
            while j < n and text[j] in _WORD_CHARS:
                j += 1
            lexeme = text[i:j]
            for c in lexeme:
                advance(c)
            i = j
            tokens.append(Token(WORD, lexeme, start))
            continue
        if ch in "{}":
            tokens.append(Token(PUNCT, ch, start))
            advance(ch)
            i += 1
            continue
        raise ParseError(start, "a declaration", repr(ch))

    # EOF spans the position just past the last character, still on its line.
    tokens.append(Token(EOF, "", SourceSpan(filename, line, col)))
    return tokens


class TokenStream:
    """LL(1) cursor over a token list with uniform error reporting."""

    def __init__(self, tokens: list[Token]):
        self._tokens = tokens
        self._pos = 0

    def peek(self) -> Token:
        return self._tokens[self._pos]

    def next(self) -> Token:
        tok = self._tokens[self._pos]
        if tok.kind != EOF:
            self._pos += 1
        return tok

    def at_word(self, *words: str) -> bool:
        tok = self.peek()
        return tok.kind == WORD and tok.text in words

    def fail(self, expected: str) -> ParseError:
        tok = self.peek()
        return ParseError(tok.span, expected, tok.describe())

    def expect_word(self, word: str) -> Token:
        if not self.at_word(word):
            raise self.fail(f"'{word}'")
        return self.next()

    def expect_string(self, what: str) -> Token:
        tok = self.peek()
        if tok.kind != STRING:
            raise self.fail(what)
        return self.next()

    def expect_number(self, what: str) -> float:
        tok = self.peek()
        if tok.kind != NUMBER:
            raise self.fail(what)
        self.next()
        return float(tok.text)

    def expect_punct(self, ch: str) -> Token:
        tok = self.peek()
        if tok.kind != PUNCT or tok.text != ch:
            raise self.fail(f"'{ch}'")
        return self.next()

    def expect_eof(self) -> None:
        if self.peek().kind != EOF:
            raise self.fail(EOF)


def quote(value: str) -> str:
    """Render a string in canonical source form."""
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


def format_number(value: float) -> str:
    """Canonical decimal rendering (shortest round-tripping form)."""
    return repr(float(value))
