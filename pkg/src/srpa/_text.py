"""Tokenizer and recursive-descent helpers shared by the pomset and expression grammars."""

from __future__ import annotations

import re
from dataclasses import dataclass

LETTER_RE = re.compile(r"[a-z][a-zA-Z0-9_]*")
_TOKEN_RE = re.compile(r"\s*(?:(\|\|)|([a-z][a-zA-Z0-9_]*)|([01().+*])|(\S))")


class ParseError(ValueError):
    """Malformed pomset or expression text."""

    def __init__(self, message: str, text: str, position: int) -> None:
        super().__init__(f"{message} at position {position}: {text!r}")
        self.text = text
        self.position = position


@dataclass(frozen=True)
class Token:
    kind: str  # "op", "letter", "end"
    value: str
    pos: int


def tokenize(text: str, allowed_ops: frozenset[str]) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    while True:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            break
        start = m.start(m.lastindex) if m.lastindex else pos
        par, letter, op, junk = m.groups()
        if junk is not None:
            raise ParseError(f"unexpected character {junk!r}", text, start)
        if letter is not None:
            tokens.append(Token("letter", letter, start))
        else:
            value = par if par is not None else op
            if value not in allowed_ops:
                raise ParseError(f"unexpected symbol {value!r}", text, start)
            tokens.append(Token("op", value, start))
        pos = m.end()
    if text[pos:].strip():
        raise ParseError("trailing input", text, pos)
    tokens.append(Token("end", "", len(text)))
    return tokens


class TokenStream:
    def __init__(self, text: str, allowed_ops: frozenset[str]) -> None:
        self.text = text
        self.tokens = tokenize(text, allowed_ops)
        self.i = 0

    @property
    def peek(self) -> Token:
        return self.tokens[self.i]

    def at(self, value: str) -> bool:
        tok = self.peek
        return tok.kind == "op" and tok.value == value

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str) -> Token:
        if not self.at(value):
            self.fail(f"expected {value!r}")
        return self.advance()

    def fail(self, message: str):
        tok = self.peek
        found = "end of input" if tok.kind == "end" else repr(tok.value)
        raise ParseError(f"{message}, found {found}", self.text, tok.pos)

    def finish(self) -> None:
        if self.peek.kind != "end":
            self.fail("expected end of input")
