"""Series-parallel pomsets in canonical form.

Every sp-pomset has exactly one :class:`SpTerm`: sequential and parallel nodes
are flattened and unit-free, and parallel children are kept sorted. Structural
equality therefore coincides with pomset isomorphism.
"""

from __future__ import annotations

from enum import IntEnum
from typing import Iterable

from srpa._text import LETTER_RE, TokenStream
from srpa.multiset import Multiset


class Kind(IntEnum):
    EMPTY = 0
    PRIMITIVE = 1
    SEQUENTIAL = 2
    PARALLEL = 3


class SpTerm:
    """Canonical series-parallel pomset. Build with the module-level constructors."""

    __slots__ = ("kind", "letter", "children", "size", "sort_key", "_hash")

    def __init__(self, kind: Kind, letter: str | None = None, children: tuple[SpTerm, ...] = ()):
        self.kind = kind
        self.letter = letter
        self.children = children
        if kind is Kind.EMPTY:
            self.size = 0
            self.sort_key: tuple = (0,)
        elif kind is Kind.PRIMITIVE:
            self.size = 1
            self.sort_key = (1, letter)
        elif kind is Kind.SEQUENTIAL:
            self.size = sum(c.size for c in children)
            self.sort_key = (2, tuple(c.sort_key for c in children))
        else:
            self.size = sum(c.size for c in children)
            entries = Multiset(children).items
            self.sort_key = (3, tuple((c.sort_key, m) for c, m in entries))
        self._hash = hash(self.sort_key)

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, SpTerm):
            return NotImplemented
        return self._hash == other._hash and self.sort_key == other.sort_key

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: SpTerm) -> bool:
        return self.sort_key < other.sort_key

    def __repr__(self) -> str:
        return f"SpTerm({format_pomset(self)!r})"

    def __str__(self) -> str:
        return format_pomset(self)


EMPTY = SpTerm(Kind.EMPTY)


def prim(letter: str) -> SpTerm:
    if not LETTER_RE.fullmatch(letter):
        raise ValueError(f"invalid letter {letter!r}")
    return SpTerm(Kind.PRIMITIVE, letter)


def kind(u: SpTerm) -> Kind:
    return u.kind


def factorize_seq(u: SpTerm) -> list[SpTerm]:
    """The unique list of sequential primes whose product is ``u``."""
    if u.kind is Kind.EMPTY:
        return []
    if u.kind is Kind.SEQUENTIAL:
        return list(u.children)
    return [u]


def factorize_par(u: SpTerm) -> Multiset[SpTerm]:
    """The unique multiset of parallel primes whose parallel product is ``u``."""
    if u.kind is Kind.EMPTY:
        return Multiset()
    if u.kind is Kind.PARALLEL:
        return Multiset(u.children)
    return Multiset([u])


def seq_all(terms: Iterable[SpTerm]) -> SpTerm:
    factors: list[SpTerm] = []
    for t in terms:
        factors.extend(factorize_seq(t))
    if not factors:
        return EMPTY
    if len(factors) == 1:
        return factors[0]
    return SpTerm(Kind.SEQUENTIAL, children=tuple(factors))


def par_all(terms: Iterable[SpTerm]) -> SpTerm:
    factors: list[SpTerm] = []
    for t in terms:
        if t.kind is Kind.PARALLEL:
            factors.extend(t.children)
        elif t.kind is not Kind.EMPTY:
            factors.append(t)
    if not factors:
        return EMPTY
    if len(factors) == 1:
        return factors[0]
    factors.sort(key=lambda c: c.sort_key)
    return SpTerm(Kind.PARALLEL, children=tuple(factors))


def seq_compose(u: SpTerm, v: SpTerm) -> SpTerm:
    return seq_all((u, v))


def par_compose(u: SpTerm, v: SpTerm) -> SpTerm:
    return par_all((u, v))


def compare(u: SpTerm, v: SpTerm) -> int:
    """Three-way comparison: -1, 0 or 1."""
    a, b = u.sort_key, v.sort_key
    return (a > b) - (a < b)


def letters(u: SpTerm) -> set[str]:
    if u.kind is Kind.PRIMITIVE:
        return {u.letter}
    out: set[str] = set()
    for c in u.children:
        out |= letters(c)
    return out


# -- text form ---------------------------------------------------------------

def format_pomset(u: SpTerm) -> str:
    if u.kind is Kind.EMPTY:
        return "1"
    if u.kind is Kind.PRIMITIVE:
        return u.letter
    if u.kind is Kind.SEQUENTIAL:
        return " . ".join(
            f"({format_pomset(c)})" if c.kind is Kind.PARALLEL else format_pomset(c)
            for c in u.children
        )
    return " || ".join(
        f"({format_pomset(c)})" if c.kind is Kind.SEQUENTIAL else format_pomset(c)
        for c in u.children
    )


_POMSET_OPS = frozenset({"||", ".", "(", ")", "1"})


def parse_pomset(text: str) -> SpTerm:
    """Parse ``pomset := pseq ("||" pseq)*`` with ``.`` binding tighter than ``||``."""
    ts = TokenStream(text, _POMSET_OPS)
    result = _parse_par(ts)
    ts.finish()
    return result


def _parse_par(ts: TokenStream) -> SpTerm:
    parts = [_parse_seq(ts)]
    while ts.at("||"):
        ts.advance()
        parts.append(_parse_seq(ts))
    return par_all(parts)


def _parse_seq(ts: TokenStream) -> SpTerm:
    parts = [_parse_atom(ts)]
    while ts.at("."):
        ts.advance()
        parts.append(_parse_atom(ts))
    return seq_all(parts)


def _parse_atom(ts: TokenStream) -> SpTerm:
    tok = ts.peek
    if tok.kind == "letter":
        ts.advance()
        return prim(tok.value)
    if ts.at("1"):
        ts.advance()
        return EMPTY
    if ts.at("("):
        ts.advance()
        inner = _parse_par(ts)
        ts.expect(")")
        return inner
    ts.fail("expected a letter, '1' or '('")


def pomset(text: str) -> SpTerm:
    """Shorthand for :func:`parse_pomset`."""
    return parse_pomset(text)
