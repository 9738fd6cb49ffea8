"""Series-rational expressions: syntax, text form, empty-pomset test, bounded semantics."""

from __future__ import annotations

from functools import lru_cache

from srpa._text import LETTER_RE, TokenStream
from srpa.pomset import EMPTY, SpTerm, par_compose, prim as prim_pomset, seq_compose


class Expr:
    """Base class. Subclasses are immutable; equality is structural (no ACI)."""

    __slots__ = ("_hash", "_text")
    _tag = ""
    _fields: tuple[str, ...] = ()

    def _finish(self) -> None:
        self._hash = hash((self._tag, *(getattr(self, f) for f in self._fields)))
        self._text = None

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, Expr):
            return NotImplemented
        if type(self) is not type(other) or self._hash != other._hash:
            return False
        return all(getattr(self, f) == getattr(other, f) for f in self._fields)

    def __hash__(self) -> int:
        return self._hash

    def __str__(self) -> str:
        if self._text is None:
            self._text = format_expr(self)
        return self._text

    def __repr__(self) -> str:
        return f"Expr({str(self)!r})"

    @property
    def sort_key(self) -> str:
        return str(self)

    # operator sugar for tests and interactive use
    def __add__(self, other: Expr) -> Expr:
        return Plus(self, other)

    def __mul__(self, other: Expr) -> Expr:
        return Dot(self, other)

    def __or__(self, other: Expr) -> Expr:
        return Par(self, other)


class Zero(Expr):
    __slots__ = ()
    _tag = "0"

    def __init__(self) -> None:
        self._finish()


class One(Expr):
    __slots__ = ()
    _tag = "1"

    def __init__(self) -> None:
        self._finish()


class Prim(Expr):
    __slots__ = ("letter",)
    __match_args__ = ("letter",)
    _tag = "a"
    _fields = ("letter",)

    def __init__(self, letter: str) -> None:
        if not LETTER_RE.fullmatch(letter):
            raise ValueError(f"invalid letter {letter!r}")
        self.letter = letter
        self._finish()


class _Binary(Expr):
    __slots__ = ("left", "right")
    __match_args__ = ("left", "right")
    _fields = ("left", "right")

    def __init__(self, left: Expr, right: Expr) -> None:
        self.left = left
        self.right = right
        self._finish()


class Plus(_Binary):
    __slots__ = ()
    _tag = "+"


class Dot(_Binary):
    __slots__ = ()
    _tag = "."


class Par(_Binary):
    __slots__ = ()
    _tag = "||"


class Star(Expr):
    __slots__ = ("inner",)
    __match_args__ = ("inner",)
    _tag = "*"
    _fields = ("inner",)

    def __init__(self, inner: Expr) -> None:
        self.inner = inner
        self._finish()


ZERO = Zero()
ONE = One()


def letters_of(e: Expr) -> set[str]:
    match e:
        case Prim(a):
            return {a}
        case _Binary(l, r):
            return letters_of(l) | letters_of(r)
        case Star(f):
            return letters_of(f)
    return set()


def expr_size(e: Expr) -> int:
    match e:
        case _Binary(l, r):
            return 1 + expr_size(l) + expr_size(r)
        case Star(f):
            return 1 + expr_size(f)
    return 1


@lru_cache(maxsize=None)
def nullable(e: Expr) -> bool:
    """Whether the empty pomset belongs to the language of ``e``."""
    match e:
        case One() | Star():
            return True
        case Plus(l, r):
            return nullable(l) or nullable(r)
        case Dot(l, r) | Par(l, r):
            return nullable(l) and nullable(r)
    return False


# -- bounded semantics ---------------------------------------------------------

def lang_up_to(e: Expr, n: int) -> frozenset[SpTerm]:
    """All pomsets in the language of ``e`` with at most ``n`` events."""
    if n < 0:
        raise ValueError("bound must be non-negative")
    memo: dict[Expr, frozenset[SpTerm]] = {}
    return _lang(e, n, memo)


def _bounded_product(xs, ys, n, compose) -> set[SpTerm]:
    out = set()
    for u in xs:
        room = n - u.size
        for v in ys:
            if v.size <= room:
                out.add(compose(u, v))
    return out


def _lang(e: Expr, n: int, memo: dict) -> frozenset[SpTerm]:
    hit = memo.get(e)
    if hit is not None:
        return hit
    match e:
        case Zero():
            result = frozenset()
        case One():
            result = frozenset({EMPTY})
        case Prim(a):
            result = frozenset({prim_pomset(a)}) if n >= 1 else frozenset()
        case Plus(l, r):
            result = _lang(l, n, memo) | _lang(r, n, memo)
        case Dot(l, r):
            result = frozenset(_bounded_product(_lang(l, n, memo), _lang(r, n, memo), n, seq_compose))
        case Par(l, r):
            result = frozenset(_bounded_product(_lang(l, n, memo), _lang(r, n, memo), n, par_compose))
        case Star(f):
            body = [u for u in _lang(f, n, memo) if u.size > 0]
            acc = {EMPTY}
            frontier = {EMPTY}
            while frontier:
                fresh = _bounded_product(body, frontier, n, seq_compose) - acc
                acc |= fresh
                frontier = fresh
            result = frozenset(acc)
        case _:
            raise TypeError(f"not an expression: {e!r}")
    memo[e] = result
    return result


# -- simplification ------------------------------------------------------------

def _summands(e: Expr) -> list[Expr]:
    if isinstance(e, Plus):
        return _summands(e.left) + _summands(e.right)
    return [e]


def _sum(terms: list[Expr]) -> Expr:
    seen: dict[Expr, None] = {}
    for t in terms:
        if not isinstance(t, Zero):
            seen.setdefault(t, None)
    kept = sorted(seen, key=str)
    if not kept:
        return ZERO
    out = kept[0]
    for t in kept[1:]:
        out = Plus(out, t)
    return out


def simplify(e: Expr) -> Expr:
    """Apply language-preserving unit, zero and idempotence rewrites bottom-up."""
    return _simplify(e, {})


def _simplify(e: Expr, memo: dict) -> Expr:
    hit = memo.get(e)
    if hit is not None:
        return hit
    match e:
        case Plus():
            result = _sum([_simplify(t, memo) for t in _summands(e)])
        case Dot(l, r):
            l, r = _simplify(l, memo), _simplify(r, memo)
            if isinstance(l, Zero) or isinstance(r, Zero):
                result = ZERO
            elif isinstance(l, One):
                result = r
            elif isinstance(r, One):
                result = l
            else:
                result = Dot(l, r)
        case Par(l, r):
            l, r = _simplify(l, memo), _simplify(r, memo)
            if isinstance(l, Zero) or isinstance(r, Zero):
                result = ZERO
            elif isinstance(l, One):
                result = r
            elif isinstance(r, One):
                result = l
            else:
                result = Par(l, r)
        case Star(f):
            f = _simplify(f, memo)
            if isinstance(f, (Zero, One)):
                result = ONE
            elif isinstance(f, Star):
                result = f
            else:
                # (1 + f)* = f*
                parts = [t for t in _summands(f) if not isinstance(t, One)]
                result = Star(_sum(parts)) if parts else ONE
        case _:
            result = e
    memo[e] = result
    return result


# -- text form -------------------------------------------------------------------

_LEVEL = {Plus: 0, Par: 1, Dot: 2, Star: 3}
_ATOM = 4


def _level(e: Expr) -> int:
    return _LEVEL.get(type(e), _ATOM)


def format_expr(e: Expr) -> str:
    """Print with minimal parentheses; binary operators associate to the left."""
    match e:
        case Zero():
            return "0"
        case One():
            return "1"
        case Prim(a):
            return a
        case Star(f):
            return f"{_wrap(f, _LEVEL[Star])}*"
        case _Binary(l, r):
            lvl = _LEVEL[type(e)]
            sep = {Plus: " + ", Par: " || ", Dot: " . "}[type(e)]
            return f"{_wrap(l, lvl)}{sep}{_wrap(r, lvl + 1)}"
    raise TypeError(f"not an expression: {e!r}")


def _wrap(e: Expr, min_level: int) -> str:
    text = str(e)
    return text if _level(e) >= min_level else f"({text})"


_EXPR_OPS = frozenset({"||", ".", "+", "*", "(", ")", "0", "1"})


def parse_expr(text: str) -> Expr:
    """Parse an expression; precedence is ``*`` > ``.`` > ``||`` > ``+``."""
    ts = TokenStream(text, _EXPR_OPS)
    e = _parse_alt(ts)
    ts.finish()
    return e


def _parse_alt(ts: TokenStream) -> Expr:
    e = _parse_par(ts)
    while ts.at("+"):
        ts.advance()
        e = Plus(e, _parse_par(ts))
    return e


def _parse_par(ts: TokenStream) -> Expr:
    e = _parse_seq(ts)
    while ts.at("||"):
        ts.advance()
        e = Par(e, _parse_seq(ts))
    return e


def _parse_seq(ts: TokenStream) -> Expr:
    e = _parse_star(ts)
    while ts.at("."):
        ts.advance()
        e = Dot(e, _parse_star(ts))
    return e


def _parse_star(ts: TokenStream) -> Expr:
    e = _parse_atom(ts)
    while ts.at("*"):
        ts.advance()
        e = Star(e)
    return e


def _parse_atom(ts: TokenStream) -> Expr:
    tok = ts.peek
    if tok.kind == "letter":
        ts.advance()
        return Prim(tok.value)
    if ts.at("0"):
        ts.advance()
        return ZERO
    if ts.at("1"):
        ts.advance()
        return ONE
    if ts.at("("):
        ts.advance()
        e = _parse_alt(ts)
        ts.expect(")")
        return e
    ts.fail("expected a letter, '0', '1' or '('")


def expr(text: str) -> Expr:
    """Shorthand for :func:`parse_expr`."""
    return parse_expr(text)
