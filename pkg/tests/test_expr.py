import pytest
from hypothesis import given

from srpa._text import ParseError
from srpa.expr import (
    ONE,
    ZERO,
    Dot,
    Par,
    Plus,
    Prim,
    Star,
    format_expr,
    lang_up_to,
    nullable,
    parse_expr,
    simplify,
)
from srpa.oracle import enumerate_sp
from srpa.pomset import EMPTY, pomset
from strategies import exprs

a, b, c = Prim("a"), Prim("b"), Prim("c")


def test_nullable_examples():
    assert nullable(ONE)
    assert nullable(Star(Dot(a, b)))
    assert not nullable(Dot(a, b))
    assert not nullable(ZERO)
    assert nullable(Par(ONE, Star(a)))
    assert nullable(Plus(a, ONE))


def test_nullable_matches_bounded_language_for_ab():
    assert EMPTY not in lang_up_to(Dot(a, b), 2)


def test_lang_examples():
    assert lang_up_to(ZERO, 5) == frozenset()
    assert lang_up_to(Star(a), 2) == {pomset("1"), pomset("a"), pomset("a . a")}
    abca = parse_expr("a . (b || c) . a")
    assert lang_up_to(abca, 4) == {pomset("a . (b || c) . a")}


def test_lang_matches_enumeration_filter():
    # a . (b || c) . a has one pomset; check no other enumerated pomset slips in
    abca = parse_expr("a . (b || c) . a")
    target = pomset("a.(b||c).a")
    assert {u for u in enumerate_sp("abc", 4) if u in lang_up_to(abca, 4)} == {target}


def test_parse_examples():
    assert parse_expr("a . b* || c") == Par(Dot(a, Star(b)), c)
    assert parse_expr("0 + 1") == Plus(ZERO, ONE)
    assert format_expr(parse_expr("((a))")) == "a"
    assert parse_expr("a + b . c || d") == Plus(a, Par(Dot(b, c), Prim("d")))
    assert parse_expr("a . b . c") == Dot(Dot(a, b), c)


def test_printer_keeps_structure():
    assert str(Plus(a, Plus(b, c))) == "a + (b + c)"
    assert str(Plus(Plus(a, b), c)) == "a + b + c"
    assert str(Star(Star(a))) == "a**"
    assert str(Dot(Par(a, b), c)) == "(a || b) . c"
    assert str(Star(Dot(a, b))) == "(a . b)*"


@pytest.mark.parametrize("text", ["", "a +", "(a", "a b", "a ||| b", "*a", "A"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_expr(text)


def test_simplify_examples():
    assert simplify(Plus(a, ZERO)) == a
    assert simplify(Dot(ONE, Dot(b, ONE))) == b
    assert simplify(Star(ZERO)) == ONE
    assert simplify(Star(ONE)) == ONE
    assert simplify(Dot(a, ZERO)) == ZERO
    assert simplify(Par(a, ONE)) == a
    assert simplify(Plus(b, Plus(a, b))) == Plus(a, b)


def test_structural_equality_has_no_aci():
    assert Plus(a, b) != Plus(b, a)
    assert hash(Plus(a, b)) == hash(parse_expr("a + b"))


@given(exprs)
def test_print_parse_round_trip(e):
    assert parse_expr(str(e)) == e


@given(exprs)
def test_nullable_is_empty_membership(e):
    assert nullable(e) == (EMPTY in lang_up_to(e, 0))


@given(exprs)
def test_simplify_preserves_language(e):
    s = simplify(e)
    assert lang_up_to(s, 4) == lang_up_to(e, 4)
    assert simplify(s) == s


@given(exprs)
def test_bounded_language_is_monotone(e):
    small, large = lang_up_to(e, 2), lang_up_to(e, 4)
    assert small == {u for u in large if u.size <= 2}
