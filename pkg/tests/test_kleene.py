import random

from hypothesis import given, settings

from srpa.automaton import check_structure, is_fork_acyclic, membership
from srpa.equiv import state_equiv
from srpa.expr import ONE, Dot, Par, Plus, Prim, Star, lang_up_to, nullable, parse_expr
from srpa.kleene import (
    compile_exprs,
    delta_derivative,
    expr_equiv,
    expr_support,
    extract,
    gamma_derivative,
)
from srpa.multiset import Multiset
from srpa.oracle import enumerate_sp, oracle_equiv, pa_lang_up_to, random_expr
from srpa.pomset import pomset
from srpa.wellstruct import well_structure
from strategies import exprs

a, b, c = Prim("a"), Prim("b"), Prim("c")
AB_STAR_C = parse_expr("a . b* || c")


def test_delta_examples():
    assert delta_derivative(a, "a") == {ONE}
    assert delta_derivative(a, "b") == frozenset()
    assert delta_derivative(Dot(a, Star(b)), "a") == {Dot(ONE, Star(b))}
    assert delta_derivative(Par(a, b), "a") == frozenset()
    assert delta_derivative(Star(a), "a") == {Dot(ONE, Star(a))}
    assert delta_derivative(Dot(Star(a), b), "b") == {ONE}


def test_gamma_examples():
    assert gamma_derivative(AB_STAR_C) == {Multiset([Dot(a, Star(b)), c]): {ONE}}
    assert gamma_derivative(a) == {}
    assert gamma_derivative(parse_expr("(a || b) . c")) == {Multiset([a, b]): {Dot(ONE, c)}}
    star = parse_expr("(a || b)*")
    assert gamma_derivative(star) == {Multiset([a, b]): {Dot(ONE, star)}}
    summed = gamma_derivative(parse_expr("a || b + c || a"))
    assert set(summed) == {Multiset([a, b]), Multiset([c, a])}


def test_support_examples():
    assert expr_support(a) == {a, ONE}
    assert {AB_STAR_C, Dot(a, Star(b)), Dot(ONE, Star(b)), c, ONE} <= expr_support(AB_STAR_C)
    assert expr_support(parse_expr("0")) == {parse_expr("0")}


def test_compile_examples():
    pa, states = compile_exprs([AB_STAR_C])
    assert pa.states == {"a . b* || c", "a . b*", "1 . b*", "c", "1"}
    assert pa.accepting == {"1 . b*", "1"}
    assert pa.fork_step("a . b* || c", Multiset(["a . b*", "c"])) == {"1"}
    assert pa.step("1 . b*", "b") == {"1 . b*"}
    one, _ = compile_exprs([ONE])
    assert one.states == {"1"} and one.accepting == {"1"} and not one.delta and not one.gamma


def test_extract_examples(fixture):
    e = extract(fixture("sequence_fork"), "q0")
    assert lang_up_to(e, 5) == {pomset("a . (b || c) . a")}
    from srpa.automaton import Pa

    assert extract(Pa(["f"], ["f"]), "f") == ONE


def test_expr_equiv_examples():
    E = parse_expr
    assert expr_equiv(E("a . b*"), E("a . b*"))
    assert not expr_equiv(E("a . (b || c)"), E("(b || c) . a"))
    assert expr_equiv(E("a || (b || c)"), E("(a || b) || c"))
    assert expr_equiv(E("a . b + a . c"), E("a . (b + c)"))
    assert expr_equiv(E("(a || b) . a + (a || b) . b"), E("(a || b) . (a + b)"))


@given(exprs)
def test_compiled_automata_are_fork_acyclic(e):
    pa, states = compile_exprs([e])
    assert is_fork_acyclic(pa)
    assert (states[e] in pa.accepting) == nullable(e)


@given(exprs)
@settings(max_examples=40)
def test_compiled_state_accepts_expression_language(e):
    pa, states = compile_exprs([e])
    assert pa_lang_up_to(pa, states[e], 4, alphabet="abc") == lang_up_to(e, 4)


@given(exprs, exprs)
@settings(max_examples=30)
def test_compile_is_a_homomorphism(e, f):
    pomsets = enumerate_sp("abc", 3)
    for whole, op in ((Plus(e, f), "plus"), (Dot(e, f), "dot"), (Par(e, f), "par")):
        pa, st = compile_exprs([whole, e, f])
        left = {u for u in pomsets if membership(pa, st[whole], u, method="general")}
        le = {u for u in pomsets if membership(pa, st[e], u, method="general")}
        lf = {u for u in pomsets if membership(pa, st[f], u, method="general")}
        if op == "plus":
            assert left == le | lf
        else:
            assert left == lang_up_to(whole, 3)


@given(exprs)
@settings(max_examples=40)
def test_extract_after_compile_round_trip(e):
    pa, states = compile_exprs([e])
    back = extract(pa, states[e])
    assert oracle_equiv(e, back, 4)


def test_compile_after_extract_round_trip(fixture):
    for name, q in (("sequence_fork", "q0"), ("distributivity", "q1"), ("hidden_choice", "q1'")):
        a = fixture(name)
        e = extract(a, q)
        assert expr_equiv(e, extract(a, q))
        pa, states = compile_exprs([e])
        assert pa_lang_up_to(pa, states[e], 4, alphabet=a.alphabet) == pa_lang_up_to(a, q, 4)


def test_compile_then_well_structure_keeps_decision():
    rng = random.Random(11)
    for _ in range(30):
        e, f = random_expr(rng, 3), random_expr(rng, 3)
        pa, st = compile_exprs([e, f])
        ws, names = well_structure(pa, {st[e], st[f]})
        assert check_structure(ws).well_structured
        decided = state_equiv(ws, names[st[e]], names[st[f]])
        assert decided == expr_equiv(e, f)
        if decided:
            assert oracle_equiv(e, f, 5)
