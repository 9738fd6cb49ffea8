import json

import pytest
from hypothesis import given

from srpa.automaton import (
    Pa,
    PaError,
    accepts_empty,
    check_structure,
    dumps,
    fork_cycle_witness,
    is_fork_acyclic,
    leadsto,
    loads,
    membership,
    restrict,
    support_analysis,
    support_closure,
    validate,
)
from srpa.multiset import Multiset
from srpa.oracle import enumerate_sp, leadsto_pairs
from srpa.pomset import EMPTY, pomset
from strategies import automata


def test_sequence_fork_is_valid(fixture):
    a = fixture("sequence_fork")
    assert validate(a) == []
    assert len(a.states) == 6 and len(a.gamma) == 1


def test_unknown_state_diagnostic():
    a = Pa(["p"], [], {("p", "a"): ["ghost"]})
    assert len(validate(a)) == 1


def test_empty_fork_result_rejected_on_load(fixture):
    data = json.loads(dumps(fixture("sequence_fork")))
    data["gamma"][0]["to"] = []
    with pytest.raises(PaError, match="non-empty"):
        loads(json.dumps(data))


def test_duplicate_states_rejected():
    with pytest.raises(PaError, match="duplicate"):
        loads(json.dumps({"states": ["p", "p"]}))


def test_schema_errors_report_path():
    with pytest.raises(PaError, match=r"\$\.delta\[0\]"):
        loads(json.dumps({"states": ["p"], "delta": [{"from": "p"}]}))


def test_save_is_canonical(fixture):
    a = fixture("distributivity")
    text = dumps(a)
    assert dumps(loads(text)) == text
    entry = json.loads(text)["gamma"][0]
    assert entry["fork"] == [["q2", 1], ["q3", 1]]


def test_support_examples(fixture):
    a = fixture("fork_cycle")
    sa = support_analysis(a)
    assert sa.le("q5", "q1")
    assert sa.le("q1", "q1")
    lone = Pa(["q"])
    assert support_analysis(lone).depth_of["q"] == 1
    assert support_closure(lone, ["q"]) == {"q"}


def test_fork_acyclicity_examples(fixture):
    cyc = fixture("fork_cycle")
    assert not is_fork_acyclic(cyc)
    assert fork_cycle_witness(cyc) == ("q1", "q3")
    conf = fixture("run_confusion")
    assert is_fork_acyclic(conf)
    # the longest strict chain is q5 < q3 < q1
    assert support_analysis(conf).depth == 3
    assert is_fork_acyclic(Pa(["p", "q"], ["q"], {("p", "a"): ["q"], ("q", "a"): ["p"]}))


def test_empty_automaton_depth():
    assert support_analysis(Pa([])).depth == 0


def test_closure_and_restrict(fixture):
    a = fixture("fork_cycle")
    assert support_closure(a, ["q4"]) == {"q4", "q5"}
    with pytest.raises(PaError, match="support-closed"):
        restrict(a, ["q3"])
    assert support_closure(a, []) == frozenset()
    assert restrict(a, []).states == frozenset()
    sub = restrict(a, ["q4", "q5"])
    assert sub.accepting == {"q4", "q5"}


def test_leadsto_examples(fixture):
    a = Pa(["q", "s"], [], gamma={("q", Multiset()): ["s"]})
    assert "s" in leadsto(a)["q"]
    assert all(q in leadsto(a)[q] for q in a.states)
    nf = fixture("nullary_forks")
    lt = leadsto(nf)
    assert "q5" in lt["q3"] and "q6" in lt["q2"]


def test_accepts_empty_examples(fixture):
    assert accepts_empty(Pa(["f"], ["f"]), "f")
    assert accepts_empty(fixture("run_confusion"), "q4")
    assert not accepts_empty(fixture("sequence_fork"), "q0")


def test_membership_examples(fixture):
    a = fixture("sequence_fork")
    assert membership(a, "q0", pomset("a . (b || c) . a"))
    assert not membership(a, "q0", pomset("a . b . c . a"))
    conf = fixture("run_confusion")
    assert membership(conf, "q1", pomset("a"))
    assert not membership(conf, "q1", pomset("a || a"))


def test_membership_rejects_fork_cycles(fixture):
    with pytest.raises(PaError, match="fork-acyclic"):
        membership(fixture("fork_cycle"), "q1", pomset("a"))


def test_membership_unknown_state(fixture):
    with pytest.raises(PaError, match="unknown state"):
        membership(fixture("sequence_fork"), "nope", EMPTY)


def test_structure_examples(fixture):
    conf = check_structure(fixture("run_confusion"))
    assert not conf.parsimonious and not conf.well_structured
    assoc = check_structure(fixture("nested_accepting_fork"))
    assert not assoc.flat_branching
    assert check_structure(fixture("sequence_fork")).well_structured


@given(automata)
def test_empty_membership_is_accepts_empty(a):
    for q in a.states:
        assert membership(a, q, EMPTY, method="general") == accepts_empty(a, q)


@given(automata)
def test_leadsto_matches_saturation(a):
    lt = leadsto(a)
    assert {(p, q) for p, qs in lt.items() for q in qs} == leadsto_pairs(a)


@given(automata)
def test_support_preorder_laws(a):
    sa = support_analysis(a)
    le = sa.preorder
    states = sorted(a.states)
    assert all((q, q) in le for q in states)
    for (r, q) in le:
        for (q2, p) in le:
            if q2 == q:
                assert (r, p) in le
    for (r, q) in sa.strict:
        assert (r, q) != (q, r) and (q, r) not in sa.strict
        assert sa.depth_of[r] < sa.depth_of[q]


@given(automata)
def test_restrict_preserves_membership(a):
    q = sorted(a.states)[0]
    sub = restrict(a, support_closure(a, [q]))
    for u in enumerate_sp(a.alphabet, 3):
        assert membership(sub, q, u, method="general") == membership(a, q, u, method="general")


@given(automata)
def test_json_round_trip(a):
    assert loads(dumps(a)) == a
