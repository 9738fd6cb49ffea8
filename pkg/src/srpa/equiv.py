"""Language equivalence of states in well-structured automata via atoms.

An atom is a set of states that accept some common pomset and such that no
state outside the set accepts it. Two states have the same language exactly
when every atom contains both or neither.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Union

from srpa.automaton import (
    Pa,
    PaError,
    State,
    check_structure,
    require_fork_acyclic,
    require_state,
    restrict,
    support_analysis,
    support_closure,
)
from srpa.multiset import Multiset, order_key

Atom = frozenset  # frozenset[State]
Symbol = Union[str, Multiset]


@dataclass
class AtomNfa:
    """An NFA over letters and multisets of atoms."""

    states: frozenset[State]
    accepting: frozenset[State]
    symbols: set[Symbol] = field(default_factory=set)
    transitions: dict[tuple[State, Symbol], set[State]] = field(default_factory=dict)

    def step(self, q: State, x: Symbol) -> set[State]:
        return self.transitions.get((q, x), set())

    def accepts(self, q: State, word: Iterable[Symbol]) -> bool:
        current = {q}
        for x in word:
            current = {t for s in current for t in self.step(s, x)}
        return bool(current & self.accepting)


def _require_well_structured(a: Pa) -> None:
    require_fork_acyclic(a)
    report = check_structure(a)
    if not report.well_structured:
        raise PaError(f"automaton is not well-structured: {report.as_dict()}")


def build_atom_nfa(a: Pa, atoms_below: Iterable[Atom], check: bool = True) -> AtomNfa:
    """Replace every fork by letters naming one atom per fork member."""
    if check:
        _require_well_structured(a)
    atoms_below = sorted(set(atoms_below), key=order_key)
    containing: dict[State, list[Atom]] = {}
    for alpha in atoms_below:
        for q in alpha:
            containing.setdefault(q, []).append(alpha)
    nfa = AtomNfa(states=a.states, accepting=a.accepting, symbols=set(a.alphabet))
    for (q, x), ts in a.delta.items():
        nfa.transitions.setdefault((q, x), set()).update(ts)
    for q, fork, ts in a.all_forks():
        choices = [containing.get(r, []) for r in fork]
        for picked in product(*choices):
            sym = Multiset(picked)
            nfa.symbols.add(sym)
            nfa.transitions.setdefault((q, sym), set()).update(ts)
    return nfa


def nfa_atoms(nfa: AtomNfa) -> set[Atom]:
    """All acceptance classes of words, by determinizing the reversed NFA."""
    preds: dict[Symbol, dict[State, set[State]]] = {}
    for (q, x), ts in nfa.transitions.items():
        table = preds.setdefault(x, {})
        for t in ts:
            table.setdefault(t, set()).add(q)
    start = frozenset(nfa.accepting)
    seen = {start}
    queue = deque([start])
    while queue:
        current = queue.popleft()
        for table in preds.values():
            before = frozenset(p for t in current for p in table.get(t, ()))
            if before not in seen:
                seen.add(before)
                queue.append(before)
    if nfa.symbols - preds.keys():
        # a symbol without transitions is accepted from nowhere
        seen.add(frozenset())
    return seen


def pa_atoms(a: Pa) -> set[Atom]:
    """The atoms of a finite, fork-acyclic, well-structured automaton."""
    _require_well_structured(a)
    sa = support_analysis(a)
    atoms: set[Atom] = {frozenset()}
    for level in range(1, sa.depth + 1):
        layer = restrict(a, [q for q in a.states if sa.depth_of[q] <= level])
        atoms = nfa_atoms(build_atom_nfa(layer, atoms, check=False))
    if a.alphabet or not a.accepting:
        # a parallel pomset wider than every fork is accepted nowhere
        atoms.add(frozenset())
    return atoms


def state_equiv(a: Pa, q1: State, q2: State) -> bool:
    """Whether two states of a well-structured automaton accept the same language."""
    require_state(a, q1)
    require_state(a, q2)
    if q1 == q2:
        return True
    sub = restrict(a, support_closure(a, [q1, q2]))
    return all((q1 in alpha) == (q2 in alpha) for alpha in pa_atoms(sub))


def format_atom(alpha: Atom) -> str:
    return "{" + ", ".join(sorted(alpha)) + "}"


__all__ = ["Atom", "AtomNfa", "build_atom_nfa", "format_atom", "nfa_atoms", "pa_atoms", "state_equiv"]
