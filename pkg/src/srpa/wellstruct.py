"""Transformations that turn a fork-acyclic automaton into a well-structured one.

Each stage returns a new automaton together with a weak map: for every
original state, a set of new states whose languages together cover it.
:func:`strengthen` turns such a weak map back into a one-to-one
implementation by re-adding the original states.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Mapping

from srpa.automaton import (
    Pa,
    PaError,
    State,
    empty_accepting,
    fresh_name,
    leadsto,
    rename,
    require_fork_acyclic,
    require_state,
    restrict,
    support_analysis,
    support_closure,
)
from srpa.multiset import Multiset

WeakMap = dict[State, frozenset[State]]

TOP = "TOP"
STACK_SEP = "|"


def _add(table: dict, key, values: Iterable) -> None:
    values = set(values)
    if values:
        table.setdefault(key, set()).update(values)


# -- stage 0: no fork member accepts the empty pomset ----------------------------

def parsimonize(a: Pa) -> tuple[Pa, WeakMap]:
    """Move empty-pomset acceptance into a single fresh accepting state."""
    require_fork_acyclic(a)
    top = fresh_name(TOP, a.states)
    nullable = empty_accepting(a)
    delta: dict = {}
    for (q, x), ts in a.delta.items():
        _add(delta, (q, x), ts)
        if ts & nullable:
            _add(delta, (q, x), [top])
    gamma: dict = {}
    for q, fork, ts in a.all_forks():
        hits_nullable = bool(ts & nullable)
        # drop any sub-multiset of members that can all read the empty pomset
        optional = Multiset(r for r in fork if r in nullable)
        for dropped in optional.sub_multisets():
            kept = fork - dropped
            _add(gamma, (q, kept), ts)
            if hits_nullable and not kept.is_empty():
                _add(gamma, (q, kept), [top])
    out = Pa(a.states | {top}, [top], delta, gamma, a.alphabet)
    weak = {q: frozenset({q, top} if q in nullable else {q}) for q in a.states}
    return out, weak


# -- stage 1: no nullary forks ---------------------------------------------------

def remove_nullary_forks(a: Pa) -> tuple[Pa, WeakMap]:
    """Fold empty-pomset runs into the neighbouring transitions."""
    require_fork_acyclic(a)
    lt = leadsto(a)
    delta: dict = {}
    gamma: dict = {}
    for p in a.states:
        for q in lt[p]:
            for x, rs in a.letter_moves(q):
                for r in rs:
                    _add(delta, (p, x), lt[r])
            for fork, rs in a.forks(q):
                if fork.is_empty():
                    continue
                for r in rs:
                    _add(gamma, (p, fork), lt[r])
    out = Pa(a.states, a.accepting, delta, gamma, a.alphabet)
    return out, {q: lt[q] for q in a.states}


# -- stage 2: no unary forks -----------------------------------------------------

Stack = tuple[State, ...]


class _StackBuilder:
    """Lazy construction of the stack automaton from a set of seed states."""

    def __init__(self, a: Pa) -> None:
        self.a = a
        self.bound = max(support_analysis(a).depth, 1)
        self.up_memo: dict[State, frozenset[Stack]] = {}
        self.delta_memo: dict[Stack, dict[str, set[Stack]]] = {}
        self.gamma_memo: dict[Stack, dict[Multiset, set[Stack]]] = {}

    def up(self, q: State) -> frozenset[Stack]:
        """Stacks reachable from q by unary forks alone, top first."""
        hit = self.up_memo.get(q)
        if hit is not None:
            return hit
        out: set[Stack] = {(q,)}
        for fork, ts in self.a.forks(q):
            if len(fork) != 1:
                continue
            (r,) = fork.distinct()
            for w in self.up(r):
                for t in ts:
                    out.add(w + (t,))
        result = frozenset(out)
        self.up_memo[q] = result
        return result

    def _push(self, stack: Stack, rw: Stack, q2: State) -> Stack:
        new = (q2,) + rw[1:] + stack[1:]
        if len(new) > self.bound:
            raise PaError(f"stack {new} exceeds the depth bound {self.bound}")
        return new

    def moves(self, stack: Stack) -> tuple[dict[str, set[Stack]], dict[Multiset, set[Stack]]]:
        hit = self.delta_memo.get(stack)
        if hit is not None:
            return hit, self.gamma_memo[stack]
        delta: dict[str, set[Stack]] = {}
        gamma: dict[Multiset, set[Stack]] = {}
        for rw in self.up(stack[0]):
            r = rw[0]
            for x, ts in self.a.letter_moves(r):
                delta.setdefault(x, set()).update(self._push(stack, rw, t) for t in ts)
            for fork, ts in self.a.forks(r):
                if len(fork) >= 2:
                    gamma.setdefault(fork, set()).update(self._push(stack, rw, t) for t in ts)
        if len(stack) > 1 and stack[0] in self.a.accepting:
            d2, g2 = self.moves(stack[1:])
            for x, ts in d2.items():
                delta.setdefault(x, set()).update(ts)
            for fork, ts in g2.items():
                gamma.setdefault(fork, set()).update(ts)
        self.delta_memo[stack] = delta
        self.gamma_memo[stack] = gamma
        return delta, gamma


def _stack_names(stacks: Iterable[Stack], originals: Iterable[State]) -> dict[Stack, State]:
    """Length-one stacks keep their state's name; longer ones join with '|'."""
    stacks = sorted(stacks, key=lambda s: (len(s), s))
    names: dict[Stack, State] = {}
    taken: set[State] = set(originals)
    for s in stacks:
        if len(s) == 1:
            names[s] = s[0]
    for s in stacks:
        if len(s) > 1:
            name = fresh_name(STACK_SEP.join(s), taken)
            taken.add(name)
            names[s] = name
    return names


def stack_transitions(a: Pa, stack: Iterable[State]) -> tuple[dict[str, set[Stack]], dict[Multiset, set[Stack]]]:
    """Letter and fork moves of one stack state (top first) in the stack automaton."""
    stack = tuple(stack)
    if not stack:
        raise PaError("stack must not be empty")
    for q in stack:
        require_state(a, q)
    return _StackBuilder(a).moves(stack)


def remove_unary_forks(a: Pa, seeds: Iterable[State] | None = None) -> tuple[Pa, WeakMap]:
    """Replace unary forks by an explicit stack of pending continuations.

    Only stacks reachable from ``seeds`` (default: every state) are built.
    The result implements the input: each seed keeps its name.
    """
    require_fork_acyclic(a)
    seeds = sorted(a.states if seeds is None else seeds)
    for q in seeds:
        require_state(a, q)
    builder = _StackBuilder(a)
    seen: set[Stack] = set()
    queue = deque((q,) for q in seeds)
    delta: dict = {}
    gamma: dict = {}
    while queue:
        stack = queue.popleft()
        if stack in seen:
            continue
        seen.add(stack)
        d, g = builder.moves(stack)
        for x, ts in d.items():
            delta[(stack, x)] = ts
            queue.extend(ts)
        for fork, ts in g.items():
            gamma[(stack, fork)] = ts
            queue.extend(ts)
            queue.extend((r,) for r in fork.distinct())
    names = _stack_names(seen, a.states)
    accepting = [names[s] for s in seen if all(q in a.accepting for q in s)]
    out = Pa(
        states=names.values(),
        accepting=accepting,
        delta={(names[s], x): {names[t] for t in ts} for (s, x), ts in delta.items()},
        gamma={(names[s], fork): {names[t] for t in ts} for (s, fork), ts in gamma.items()},
        alphabet=a.alphabet,
    )
    return out, {q: frozenset({q}) for q in seeds}


# -- stage 3: fork members never fork into an accepting state --------------------

def expansions(a: Pa, fork: Multiset) -> frozenset[Multiset]:
    """Every multiset the fork can be flattened into (reflexive closure)."""
    final_forks: dict[State, list[Multiset]] = {}
    for q, chi, ts in a.all_forks():
        if ts & a.accepting:
            final_forks.setdefault(q, []).append(chi)
    seen = {fork}
    queue = [fork]
    while queue:
        phi = queue.pop()
        for p in phi.distinct():
            for chi in final_forks.get(p, ()):
                new = (phi - Multiset([p])) + chi
                if new not in seen:
                    seen.add(new)
                    queue.append(new)
    return frozenset(seen)


def plain_name(q: State) -> State:
    return f"{q}^r"


def final_fork_name(q: State) -> State:
    return f"{q}^f"


def flatten_forks(a: Pa) -> tuple[Pa, WeakMap]:
    """Split each state into a non-forking copy and a final-fork copy."""
    require_fork_acyclic(a)
    plain = {q: plain_name(q) for q in a.states}
    final = {q: final_fork_name(q) for q in a.states}
    names = set(plain.values()) | set(final.values())
    if len(names) != 2 * len(a.states):
        raise PaError("state names clash after splitting")
    top = fresh_name(TOP, names)
    delta: dict = {}
    for (p, x), ts in a.delta.items():
        _add(delta, (plain[p], x), [plain[t] for t in ts] + [final[t] for t in ts])
        if ts & a.accepting:
            _add(delta, (plain[p], x), [top])
    gamma: dict = {}
    for p, psi, ts in a.all_forks():
        hits_final = bool(ts & a.accepting)
        for phi in expansions(a, psi):
            key = phi.map(lambda r: plain[r])
            _add(gamma, (plain[p], key), [plain[t] for t in ts] + [final[t] for t in ts])
            if hits_final:
                _add(gamma, (final[p], key), [top])
    out = Pa(names | {top}, [top], delta, gamma, a.alphabet)
    weak = {
        q: frozenset({plain[q], final[q]} | ({top} if q in a.accepting else set()))
        for q in a.states
    }
    return out, weak


# -- weak to strong --------------------------------------------------------------

def strengthen(old: Pa, new: Pa, weak: Mapping[State, Iterable[State]], tag: str = "new") -> tuple[Pa, dict[State, State]]:
    """Re-add the original states so that each one is implemented by itself.

    New states whose names collide with an original are renamed with a
    ``#tag`` suffix. Returns the combined automaton and the renaming applied
    to the new automaton.
    """
    taken = set(old.states) | set(new.states)
    renaming: dict[State, State] = {}
    for q in sorted(new.states & old.states):
        name = fresh_name(f"{q}#{tag}", taken)
        taken.add(name)
        renaming[q] = name
    moved = rename(new, renaming) if renaming else new
    r = lambda q: renaming.get(q, q)  # noqa: E731

    nullable = empty_accepting(old)
    delta: dict = dict(moved.delta)
    gamma: dict = dict(moved.gamma)
    accepting = set(moved.accepting)
    for q, xs in weak.items():
        require_state(old, q)
        if q in nullable:
            accepting.add(q)
        for x in xs:
            x = r(x)
            if x not in moved.states:
                raise PaError(f"weak map sends {q!r} to unknown state {x!r}")
            for letter, ts in moved.letter_moves(x):
                _add(delta, (q, letter), ts)
            for fork, ts in moved.forks(x):
                _add(gamma, (q, fork), ts)
    out = Pa(moved.states | set(weak), accepting, delta, gamma, old.alphabet | new.alphabet)
    return out, renaming


# -- optional cleanup ------------------------------------------------------------

def trim(a: Pa, keep: Iterable[State]) -> Pa:
    """Drop states with empty language and everything unreachable from ``keep``.

    Languages of the kept states do not change.
    """
    keep = set(keep)
    productive: set[State] = set(a.accepting)
    changed = True
    while changed:
        changed = False
        for q in a.states - productive:
            if any(ts & productive for _, ts in a.letter_moves(q)) or any(
                ts & productive and all(r in productive for r in fork.distinct())
                for fork, ts in a.forks(q)
            ):
                productive.add(q)
                changed = True
    live = productive | keep
    delta = {k: ts & productive for k, ts in a.delta.items() if k[0] in live}
    gamma = {
        k: ts & productive
        for k, ts in a.gamma.items()
        if k[0] in live and all(r in productive for r in k[1].distinct())
    }
    pruned = Pa(live, a.accepting & live, delta, gamma, a.alphabet)
    return restrict(pruned, support_closure(pruned, keep))


# -- full pipeline ---------------------------------------------------------------

def _round(old: Pa, stage, tracked: list[State], tag: str, **kwargs) -> Pa:
    new, weak = stage(old, **kwargs)
    combined, _ = strengthen(old, new, {q: weak[q] for q in tracked}, tag=tag)
    return restrict(combined, support_closure(combined, tracked))


def well_structure(a: Pa, tracked: Iterable[State], trim_dead: bool = False) -> tuple[Pa, dict[State, State]]:
    """A well-structured automaton in which each tracked state keeps its language.

    Returns the automaton and the map from tracked states to their names in
    it (the identity: names are preserved).
    """
    tracked = sorted(set(tracked))
    for q in tracked:
        require_state(a, q)
    require_fork_acyclic(a)
    cur = restrict(a, support_closure(a, tracked))
    cur = _round(cur, parsimonize, tracked, "p")
    if trim_dead:
        cur = trim(cur, tracked)
    cur = _round(cur, remove_nullary_forks, tracked, "n")
    if trim_dead:
        cur = trim(cur, tracked)
    cur, _ = remove_unary_forks(cur, seeds=tracked)
    cur = restrict(cur, support_closure(cur, tracked))
    if trim_dead:
        cur = trim(cur, tracked)
    cur = _round(cur, flatten_forks, tracked, "f")
    if trim_dead:
        cur = trim(cur, tracked)
    return cur, {q: q for q in tracked}


__all__ = [
    "TOP",
    "expansions",
    "flatten_forks",
    "parsimonize",
    "remove_nullary_forks",
    "remove_unary_forks",
    "stack_transitions",
    "strengthen",
    "trim",
    "well_structure",
]
