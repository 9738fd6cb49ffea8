"""Brute-force semantics and seeded random corpora used to cross-check the pipeline."""

from __future__ import annotations

import random
from functools import lru_cache
from math import comb
from typing import Iterable

from srpa.automaton import Pa, State, membership, require_state
from srpa.expr import ONE, ZERO, Dot, Expr, Par, Plus, Prim, Star, lang_up_to
from srpa.multiset import Multiset
from srpa.pomset import EMPTY, SpTerm, par_compose, prim, seq_compose

MAX_EVENTS = 7


def _check_bound(n: int) -> None:
    if not 0 <= n <= MAX_EVENTS:
        raise ValueError(f"bound must be between 0 and {MAX_EVENTS}, got {n}")


# -- pomset enumeration ----------------------------------------------------------

@lru_cache(maxsize=64)
def _by_size(alphabet: tuple[str, ...], n: int) -> tuple[frozenset[SpTerm], ...]:
    layers: list[frozenset[SpTerm]] = [frozenset({EMPTY}), frozenset(prim(a) for a in alphabet)]
    for k in range(2, n + 1):
        layer: set[SpTerm] = set()
        for i in range(1, k):
            for u in layers[i]:
                for v in layers[k - i]:
                    layer.add(seq_compose(u, v))
                    layer.add(par_compose(u, v))
        layers.append(frozenset(layer))
    return tuple(layers[: n + 1])


def enumerate_sp(alphabet: Iterable[str], n: int) -> frozenset[SpTerm]:
    """Every sp-pomset over ``alphabet`` with at most ``n`` events."""
    _check_bound(n)
    layers = _by_size(tuple(sorted(set(alphabet))), n)
    return frozenset().union(*layers)


def enumerate_sp_by_size(alphabet: Iterable[str], n: int) -> tuple[frozenset[SpTerm], ...]:
    _check_bound(n)
    return _by_size(tuple(sorted(set(alphabet))), n)


def count_sp(letters: int, n: int) -> list[int]:
    """Number of sp-pomsets of each size 0..n, by a counting recurrence.

    Sequential pomsets are sequences of at least two non-sequential factors;
    parallel pomsets are multisets of at least two non-parallel factors.
    """
    seq = [0] * (n + 1)
    par = [0] * (n + 1)

    def not_seq(m: int) -> int:
        return (letters if m == 1 else 0) + par[m]

    def not_par(m: int) -> int:
        return (letters if m == 1 else 0) + seq[m]

    for k in range(2, n + 1):
        # sequences of non-sequential factors: at least two parts
        runs = [0] * (k + 1)
        runs[0] = 1
        for t in range(1, k + 1):
            runs[t] = sum(runs[t - m] * not_seq(m) for m in range(1, t + 1) if m < k)
        seq[k] = runs[k]
        # multisets of non-parallel factors, all parts smaller than k
        ways = [1] + [0] * k
        for m in range(1, k):
            kinds = not_par(m)
            if not kinds:
                continue
            nxt = [0] * (k + 1)
            for total in range(k + 1):
                if not ways[total]:
                    continue
                j = 0
                while total + j * m <= k:
                    nxt[total + j * m] += ways[total] * comb(kinds + j - 1, j)
                    j += 1
            ways = nxt
        par[k] = ways[k]
    return [1] + [not_seq(m) + seq[m] for m in range(1, n + 1)]


# -- bounded languages ------------------------------------------------------------

def pa_lang_up_to(a: Pa, q: State, n: int, alphabet: Iterable[str] | None = None) -> frozenset[SpTerm]:
    """Pomsets with at most ``n`` events accepted by ``q``."""
    require_state(a, q)
    letters = a.alphabet if alphabet is None else alphabet
    return frozenset(u for u in enumerate_sp(letters, n) if membership(a, q, u, method="general"))


def oracle_equiv(e: Expr, f: Expr, n: int) -> bool:
    """Bounded language equality; a necessary condition for equivalence."""
    _check_bound(n)
    return lang_up_to(e, n) == lang_up_to(f, n)


def leadsto_pairs(a: Pa) -> set[tuple[State, State]]:
    """Empty-pomset reachability by literal saturation of the defining rules."""
    rel = {(q, q) for q in a.states}
    while True:
        new = set(rel)
        for q, fork, ts in a.all_forks():
            if all(any((r, f) in rel for f in a.accepting) for r in fork.distinct()):
                new.update((q, t) for t in ts)
        for p, q in rel:
            for q2, s in rel:
                if q == q2:
                    new.add((p, s))
        if new == rel:
            return rel
        rel = new


# -- random expressions ----------------------------------------------------------

LETTERS = ("a", "b", "c")
_OPS = ("plus", "dot", "par", "star")
_OP_WEIGHTS = (3, 4, 3, 2)


def random_expr(rng: random.Random, depth: int = 4, letters: tuple[str, ...] = LETTERS) -> Expr:
    """A random expression of nesting depth at most ``depth``."""
    if depth <= 0 or rng.random() < 0.25:
        roll = rng.random()
        if roll < 0.08:
            return ZERO
        if roll < 0.18:
            return ONE
        return Prim(rng.choice(letters))
    op = rng.choices(_OPS, weights=_OP_WEIGHTS)[0]
    if op == "star":
        return Star(random_expr(rng, depth - 1, letters))
    left = random_expr(rng, depth - 1, letters)
    right = random_expr(rng, depth - 1, letters)
    return {"plus": Plus, "dot": Dot, "par": Par}[op](left, right)


def expr_depth(e: Expr) -> int:
    match e:
        case Plus(l, r) | Dot(l, r) | Par(l, r):
            return 1 + max(expr_depth(l), expr_depth(r))
        case Star(f):
            return 1 + expr_depth(f)
    return 0


def _rewrites(e: Expr, rng: random.Random) -> list[Expr]:
    """Expressions with the same language as ``e``, one law applied at the root."""
    out: list[Expr] = [Plus(e, ZERO), Dot(ONE, e), Dot(e, ONE), Par(e, ONE), Plus(e, e)]
    match e:
        case Plus(l, r):
            out.append(Plus(r, l))
            if isinstance(l, Plus):
                out.append(Plus(l.left, Plus(l.right, r)))
        case Par(l, r):
            out.append(Par(r, l))
            if isinstance(l, Par):
                out.append(Par(l.left, Par(l.right, r)))
            if isinstance(r, Plus):
                out.append(Plus(Par(l, r.left), Par(l, r.right)))
        case Dot(l, r):
            if isinstance(l, Dot):
                out.append(Dot(l.left, Dot(l.right, r)))
            if isinstance(r, Plus):
                out.append(Plus(Dot(l, r.left), Dot(l, r.right)))
            if isinstance(l, Plus):
                out.append(Plus(Dot(l.left, r), Dot(l.right, r)))
        case Star(f):
            out.append(Plus(ONE, Dot(f, e)))
            out.append(Star(Star(f)))
    return out


def _positions(e: Expr) -> list[tuple[int, ...]]:
    out = [()]
    match e:
        case Plus(l, r) | Dot(l, r) | Par(l, r):
            out += [(0,) + p for p in _positions(l)] + [(1,) + p for p in _positions(r)]
        case Star(f):
            out += [(0,) + p for p in _positions(f)]
    return out


def _replace(e: Expr, path: tuple[int, ...], fn) -> Expr:
    if not path:
        return fn(e)
    head, rest = path[0], path[1:]
    match e:
        case Star(f):
            return Star(_replace(f, rest, fn))
        case Plus(l, r) | Dot(l, r) | Par(l, r):
            kids = [l, r]
            kids[head] = _replace(kids[head], rest, fn)
            return type(e)(*kids)
    raise ValueError("bad path")


def rewrite_equivalent(e: Expr, rng: random.Random, steps: int = 2) -> Expr:
    """Apply a few language-preserving laws at random positions."""
    for _ in range(steps):
        path = rng.choice(_positions(e))
        e = _replace(e, path, lambda sub: rng.choice(_rewrites(sub, rng)))
    return e


def mutate(e: Expr, rng: random.Random, letters: tuple[str, ...] = LETTERS) -> Expr:
    """Change one subterm; usually (not always) alters the language."""
    path = rng.choice(_positions(e))

    def change(sub: Expr) -> Expr:
        roll = rng.random()
        if roll < 0.3:
            return Prim(rng.choice(letters))
        if roll < 0.45:
            return Star(sub)
        if roll < 0.6:
            return ONE
        match sub:
            case Plus(l, r):
                return Dot(l, r) if roll < 0.8 else Par(l, r)
            case Dot(l, r):
                return Par(l, r) if roll < 0.8 else Dot(r, l)
            case Par(l, r):
                return Dot(l, r)
            case Star(f):
                return Dot(f, Star(f)) if roll < 0.8 else f
        return random_expr(rng, 1, letters)

    return _replace(e, path, change)


def random_expr_pair(rng: random.Random, letters: tuple[str, ...] = LETTERS) -> tuple[Expr, Expr]:
    """Pairs that often share structure: rewritten, mutated, or independent."""
    e = random_expr(rng, 3, letters)
    roll = rng.random()
    if roll < 0.45:
        return e, rewrite_equivalent(e, rng, steps=rng.randint(1, 3))
    if roll < 0.8:
        f = rewrite_equivalent(e, rng, steps=1) if rng.random() < 0.5 else e
        return e, mutate(f, rng, letters)
    return e, random_expr(rng, 3, letters)


# -- random automata -------------------------------------------------------------

def random_pa(rng: random.Random, max_states: int = 8, letters: tuple[str, ...] = ("a", "b")) -> Pa:
    """A random fork-acyclic automaton.

    States get levels; letter steps and fork continuations never climb levels
    and fork members sit strictly lower, which rules out fork cycles.
    """
    n = rng.randint(2, max_states)
    names = [f"s{i}" for i in range(n)]
    level = {q: rng.randint(0, 2) for q in names}
    level[names[0]] = 2
    accepting = {q for q in names if rng.random() < 0.35}
    delta: dict = {}
    gamma: dict = {}
    for q in names:
        same_or_lower = [r for r in names if level[r] <= level[q]]
        lower = [r for r in names if level[r] < level[q]]
        for x in letters:
            if rng.random() < 0.5:
                delta[(q, x)] = set(rng.sample(same_or_lower, rng.randint(1, min(2, len(same_or_lower)))))
        if lower:
            for _ in range(rng.choice((0, 1, 1, 2))):
                arity = rng.choices((0, 1, 2, 3), weights=(1, 2, 4, 1))[0]
                fork = Multiset(rng.choice(lower) for _ in range(arity))
                targets = set(rng.sample(same_or_lower, rng.randint(1, min(2, len(same_or_lower)))))
                gamma.setdefault((q, fork), set()).update(targets)
    return Pa(names, accepting, delta, gamma, letters)


__all__ = [
    "count_sp",
    "enumerate_sp",
    "expr_depth",
    "leadsto_pairs",
    "mutate",
    "oracle_equiv",
    "pa_lang_up_to",
    "random_expr",
    "random_expr_pair",
    "random_pa",
    "rewrite_equivalent",
]
