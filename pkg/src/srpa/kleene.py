"""Expressions to automata (derivatives) and automata to expressions (state elimination)."""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable

from srpa.automaton import Pa, State, require_fork_acyclic, require_state, support_analysis
from srpa.equiv import state_equiv
from srpa.expr import (
    ONE,
    ZERO,
    Dot,
    Expr,
    Par,
    Plus,
    Prim,
    Star,
    Zero,
    letters_of,
    nullable,
    simplify,
)
from srpa.multiset import Multiset
from srpa.wellstruct import well_structure

GammaTable = dict[Multiset, frozenset[Expr]]

SUPPORT_LIMIT = 100_000


@lru_cache(maxsize=None)
def delta_derivative(e: Expr, a: str) -> frozenset[Expr]:
    """Expressions reached from ``e`` by reading the letter ``a``."""
    match e:
        case Prim(b):
            return frozenset({ONE}) if a == b else frozenset()
        case Plus(l, r):
            return delta_derivative(l, a) | delta_derivative(r, a)
        case Dot(l, r):
            out = {Dot(d, r) for d in delta_derivative(l, a)}
            if nullable(l):
                out |= delta_derivative(r, a)
            return frozenset(out)
        case Star(f):
            return frozenset(Dot(d, e) for d in delta_derivative(f, a))
    return frozenset()


def _merge(into: dict[Multiset, set[Expr]], table: GammaTable) -> None:
    for fork, ts in table.items():
        into.setdefault(fork, set()).update(ts)


@lru_cache(maxsize=None)
def _gamma(e: Expr) -> tuple[tuple[Multiset, frozenset[Expr]], ...]:
    out: dict[Multiset, set[Expr]] = {}
    match e:
        case Par(l, r):
            out[Multiset([l, r])] = {ONE}
        case Plus(l, r):
            _merge(out, gamma_derivative(l))
            _merge(out, gamma_derivative(r))
        case Dot(l, r):
            for fork, ts in gamma_derivative(l).items():
                out.setdefault(fork, set()).update(Dot(t, r) for t in ts)
            if nullable(l):
                _merge(out, gamma_derivative(r))
        case Star(f):
            for fork, ts in gamma_derivative(f).items():
                out.setdefault(fork, set()).update(Dot(t, e) for t in ts)
    return tuple(sorted(((k, frozenset(v)) for k, v in out.items()), key=lambda kv: kv[0].sort_key))


def gamma_derivative(e: Expr) -> GammaTable:
    """Forks available from ``e``: member multiset to continuation expressions."""
    return dict(_gamma(e))


def _neighbours(e: Expr, alphabet: Iterable[str]) -> set[Expr]:
    out: set[Expr] = set()
    for a in alphabet:
        out |= delta_derivative(e, a)
    for fork, ts in gamma_derivative(e).items():
        out |= ts
        out.update(fork.distinct())
    return out


def expr_support(e: Expr) -> frozenset[Expr]:
    """Every expression that can take part in runs from ``e`` (including ``e``)."""
    return _support([e], sorted(letters_of(e)))


def _support(roots: Iterable[Expr], alphabet: list[str]) -> frozenset[Expr]:
    seen: set[Expr] = set()
    stack = list(roots)
    while stack:
        e = stack.pop()
        if e in seen:
            continue
        seen.add(e)
        if len(seen) > SUPPORT_LIMIT:
            raise RuntimeError(f"support of the expression exceeds {SUPPORT_LIMIT} states")
        stack.extend(_neighbours(e, alphabet) - seen)
    return frozenset(seen)


def compile_exprs(es: Iterable[Expr]) -> tuple[Pa, dict[Expr, State]]:
    """The derivative automaton on the joint support of ``es``.

    States are named by the printed form of their expression.
    """
    es = list(es)
    alphabet = sorted(set().union(*(letters_of(e) for e in es))) if es else []
    exprs = _support(es, alphabet)
    name = {e: str(e) for e in exprs}
    delta: dict = {}
    gamma: dict = {}
    for e in exprs:
        for a in alphabet:
            ts = delta_derivative(e, a)
            if ts:
                delta[(name[e], a)] = {name[t] for t in ts}
        for fork, ts in gamma_derivative(e).items():
            gamma[(name[e], fork.map(name.__getitem__))] = {name[t] for t in ts}
    pa = Pa(
        states=name.values(),
        accepting=[name[e] for e in exprs if nullable(e)],
        delta=delta,
        gamma=gamma,
        alphabet=alphabet,
    )
    return pa, {e: name[e] for e in es}


compile = compile_exprs  # noqa: A001  (public name used throughout)


# -- extraction ------------------------------------------------------------------

def _plus(x: Expr, y: Expr) -> Expr:
    if isinstance(x, Zero):
        return y
    if isinstance(y, Zero):
        return x
    return Plus(x, y)


def _par_all(es: list[Expr]) -> Expr:
    if not es:
        return ONE
    out = es[0]
    for e in es[1:]:
        out = Par(out, e)
    return out


class _Extractor:
    def __init__(self, a: Pa) -> None:
        require_fork_acyclic(a)
        self.a = a
        sa = support_analysis(a)
        self.component: dict[int, list[State]] = {}
        for q, c in sa.scc_index.items():
            self.component.setdefault(c, []).append(q)
        for states in self.component.values():
            states.sort()
        self.scc = sa.scc_index
        self.memo: dict[State, Expr] = {}

    def state_expr(self, q: State) -> Expr:
        hit = self.memo.get(q)
        if hit is None:
            self._solve(self.scc[q])
            hit = self.memo[q]
        return hit

    def _unit(self, p: State) -> dict[State, Expr]:
        """Expressions for single unit runs out of p, keyed by target."""
        row: dict[State, Expr] = {}
        for x, ts in self.a.letter_moves(p):
            for r in ts:
                row[r] = _plus(row.get(r, ZERO), Prim(x))
        for fork, ts in self.a.forks(p):
            term = simplify(_par_all([self.state_expr(s) for s in fork]))
            for r in ts:
                row[r] = _plus(row.get(r, ZERO), term)
        return {r: simplify(e) for r, e in row.items()}

    def _solve(self, comp: int) -> None:
        inside = self.component[comp]
        rows = {p: self._unit(p) for p in inside}
        # eliminate intermediate states one at a time, in name order
        for s in inside:
            loop = Star(rows[s].get(s, ZERO))
            through = rows[s]
            new_rows = {}
            for p in inside:
                row = dict(rows[p])
                into = rows[p].get(s)
                if into is not None:
                    for r, out in through.items():
                        extra = Dot(Dot(into, loop), out)
                        row[r] = simplify(_plus(row.get(r, ZERO), extra))
                new_rows[p] = row
            rows = new_rows
        for p in inside:
            total: Expr = ONE if p in self.a.accepting else ZERO
            for r, e in sorted(rows[p].items()):
                if self.scc[r] == comp:
                    if r in self.a.accepting:
                        total = _plus(total, e)
                else:
                    total = _plus(total, Dot(e, self.state_expr(r)))
            self.memo[p] = simplify(total)


def extract(a: Pa, q: State) -> Expr:
    """An expression whose language is the language of state ``q``."""
    require_state(a, q)
    return _Extractor(a).state_expr(q)


# -- end-to-end decision ---------------------------------------------------------

def expr_equiv(e: Expr, f: Expr) -> bool:
    """Whether two expressions denote the same pomset language."""
    if e == f:
        return True
    pa, states = compile_exprs([e, f])
    qe, qf = states[e], states[f]
    ws, names = well_structure(pa, {qe, qf}, trim_dead=True)
    return state_equiv(ws, names[qe], names[qf])


__all__ = [
    "compile",
    "compile_exprs",
    "delta_derivative",
    "expr_equiv",
    "expr_support",
    "extract",
    "gamma_derivative",
]
