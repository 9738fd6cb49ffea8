"""Pomset automata: data model, support analysis, empty runs, membership and I/O."""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from itertools import chain
from pathlib import Path
from typing import Iterable, Iterator, Mapping

import networkx as nx

from srpa._text import LETTER_RE
from srpa.multiset import Multiset
from srpa.pomset import EMPTY, Kind, SpTerm, factorize_par, factorize_seq, par_all, seq_all

State = str
Fork = Multiset  # Multiset[State]


class PaError(ValueError):
    """Invalid automaton or an operation applied outside its precondition."""


class Pa:
    """A finite pomset automaton.

    ``delta`` maps ``(state, letter)`` to successor sets and ``gamma`` maps
    ``(state, fork)`` to continuation sets. Entries with empty results are
    dropped on construction, so every stored entry is a real transition.
    Instances are treated as immutable; derived data is cached on first use.
    """

    def __init__(
        self,
        states: Iterable[State],
        accepting: Iterable[State] = (),
        delta: Mapping[tuple[State, str], Iterable[State]] | None = None,
        gamma: Mapping[tuple[State, Multiset], Iterable[State]] | None = None,
        alphabet: Iterable[str] = (),
    ) -> None:
        self.states: frozenset[State] = frozenset(states)
        self.accepting: frozenset[State] = frozenset(accepting)
        self.delta: dict[tuple[State, str], frozenset[State]] = {}
        for key, targets in (delta or {}).items():
            targets = frozenset(targets)
            if targets:
                self.delta[key] = targets
        self.gamma: dict[tuple[State, Multiset], frozenset[State]] = {}
        for (q, fork), targets in (gamma or {}).items():
            targets = frozenset(targets)
            if targets:
                fork = fork if isinstance(fork, Multiset) else Multiset(fork)
                self.gamma[(q, fork)] = targets
        self.alphabet: frozenset[str] = frozenset(alphabet) | {a for _, a in self.delta}
        self._cache: dict = {}
        self._delta_of: dict[State, list[tuple[str, frozenset[State]]]] = {}
        self._forks_of: dict[State, list[tuple[Multiset, frozenset[State]]]] = {}
        for (q, a), ts in sorted(self.delta.items()):
            self._delta_of.setdefault(q, []).append((a, ts))
        for (q, fork), ts in sorted(self.gamma.items(), key=lambda kv: (kv[0][0], kv[0][1].sort_key)):
            self._forks_of.setdefault(q, []).append((fork, ts))

    def __repr__(self) -> str:
        return (
            f"Pa(states={len(self.states)}, accepting={len(self.accepting)}, "
            f"delta={len(self.delta)}, gamma={len(self.gamma)})"
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Pa):
            return NotImplemented
        return (
            self.states == other.states
            and self.accepting == other.accepting
            and self.delta == other.delta
            and self.gamma == other.gamma
            and self.alphabet == other.alphabet
        )

    __hash__ = None  # type: ignore[assignment]

    def step(self, q: State, a: str) -> frozenset[State]:
        return self.delta.get((q, a), frozenset())

    def fork_step(self, q: State, fork: Multiset) -> frozenset[State]:
        return self.gamma.get((q, fork), frozenset())

    def letter_moves(self, q: State) -> list[tuple[str, frozenset[State]]]:
        return self._delta_of.get(q, [])

    def forks(self, q: State) -> list[tuple[Multiset, frozenset[State]]]:
        """Stored forks leaving ``q`` as ``(members, continuations)`` pairs."""
        return self._forks_of.get(q, [])

    def all_forks(self) -> Iterator[tuple[State, Multiset, frozenset[State]]]:
        for (q, fork), ts in self.gamma.items():
            yield q, fork, ts

    def successors(self, q: State) -> set[State]:
        """States directly below ``q`` in the support preorder."""
        out: set[State] = set()
        for _, ts in self.letter_moves(q):
            out |= ts
        for fork, ts in self.forks(q):
            out |= ts
            out.update(fork.distinct())
        return out


# -- validation ------------------------------------------------------------------

def validate(a: Pa) -> list[str]:
    """Every violated structural invariant, as human-readable messages."""
    problems: list[str] = []
    for q in sorted(a.accepting - a.states):
        problems.append(f"accepting state {q!r} is not a state")
    for letter in sorted(a.alphabet):
        if not LETTER_RE.fullmatch(letter):
            problems.append(f"invalid letter {letter!r}")
    for (q, letter), ts in sorted(a.delta.items()):
        if q not in a.states:
            problems.append(f"delta source {q!r} is not a state")
        for t in sorted(ts - a.states):
            problems.append(f"delta target {t!r} from {q!r} on {letter!r} is not a state")
    for (q, fork), ts in sorted(a.gamma.items(), key=lambda kv: (kv[0][0], kv[0][1].sort_key)):
        if q not in a.states:
            problems.append(f"fork source {q!r} is not a state")
        for r in fork.distinct():
            if r not in a.states:
                problems.append(f"fork member {r!r} of {q!r} is not a state")
        for t in sorted(ts - a.states):
            problems.append(f"fork continuation {t!r} from {q!r} is not a state")
    return problems


def require_valid(a: Pa) -> None:
    problems = validate(a)
    if problems:
        raise PaError("; ".join(problems))


def require_state(a: Pa, q: State) -> None:
    if q not in a.states:
        raise PaError(f"unknown state {q!r}")


# -- support ---------------------------------------------------------------------

@dataclass(frozen=True)
class SupportAnalysis:
    """Support preorder facts. ``below[q]`` holds every r with r supporting-below q (r ⪯ q)."""

    below: Mapping[State, frozenset[State]]
    scc_index: Mapping[State, int]
    depth_of: Mapping[State, int]
    depth: int

    def le(self, r: State, q: State) -> bool:
        """r ⪯ q: r may take part in runs from q."""
        return r in self.below[q]

    def lt(self, r: State, q: State) -> bool:
        return self.le(r, q) and not self.le(q, r)

    @property
    def preorder(self) -> set[tuple[State, State]]:
        return {(r, q) for q, rs in self.below.items() for r in rs}

    @property
    def strict(self) -> set[tuple[State, State]]:
        return {(r, q) for (r, q) in self.preorder if not self.le(q, r)}


def _support_graph(a: Pa) -> nx.DiGraph:
    g = nx.DiGraph()
    g.add_nodes_from(a.states)
    for q in a.states:
        for r in a.successors(q):
            g.add_edge(q, r)
    return g


def support_analysis(a: Pa) -> SupportAnalysis:
    hit = a._cache.get("support")
    if hit is not None:
        return hit
    g = _support_graph(a)
    cond = nx.condensation(g)
    members = cond.graph["mapping"]  # state -> component
    order = list(reversed(list(nx.topological_sort(cond))))  # sinks first
    comp_below: dict[int, frozenset[State]] = {}
    comp_depth: dict[int, int] = {}
    for c in order:
        own = frozenset(cond.nodes[c]["members"])
        acc = set(own)
        d = 1
        for s in cond.successors(c):
            acc |= comp_below[s]
            d = max(d, comp_depth[s] + 1)
        comp_below[c] = frozenset(acc)
        comp_depth[c] = d
    result = SupportAnalysis(
        below={q: comp_below[members[q]] for q in a.states},
        scc_index=dict(members),
        depth_of={q: comp_depth[members[q]] for q in a.states},
        depth=max(comp_depth.values(), default=0),
    )
    a._cache["support"] = result
    return result


def fork_cycle_witness(a: Pa) -> tuple[State, State] | None:
    """A pair (q, r) with r a member of a fork of q and q ⪯ r, or None."""
    sa = support_analysis(a)
    for q, fork, _ in sorted(a.all_forks(), key=lambda t: (t[0], t[1].sort_key)):
        for r in fork.distinct():
            if sa.le(q, r):
                return q, r
    return None


def is_fork_acyclic(a: Pa) -> bool:
    hit = a._cache.get("fork_acyclic")
    if hit is None:
        hit = fork_cycle_witness(a) is None
        a._cache["fork_acyclic"] = hit
    return hit


def require_fork_acyclic(a: Pa) -> None:
    witness = fork_cycle_witness(a)
    if witness is not None:
        q, r = witness
        raise PaError(f"automaton is not fork-acyclic: {q!r} forks into {r!r}, which supports it")


def support_closure(a: Pa, seed: Iterable[State]) -> frozenset[State]:
    seen: set[State] = set()
    stack = list(seed)
    for q in stack:
        require_state(a, q)
    while stack:
        q = stack.pop()
        if q in seen:
            continue
        seen.add(q)
        stack.extend(a.successors(q) - seen)
    return frozenset(seen)


def support_violation(a: Pa, subset: Iterable[State]) -> tuple[State, State] | None:
    keep = frozenset(subset)
    for q in sorted(keep):
        for r in sorted(a.successors(q)):
            if r not in keep:
                return q, r
    return None


def restrict(a: Pa, subset: Iterable[State]) -> Pa:
    """The sub-automaton on a support-closed set of states."""
    keep = frozenset(subset)
    unknown = keep - a.states
    if unknown:
        raise PaError(f"unknown states {sorted(unknown)}")
    bad = support_violation(a, keep)
    if bad is not None:
        raise PaError(f"state set is not support-closed: {bad[0]!r} needs {bad[1]!r}")
    return Pa(
        states=keep,
        accepting=a.accepting & keep,
        delta={k: v for k, v in a.delta.items() if k[0] in keep},
        gamma={k: v for k, v in a.gamma.items() if k[0] in keep},
        alphabet=a.alphabet,
    )


# -- empty-pomset runs -----------------------------------------------------------

def leadsto(a: Pa) -> dict[State, frozenset[State]]:
    """For each state p, the states q such that p reads the empty pomset to q.

    Computed as a least fixpoint: reflexive, transitive, and closed under
    forks whose members can all reach an accepting state on the empty pomset.
    """
    hit = a._cache.get("leadsto")
    if hit is not None:
        return hit
    reach: dict[State, set[State]] = {q: {q} for q in a.states}
    nullable: set[State] = set(a.accepting)
    changed = True
    while changed:
        changed = False
        # one-step edges from forks whose members are currently nullable
        edges: dict[State, set[State]] = {}
        for q, fork, ts in a.all_forks():
            if all(r in nullable for r in fork.distinct()):
                edges.setdefault(q, set()).update(ts)
        for q in a.states:
            frontier = list(reach[q])
            seen = reach[q]
            while frontier:
                p = frontier.pop()
                for t in edges.get(p, ()):
                    if t not in seen:
                        seen.add(t)
                        frontier.append(t)
                        changed = True
        for q in a.states:
            if q not in nullable and reach[q] & a.accepting:
                nullable.add(q)
                changed = True
    result = {q: frozenset(s) for q, s in reach.items()}
    a._cache["leadsto"] = result
    return result


def empty_accepting(a: Pa) -> frozenset[State]:
    hit = a._cache.get("empty_accepting")
    if hit is None:
        lt = leadsto(a)
        hit = frozenset(q for q in a.states if lt[q] & a.accepting)
        a._cache["empty_accepting"] = hit
    return hit


def accepts_empty(a: Pa, q: State) -> bool:
    require_state(a, q)
    return q in empty_accepting(a)


# -- membership ------------------------------------------------------------------

# Pomset splits depend only on the pomset, so they are shared by all runners.

@lru_cache(maxsize=200_000)
def _seq_splits(u: SpTerm) -> tuple[tuple[SpTerm, SpTerm], ...]:
    """Every way to cut u into a non-empty prefix and a suffix."""
    factors = factorize_seq(u)
    return tuple((seq_all(factors[:j]), seq_all(factors[j:])) for j in range(1, len(factors) + 1))


@lru_cache(maxsize=200_000)
def _par_primes(v: SpTerm) -> Multiset:
    return factorize_par(v)


@lru_cache(maxsize=200_000)
def _par_splits(primes: Multiset) -> tuple[tuple[SpTerm, Multiset], ...]:
    """Every way to take a share (as a pomset) out of a multiset of parallel primes."""
    return tuple((par_all(part), primes - part) for part in primes.sub_multisets())


class _Runner:
    """Memoized run search for one automaton (general algorithm)."""

    def __init__(self, a: Pa) -> None:
        self.a = a
        self.closure = leadsto(a)
        self.reach_memo: dict[tuple[State, SpTerm], frozenset[State]] = {}
        self.accept_memo: dict[tuple[State, SpTerm], bool] = {}
        self.split_memo: dict[tuple[tuple[State, ...], Multiset], bool] = {}

    def accepts(self, q: State, u: SpTerm) -> bool:
        key = (q, u)
        hit = self.accept_memo.get(key)
        if hit is None:
            hit = bool(self.reach(q, u) & self.a.accepting)
            self.accept_memo[key] = hit
        return hit

    def reach(self, q: State, u: SpTerm) -> frozenset[State]:
        """All states q' such that q reads u to q'."""
        key = (q, u)
        hit = self.reach_memo.get(key)
        if hit is not None:
            return hit
        if u.kind is Kind.EMPTY:
            result = self.closure[q]
        else:
            out: set[State] = set()
            for s in self.closure[q]:
                for prefix, rest in self._seq_splits(u):
                    for t in self.unit_step(s, prefix):
                        out |= self.reach(t, rest)
            result = frozenset(out)
        self.reach_memo[key] = result
        return result

    def _seq_splits(self, u: SpTerm) -> tuple[tuple[SpTerm, SpTerm], ...]:
        return _seq_splits(u)

    def _par_splits(self, primes: Multiset) -> tuple[tuple[SpTerm, Multiset], ...]:
        return _par_splits(primes)

    def unit_step(self, s: State, v: SpTerm) -> set[State]:
        """Targets of a single non-empty unit run from s reading v."""
        out: set[State] = set()
        if v.kind is Kind.PRIMITIVE:
            out |= self.a.step(s, v.letter)
        forks = self.a.forks(s)
        if not forks:
            return out
        primes = _par_primes(v)
        for fork, ts in forks:
            if ts <= out or fork.is_empty():
                continue
            if self._distribute(tuple(fork), primes):
                out |= ts
        return out

    def _distribute(self, members: tuple[State, ...], primes: Multiset) -> bool:
        """Can the parallel primes be split so member i accepts its share?"""
        key = (members, primes)
        hit = self.split_memo.get(key)
        if hit is not None:
            return hit
        head, rest = members[0], members[1:]
        if not rest:
            result = self.accepts(head, par_all(primes))
        else:
            result = any(
                self.accepts(head, share) and self._distribute(rest, remainder)
                for share, remainder in self._par_splits(primes)
            )
        self.split_memo[key] = result
        return result


class _StructuredRunner:
    """Syntax-directed run search, valid for well-structured automata only."""

    def __init__(self, a: Pa) -> None:
        self.a = a
        self.memo: dict[tuple[State, SpTerm], bool] = {}

    def accepts(self, q: State, u: SpTerm) -> bool:
        key = (q, u)
        hit = self.memo.get(key)
        if hit is None:
            states = {q}
            for v in factorize_seq(u):
                states = set(chain.from_iterable(self.unit_step(s, v) for s in states))
                if not states:
                    break
            hit = bool(states & self.a.accepting)
            self.memo[key] = hit
        return hit

    def unit_step(self, s: State, v: SpTerm) -> set[State]:
        if v.kind is Kind.PRIMITIVE:
            return set(self.a.step(s, v.letter))
        out: set[State] = set()
        primes = list(factorize_par(v))
        for fork, ts in self.a.forks(s):
            if len(fork) == len(primes) and not ts <= out and self._match(list(fork), primes):
                out |= ts
        return out

    def _match(self, members: list[State], primes: list[SpTerm]) -> bool:
        if not members:
            return True
        head = members[0]
        tried: set[SpTerm] = set()
        for i, p in enumerate(primes):
            if p in tried:
                continue
            tried.add(p)
            if self.accepts(head, p) and self._match(members[1:], primes[:i] + primes[i + 1:]):
                return True
        return False


def _runner(a: Pa, structured: bool):
    name = "structured_runner" if structured else "runner"
    hit = a._cache.get(name)
    if hit is None:
        require_fork_acyclic(a)
        hit = _StructuredRunner(a) if structured else _Runner(a)
        a._cache[name] = hit
    return hit


def membership(a: Pa, q: State, u: SpTerm, method: str = "auto") -> bool:
    """Whether state ``q`` accepts pomset ``u``.

    ``method`` is ``"general"``, ``"structured"`` (well-structured automata
    only) or ``"auto"``, which picks the structured search when it applies.
    """
    require_state(a, q)
    if method == "auto":
        method = "structured" if check_structure(a).well_structured else "general"
    if method == "general":
        return _runner(a, False).accepts(q, u)
    if method == "structured":
        if not check_structure(a).well_structured:
            raise PaError("structured membership needs a well-structured automaton")
        return _runner(a, True).accepts(q, u)
    raise ValueError(f"unknown membership method {method!r}")


def reach(a: Pa, q: State, u: SpTerm) -> frozenset[State]:
    """States reachable from q by reading u (general algorithm)."""
    require_state(a, q)
    return _runner(a, False).reach(q, u)


# -- structural properties -------------------------------------------------------

@dataclass(frozen=True)
class StructureReport:
    n_forking_min: int | None  # smallest fork arity; None when there are no forks
    parsimonious: bool
    flat_branching: bool
    fork_acyclic: bool

    @property
    def well_structured(self) -> bool:
        arity_ok = self.n_forking_min is None or self.n_forking_min >= 2
        return arity_ok and self.parsimonious and self.flat_branching

    def as_dict(self) -> dict:
        return {
            "n_forking_min": self.n_forking_min,
            "parsimonious": self.parsimonious,
            "flat_branching": self.flat_branching,
            "well_structured": self.well_structured,
            "fork_acyclic": self.fork_acyclic,
        }


def check_structure(a: Pa) -> StructureReport:
    hit = a._cache.get("structure")
    if hit is not None:
        return hit
    nullable = empty_accepting(a)
    arities = [len(fork) for _, fork, _ in a.all_forks()]
    members = {r for _, fork, _ in a.all_forks() for r in fork.distinct()}
    parsimonious = not (members & nullable)
    flat = all(not (ts & a.accepting) for r in members for _, ts in a.forks(r))
    report = StructureReport(
        n_forking_min=min(arities) if arities else None,
        parsimonious=parsimonious,
        flat_branching=flat,
        fork_acyclic=is_fork_acyclic(a),
    )
    a._cache["structure"] = report
    return report


# -- renaming and disjoint union -------------------------------------------------

def rename(a: Pa, mapping: Mapping[State, State]) -> Pa:
    """Apply an injective renaming; unmapped states keep their names."""
    f = lambda q: mapping.get(q, q)  # noqa: E731
    if len({f(q) for q in a.states}) != len(a.states):
        raise PaError("renaming is not injective")
    return Pa(
        states=map(f, a.states),
        accepting=map(f, a.accepting),
        delta={(f(q), x): map(f, ts) for (q, x), ts in a.delta.items()},
        gamma={(f(q), fork.map(f)): map(f, ts) for (q, fork), ts in a.gamma.items()},
        alphabet=a.alphabet,
    )


def fresh_name(base: str, taken: Iterable[State]) -> str:
    taken = set(taken)
    if base not in taken:
        return base
    i = 1
    while f"{base}#{i}" in taken:
        i += 1
    return f"{base}#{i}"


# -- file format -----------------------------------------------------------------

def to_json_dict(a: Pa) -> dict:
    return {
        "alphabet": sorted(a.alphabet),
        "states": sorted(a.states),
        "accepting": sorted(a.accepting),
        "delta": [
            {"from": q, "label": x, "to": sorted(ts)}
            for (q, x), ts in sorted(a.delta.items())
        ],
        "gamma": [
            {"from": q, "fork": [[r, m] for r, m in fork.items], "to": sorted(ts)}
            for (q, fork), ts in sorted(a.gamma.items(), key=lambda kv: (kv[0][0], kv[0][1].sort_key))
        ],
    }


def dumps(a: Pa) -> str:
    return json.dumps(to_json_dict(a), indent=2, ensure_ascii=False) + "\n"


def save(a: Pa, path: str | Path) -> None:
    Path(path).write_text(dumps(a), encoding="utf-8")


def _expect(cond: bool, where: str, message: str) -> None:
    if not cond:
        raise PaError(f"{where}: {message}")


def _str_list(value, where: str) -> list[str]:
    _expect(isinstance(value, list), where, "expected an array")
    for i, v in enumerate(value):
        _expect(isinstance(v, str), f"{where}[{i}]", "expected a string")
    return value


def from_json_dict(data) -> Pa:
    _expect(isinstance(data, dict), "$", "expected an object")
    extra = set(data) - {"alphabet", "states", "accepting", "delta", "gamma"}
    _expect(not extra, "$", f"unknown keys {sorted(extra)}")
    states = _str_list(data.get("states", []), "$.states")
    _expect(len(set(states)) == len(states), "$.states", "duplicate state names")
    alphabet = _str_list(data.get("alphabet", []), "$.alphabet")
    accepting = _str_list(data.get("accepting", []), "$.accepting")

    delta: dict = {}
    raw_delta = data.get("delta", [])
    _expect(isinstance(raw_delta, list), "$.delta", "expected an array")
    for i, entry in enumerate(raw_delta):
        where = f"$.delta[{i}]"
        _expect(isinstance(entry, dict) and set(entry) == {"from", "label", "to"}, where,
                "expected keys from, label, to")
        _expect(isinstance(entry["from"], str) and isinstance(entry["label"], str), where,
                "from and label must be strings")
        to = _str_list(entry["to"], f"{where}.to")
        _expect(bool(to), f"{where}.to", "must be non-empty")
        key = (entry["from"], entry["label"])
        _expect(key not in delta, where, f"duplicate entry for {key}")
        delta[key] = to

    gamma: dict = {}
    raw_gamma = data.get("gamma", [])
    _expect(isinstance(raw_gamma, list), "$.gamma", "expected an array")
    for i, entry in enumerate(raw_gamma):
        where = f"$.gamma[{i}]"
        _expect(isinstance(entry, dict) and set(entry) == {"from", "fork", "to"}, where,
                "expected keys from, fork, to")
        _expect(isinstance(entry["from"], str), f"{where}.from", "expected a string")
        _expect(isinstance(entry["fork"], list), f"{where}.fork", "expected an array")
        pairs = []
        for j, pair in enumerate(entry["fork"]):
            pw = f"{where}.fork[{j}]"
            _expect(isinstance(pair, list) and len(pair) == 2, pw, "expected [state, multiplicity]")
            _expect(isinstance(pair[0], str), pw, "state must be a string")
            _expect(isinstance(pair[1], int) and not isinstance(pair[1], bool) and pair[1] > 0, pw,
                    "multiplicity must be a positive integer")
            pairs.append((pair[0], pair[1]))
        _expect(len({s for s, _ in pairs}) == len(pairs), f"{where}.fork", "repeated state")
        to = _str_list(entry["to"], f"{where}.to")
        _expect(bool(to), f"{where}.to", "must be non-empty")
        key = (entry["from"], Multiset.from_pairs(pairs))
        _expect(key not in gamma, where, "duplicate fork entry")
        gamma[key] = to

    a = Pa(states=states, accepting=accepting, delta=delta, gamma=gamma, alphabet=alphabet)
    problems = validate(a)
    _expect(not problems, "$", "; ".join(problems))
    return a


def loads(text: str) -> Pa:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PaError(f"invalid JSON: {exc}") from exc
    return from_json_dict(data)


def load(path: str | Path) -> Pa:
    return loads(Path(path).read_text(encoding="utf-8"))


def canonical(a: Pa) -> Pa:
    """Round-trip through the file format (drops caches)."""
    return loads(dumps(a))


__all__ = [
    "EMPTY",
    "Pa",
    "PaError",
    "StructureReport",
    "SupportAnalysis",
    "accepts_empty",
    "check_structure",
    "dumps",
    "fork_cycle_witness",
    "is_fork_acyclic",
    "leadsto",
    "load",
    "loads",
    "membership",
    "reach",
    "restrict",
    "save",
    "support_analysis",
    "support_closure",
    "validate",
]
