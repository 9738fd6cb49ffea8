"""Immutable finite multisets with a canonical element order."""

from __future__ import annotations

from collections import Counter
from itertools import product
from typing import Any, Generic, Hashable, Iterable, Iterator, TypeVar

T = TypeVar("T", bound=Hashable)


def order_key(value: Any) -> Any:
    """Total-order key shared by every value that can sit inside a multiset.

    Objects may provide a ``sort_key`` attribute; frozensets (atoms) order by
    their sorted member list; everything else orders by itself.
    """
    key = getattr(value, "sort_key", None)
    if key is not None:
        return key
    if isinstance(value, frozenset):
        return (len(value), tuple(sorted(order_key(v) for v in value)))
    if isinstance(value, Multiset):
        return value.sort_key
    return value


class Multiset(Generic[T]):
    """A finite multiset, stored as ``(element, multiplicity)`` pairs.

    Pairs are kept in strictly increasing element order, so two multisets are
    equal exactly when their ``items`` tuples are.
    """

    __slots__ = ("items", "_hash", "_size")

    def __init__(self, elements: Iterable[T] = ()) -> None:
        counts = Counter(elements)
        self.items: tuple[tuple[T, int], ...] = tuple(
            sorted(counts.items(), key=lambda kv: order_key(kv[0]))
        )
        self._size = sum(counts.values())
        self._hash = hash(self.items)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[T, int]]) -> Multiset[T]:
        elements: list[T] = []
        for elem, mult in pairs:
            if mult <= 0:
                raise ValueError(f"multiplicity of {elem!r} must be positive, got {mult}")
            elements.extend([elem] * mult)
        return cls(elements)

    def __len__(self) -> int:
        return self._size

    def __iter__(self) -> Iterator[T]:
        for elem, mult in self.items:
            for _ in range(mult):
                yield elem

    def __contains__(self, elem: object) -> bool:
        return any(e == elem for e, _ in self.items)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Multiset):
            return NotImplemented
        return self._hash == other._hash and self.items == other.items

    def __hash__(self) -> int:
        return self._hash

    def __add__(self, other: Multiset[T]) -> Multiset[T]:
        """Disjoint union: multiplicities add up."""
        return Multiset([*self, *other])

    def __sub__(self, other: Multiset[T]) -> Multiset[T]:
        counts = Counter(self)
        counts.subtract(Counter(other))
        if any(v < 0 for v in counts.values()):
            raise ValueError("cannot remove elements that are not present")
        return Multiset(counts.elements())

    def __repr__(self) -> str:
        inner = ", ".join(repr(e) for e in self)
        return f"⟦{inner}⟧"

    @property
    def sort_key(self) -> tuple:
        return tuple((order_key(e), m) for e, m in self.items)

    def count(self, elem: T) -> int:
        for e, m in self.items:
            if e == elem:
                return m
        return 0

    def distinct(self) -> tuple[T, ...]:
        return tuple(e for e, _ in self.items)

    def is_empty(self) -> bool:
        return self._size == 0

    def sub_multisets(self) -> Iterator[Multiset[T]]:
        """Every sub-multiset, including the empty one and ``self``."""
        ranges = [range(m + 1) for _, m in self.items]
        for counts in product(*ranges):
            yield Multiset.from_pairs(
                (e, c) for (e, _), c in zip(self.items, counts) if c
            )

    def map(self, fn) -> Multiset:
        return Multiset(fn(e) for e in self)


EMPTY_MULTISET: Multiset = Multiset()
