from hypothesis import given
from hypothesis import strategies as st

from srpa.multiset import EMPTY_MULTISET, Multiset

small = st.lists(st.sampled_from("abcd"), max_size=6)


def test_order_and_multiplicity():
    m = Multiset(["c", "a", "b", "a"])
    assert m.items == (("a", 2), ("b", 1), ("c", 1))
    assert len(m) == 4
    assert list(m) == ["a", "a", "b", "c"]
    assert m.count("a") == 2 and m.count("z") == 0
    assert "b" in m and "z" not in m


def test_equality_ignores_input_order():
    assert Multiset("aab") == Multiset("aba")
    assert hash(Multiset("aab")) == hash(Multiset("baa"))
    assert Multiset("ab") != Multiset("aab")


def test_from_pairs_rejects_nonpositive():
    assert Multiset.from_pairs([("q3", 1), ("q4", 1)]) == Multiset(["q4", "q3"])
    try:
        Multiset.from_pairs([("q", 0)])
    except ValueError:
        pass
    else:
        raise AssertionError("zero multiplicity accepted")


def test_sub_multisets_of_small():
    subs = set(Multiset("aab").sub_multisets())
    assert subs == {EMPTY_MULTISET, Multiset("a"), Multiset("aa"), Multiset("b"), Multiset("ab"), Multiset("aab")}


@given(small, small)
def test_union_and_difference(xs, ys):
    m, n = Multiset(xs), Multiset(ys)
    assert len(m + n) == len(m) + len(n)
    assert (m + n) - n == m


@given(small)
def test_sub_multiset_count(xs):
    m = Multiset(xs)
    expected = 1
    for _, k in m.items:
        expected *= k + 1
    subs = list(m.sub_multisets())
    assert len(subs) == expected == len(set(subs))
    assert all(m - s + s == m for s in subs)
