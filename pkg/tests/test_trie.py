from hypothesis import given
from hypothesis import strategies as st

from ensemble_lab.trie import PrefixTrie

words = st.lists(st.lists(st.sampled_from("01"), max_size=5).map(tuple), max_size=12)


def test_basic():
    t = PrefixTrie([("0",), ("0", "1"), ("1", "1")])
    assert len(t) == 3
    assert ("0", "1") in t and ("1",) not in t
    assert t.has_prefix_of(("0", "0", "0"))
    assert not t.has_prefix_of(("1", "0"))
    assert sorted(t.minimal()) == [("0",), ("1", "1")]
    assert not t.is_prefix_free()


def test_empty_string_covers_everything():
    t = PrefixTrie([(), ("0",)])
    assert t.has_prefix_of(("1",))
    assert list(t.minimal()) == [()]


@given(words)
def test_minimal_is_antichain_of_inputs(ws):
    t = PrefixTrie(ws)
    m = list(t.minimal())
    assert set(m) <= set(ws)
    for a in m:
        for b in m:
            assert a == b or a[: len(b)] != b
    for w in ws:
        assert any(w[: len(a)] == a for a in m)
    assert PrefixTrie(m).is_prefix_free()
