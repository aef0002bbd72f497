import pytest
from hypothesis import given, strategies as st

from rosslerlab.errors import IncomparableDepth
from rosslerlab.symbols import SymbolSequence, periodic_words, unimodal_cmp, unimodal_leq

blocks = st.lists(st.sampled_from([1, 2]), min_size=1, max_size=7)
prefixes = st.lists(st.sampled_from([1, 2]), max_size=5)


def mobius(n):
    res, k, m = 1, 2, n
    while k * k <= m:
        if m % k == 0:
            m //= k
            if m % k == 0:
                return 0
            res = -res
        k += 1
    return -res if m > 1 else res


def primitive_count(n):
    return sum(mobius(d) * 2 ** (n // d) for d in range(1, n + 1) if n % d == 0)


@pytest.mark.parametrize("text, word, tail", [
    ("(12)", (1, 2), (0, 2)),
    ("2(1)", (2, 1), (1, 1)),
    ("(1212)", (1, 2), (0, 2)),
    ("1(21)", (1, 2), (0, 2)),
    ("1,2,1", (1, 2, 1), None),
    ("121", (1, 2, 1), None),
])
def test_parse_normal_form(text, word, tail):
    s = SymbolSequence.parse(text)
    assert s.word == word and s.periodic_tail == tail


def test_parse_rejects_garbage():
    with pytest.raises(ValueError):
        SymbolSequence.parse("(13)")
    with pytest.raises(ValueError):
        SymbolSequence((1, 3))


@given(prefixes, blocks)
def test_str_parse_roundtrip(pre, blk):
    s = SymbolSequence.eventually_periodic(pre, blk)
    assert SymbolSequence.parse(str(s)) == s


@given(prefixes, blocks, st.integers(0, 30))
def test_indexing_matches_unrolled(pre, blk, n):
    s = SymbolSequence.eventually_periodic(pre, blk)
    unrolled = list(pre) + list(blk) * 40
    assert s[n] == unrolled[n]
    assert s.shift(n).prefix(10) == tuple(unrolled[n:n + 10])


def test_finite_words():
    s = SymbolSequence.finite([1, 2, 2])
    assert len(s) == 3 and not s.is_infinite and s.block == ()
    with pytest.raises(IndexError):
        s[3]
    with pytest.raises(TypeError):
        len(SymbolSequence.periodic([1]))


@pytest.mark.parametrize("n", range(1, 9))
def test_periodic_word_counts(n):
    got = [w for w in periodic_words(n) if w.period == n]
    assert len(got) == primitive_count(n)


def test_order_examples():
    P = SymbolSequence.parse
    assert unimodal_cmp(P("(1)"), P("(2)")) == 1
    # after one 2 the order flips
    assert unimodal_cmp(P("2(1)"), P("(2)")) == -1
    assert unimodal_cmp(P("(12)"), P("(12)")) == 0
    assert unimodal_leq(P("(2)"), P("(1)"))


@given(prefixes, blocks, prefixes, blocks)
def test_order_antisymmetric(p1, b1, p2, b2):
    s = SymbolSequence.eventually_periodic(p1, b1)
    t = SymbolSequence.eventually_periodic(p2, b2)
    assert unimodal_cmp(s, t) == -unimodal_cmp(t, s)
    assert (unimodal_cmp(s, t) == 0) == (s == t)


@given(*(st.tuples(prefixes, blocks) for _ in range(3)))
def test_order_transitive(a, b, c):
    s, t, u = (SymbolSequence.eventually_periodic(*x) for x in (a, b, c))
    if unimodal_cmp(s, t) <= 0 and unimodal_cmp(t, u) <= 0:
        assert unimodal_cmp(s, u) <= 0


def test_finite_tie_raises():
    with pytest.raises(IncomparableDepth):
        unimodal_cmp(SymbolSequence.finite([1, 2]), SymbolSequence.finite([1, 2, 1]))
