from hypothesis import given, strategies as st
import pytest

import oracles
from transfinite.ordinal import (OMEGA, ONE, ZERO, Kind, NotALimit, NotFinite, Ordering,
                                 Ordinal, OrdinalError, OrdinalSyntaxError, add, classify,
                                 compare, enumerate_below, format_ordinal, fundamental_sequence,
                                 is_limit, mul, parse_ordinal, subtract)

P = parse_ordinal

triples = st.tuples(st.integers(0, 5), st.integers(0, 5), st.integers(0, 9))


def to_ord(t):
    return P(oracles.o_text(t))


@st.composite
def ordinals(draw, max_exp=3):
    n = draw(st.integers(0, 3))
    exps = sorted(draw(st.sets(st.integers(0, max_exp), min_size=n, max_size=n)), reverse=True)
    return Ordinal([(e, draw(st.integers(1, 4))) for e in exps])


@pytest.mark.parametrize("a,b,want", [
    ("w", "w", Ordering.EQUAL),
    ("w*2+1", "w^2", Ordering.LESS),
    ("0", "3", Ordering.LESS),
    ("w^2", "w*9+9", Ordering.GREATER),
])
def test_compare_examples(a, b, want):
    assert compare(P(a), P(b)) == want


@pytest.mark.parametrize("a,b,want", [
    ("0", "w^2", "w^2"), ("1", "w", "w"), ("w+1", "w", "w*2"), ("w^2+w", "w*3+1", "w^2+w*4+1"),
])
def test_add_examples(a, b, want):
    assert add(P(a), P(b)) == P(want)


@pytest.mark.parametrize("a,b,want", [
    ("w+3", "1", "w+3"), ("2", "w", "w"), ("w", "2", "w*2"), ("w+1", "w", "w^2"),
    ("w+1", "2", "w*2+1"), ("w^2+w", "w+1", "w^3+w^2+w"),
])
def test_mul_examples(a, b, want):
    assert mul(P(a), P(b)) == P(want)


def test_classify_examples():
    assert classify(ZERO) == (Kind.ZERO, None)
    assert classify(P("5")) == (Kind.SUCCESSOR, P("4"))
    assert classify(P("w^2+w"))[0] is Kind.LIMIT


@pytest.mark.parametrize("l,n,want", [("w", 3, "3"), ("w*2", 4, "w+4"), ("w^2", 2, "w*2"),
                                      ("w^3", 1, "w^2")])
def test_fundamental_sequence_examples(l, n, want):
    assert fundamental_sequence(P(l), n) == P(want)


def test_fundamental_sequence_needs_limit():
    with pytest.raises(NotALimit):
        fundamental_sequence(P("w+1"), 2)


def test_enumerate_below():
    assert list(enumerate_below(ZERO)) == []
    assert list(enumerate_below(P("3"))) == [P("0"), P("1"), P("2")]
    with pytest.raises(NotFinite):
        list(enumerate_below(OMEGA))


@pytest.mark.parametrize("bad", ["", "w^1", "w*0", "1+w", "w+w", "07", "x", "w^", "3+"])
def test_parse_rejects(bad):
    with pytest.raises(OrdinalSyntaxError):
        P(bad)


def test_constructor_rejects_non_canonical():
    with pytest.raises(OrdinalError):
        Ordinal([(0, 1), (1, 1)])
    with pytest.raises(OrdinalError):
        Ordinal([(1, 0)])


def test_subtract():
    assert subtract(P("w*2+3"), P("w")) == P("w+3")
    assert subtract(P("w^2+5"), P("7")) == P("w^2+5")
    assert subtract(P("w*3"), P("w*3")) == ZERO
    with pytest.raises(OrdinalError):
        subtract(P("3"), P("w"))


@given(triples, triples)
def test_matches_tuple_oracle(x, y):
    X, Y = to_ord(x), to_ord(y)
    assert int(compare(X, Y)) == oracles.o_cmp(x, y)
    assert add(X, Y) == to_ord(oracles.o_add(x, y))
    lead = lambda t: 2 if t[0] else (1 if t[1] else 0)
    if y == (0, 0, 0) or lead(y) == 0 or lead(x) + lead(y) <= 2:
        assert mul(X, Y) == to_ord(oracles.o_mul(x, y))


@given(ordinals(), ordinals(), ordinals())
def test_add_associative(a, b, c):
    assert (a + b) + c == a + (b + c)


@given(ordinals(2), ordinals(2), ordinals(2))
def test_mul_associative_and_left_distributive(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@given(ordinals())
def test_successor_classification(a):
    assert classify(a + ONE) == (Kind.SUCCESSOR, a)
    assert (a + ONE).pred() == a


@given(ordinals(2).filter(is_limit), st.integers(0, 48))
def test_fundamental_sequence_increasing(l, n):
    assert fundamental_sequence(l, n) < fundamental_sequence(l, n + 1) < l


@given(ordinals())
def test_format_round_trip(a):
    assert P(format_ordinal(a)) == a
    assert P(format_ordinal(a, compact=True)) == a


@given(ordinals(), ordinals())
def test_subtract_inverts_add(a, b):
    assert subtract(a + b, a) == b


@given(ordinals())
def test_block_offset_split(a):
    b, o = a.split()
    assert b + o == a
    assert b == ZERO or is_limit(b)
