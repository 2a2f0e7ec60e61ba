# tests/unit/test_seqcore.py
import pytest
from hypothesis import given
from hypothesis import strategies as st

from shiftlab.core.errors import OutOfRange, ParseError
from shiftlab.core.seqcore import (
    EMPTY_SEQ,
    INFINITY,
    Block,
    CompactifiedWord,
    Seq,
    Symbol,
    Tail,
    Truncation,
    canonical_form,
    concat,
    distinct_windows,
    format_seq,
    is_prefix,
    parse_letter,
    parse_seq,
    parse_word,
    quotient_map,
    shift,
    shift_by,
    subblock,
    symbols,
)

letters = st.integers(min_value=1, max_value=3).map(Symbol)
words = st.lists(letters, max_size=4).map(tuple)
periods = st.lists(letters, min_size=1, max_size=3).map(tuple)
infinite_seqs = st.builds(Seq.periodic, words, periods)
seqs = st.one_of(words.map(Seq.finite), infinite_seqs)

a1, a2, a3 = symbols(1, 2, 3)


# -------------------------------
# Canonical form
# -------------------------------

@pytest.mark.parametrize("pre,per,expected", [
    ((), (a1, a1), ((), (a1,))),
    ((a1, a2), (a1, a2), ((), (a1, a2))),
    ((a3, a2), (a1, a2), ((a3,), (a2, a1))),
    ((a1,), (a2,), ((a1,), (a2,))),
])
def test_canonical_form(pre, per, expected):
    assert canonical_form(pre, per) == expected


def test_equal_sequences_compare_equal():
    assert Seq.periodic((a1, a2), (a1, a2)) == Seq.periodic((), (a1, a2))
    assert Seq.periodic((), (a2, a1, a2, a1)) == Seq.periodic((a2,), (a1, a2))
    assert Seq.periodic((a2,), (a2, a2)) == Seq.periodic((), (a2,))
    assert Seq.finite((a1,)) != Seq.periodic((a1,), (a1,))


def unrolled(pre, per, depth):
    return tuple(pre[i] if i < len(pre) else per[(i - len(pre)) % len(per)] for i in range(depth))


@given(words, periods)
def test_canonical_form_denotes_the_same_sequence(pre, per):
    depth = 4 * (len(pre) + len(per))
    canon_pre, canon_per = canonical_form(pre, per)
    assert len(canon_pre) <= len(pre)
    assert len(canon_per) <= len(per)
    assert unrolled(canon_pre, canon_per, depth) == unrolled(pre, per, depth)


@given(words, periods, words, periods)
def test_equality_agrees_with_unrolled_prefixes(pre, per, other_pre, other_per):
    depth = 4 * (len(pre) + len(per) + len(other_pre) + len(other_per))
    same = unrolled(pre, per, depth) == unrolled(other_pre, other_per, depth)
    assert (Seq.periodic(pre, per) == Seq.periodic(other_pre, other_per)) == same


def test_symbol_index_must_be_positive():
    with pytest.raises(ValueError):
        Symbol(0)


@given(infinite_seqs, st.integers(min_value=1, max_value=20))
def test_letters_follow_the_period(x, i):
    period = len(x.per)
    if i > len(x.pre):
        assert x.letter(i) == x.letter(i + period)


# -------------------------------
# Operations
# -------------------------------

def test_shift_short_sequences_go_to_empty():
    assert shift(Seq.finite((a1,))) == EMPTY_SEQ
    assert shift(EMPTY_SEQ) == EMPTY_SEQ


@given(infinite_seqs, st.integers(min_value=1, max_value=10))
def test_shift_drops_first_entry(x, i):
    assert shift(x).letter(i) == x.letter(i + 1)


@given(seqs, st.integers(min_value=0, max_value=5))
def test_shift_by_composes(x, k):
    assert shift(shift_by(x, k)) == shift_by(x, k + 1)


@given(words, seqs)
def test_concat_then_shift_recovers_tail(w, x):
    assert shift_by(concat(w, x), len(w)) == x
    assert is_prefix(w, concat(w, x))


def test_subblock_out_of_range():
    x = Seq.finite((a1, a2))
    assert subblock(x, 1, 2) == (a1, a2)
    assert subblock(x, 2, 0) == ()
    with pytest.raises(OutOfRange):
        subblock(x, 2, 2)
    with pytest.raises(OutOfRange):
        x.letter(3)


def test_distinct_windows_of_periodic_point():
    x = Seq.periodic((a3,), (a1, a2))
    assert distinct_windows(x, 2) == {(a3, a1), (a1, a2), (a2, a1)}


# -------------------------------
# Compactification
# -------------------------------

def test_quotient_map_cuts_at_first_infinity():
    assert quotient_map(CompactifiedWord((a1, a2, INFINITY, a3))) == Seq.finite((a1, a2))
    assert quotient_map(CompactifiedWord((INFINITY,))) == EMPTY_SEQ
    assert quotient_map(CompactifiedWord((a1,), Tail.ALL_INFINITY)) == Seq.finite((a1,))
    assert quotient_map(CompactifiedWord((a1, a2))) is Truncation.UNKNOWN


compactified_entries = st.lists(st.one_of(letters, st.just(INFINITY)), max_size=4).map(tuple)


@given(words, compactified_entries, compactified_entries, st.sampled_from(list(Tail)))
def test_quotient_map_ignores_entries_after_infinity(w, rest, other_rest, tail):
    x = CompactifiedWord(w + (INFINITY,) + rest, tail)
    y = CompactifiedWord(w + (INFINITY,) + other_rest, Tail.ALL_INFINITY)
    assert quotient_map(x) == quotient_map(y) == Seq.finite(w)


@given(words, words)
def test_quotient_map_separates_different_heads(u, v):
    x = CompactifiedWord(u + (INFINITY,))
    y = CompactifiedWord(v, Tail.ALL_INFINITY)
    assert (quotient_map(x) == quotient_map(y)) == (u == v)


# -------------------------------
# Text form
# -------------------------------

@pytest.mark.parametrize(
    "text", ["~", "a1.a2.a3", "a1.a2|(a3.a1)", "(a2)", "<e.f>.<f.g>", "e.f|(g)"]
)
def test_canonical_text_round_trips(text):
    assert format_seq(parse_seq(text)) == text


@given(seqs)
def test_format_then_parse_is_identity(x):
    assert parse_seq(format_seq(x)) == x


def test_parse_letter_kinds():
    assert parse_letter("a12") == Symbol(12)
    assert parse_letter("edge_1") == "edge_1"
    assert parse_letter("<a1.<b>>") == Block((Symbol(1), Block(("b",))))
    assert parse_word("~") == ()


@pytest.mark.parametrize("text", ["a1|a2", "a1.(a2)", "()", "<a1", "a1>", "a1..a2", "1x"])
def test_malformed_sequences_raise(text):
    with pytest.raises(ParseError):
        parse_seq(text)
