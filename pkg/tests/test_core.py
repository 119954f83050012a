from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hotelling.core import (
    ParseError,
    Profile,
    blocks,
    format_rat,
    intervals,
    make_profile,
    parse_profile,
    parse_rat,
)

from conftest import COUNTEREXAMPLE, F, positions, profiles


@pytest.mark.parametrize("text, expected", [
    ("3/10", Fraction(3, 10)),
    ("0.5", Fraction(1, 2)),
    ("4/8", Fraction(1, 2)),
    ("0.3", Fraction(3, 10)),
    ("1", Fraction(1)),
    (" -2/6 ", Fraction(-1, 3)),
    (".25", Fraction(1, 4)),
])
def test_parse_rat(text, expected):
    value = parse_rat(text)
    assert value == expected
    assert value.denominator > 0


@pytest.mark.parametrize("text", ["1/0", "abc", "1/-2", "0.(3)", "1e-3", "", "1//2", "nan", "3/4/5"])
def test_parse_rat_rejects(text):
    with pytest.raises((ParseError, ZeroDivisionError)):
        parse_rat(text)


def test_parse_rat_denominator_cap():
    assert parse_rat("1/1000", max_denominator=1000) == Fraction(1, 1000)
    with pytest.raises(ParseError, match="cap"):
        parse_rat("1/1001", max_denominator=1000)


@given(st.fractions(max_denominator=10**6))
def test_format_parse_roundtrip(x):
    text = format_rat(x)
    assert "/" in text
    assert parse_rat(text) == x


def test_make_profile_sorts():
    assert make_profile(["9/10", "1/10"]).positions == (F("1/10"), F("9/10"))
    assert make_profile(["1/2", "1/2"]).positions == (F("1/2"), F("1/2"))
    p = make_profile(COUNTEREXAMPLE)
    assert p.n == 8
    assert p.x(3) == F("3/10")


@pytest.mark.parametrize("bad", [["1/2"], [], ["-1/10", "1/2"], ["1/2", "11/10"]])
def test_make_profile_rejects(bad):
    with pytest.raises(ValueError):
        make_profile(bad)


def test_profile_requires_sorted():
    with pytest.raises(ValueError):
        Profile((F("1/2"), F("1/4")))


def test_profile_rejects_floats():
    with pytest.raises(TypeError):
        make_profile([0.25, 0.75])


def test_parse_profile():
    assert parse_profile("0.25,0.25,0.75,3/4") == make_profile(["1/4", "1/4", "3/4", "3/4"])
    with pytest.raises(ParseError, match="1/x"):
        parse_profile("1/2,1/x")
    with pytest.raises(ParseError):
        parse_profile("1/2,,1/3")


@pytest.mark.parametrize("pos, expected", [
    (["1/2", "1/2"], ["1/2", "0", "1/2"]),
    (["1/4", "1/4", "3/4", "3/4"], ["1/4", "0", "1/2", "0", "1/4"]),
    (COUNTEREXAMPLE, ["1/10", "0", "2/10", "0", "4/10", "0", "2/10", "0", "1/10"]),
])
def test_intervals(pos, expected):
    L = intervals(make_profile(pos))
    assert list(L) == [F(x) for x in expected]
    assert sum(L) == 1


def test_blocks_examples():
    b = blocks(make_profile(["1/2", "1/2"]))
    assert [(blk.position, blk.multiplicity) for blk in b] == [(F("1/2"), 2)]

    b = blocks(make_profile(COUNTEREXAMPLE))
    assert b.positions == tuple(F(x) for x in ["1/10", "3/10", "7/10", "9/10"])
    assert b.multiplicities == (2, 2, 2, 2)
    assert b[1].members == (3, 4)

    b = blocks(make_profile(["1/6", "1/6", "1/2", "5/6", "5/6"]))
    assert [(blk.position, blk.multiplicity) for blk in b] == [
        (F("1/6"), 2), (F("1/2"), 1), (F("5/6"), 2)]


def test_blocks_of_unsorted_location_keep_original_indices():
    b = blocks(["3/4", "1/4", "3/4"])
    assert [blk.members for blk in b] == [(2,), (1, 3)]


@given(profiles())
def test_interval_lengths_partition_the_city(p):
    L = intervals(p)
    assert len(L) == p.n + 1
    assert all(x >= 0 for x in L)
    assert sum(L) == 1


@given(positions(), st.randoms())
def test_blocks_permutation_invariant(pos, rnd):
    shuffled = list(pos)
    rnd.shuffle(shuffled)
    assert blocks(make_profile(pos)) == blocks(make_profile(shuffled))


@given(profiles())
def test_block_structure(p):
    b = blocks(p)
    assert len(b) <= p.n
    assert sum(b.multiplicities) == p.n
    assert all(x < y for x, y in zip(b.positions, b.positions[1:]))
    members = [m for blk in b for m in blk.members]
    assert members == list(range(1, p.n + 1))


@given(profiles())
def test_mirror_is_involution(p):
    assert p.mirror().mirror() == p
