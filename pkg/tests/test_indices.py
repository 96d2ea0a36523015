from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from mtv.indices import (
    LinearCombo,
    NotAdmissibleError,
    binomial_shuffle_formula,
    check_admissible,
    compositions,
    depth,
    dual,
    enumerate_admissible,
    expand_T,
    expand_t,
    format_index,
    format_signed_index,
    index_to_word,
    is_admissible,
    make_signed,
    parse_index,
    parse_signed_index,
    product_combo,
    shuffle,
    shuffle_indices,
    signed_index_to_eval_word,
    stuffle,
    weight,
    word_to_index,
)

words = st.text(alphabet="01", max_size=5)
indices = st.lists(st.integers(1, 4), min_size=0, max_size=3).map(tuple)
admissible = st.lists(st.integers(1, 4), min_size=0, max_size=3).flatmap(
    lambda head: st.integers(2, 4).map(lambda last: tuple(head) + (last,)))


# --------------------------------------------------------- fixed examples

def test_shuffle_of_two_T2():
    assert str(shuffle_indices((2,), (2,))) == "4*(1,3) + 2*(2,2)"


def test_stuffle_of_two_t2():
    assert str(stuffle((2,), (2,))) == "2*(2,2) + 1*(4)"


def test_dual_examples():
    assert dual((1, 1, 2)) == (4,)
    assert dual((2,)) == (2,)
    assert dual((1, 3)) == (1, 3)
    assert dual((3, 2)) == (2, 1, 2)


def test_words_round_trip():
    assert index_to_word((1, 3)) == "1100"
    assert word_to_index("1100") == (1, 3)
    assert word_to_index(index_to_word((2, 1, 3))) == (2, 1, 3)


def test_word_must_start_with_one():
    with pytest.raises(ValueError):
        word_to_index("0110")


def test_admissibility():
    assert is_admissible((1, 2)) and not is_admissible((2, 1)) and not is_admissible((1,))
    with pytest.raises(NotAdmissibleError, match="not admissible"):
        check_admissible((1,))
    with pytest.raises(NotAdmissibleError):
        check_admissible((3, 1))


@pytest.mark.parametrize("k", range(2, 9))
def test_enumerate_counts(k):
    ixs = enumerate_admissible(k)
    assert len(ixs) == 2 ** (k - 2)
    assert len(set(ixs)) == len(ixs)
    assert all(weight(ix) == k and is_admissible(ix) for ix in ixs)
    # sorted by depth, then lexicographically
    assert ixs == sorted(ixs, key=lambda ix: (len(ix), ix))


def test_compositions_with_parts():
    assert sorted(compositions(5, (2, 3))) == [(2, 3), (3, 2)]
    assert len(list(compositions(6))) == 2 ** 5


def test_parse_and_format():
    assert parse_index("1,1,2") == (1, 1, 2)
    assert parse_index("(2,3)") == (2, 3)
    assert format_index((1, 2)) == "1,2"
    z = parse_signed_index("1,2;+,-")
    assert z == make_signed((1, 2), (1, -1))
    assert format_signed_index(z) == "1,2;+,-"
    for bad in ("1,a", "0,2", "1,-2"):
        with pytest.raises(ValueError):
            parse_index(bad)
    with pytest.raises(ValueError):
        parse_signed_index("1,2;+,*")
    with pytest.raises(ValueError):
        make_signed((1, 2), (1,))


def test_expand_T_and_t():
    e = expand_T((1, 2))
    assert len(e.items()) == 4
    assert e.coeff(make_signed((1, 2), (1, 1))) == 1
    assert e.coeff(make_signed((1, 2), (-1, 1))) == -1
    assert e.coeff(make_signed((1, 2), (-1, -1))) == -1
    t = expand_t((2,))
    assert t.coeff(make_signed((2,), (1,))) == Fraction(1, 2)
    assert t.coeff(make_signed((2,), (-1,))) == Fraction(-1, 2)


def test_eval_words():
    assert signed_index_to_eval_word(make_signed((2,), (1,))) == (1, 0)
    assert signed_index_to_eval_word(make_signed((1, 2), (-1, 1))) == (-1, 1, 0)


def test_linear_combo_arithmetic():
    a = LinearCombo({(2,): 1, (1, 3): Fraction(1, 2)})
    b = LinearCombo.single((2,), 2)
    assert (a + a) == a * 2
    assert (a - a) == 0
    assert (a - b).coeff((2,)) == -1
    assert a.total_coefficient() == Fraction(3, 2)
    assert str(LinearCombo.single((4,), Fraction(-25, 12))) == "-25/12*(4)"


@pytest.mark.parametrize("k", range(4, 11))
def test_binomial_formula_matches_shuffle(k):
    for j in range(2, k - 1):
        assert shuffle_indices((j,), (k - j,)) == binomial_shuffle_formula(j, k)


# ------------------------------------------------------------ properties

@given(words, words)
def test_shuffle_commutes(u, v):
    assert shuffle(u, v) == shuffle(v, u)


@given(words, words, st.text(alphabet="01", max_size=3))
@settings(max_examples=60)
def test_shuffle_associates(u, v, w):
    left = product_combo(shuffle(u, v), LinearCombo.single(w), shuffle)
    right = product_combo(LinearCombo.single(u), shuffle(v, w), shuffle)
    assert left == right


@given(words, words)
def test_shuffle_counts_and_unit(u, v):
    s = shuffle(u, v)
    assert s.total_coefficient() == comb(len(u) + len(v), len(u))
    assert all(len(w) == len(u) + len(v) for w in s.terms())
    assert shuffle(u, "") == LinearCombo.single(u)


@given(indices, indices)
def test_stuffle_commutes_and_preserves_weight(a, b):
    s = stuffle(a, b)
    assert s == stuffle(b, a)
    assert all(weight(ix) == weight(a) + weight(b) for ix in s.terms())
    assert all(max(len(a), len(b)) <= depth(ix) <= len(a) + len(b) for ix in s.terms())
    assert stuffle(a, ()) == LinearCombo.single(a)


@given(indices, indices, st.lists(st.integers(1, 3), max_size=2).map(tuple))
@settings(max_examples=60)
def test_stuffle_associates(a, b, c):
    left = product_combo(stuffle(a, b), LinearCombo.single(c), stuffle)
    right = product_combo(LinearCombo.single(a), stuffle(b, c), stuffle)
    assert left == right


@given(admissible)
def test_dual_is_an_involution(ix):
    d = dual(ix)
    assert dual(d) == ix
    assert is_admissible(d)
    assert weight(d) == weight(ix)
    assert depth(d) + depth(ix) == weight(ix)


@given(admissible)
def test_index_word_round_trip(ix):
    assert word_to_index(index_to_word(ix)) == ix
    assert parse_index(format_index(ix)) == ix
