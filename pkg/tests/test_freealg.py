import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from suq2calc.freealg import (GENERATORS, Element, L, format_element, grade, is_homogeneous,
                              parse_element, word_charge)
from suq2calc.qfield import ONE, qpow
from suq2calc.scalar_text import ParseError

letters = st.sampled_from(sorted(GENERATORS))
words = st.lists(letters, min_size=0, max_size=4).map(tuple)
coeffs = st.tuples(st.integers(-3, 3), st.integers(-3, 3)).map(
    lambda t: qpow(t[0]) * t[1] + qpow(t[0] + 1))
elements = st.dictionaries(words, coeffs, max_size=4).map(Element)


@settings(max_examples=300, deadline=None)
@given(elements)
def test_print_parse_round_trip(e):
    assert parse_element(format_element(e)) == e


@settings(max_examples=200, deadline=None)
@given(elements, elements, elements)
def test_free_algebra_is_associative_and_distributive(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


def test_charges_and_form_degrees():
    assert word_charge(("x1", "y2")) == 0
    assert word_charge(("wpp", "x1")) == 3
    assert grade(L("wpp") * L("w0")) == {"charge": 2, "form_degree": 2}
    assert not is_homogeneous(L("x1") + L("y1"))
    assert is_homogeneous(Element.zero())


def test_zero_coefficients_are_dropped():
    e = L("x1") - L("x1")
    assert e.is_zero()
    assert format_element(e) == "0"


def test_parse_examples():
    e = parse_element("q * x1*wpp - (1 - q^4)/q * y2*w0")
    assert e.coeff(("x1", "wpp")) == qpow(1)
    assert e.coeff(("y2", "w0")) == -(ONE - qpow(4)) / qpow(1)
    assert parse_element("2") == Element.scalar(2)


@pytest.mark.parametrize("bad", ["x1*(", "x3", "x1 +", "* x1", "q^ * x1"])
def test_parse_errors_carry_a_position(bad):
    with pytest.raises(ParseError) as info:
        parse_element(bad)
    assert info.value.position >= 0
