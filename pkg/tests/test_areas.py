"""Exact eps-linear area arithmetic and its order."""

from fractions import Fraction

import pytest
from hypothesis import given

from strategies import area_values
from symsum.areas import AreaValue, area, area_add, area_less

o = area


def test_componentwise_addition():
    assert area_add(o(1), o(0, 3)) == o(1, 3)


def test_section_area_bookkeeping_shape():
    # area + (k+1) eps with a = 5, k = 2
    assert area_add(o(5), o(0, 3)) == o(5, 3)


def test_additive_inverse():
    assert area_add(o(2, -1), o(-2, 1)) == o(0, 0)


def test_constant_term_dominates():
    assert area_less(o(1, 100), o(2, -100))


def test_eps_breaks_ties():
    assert area_less(o(1, 1), o(1, 2))


def test_proper_transform_shrinks():
    a = Fraction(7, 3)
    assert area_less(o(a, -1), o(a, 0))


def test_positivity():
    assert o(0, 1).is_positive
    assert not o(0, 0).is_positive
    assert not o(-1, 100).is_positive


def test_scale():
    assert o(1, 2).scale(Fraction(3, 2)) == o(Fraction(3, 2), 3)


@given(area_values, area_values, area_values)
def test_addition_associative_commutative(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert x + y == y + x


@given(area_values, area_values)
def test_strict_total_order(x, y):
    assert (x < y) + (y < x) + (x == y) == 1


@given(area_values, area_values, area_values)
def test_order_transitive(x, y, z):
    if x < y and y < z:
        assert x < z


@given(area_values)
def test_round_trip_canonical_form(x):
    assert AreaValue.parse(str(x)) == x


@given(area_values)
def test_round_trip_compact_form(x):
    assert AreaValue.parse(x.compact()) == x


@pytest.mark.parametrize(
    "text,expected",
    [
        ("1 + 3*eps", o(1, 3)),
        ("1/2 - 3*eps", o(Fraction(1, 2), -3)),
        ("2", o(2)),
        ("5/4-3e", o(Fraction(5, 4), -3)),
        ("0+1e", o(0, 1)),
    ],
)
def test_parse_examples(text, expected):
    assert AreaValue.parse(text) == expected


def test_parse_garbage():
    with pytest.raises(ValueError):
        AreaValue.parse("three eps")
