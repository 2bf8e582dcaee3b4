from fractions import Fraction

import pytest

from invforge.ratio import (
    format_ratio,
    int_nth_root_floor,
    int_root_ceil,
    parse_ratio,
    pth_power_split,
    rational_root_ceil,
)


def test_parse_and_format_roundtrip():
    assert parse_ratio("3/4") == Fraction(3, 4)
    assert parse_ratio("-7") == Fraction(-7)
    assert format_ratio(Fraction(3, 4)) == "3/4"
    assert format_ratio(5) == "5/1"
    assert parse_ratio(format_ratio(Fraction(-22, 7))) == Fraction(-22, 7)


def test_parse_rejects_garbage():
    with pytest.raises(ValueError):
        parse_ratio("1/0")
    with pytest.raises(ValueError):
        parse_ratio("abc")


@pytest.mark.parametrize("m,p,expected", [(0, 3, 0), (1, 5, 1), (8, 3, 2), (9, 2, 3), (26, 3, 2), (27, 3, 3)])
def test_int_nth_root_floor(m, p, expected):
    assert int_nth_root_floor(m, p) == expected


def test_int_root_ceil():
    assert int_root_ceil(Fraction(8), 2) == 3
    assert int_root_ceil(Fraction(9), 2) == 3
    assert int_root_ceil(Fraction(1, 2), 4) == 1
    assert int_root_ceil(Fraction(54), 2) == 8


def test_rational_root_ceil_is_tight():
    for value in (Fraction(53), Fraction(2), Fraction(5, 7)):
        for p in (1, 2, 3):
            root = rational_root_ceil(value, p)
            assert root**p >= value
            assert (root - Fraction(1, 64)) ** p < value or root == Fraction(1, 64)


def test_pth_power_split_exact():
    for value, p in [(Fraction(8), 2), (Fraction(54), 2), (Fraction(5, 3), 4), (Fraction(1), 3), (Fraction(1000), 3)]:
        k, s = pth_power_split(value, p)
        assert k * s**p == value
        assert k >= 1 and s > 0
    # 8 = 2 * 2**2: the square part comes out
    assert pth_power_split(Fraction(8), 2) == (2, Fraction(2))
