"""Rational parsing/formatting and exact integer-root helpers."""

from __future__ import annotations

from fractions import Fraction


def parse_ratio(text: str) -> Fraction:
    """Parse "num/den" (or a bare integer) into a Fraction."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad rational literal: {text!r}") from exc


def format_ratio(value) -> str:
    """Canonical "num/den" form, always with an explicit denominator."""
    frac = Fraction(value)
    return f"{frac.numerator}/{frac.denominator}"


def int_nth_root_floor(m: int, p: int) -> int:
    """Largest integer r with r**p <= m, for m >= 0 and p >= 1."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    if p < 1:
        raise ValueError("p must be positive")
    if m < 2 or p == 1:
        return m
    r = int(round(m ** (1.0 / p)))
    while r > 0 and r**p > m:
        r -= 1
    while (r + 1) ** p <= m:
        r += 1
    return r


def int_root_ceil(value, p: int) -> int:
    """Smallest positive integer b with b**p >= value."""
    value = Fraction(value)
    if value <= 1:
        return 1
    ceil_value = -(-value.numerator // value.denominator)
    b = int_nth_root_floor(ceil_value, p)
    while Fraction(b) ** p < value:
        b += 1
    return b


def rational_root_ceil(value, p: int, denominator: int = 64) -> Fraction:
    """Smallest k/denominator (k >= 1) whose p-th power is >= value."""
    value = Fraction(value)
    if value <= 0:
        return Fraction(1, denominator)
    hi = int_root_ceil(value, p) * denominator
    lo = 1
    while lo < hi:
        mid = (lo + hi) // 2
        if Fraction(mid, denominator) ** p >= value:
            hi = mid
        else:
            lo = mid + 1
    return Fraction(lo, denominator)


def pth_power_split(value, p: int, trial_bound: int = 100_000) -> tuple[int, Fraction]:
    """Write a positive rational as k * s**p with integer k and rational s.

    k is kept as small as trial-division factoring up to ``trial_bound``
    allows; an unfactored leftover that is not itself a perfect p-th power
    is absorbed into k. Exactness always holds: k * s**p == value.
    """
    value = Fraction(value)
    if value <= 0:
        raise ValueError("value must be positive")
    if p < 1:
        raise ValueError("p must be positive")
    num, den = value.numerator, value.denominator
    base = num * den ** (p - 1)
    s = Fraction(1, den)
    k = 1

    remainder = base
    factor = 2
    exponents: dict[int, int] = {}
    while factor * factor <= remainder and factor <= trial_bound:
        while remainder % factor == 0:
            exponents[factor] = exponents.get(factor, 0) + 1
            remainder //= factor
        factor += 1 if factor == 2 else 2
    if remainder > 1:
        root = int_nth_root_floor(remainder, p)
        if root**p == remainder:
            s *= root
        else:
            k *= remainder
    for prime, exponent in exponents.items():
        s *= Fraction(prime) ** (exponent // p)
        k *= prime ** (exponent % p)
    assert k * s**p == value
    return k, s
