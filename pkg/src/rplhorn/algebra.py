"""Exact Łukasiewicz operations on rational truth degrees in [0, 1].

Every degree in the package is a :class:`fractions.Fraction`; nothing here
ever touches a binary float.
"""
from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import lcm
from typing import Iterable, Union

Rational01 = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)

DegreeLike = Union[Fraction, int, str]


def rational01(value: DegreeLike) -> Fraction:
    """Coerce *value* to an exact degree, rejecting anything outside [0, 1].

    Strings may be decimals (``"0.3"``) or fractions (``"3/10"``); floats are
    refused because their binary expansion is not the number the user wrote.
    """
    if isinstance(value, float):
        raise TypeError("floats are not exact; pass a string or Fraction")
    if isinstance(value, str):
        try:
            r = Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational literal: {value!r}") from exc
    else:
        r = Fraction(value)
    if r < 0 or r > 1:
        raise ValueError(f"degree {r} outside [0, 1]")
    return r


def strong_conj(a: Fraction, b: Fraction) -> Fraction:
    return max(a + b - 1, ZERO)


def implication(a: Fraction, b: Fraction) -> Fraction:
    return min(1 - a + b, ONE)


def negation(a: Fraction) -> Fraction:
    return 1 - a


def weak_conj(a: Fraction, b: Fraction) -> Fraction:
    return min(a, b)


def weak_disj(a: Fraction, b: Fraction) -> Fraction:
    return max(a, b)


def biimplication(a: Fraction, b: Fraction) -> Fraction:
    return 1 - abs(a - b)


def strong_conj_all(values: Iterable[Fraction]) -> Fraction:
    """Fold :func:`strong_conj` over *values*; the empty product is 1."""
    return reduce(strong_conj, values, ONE)


def common_denominator(values: Iterable[Fraction]) -> int:
    return reduce(lcm, (Fraction(v).denominator for v in values), 1)


def format_degree(r: Fraction) -> str:
    """Lowest-terms text: ``0``, ``1`` or ``p/q``."""
    if r.denominator == 1:
        return str(r.numerator)
    return f"{r.numerator}/{r.denominator}"


def decimal_rendering(r: Fraction, places: int = 6) -> str:
    # advisory only; exact value is format_degree
    q = round(r * 10**places)
    s = f"{q // 10**places}.{q % 10**places:0{places}d}".rstrip("0").rstrip(".")
    return s if Fraction(s) == r else "~" + s
