"""Conversions of user-supplied reals into exact rationals."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational


def exact(x) -> Fraction:
    """Exact rational for ``x``.

    Floats are read through their shortest decimal repr, so ``0.1`` becomes
    ``1/10`` rather than the nearest binary fraction.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot read {x!r} as a rational")


def ceil_frac(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def floor_frac(x: Fraction) -> int:
    return x.numerator // x.denominator


def to_json_number(x: Fraction):
    """Ints stay ints; other rationals become ``"p/q"`` strings."""
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
