"""Exact zero tests for rational combinations of logarithms.

A value of the form sum_i c_i * log(x_i), with rational coefficients c_i and
positive rational arguments x_i, is determined by the map prime -> exponent
coefficient obtained from the factorizations of the numerators and
denominators of the x_i.  Two such combinations are equal iff the maps agree,
so identities between entropies and relative entropies of rational pmfs can
be certified with no floating point at all.  Arguments in this codebase are
small (counts, alphabet sizes, weight denominators), well within easy
factoring range.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Union

Rational = Union[int, Fraction]

__all__ = ["LogCombination", "entropy_combination", "relative_entropy_combination"]


@lru_cache(maxsize=None)
def _factor(n: int) -> tuple[tuple[int, int], ...]:
    from sympy import factorint

    return tuple(sorted(factorint(n).items()))


class LogCombination:
    """Mutable accumulator for sum_i c_i * log(x_i) in exact form."""

    __slots__ = ("_exp",)

    def __init__(self) -> None:
        self._exp: dict[int, Fraction] = {}

    def add(self, coeff: Rational, value: Rational) -> None:
        """Accumulate coeff * log(value); value must be a positive rational."""
        value = Fraction(value)
        if value <= 0:
            raise ValueError(f"log argument must be positive, got {value}")
        coeff = Fraction(coeff)
        if coeff == 0 or value == 1:
            return
        for prime, e in _factor(value.numerator):
            self._bump(prime, coeff * e)
        for prime, e in _factor(value.denominator):
            self._bump(prime, -coeff * e)

    def _bump(self, prime: int, delta: Fraction) -> None:
        cur = self._exp.get(prime, Fraction(0)) + delta
        if cur:
            self._exp[prime] = cur
        else:
            self._exp.pop(prime, None)

    def subtract(self, other: "LogCombination") -> None:
        for prime, coeff in other._exp.items():
            self._bump(prime, -coeff)

    def add_combination(self, other: "LogCombination", factor: Rational = 1) -> None:
        factor = Fraction(factor)
        for prime, coeff in other._exp.items():
            self._bump(prime, factor * coeff)

    def is_zero(self) -> bool:
        return not self._exp

    def equals(self, other: "LogCombination") -> bool:
        return self._exp == other._exp

    def value(self) -> float:
        return math.fsum(float(c) * math.log(p) for p, c in self._exp.items())


def relative_entropy_combination(p_probs, q_probs) -> LogCombination:
    """D(P || Q) as an exact log combination; requires rational entries and P << Q."""
    comb = LogCombination()
    for p, q in zip(p_probs, q_probs):
        p = Fraction(p)
        if p == 0:
            continue
        q = Fraction(q)
        if q == 0:
            raise ValueError("relative entropy is infinite; no finite exact form")
        comb.add(p, p / q)
    return comb


def entropy_combination(p_probs) -> LogCombination:
    """H(P) as an exact log combination for rational entries."""
    comb = LogCombination()
    for p in p_probs:
        p = Fraction(p)
        if p:
            comb.add(-p, p)
    return comb
