"""Ordinals below epsilon_0 in Cantor normal form.

An Ordinal is a sum  w^e1 * c1 + ... + w^ek * ck  with e1 > ... > ek
(recursively ordinals) and positive integer coefficients; the empty sum is 0.
Comparison is the usual lexicographic one, a strict well-order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import total_ordering


class NotAnOrdinal(ValueError):
    pass


@total_ordering
@dataclass(frozen=True)
class Ordinal:
    terms: tuple = ()  # tuple of (exponent: Ordinal, coefficient: int)

    def __post_init__(self):
        prev = None
        for e, c in self.terms:
            if not isinstance(e, Ordinal):
                raise NotAnOrdinal("exponent must be an Ordinal")
            if not isinstance(c, int) or c < 1:
                raise NotAnOrdinal("coefficient must be a positive integer")
            if prev is not None and not e < prev:
                raise NotAnOrdinal("exponents must strictly decrease")
            prev = e

    @staticmethod
    def zero() -> "Ordinal":
        return Ordinal(())

    @staticmethod
    def from_int(n: int) -> "Ordinal":
        if n < 0:
            raise NotAnOrdinal("ordinals here are non-negative")
        if n == 0:
            return Ordinal(())
        return Ordinal(((Ordinal(()), n),))

    @staticmethod
    def omega() -> "Ordinal":
        return Ordinal(((Ordinal.from_int(1), 1),))

    @staticmethod
    def omega_power(e: "Ordinal", coeff: int = 1) -> "Ordinal":
        return Ordinal(((e, coeff),))

    def __add__(self, other: "Ordinal") -> "Ordinal":
        """Ordinal (non-commutative) addition."""
        if not other.terms:
            return self
        lead, d = other.terms[0]
        kept = tuple(t for t in self.terms if lead < t[0])
        same = [c for e, c in self.terms if e == lead]
        if same:
            return Ordinal(kept + ((lead, same[0] + d),) + other.terms[1:])
        return Ordinal(kept + other.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_finite(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.terms[0][0].is_zero())

    def to_int(self) -> int:
        if not self.terms:
            return 0
        if self.is_finite():
            return self.terms[0][1]
        raise NotAnOrdinal("not a finite ordinal")

    def __lt__(self, other: "Ordinal") -> bool:
        for (e1, c1), (e2, c2) in zip(self.terms, other.terms):
            if e1 != e2:
                return e1 < e2
            if c1 != c2:
                return c1 < c2
        return len(self.terms) < len(other.terms)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms:
            if e.is_zero():
                parts.append(str(c))
            elif e == Ordinal.from_int(1):
                parts.append("w" if c == 1 else f"w*{c}")
            else:
                base = f"w^({e})"
                parts.append(base if c == 1 else f"{base}*{c}")
        return " + ".join(parts)

    def to_json(self):
        if self.is_finite():
            return self.to_int()
        return [[e.to_json(), c] for e, c in self.terms]

    @staticmethod
    def from_json(obj) -> "Ordinal":
        if isinstance(obj, int):
            return Ordinal.from_int(obj)
        if isinstance(obj, list):
            return Ordinal(tuple((Ordinal.from_json(e), int(c)) for e, c in obj))
        raise NotAnOrdinal(f"bad ordinal payload: {obj!r}")
