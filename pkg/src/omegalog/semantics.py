"""Ultimately periodic sets, oracle tuples and the three-valued evaluator.

Evaluation over the standard numbers returns True/False exactly for the
bounded fragment (after expanding the order macros) and falls back to a
cutoff search for unbounded first-order quantifiers, answering Unknown when
the search is inconclusive.  Second-order quantifiers are never decided here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Mapping, Optional, Sequence

from . import coding
from .syntax import (
    And,
    AtomEq,
    AtomMem,
    ExistsNum,
    ExistsSet,
    Exp,
    ForallNum,
    ForallSet,
    Formula,
    ModelConst,
    One,
    Or,
    OracleRef,
    Plus,
    Term,
    Times,
    Var,
    Var2,
    Zero,
    match_bounded_exists,
    match_bounded_forall,
    match_ge_atom,
    match_ngt_atom,
)

DEFAULT_CUTOFF = 64


class UnboundVariable(ValueError):
    """A term mentions a variable with no value in the environment."""


class UnresolvedSymbol(ValueError):
    """A set symbol has no interpretation in the given context."""


# ------------------------------------------------------------------ UPSet


@dataclass(frozen=True)
class UPSet:
    """Ultimately periodic subset of N: explicit prefix bits, then a cycle.

    Normal form: the period is primitive (no smaller divisor cycle works)
    and the prefix is shortest (its tail never duplicates the cycle end).
    """

    prefix: tuple = ()
    period: tuple = (0,)

    def __post_init__(self):
        prefix = tuple(int(bool(b)) for b in self.prefix)
        period = tuple(int(bool(b)) for b in self.period)
        if not period:
            raise ValueError("period must be nonempty")
        for d in range(1, len(period)):
            if len(period) % d == 0 and period == period[: d] * (len(period) // d):
                period = period[:d]
                break
        while prefix and prefix[-1] == period[-1]:
            prefix = prefix[:-1]
            period = (period[-1],) + period[:-1]
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "period", period)

    @staticmethod
    def empty() -> "UPSet":
        return UPSet((), (0,))

    @staticmethod
    def full() -> "UPSet":
        return UPSet((), (1,))

    @staticmethod
    def finite(elements) -> "UPSet":
        elements = set(elements)
        if not elements:
            return UPSet.empty()
        top = max(elements)
        return UPSet(tuple(1 if i in elements else 0 for i in range(top + 1)), (0,))

    @staticmethod
    def residues(modulus: int, residues) -> "UPSet":
        if modulus <= 0:
            raise ValueError("modulus must be positive")
        rs = {r % modulus for r in residues}
        return UPSet((), tuple(1 if r in rs else 0 for r in range(modulus)))

    def member(self, n: int) -> bool:
        if n < 0:
            return False
        if n < len(self.prefix):
            return bool(self.prefix[n])
        return bool(self.period[(n - len(self.prefix)) % len(self.period)])

    def __invert__(self) -> "UPSet":
        return UPSet(tuple(1 - b for b in self.prefix), tuple(1 - b for b in self.period))

    def _zip(self, other: "UPSet", op) -> "UPSet":
        head = max(len(self.prefix), len(other.prefix))
        cycle = len(self.period) * len(other.period) // gcd(len(self.period), len(other.period))
        bits = [op(self.member(i), other.member(i)) for i in range(head + cycle)]
        return UPSet(tuple(bits[:head]), tuple(bits[head:]))

    def __or__(self, other: "UPSet") -> "UPSet":
        return self._zip(other, lambda a, b: int(a or b))

    def __and__(self, other: "UPSet") -> "UPSet":
        return self._zip(other, lambda a, b: int(a and b))

    def is_empty(self) -> bool:
        return not any(self.prefix) and not any(self.period)

    def to_json(self) -> dict:
        return {"prefix": list(self.prefix), "period": list(self.period)}

    @staticmethod
    def from_json(obj: dict) -> "UPSet":
        return UPSet(tuple(obj.get("prefix", ())), tuple(obj["period"]))


@dataclass(frozen=True)
class OracleTuple:
    """A finite tuple of named oracle sets; index i interprets O<i>."""

    sets: tuple = ()

    @staticmethod
    def of(*sets: UPSet) -> "OracleTuple":
        return OracleTuple(tuple(sets))

    def get(self, i: int) -> UPSet:
        if 0 <= i < len(self.sets):
            return self.sets[i]
        raise UnresolvedSymbol(f"no oracle O{i} in a tuple of width {len(self.sets)}")

    def member(self, i: int, n: int) -> bool:
        return self.get(i).member(n)

    def __len__(self):
        return len(self.sets)

    def encode_tuple(self, bound: int) -> frozenset:
        """Single-set coding of the tuple, restricted to entries <= bound.

        pair(0, n) records the width n; pair(k, i+1) records k in O<i>.
        """
        out = {coding.pair(0, len(self.sets))}
        for i, s in enumerate(self.sets):
            for k in range(bound + 1):
                if s.member(k):
                    out.add(coding.pair(k, i + 1))
        return frozenset(out)

    def to_json(self) -> list:
        return [s.to_json() for s in self.sets]

    @staticmethod
    def from_json(obj) -> "OracleTuple":
        return OracleTuple(tuple(UPSet.from_json(s) for s in obj))


# ---------------------------------------------------------------- verdicts


@dataclass(frozen=True)
class Verdict:
    """Three-valued outcome; Unknown carries a human-readable reason."""

    kind: str
    reason: str = field(default="", compare=False)

    def __bool__(self):
        raise TypeError("a Verdict is not a plain bool; compare with TRUE/FALSE")

    @staticmethod
    def unknown(reason: str) -> "Verdict":
        return Verdict("unknown", reason)

    def flip(self) -> "Verdict":
        if self.kind == "true":
            return FALSE
        if self.kind == "false":
            return TRUE
        return self

    @property
    def is_true(self):
        return self.kind == "true"

    @property
    def is_false(self):
        return self.kind == "false"

    @property
    def is_unknown(self):
        return self.kind == "unknown"


TRUE = Verdict("true")
FALSE = Verdict("false")


# -------------------------------------------------------------- evaluation


def eval_term(t: Term, env: Optional[Mapping[int, int]] = None) -> int:
    env = env or {}
    if isinstance(t, Zero):
        return 0
    if isinstance(t, One):
        return 1
    if isinstance(t, Var):
        if t.index not in env:
            raise UnboundVariable(f"x{t.index} has no value")
        return env[t.index]
    if isinstance(t, Plus):
        return eval_term(t.left, env) + eval_term(t.right, env)
    if isinstance(t, Times):
        return eval_term(t.left, env) * eval_term(t.right, env)
    if isinstance(t, Exp):
        return 2 ** eval_term(t.arg, env)
    raise TypeError(f"not a term: {t!r}")


def eval_formula(
    phi: Formula,
    oracles: Optional[OracleTuple] = None,
    setenv: Optional[Mapping[int, UPSet]] = None,
    cutoff: int = DEFAULT_CUTOFF,
) -> Verdict:
    """Evaluate a sentence (or a formula under the given set environment).

    Exact on the bounded fragment and on the order-macro pseudo-atoms;
    unbounded number quantifiers search witnesses/counterexamples up to
    `cutoff`; set quantifiers are reported Unknown.
    """
    oracles = oracles or OracleTuple()
    setenv = dict(setenv or {})

    def go(f: Formula, env: dict) -> Verdict:
        if isinstance(f, AtomEq):
            hit = eval_term(f.lhs, env) == eval_term(f.rhs, env)
            return TRUE if hit == f.positive else FALSE
        if isinstance(f, AtomMem):
            n = eval_term(f.term, env)
            if isinstance(f.ref, Var2):
                if f.ref.index not in setenv:
                    raise UnresolvedSymbol(f"free set variable X{f.ref.index}")
                hit = setenv[f.ref.index].member(n)
            elif isinstance(f.ref, OracleRef):
                hit = oracles.member(f.ref.index, n)
            else:
                raise UnresolvedSymbol(f"model constant C{f.ref.index} outside a model")
            return TRUE if hit == f.positive else FALSE
        if isinstance(f, And):
            a = go(f.left, env)
            if a.is_false:
                return FALSE
            b = go(f.right, env)
            if b.is_false:
                return FALSE
            if a.is_true and b.is_true:
                return TRUE
            return a if a.is_unknown else b
        if isinstance(f, Or):
            a = go(f.left, env)
            if a.is_true:
                return TRUE
            b = go(f.right, env)
            if b.is_true:
                return TRUE
            if a.is_false and b.is_false:
                return FALSE
            return a if a.is_unknown else b

        # order-macro pseudo-atoms are decided exactly
        m = match_ge_atom(f)
        if m is not None:
            a, b = m
            return TRUE if eval_term(a, env) >= eval_term(b, env) else FALSE
        m = match_ngt_atom(f)
        if m is not None:
            a, b = m
            return TRUE if eval_term(a, env) < eval_term(b, env) else FALSE

        if isinstance(f, ForallNum):
            m = match_bounded_forall(f)
            if m is not None:
                x, t, body = m
                bound = eval_term(t, env)
                pending = TRUE
                for n in range(bound):
                    v = go(body, {**env, x: n})
                    if v.is_false:
                        return FALSE
                    if v.is_unknown:
                        pending = v
                return pending
            for n in range(cutoff + 1):
                v = go(f.body, {**env, f.var: n})
                if v.is_false:
                    return FALSE
            return Verdict.unknown(f"no counterexample below {cutoff + 1}")
        if isinstance(f, ExistsNum):
            m = match_bounded_exists(f)
            if m is not None:
                x, t, body = m
                bound = eval_term(t, env)
                pending = FALSE
                for n in range(bound):
                    v = go(body, {**env, x: n})
                    if v.is_true:
                        return TRUE
                    if v.is_unknown:
                        pending = v
                return pending
            for n in range(cutoff + 1):
                v = go(f.body, {**env, f.var: n})
                if v.is_true:
                    return TRUE
            return Verdict.unknown(f"no witness below {cutoff + 1}")
        if isinstance(f, (ForallSet, ExistsSet)):
            return Verdict.unknown("set quantifier is outside the evaluator's reach")
        raise TypeError(f"not a formula: {f!r}")

    return go(phi, {})


def eval_sequent(
    seq,
    oracles: Optional[OracleTuple] = None,
    setenv: Optional[Mapping[int, UPSet]] = None,
    cutoff: int = DEFAULT_CUTOFF,
) -> Verdict:
    """Disjunctive reading; the empty sequent is False."""
    if not len(seq):
        return FALSE
    out = FALSE
    for f in seq:
        v = eval_formula(f, oracles, setenv, cutoff)
        if v.is_true:
            return TRUE
        if v.is_unknown:
            out = v
    return out
