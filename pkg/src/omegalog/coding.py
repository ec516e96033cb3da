"""Goedel numbering of terms, formulas and sequents via Cantor pairing.

Every node is pair(tag, fold(children)) where fold right-folds child codes
with pair into 0.  Tags are fixed; the decoder knows each tag's arity so the
fold is unambiguous.  Codes grow roughly like 2^depth bits, so keep encoded
objects shallow (numerals beyond a few dozen are impractical).
"""

from __future__ import annotations

import math
from functools import lru_cache

from .syntax import (
    And,
    AtomEq,
    AtomMem,
    ExistsNum,
    ExistsSet,
    ForallNum,
    ForallSet,
    Exp,
    Formula,
    ModelConst,
    One,
    Or,
    OracleRef,
    Plus,
    Sequent,
    SetRef,
    Term,
    Times,
    Var,
    Var2,
    Zero,
)

TAG_TABLE_VERSION = 1

TAG_ZERO = 0
TAG_ONE = 1
TAG_VAR = 2
TAG_PLUS = 3
TAG_TIMES = 4
TAG_EXP = 5
TAG_EQ = 6
TAG_NEQ = 7
TAG_IN = 8
TAG_NOTIN = 9
TAG_AND = 10
TAG_OR = 11
TAG_FORALL_NUM = 12
TAG_EXISTS_NUM = 13
TAG_FORALL_SET = 14
TAG_EXISTS_SET = 15
TAG_SEQUENT = 16

SETKIND_VAR2 = 0
SETKIND_ORACLE = 1
SETKIND_MODELCONST = 2


class NotACode(ValueError):
    """The number does not decode to an object of the requested sort."""


def pair(a: int, b: int) -> int:
    """Cantor pairing, a bijection N^2 -> N."""
    s = a + b
    return s * (s + 1) // 2 + b


def unpair(n: int):
    s = (math.isqrt(8 * n + 1) - 1) // 2
    b = n - s * (s + 1) // 2
    return s - b, b


def fold(xs) -> int:
    out = 0
    for x in reversed(list(xs)):
        out = pair(x, out)
    return out


def _node(tag: int, children) -> int:
    return pair(tag, fold(children))


def _unfold(n: int, arity: int):
    out = []
    for _ in range(arity):
        head, n = unpair(n)
        out.append(head)
    if n != 0:
        raise NotACode("trailing garbage after the last child")
    return out


@lru_cache(maxsize=65536)
def encode_term(t: Term) -> int:
    if isinstance(t, Zero):
        return _node(TAG_ZERO, [])
    if isinstance(t, One):
        return _node(TAG_ONE, [])
    if isinstance(t, Var):
        return _node(TAG_VAR, [t.index])
    if isinstance(t, Plus):
        return _node(TAG_PLUS, [encode_term(t.left), encode_term(t.right)])
    if isinstance(t, Times):
        return _node(TAG_TIMES, [encode_term(t.left), encode_term(t.right)])
    if isinstance(t, Exp):
        return _node(TAG_EXP, [encode_term(t.arg)])
    raise TypeError(f"not a term: {t!r}")


def encode_setref(r: SetRef) -> int:
    if isinstance(r, Var2):
        return pair(SETKIND_VAR2, r.index)
    if isinstance(r, OracleRef):
        return pair(SETKIND_ORACLE, r.index)
    if isinstance(r, ModelConst):
        return pair(SETKIND_MODELCONST, r.index)
    raise TypeError(f"not a set symbol: {r!r}")


@lru_cache(maxsize=65536)
def encode_formula(phi: Formula) -> int:
    if isinstance(phi, AtomEq):
        tag = TAG_EQ if phi.positive else TAG_NEQ
        return _node(tag, [encode_term(phi.lhs), encode_term(phi.rhs)])
    if isinstance(phi, AtomMem):
        tag = TAG_IN if phi.positive else TAG_NOTIN
        return _node(tag, [encode_term(phi.term), encode_setref(phi.ref)])
    if isinstance(phi, And):
        return _node(TAG_AND, [encode_formula(phi.left), encode_formula(phi.right)])
    if isinstance(phi, Or):
        return _node(TAG_OR, [encode_formula(phi.left), encode_formula(phi.right)])
    if isinstance(phi, ForallNum):
        return _node(TAG_FORALL_NUM, [phi.var, encode_formula(phi.body)])
    if isinstance(phi, ExistsNum):
        return _node(TAG_EXISTS_NUM, [phi.var, encode_formula(phi.body)])
    if isinstance(phi, ForallSet):
        return _node(TAG_FORALL_SET, [phi.var, encode_formula(phi.body)])
    if isinstance(phi, ExistsSet):
        return _node(TAG_EXISTS_SET, [phi.var, encode_formula(phi.body)])
    raise TypeError(f"not a formula: {phi!r}")


def encode_sequent(seq: Sequent) -> int:
    return _node(TAG_SEQUENT, [fold(encode_formula(f) for f in seq.formulas)])


def decode_term(n: int) -> Term:
    if n < 0:
        raise NotACode("negative")
    tag, body = unpair(n)
    if tag == TAG_ZERO:
        if body != 0:
            raise NotACode("0 takes no children")
        return Zero()
    if tag == TAG_ONE:
        if body != 0:
            raise NotACode("1 takes no children")
        return One()
    if tag == TAG_VAR:
        (idx,) = _unfold(body, 1)
        return Var(idx)
    if tag == TAG_PLUS:
        a, b = _unfold(body, 2)
        return Plus(decode_term(a), decode_term(b))
    if tag == TAG_TIMES:
        a, b = _unfold(body, 2)
        return Times(decode_term(a), decode_term(b))
    if tag == TAG_EXP:
        (a,) = _unfold(body, 1)
        return Exp(decode_term(a))
    raise NotACode(f"tag {tag} is not a term tag")


def decode_setref(n: int) -> SetRef:
    if n < 0:
        raise NotACode("negative")
    kind, idx = unpair(n)
    if kind == SETKIND_VAR2:
        return Var2(idx)
    if kind == SETKIND_ORACLE:
        return OracleRef(idx)
    if kind == SETKIND_MODELCONST:
        return ModelConst(idx)
    raise NotACode(f"set symbol kind {kind} unknown")


def decode_formula(n: int) -> Formula:
    if n < 0:
        raise NotACode("negative")
    tag, body = unpair(n)
    if tag in (TAG_EQ, TAG_NEQ):
        a, b = _unfold(body, 2)
        return AtomEq(decode_term(a), decode_term(b), tag == TAG_EQ)
    if tag in (TAG_IN, TAG_NOTIN):
        a, b = _unfold(body, 2)
        return AtomMem(decode_term(a), decode_setref(b), tag == TAG_IN)
    if tag == TAG_AND:
        a, b = _unfold(body, 2)
        return And(decode_formula(a), decode_formula(b))
    if tag == TAG_OR:
        a, b = _unfold(body, 2)
        return Or(decode_formula(a), decode_formula(b))
    if tag in (TAG_FORALL_NUM, TAG_EXISTS_NUM, TAG_FORALL_SET, TAG_EXISTS_SET):
        v, b = _unfold(body, 2)
        inner = decode_formula(b)
        ctor = {
            TAG_FORALL_NUM: ForallNum,
            TAG_EXISTS_NUM: ExistsNum,
            TAG_FORALL_SET: ForallSet,
            TAG_EXISTS_SET: ExistsSet,
        }[tag]
        return ctor(v, inner)
    raise NotACode(f"tag {tag} is not a formula tag")


# The smallest formula code: pair(TAG_EQ, fold([0, 0])) = pair(6, 0) = 21,
# so child codes inside a sequent list are never 0 and the terminator is safe.
MIN_FORMULA_CODE = pair(TAG_EQ, 0)


def decode_sequent(n: int) -> Sequent:
    if n < 0:
        raise NotACode("negative")
    tag, body = unpair(n)
    if tag != TAG_SEQUENT:
        raise NotACode(f"tag {tag} is not the sequent tag")
    (lst,) = _unfold(body, 1)
    formulas = []
    while lst != 0:
        head, lst = unpair(lst)
        if head < MIN_FORMULA_CODE:
            raise NotACode("sequent entry below the least formula code")
        formulas.append(decode_formula(head))
    seq = Sequent.of(*formulas)
    if list(seq.formulas) != formulas:
        raise NotACode("sequent entries not in canonical order")
    return seq


def is_formula_code(n: int) -> bool:
    try:
        decode_formula(n)
        return True
    except NotACode:
        return False
