"""Concrete syntax: a small surface language for formulas and sequents.

Grammar sketch (lowest precedence first):

    formula   := ('forall'|'exists') name ('<' term)? '.' formula
               | disj ('->' formula)?
    disj      := conj ('|' conj)*
    conj      := unary ('&' unary)*
    unary     := '~' unary | atom
    atom      := '(' formula ')'
               | term ('='|'!=') term
               | term ('<'|'<=') term
               | term ('in'|'notin') setname

'~' applies the De Morgan dual at parse time (the tree stores no negation),
'A -> B' is sugar for '~A | B', 's <= t' for 'exists z (t = s + z)' with the
least fresh z, 's < t' for 's+1 <= t', and the bounded quantifier forms build
the guard-disjunction/-conjunction patterns that the classifier recognises.

Names x3/X3/O3/C3 are canonical (index 3); any other identifier is assigned
the smallest index not reserved by a canonical name in the same input,
lowercase meaning first-order and uppercase meaning a set variable.
Decimal literals are numerals; printing uses decimals for values 0 and >= 2
(value 1 prints as (0 + 1): the literal '1' is the distinct unit term).
"""

from __future__ import annotations

import re

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
    Sequent,
    SetRef,
    Term,
    Times,
    Var,
    Var2,
    Zero,
    bounded_exists,
    bounded_forall,
    le_formula,
    lt_formula,
    match_bounded_exists,
    match_bounded_forall,
    match_ge_atom,
    match_ngt_atom,
    negate,
    numeral,
    numeral_value,
)

GRAMMAR_VERSION = 1

_KEYWORDS = {"forall", "exists", "in", "notin", "exp"}

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z][A-Za-z0-9_]*)"
    r"|(?P<op>->|!=|<=|[()+*=<.&|~]))"
)

_CANONICAL = re.compile(r"^([xXOC])(\d+)$")


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


def _tokenize(text: str):
    tokens = []
    i = 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if m is None or m.end() == i:
            stripped = text[i:].lstrip()
            if not stripped:
                break
            raise FormulaSyntaxError(f"unexpected character {stripped[0]!r}", len(text) - len(stripped))
        if m.lastgroup == "num":
            tokens.append(("num", int(m.group("num")), m.start("num")))
        elif m.lastgroup == "name":
            name = m.group("name")
            kind = "kw" if name in _KEYWORDS else "name"
            tokens.append((kind, name, m.start("name")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        i = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Names:
    """Maps identifiers to indices; canonical names are fixed in advance."""

    def __init__(self, tokens):
        self.num = {}
        self.set = {}
        reserved_num, reserved_set = set(), set()
        for kind, val, _ in tokens:
            if kind != "name":
                continue
            m = _CANONICAL.match(val)
            if not m:
                continue
            sort, idx = m.group(1), int(m.group(2))
            if sort == "x":
                self.num[val] = idx
                reserved_num.add(idx)
            elif sort == "X":
                self.set[val] = ("var", idx)
                reserved_set.add(idx)
            elif sort == "O":
                self.set[val] = ("oracle", idx)
            else:
                self.set[val] = ("const", idx)
        self._reserved_num = reserved_num
        self._reserved_set = reserved_set

    def num_index(self, name: str) -> int:
        if name not in self.num:
            i = 0
            while i in self._reserved_num:
                i += 1
            self._reserved_num.add(i)
            self.num[name] = i
        return self.num[name]

    def set_symbol(self, name: str) -> SetRef:
        if name not in self.set:
            i = 0
            while i in self._reserved_set:
                i += 1
            self._reserved_set.add(i)
            self.set[name] = ("var", i)
        kind, idx = self.set[name]
        if kind == "var":
            return Var2(idx)
        if kind == "oracle":
            return OracleRef(idx)
        return ModelConst(idx)


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.names = _Names(self.tokens)

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind, value=None):
        k, v, p = self.peek()
        if k != kind or (value is not None and v != value):
            want = value if value is not None else kind
            raise FormulaSyntaxError(f"expected {want!r}, found {v!r}", p)
        return self.take()

    def at_op(self, *ops):
        k, v, _ = self.peek()
        return k == "op" and v in ops

    # -------- formulas

    def formula(self) -> Formula:
        k, v, p = self.peek()
        if k == "kw" and v in ("forall", "exists"):
            self.take()
            nk, name, np = self.take()
            if nk != "name":
                raise FormulaSyntaxError("quantifier needs a variable name", np)
            is_set = name[0].isupper()
            bound = None
            if self.at_op("<"):
                if is_set:
                    raise FormulaSyntaxError("bounded quantifiers are first-order", np)
                self.take()
                bound = self.term()
            self.expect("op", ".")
            body = self.formula()
            if is_set:
                ref = self.names.set_symbol(name)
                if not isinstance(ref, Var2):
                    raise FormulaSyntaxError("only set variables can be quantified", np)
                return (ForallSet if v == "forall" else ExistsSet)(ref.index, body)
            idx = self.names.num_index(name)
            if bound is not None:
                build = bounded_forall if v == "forall" else bounded_exists
                return build(idx, bound, body)
            return (ForallNum if v == "forall" else ExistsNum)(idx, body)
        left = self.disj()
        if self.at_op("->"):
            self.take()
            right = self.formula()
            return Or(negate(left), right)
        return left

    def disj(self) -> Formula:
        parts = [self.conj()]
        while self.at_op("|"):
            self.take()
            parts.append(self.conj())
        out = parts[-1]
        for f in reversed(parts[:-1]):
            out = Or(f, out)
        return out

    def conj(self) -> Formula:
        parts = [self.unary()]
        while self.at_op("&"):
            self.take()
            parts.append(self.unary())
        out = parts[-1]
        for f in reversed(parts[:-1]):
            out = And(f, out)
        return out

    def unary(self) -> Formula:
        if self.at_op("~"):
            self.take()
            return negate(self.unary())
        return self.atom()

    def atom(self) -> Formula:
        if self.at_op("("):
            # could be a parenthesised formula or a parenthesised term
            mark = self.pos
            self.take()
            try:
                inner = self.formula()
                self.expect("op", ")")
                return inner
            except FormulaSyntaxError:
                self.pos = mark
        lhs = self.term()
        k, v, p = self.peek()
        if k == "op" and v in ("=", "!="):
            self.take()
            rhs = self.term()
            return AtomEq(lhs, rhs, v == "=")
        if k == "op" and v in ("<", "<="):
            self.take()
            rhs = self.term()
            return lt_formula(lhs, rhs) if v == "<" else le_formula(lhs, rhs)
        if k == "kw" and v in ("in", "notin"):
            self.take()
            nk, name, np = self.take()
            if nk != "name" or not name[0].isupper():
                raise FormulaSyntaxError("membership needs a set symbol", np)
            return AtomMem(lhs, self.names.set_symbol(name), v == "in")
        raise FormulaSyntaxError(f"expected a relation, found {v!r}", p)

    # -------- terms

    def term(self) -> Term:
        left = self.term_factor()
        while self.at_op("+"):
            self.take()
            left = Plus(left, self.term_factor())
        return left

    def term_factor(self) -> Term:
        left = self.term_atom()
        while self.at_op("*"):
            self.take()
            left = Times(left, self.term_atom())
        return left

    def term_atom(self) -> Term:
        k, v, p = self.peek()
        if k == "num":
            self.take()
            if v == 0:
                return Zero()
            if v == 1:
                return One()
            return numeral(v)
        if k == "kw" and v == "exp":
            self.take()
            self.expect("op", "(")
            arg = self.term()
            self.expect("op", ")")
            return Exp(arg)
        if k == "name":
            if v[0].isupper():
                raise FormulaSyntaxError("set symbols cannot appear in terms", p)
            self.take()
            return Var(self.names.num_index(v))
        if k == "op" and v == "(":
            self.take()
            t = self.term()
            self.expect("op", ")")
            return t
        raise FormulaSyntaxError(f"expected a term, found {v!r}", p)


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    phi = p.formula()
    k, v, pos = p.peek()
    if k != "eof":
        raise FormulaSyntaxError(f"trailing input {v!r}", pos)
    return phi


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.term()
    k, v, pos = p.peek()
    if k != "eof":
        raise FormulaSyntaxError(f"trailing input {v!r}", pos)
    return t


def parse_sequent(text: str) -> Sequent:
    # formulas contain no commas, so the split is unambiguous
    parts = [p for p in (s.strip() for s in text.split(",")) if p]
    return Sequent.of(*(parse_formula(p) for p in parts))


# ------------------------------------------------------------- printing


def print_term(t: Term) -> str:
    v = numeral_value(t)
    if v is not None and v != 1:
        return str(v)
    if isinstance(t, Zero):
        return "0"
    if isinstance(t, One):
        return "1"
    if isinstance(t, Var):
        return f"x{t.index}"
    if isinstance(t, Plus):
        return f"({print_term(t.left)} + {print_term(t.right)})"
    if isinstance(t, Times):
        return f"({print_term(t.left)} * {print_term(t.right)})"
    if isinstance(t, Exp):
        return f"exp({print_term(t.arg)})"
    raise TypeError(f"not a term: {t!r}")


def print_setref(r: SetRef) -> str:
    if isinstance(r, Var2):
        return f"X{r.index}"
    if isinstance(r, OracleRef):
        return f"O{r.index}"
    if isinstance(r, ModelConst):
        return f"C{r.index}"
    raise TypeError(f"not a set symbol: {r!r}")


def print_formula(phi: Formula) -> str:
    if isinstance(phi, AtomEq):
        op = "=" if phi.positive else "!="
        return f"{print_term(phi.lhs)} {op} {print_term(phi.rhs)}"
    if isinstance(phi, AtomMem):
        op = "in" if phi.positive else "notin"
        return f"{print_term(phi.term)} {op} {print_setref(phi.ref)}"
    if isinstance(phi, And):
        return f"({print_formula(phi.left)} & {print_formula(phi.right)})"
    if isinstance(phi, Or):
        return f"({print_formula(phi.left)} | {print_formula(phi.right)})"
    if isinstance(phi, ForallNum):
        m = match_bounded_forall(phi)
        if m is not None and phi == bounded_forall(*m):
            x, t, body = m
            return f"forall x{x} < {print_term(t)}. {print_formula(body)}"
        m = match_ngt_atom(phi)
        if m is not None:
            a, b = m
            if isinstance(b, Plus) and isinstance(b.right, One) and phi == negate(lt_formula(b.left, a)):
                return f"~({print_term(b.left)} < {print_term(a)})"
            if phi == negate(le_formula(b, a)):
                return f"~({print_term(b)} <= {print_term(a)})"
        return f"forall x{phi.var}. {print_formula(phi.body)}"
    if isinstance(phi, ExistsNum):
        m = match_bounded_exists(phi)
        if m is not None and phi == bounded_exists(*m):
            x, t, body = m
            return f"exists x{x} < {print_term(t)}. {print_formula(body)}"
        m = match_ge_atom(phi)
        if m is not None:
            a, b = m
            if isinstance(b, Plus) and isinstance(b.right, One) and phi == lt_formula(b.left, a):
                return f"{print_term(b.left)} < {print_term(a)}"
            if phi == le_formula(b, a):
                return f"{print_term(b)} <= {print_term(a)}"
        return f"exists x{phi.var}. {print_formula(phi.body)}"
    if isinstance(phi, ForallSet):
        return f"forall X{phi.var}. {print_formula(phi.body)}"
    if isinstance(phi, ExistsSet):
        return f"exists X{phi.var}. {print_formula(phi.body)}"
    raise TypeError(f"not a formula: {phi!r}")


def print_sequent(seq: Sequent) -> str:
    return ", ".join(print_formula(f) for f in seq.formulas)
