"""Terms, formulas and sequents of negation-free second-order arithmetic.

Formulas carry no negation node: atoms come in positive/negative pairs and
`negate` is the De Morgan dual.  First-order variables are plain indices,
second-order symbols are set variables X<i>, oracle constants O<i> and model
constants C<i>.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping, Union


class AssignmentToBoundVariable(ValueError):
    """A numeral assignment targets a variable that a binder captures."""


class CaptureError(ValueError):
    """Substitution would move a free variable under a binder for it."""


# ---------------------------------------------------------------- terms


@dataclass(frozen=True)
class Zero:
    def __str__(self):
        return "0"


@dataclass(frozen=True)
class One:
    def __str__(self):
        return "1"


@dataclass(frozen=True)
class Var:
    index: int

    def __str__(self):
        return f"x{self.index}"


@dataclass(frozen=True)
class Plus:
    left: "Term"
    right: "Term"

    def __str__(self):
        return f"({self.left} + {self.right})"


@dataclass(frozen=True)
class Times:
    left: "Term"
    right: "Term"

    def __str__(self):
        return f"({self.left} * {self.right})"


@dataclass(frozen=True)
class Exp:
    arg: "Term"

    def __str__(self):
        return f"exp({self.arg})"


Term = Union[Zero, One, Var, Plus, Times, Exp]


# ---------------------------------------------------------------- set refs


@dataclass(frozen=True)
class Var2:
    index: int

    def __str__(self):
        return f"X{self.index}"


@dataclass(frozen=True)
class OracleRef:
    index: int

    def __str__(self):
        return f"O{self.index}"


@dataclass(frozen=True)
class ModelConst:
    index: int

    def __str__(self):
        return f"C{self.index}"


SetRef = Union[Var2, OracleRef, ModelConst]


# ---------------------------------------------------------------- formulas


@dataclass(frozen=True)
class AtomEq:
    """Equation or inequation between terms; positive=True means '='."""

    lhs: Term
    rhs: Term
    positive: bool = True

    def __str__(self):
        op = "=" if self.positive else "!="
        return f"{self.lhs} {op} {self.rhs}"


@dataclass(frozen=True)
class AtomMem:
    """Membership literal t in S / t notin S."""

    term: Term
    ref: SetRef
    positive: bool = True

    def __str__(self):
        op = "in" if self.positive else "notin"
        return f"{self.term} {op} {self.ref}"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class ForallNum:
    var: int
    body: "Formula"


@dataclass(frozen=True)
class ExistsNum:
    var: int
    body: "Formula"


@dataclass(frozen=True)
class ForallSet:
    var: int
    body: "Formula"


@dataclass(frozen=True)
class ExistsSet:
    var: int
    body: "Formula"


Formula = Union[AtomEq, AtomMem, And, Or, ForallNum, ExistsNum, ForallSet, ExistsSet]

_QUANTIFIERS = (ForallNum, ExistsNum, ForallSet, ExistsSet)
_FIRST_ORDER_Q = (ForallNum, ExistsNum)
_ATOMS = (AtomEq, AtomMem)


def is_atomic(phi: Formula) -> bool:
    return isinstance(phi, _ATOMS)


# ---------------------------------------------------------------- basic ops


def negate(phi: Formula) -> Formula:
    """De Morgan dual; an involution on every formula."""
    if isinstance(phi, AtomEq):
        return AtomEq(phi.lhs, phi.rhs, not phi.positive)
    if isinstance(phi, AtomMem):
        return AtomMem(phi.term, phi.ref, not phi.positive)
    if isinstance(phi, And):
        return Or(negate(phi.left), negate(phi.right))
    if isinstance(phi, Or):
        return And(negate(phi.left), negate(phi.right))
    if isinstance(phi, ForallNum):
        return ExistsNum(phi.var, negate(phi.body))
    if isinstance(phi, ExistsNum):
        return ForallNum(phi.var, negate(phi.body))
    if isinstance(phi, ForallSet):
        return ExistsSet(phi.var, negate(phi.body))
    if isinstance(phi, ExistsSet):
        return ForallSet(phi.var, negate(phi.body))
    raise TypeError(f"not a formula: {phi!r}")


def rank(phi: Formula) -> int:
    """Number of connective/quantifier nodes; atoms have rank 0."""
    if isinstance(phi, _ATOMS):
        return 0
    if isinstance(phi, (And, Or)):
        return 1 + rank(phi.left) + rank(phi.right)
    if isinstance(phi, _QUANTIFIERS):
        return 1 + rank(phi.body)
    raise TypeError(f"not a formula: {phi!r}")


def numeral(n: int) -> Term:
    """0, then n-fold +1.  numeral(1) is (0 + 1), distinct from the literal 1."""
    if n < 0:
        raise ValueError("numerals denote naturals")
    t: Term = Zero()
    for _ in range(n):
        t = Plus(t, One())
    return t


def numeral_value(t: Term):
    """The n with t == numeral(n), or None if t is not numeral-shaped."""
    n = 0
    while isinstance(t, Plus) and isinstance(t.right, One):
        n += 1
        t = t.left
    return n if isinstance(t, Zero) else None


def term_size(t: Term) -> int:
    if isinstance(t, (Zero, One, Var)):
        return 1
    if isinstance(t, (Plus, Times)):
        return 1 + term_size(t.left) + term_size(t.right)
    if isinstance(t, Exp):
        return 1 + term_size(t.arg)
    raise TypeError(f"not a term: {t!r}")


def formula_size(phi: Formula) -> int:
    if isinstance(phi, AtomEq):
        return 1 + term_size(phi.lhs) + term_size(phi.rhs)
    if isinstance(phi, AtomMem):
        return 2 + term_size(phi.term)
    if isinstance(phi, (And, Or)):
        return 1 + formula_size(phi.left) + formula_size(phi.right)
    if isinstance(phi, _QUANTIFIERS):
        return 1 + formula_size(phi.body)
    raise TypeError(f"not a formula: {phi!r}")


def term_vars(t: Term) -> frozenset:
    if isinstance(t, Var):
        return frozenset([t.index])
    if isinstance(t, (Plus, Times)):
        return term_vars(t.left) | term_vars(t.right)
    if isinstance(t, Exp):
        return term_vars(t.arg)
    return frozenset()


def free_num_vars(phi: Formula) -> frozenset:
    """Free first-order variable indices."""
    if isinstance(phi, AtomEq):
        return term_vars(phi.lhs) | term_vars(phi.rhs)
    if isinstance(phi, AtomMem):
        return term_vars(phi.term)
    if isinstance(phi, (And, Or)):
        return free_num_vars(phi.left) | free_num_vars(phi.right)
    if isinstance(phi, _FIRST_ORDER_Q):
        return free_num_vars(phi.body) - {phi.var}
    if isinstance(phi, (ForallSet, ExistsSet)):
        return free_num_vars(phi.body)
    raise TypeError(f"not a formula: {phi!r}")


def free_set_vars(phi: Formula) -> frozenset:
    """Free second-order variable indices (Var2 only; constants don't count)."""
    if isinstance(phi, AtomEq):
        return frozenset()
    if isinstance(phi, AtomMem):
        return frozenset([phi.ref.index]) if isinstance(phi.ref, Var2) else frozenset()
    if isinstance(phi, (And, Or)):
        return free_set_vars(phi.left) | free_set_vars(phi.right)
    if isinstance(phi, _FIRST_ORDER_Q):
        return free_set_vars(phi.body)
    if isinstance(phi, (ForallSet, ExistsSet)):
        return free_set_vars(phi.body) - {phi.var}
    raise TypeError(f"not a formula: {phi!r}")


def all_num_indices(phi: Formula) -> frozenset:
    """Every first-order index occurring at all, free or bound."""
    if isinstance(phi, AtomEq):
        return term_vars(phi.lhs) | term_vars(phi.rhs)
    if isinstance(phi, AtomMem):
        return term_vars(phi.term)
    if isinstance(phi, (And, Or)):
        return all_num_indices(phi.left) | all_num_indices(phi.right)
    if isinstance(phi, _FIRST_ORDER_Q):
        return all_num_indices(phi.body) | {phi.var}
    if isinstance(phi, (ForallSet, ExistsSet)):
        return all_num_indices(phi.body)
    raise TypeError(f"not a formula: {phi!r}")


def all_set_indices(phi: Formula) -> frozenset:
    if isinstance(phi, AtomEq):
        return frozenset()
    if isinstance(phi, AtomMem):
        return frozenset([phi.ref.index]) if isinstance(phi.ref, Var2) else frozenset()
    if isinstance(phi, (And, Or)):
        return all_set_indices(phi.left) | all_set_indices(phi.right)
    if isinstance(phi, _FIRST_ORDER_Q):
        return all_set_indices(phi.body)
    if isinstance(phi, (ForallSet, ExistsSet)):
        return all_set_indices(phi.body) | {phi.var}
    raise TypeError(f"not a formula: {phi!r}")


def is_closed(phi: Formula) -> bool:
    return not free_num_vars(phi) and not free_set_vars(phi)


# ----------------------------------------------------- substitution


def subst_term_var(t: Term, var: int, repl: Term) -> Term:
    if isinstance(t, Var):
        return repl if t.index == var else t
    if isinstance(t, Plus):
        return Plus(subst_term_var(t.left, var, repl), subst_term_var(t.right, var, repl))
    if isinstance(t, Times):
        return Times(subst_term_var(t.left, var, repl), subst_term_var(t.right, var, repl))
    if isinstance(t, Exp):
        return Exp(subst_term_var(t.arg, var, repl))
    return t


def subst_num_var(phi: Formula, var: int, repl: Term) -> Formula:
    """Replace free occurrences of first-order `var` by the term `repl`.

    Raises CaptureError if a binder would capture a variable of `repl`.
    """
    repl_vars = term_vars(repl)

    def go(f: Formula) -> Formula:
        if isinstance(f, AtomEq):
            return AtomEq(subst_term_var(f.lhs, var, repl), subst_term_var(f.rhs, var, repl), f.positive)
        if isinstance(f, AtomMem):
            return AtomMem(subst_term_var(f.term, var, repl), f.ref, f.positive)
        if isinstance(f, And):
            return And(go(f.left), go(f.right))
        if isinstance(f, Or):
            return Or(go(f.left), go(f.right))
        if isinstance(f, _FIRST_ORDER_Q):
            if f.var == var:
                return f
            if f.var in repl_vars and var in free_num_vars(f.body):
                raise CaptureError(f"variable x{f.var} of the replacement would be captured")
            return type(f)(f.var, go(f.body))
        if isinstance(f, (ForallSet, ExistsSet)):
            return type(f)(f.var, go(f.body))
        raise TypeError(f"not a formula: {f!r}")

    return go(phi)


def subst_set_var(phi: Formula, var: int, repl: SetRef) -> Formula:
    """Replace free occurrences of set variable X<var> by the set symbol `repl`."""

    def go(f: Formula) -> Formula:
        if isinstance(f, AtomEq):
            return f
        if isinstance(f, AtomMem):
            if isinstance(f.ref, Var2) and f.ref.index == var:
                return AtomMem(f.term, repl, f.positive)
            return f
        if isinstance(f, And):
            return And(go(f.left), go(f.right))
        if isinstance(f, Or):
            return Or(go(f.left), go(f.right))
        if isinstance(f, _FIRST_ORDER_Q):
            return type(f)(f.var, go(f.body))
        if isinstance(f, (ForallSet, ExistsSet)):
            if f.var == var:
                return f
            if isinstance(repl, Var2) and f.var == repl.index and var in free_set_vars(f.body):
                raise CaptureError(f"set variable X{f.var} of the replacement would be captured")
            return type(f)(f.var, go(f.body))
        raise TypeError(f"not a formula: {f!r}")

    return go(phi)


def substitute_numerals(phi: Formula, assignment: Mapping[int, int]) -> Formula:
    """Substitute numeral(n) for each assigned free first-order variable.

    Numerals are closed, so no capture can occur.  A key that is bound in
    the formula without being free raises AssignmentToBoundVariable; a key
    that is also bound in some subtree is substituted only where free.
    """
    if not assignment:
        return phi
    free = free_num_vars(phi)
    for v in assignment:
        if v not in free and v in all_num_indices(phi):
            raise AssignmentToBoundVariable(f"x{v} is bound, not free")

    def go(f: Formula, live: dict) -> Formula:
        if not live:
            return f
        if isinstance(f, AtomEq):
            lhs, rhs = f.lhs, f.rhs
            for v, n in live.items():
                lhs = subst_term_var(lhs, v, numeral(n))
                rhs = subst_term_var(rhs, v, numeral(n))
            return AtomEq(lhs, rhs, f.positive)
        if isinstance(f, AtomMem):
            t = f.term
            for v, n in live.items():
                t = subst_term_var(t, v, numeral(n))
            return AtomMem(t, f.ref, f.positive)
        if isinstance(f, And):
            return And(go(f.left, live), go(f.right, live))
        if isinstance(f, Or):
            return Or(go(f.left, live), go(f.right, live))
        if isinstance(f, _FIRST_ORDER_Q):
            inner = {k: v for k, v in live.items() if k != f.var}
            return type(f)(f.var, go(f.body, inner))
        if isinstance(f, (ForallSet, ExistsSet)):
            return type(f)(f.var, go(f.body, live))
        raise TypeError(f"not a formula: {f!r}")

    return go(phi, dict(assignment))


# ----------------------------------------------- order macros and patterns
#
# x <= y abbreviates exists z (y = x + z), x < y abbreviates x+1 <= y.
# Bounded quantifiers are the shapes
#   forall x (~(x < t) | body)      and      exists x ((x < t) & body)
# with t free of x; recognisers below match them structurally.


def fresh_index(avoid) -> int:
    i = 0
    s = set(avoid)
    while i in s:
        i += 1
    return i


def le_formula(s: Term, t: Term) -> Formula:
    z = fresh_index(term_vars(s) | term_vars(t))
    return ExistsNum(z, AtomEq(t, Plus(s, Var(z)), True))


def lt_formula(s: Term, t: Term) -> Formula:
    return le_formula(Plus(s, One()), t)


def match_ge_atom(phi: Formula):
    """exists z (a = b + z) with z fresh: semantically  a >= b.  -> (a, b)"""
    if isinstance(phi, ExistsNum) and isinstance(phi.body, AtomEq) and phi.body.positive:
        body = phi.body
        if isinstance(body.rhs, Plus) and isinstance(body.rhs.right, Var) and body.rhs.right.index == phi.var:
            a, b = body.lhs, body.rhs.left
            if phi.var not in term_vars(a) and phi.var not in term_vars(b):
                return a, b
    return None


def match_ngt_atom(phi: Formula):
    """forall z (a != b + z): semantically  a < b.  -> (a, b)"""
    if isinstance(phi, ForallNum) and isinstance(phi.body, AtomEq) and not phi.body.positive:
        body = phi.body
        if isinstance(body.rhs, Plus) and isinstance(body.rhs.right, Var) and body.rhs.right.index == phi.var:
            a, b = body.lhs, body.rhs.left
            if phi.var not in term_vars(a) and phi.var not in term_vars(b):
                return a, b
    return None


def lt_guard(x: int, t: Term) -> Formula:
    """The x < t disjunct used by bounded quantifier patterns."""
    return lt_formula(Var(x), t)


def match_bounded_forall(phi: Formula):
    """forall x (negate(x < t) | body) with x not in t  ->  (x, t, body)."""
    if not (isinstance(phi, ForallNum) and isinstance(phi.body, Or)):
        return None
    guard, body = phi.body.left, phi.body.right
    m = match_ngt_atom(guard)
    if m is None:
        return None
    t, bound_of = m
    # guard says t != (x+1)+z for all z, i.e. not (x < t)
    if not (isinstance(bound_of, Plus) and isinstance(bound_of.right, One)):
        return None
    if not (isinstance(bound_of.left, Var) and bound_of.left.index == phi.var):
        return None
    if phi.var in term_vars(t):
        return None
    return phi.var, t, body


def match_bounded_exists(phi: Formula):
    """exists x ((x < t) & body) with x not in t  ->  (x, t, body)."""
    if not (isinstance(phi, ExistsNum) and isinstance(phi.body, And)):
        return None
    guard, body = phi.body.left, phi.body.right
    m = match_ge_atom(guard)
    if m is None:
        return None
    t, bound_of = m
    if not (isinstance(bound_of, Plus) and isinstance(bound_of.right, One)):
        return None
    if not (isinstance(bound_of.left, Var) and bound_of.left.index == phi.var):
        return None
    if phi.var in term_vars(t):
        return None
    return phi.var, t, body


def bounded_forall(x: int, t: Term, body: Formula) -> Formula:
    return ForallNum(x, Or(negate(lt_guard(x, t)), body))


def bounded_exists(x: int, t: Term, body: Formula) -> Formula:
    return ExistsNum(x, And(lt_guard(x, t), body))


# ---------------------------------------------------------------- sequents


def struct_key(x) -> tuple:
    """Injective total-order key over terms, set symbols and formulas.

    Cheap (linear in the AST) where full Goedel codes blow up in bit
    length; the constructor ranks follow the coding tag table so the two
    orders agree on like-shaped nodes.
    """
    if isinstance(x, Zero):
        return (0,)
    if isinstance(x, One):
        return (1,)
    if isinstance(x, Var):
        return (2, x.index)
    if isinstance(x, Plus):
        return (3, struct_key(x.left), struct_key(x.right))
    if isinstance(x, Times):
        return (4, struct_key(x.left), struct_key(x.right))
    if isinstance(x, Exp):
        return (5, struct_key(x.arg))
    if isinstance(x, AtomEq):
        return (6 if x.positive else 7, struct_key(x.lhs), struct_key(x.rhs))
    if isinstance(x, AtomMem):
        kind = {Var2: 0, OracleRef: 1, ModelConst: 2}[type(x.ref)]
        return (8 if x.positive else 9, struct_key(x.term), (kind, x.ref.index))
    if isinstance(x, And):
        return (10, struct_key(x.left), struct_key(x.right))
    if isinstance(x, Or):
        return (11, struct_key(x.left), struct_key(x.right))
    if isinstance(x, ForallNum):
        return (12, x.var, struct_key(x.body))
    if isinstance(x, ExistsNum):
        return (13, x.var, struct_key(x.body))
    if isinstance(x, ForallSet):
        return (14, x.var, struct_key(x.body))
    if isinstance(x, ExistsSet):
        return (15, x.var, struct_key(x.body))
    raise TypeError(f"no structural key for {x!r}")


@dataclass(frozen=True)
class Sequent:
    """Finite set of formulas in a unique canonical order.

    Canonicalization sorts by the structural key and removes duplicates,
    so extensionally equal sequents are equal values.  The empty sequent
    is the contradictory one (bottom).
    """

    formulas: tuple = ()

    @staticmethod
    def of(*formulas: Formula) -> "Sequent":
        by_key = {}
        for f in formulas:
            by_key[struct_key(f)] = f
        return Sequent(tuple(f for _, f in sorted(by_key.items())))

    @staticmethod
    def union(*seqs: "Sequent") -> "Sequent":
        out = []
        for s in seqs:
            out.extend(s.formulas)
        return Sequent.of(*out)

    def with_formulas(self, *formulas: Formula) -> "Sequent":
        return Sequent.of(*self.formulas, *formulas)

    def without(self, phi: Formula) -> "Sequent":
        return Sequent(tuple(f for f in self.formulas if f != phi))

    def __contains__(self, phi: Formula) -> bool:
        return phi in self.formulas

    def __iter__(self) -> Iterator[Formula]:
        return iter(self.formulas)

    def __len__(self) -> int:
        return len(self.formulas)

    @property
    def is_bottom(self) -> bool:
        return not self.formulas

    def issubset(self, other: "Sequent") -> bool:
        mine = set(self.formulas)
        return mine.issubset(set(other.formulas))

    def free_num_vars(self) -> frozenset:
        out = frozenset()
        for f in self.formulas:
            out |= free_num_vars(f)
        return out

    def free_set_vars(self) -> frozenset:
        out = frozenset()
        for f in self.formulas:
            out |= free_set_vars(f)
        return out

    def all_num_indices(self) -> frozenset:
        out = frozenset()
        for f in self.formulas:
            out |= all_num_indices(f)
        return out


def or_fold(seq: Sequent) -> Formula:
    """Read a nonempty sequent as the disjunction of its members."""
    fs = seq.formulas
    if not fs:
        raise ValueError("bottom has no disjunctive reading")
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = Or(f, out)
    return out


def or_fold_list(formulas) -> Formula:
    formulas = list(formulas)
    if not formulas:
        raise ValueError("empty disjunction")
    out = formulas[-1]
    for f in reversed(formulas[:-1]):
        out = Or(f, out)
    return out


def and_fold_list(formulas) -> Formula:
    formulas = list(formulas)
    if not formulas:
        raise ValueError("empty conjunction")
    out = formulas[-1]
    for f in reversed(formulas[:-1]):
        out = And(f, out)
    return out


# ---------------------------------------------------------------- classes


@dataclass(frozen=True)
class FormulaClass:
    """Position in the arithmetical/analytical hierarchy.

    tag is one of Delta00, Sigma0n, Pi0n, Sigma1n, Pi1n, Pi1omega; n is the
    block count for the parametric tags and 0 otherwise.  lightface means no
    free set variables.
    """

    tag: str
    n: int
    lightface: bool

    def __str__(self):
        base = self.tag if self.tag in ("Delta00", "Pi1omega") else f"{self.tag}({self.n})"
        face = "lightface" if self.lightface else "boldface"
        return f"{base} {face}"

    def dual(self) -> "FormulaClass":
        swap = {"Sigma0n": "Pi0n", "Pi0n": "Sigma0n", "Sigma1n": "Pi1n", "Pi1n": "Sigma1n"}
        return FormulaClass(swap.get(self.tag, self.tag), self.n, self.lightface)

    def subsumes(self, other: "FormulaClass") -> bool:
        """True when every formula of class `other` also lies in `self`."""
        if self.tag == "Pi1omega":
            return True
        if other.tag == "Pi1omega":
            return False
        s_lvl, s_kind, s_n = _class_key(self)
        o_lvl, o_kind, o_n = _class_key(other)
        if (o_lvl, o_kind, o_n) == (0, "delta", 0):
            return True
        if s_lvl > o_lvl:
            return True
        if s_lvl < o_lvl:
            return False
        if o_n < s_n:
            return True
        if o_n > s_n:
            return False
        return s_kind == o_kind


def _class_key(c: FormulaClass):
    if c.tag == "Delta00":
        return 0, "delta", 0
    lvl = 0 if c.tag in ("Sigma0n", "Pi0n") else 1
    kind = "sigma" if c.tag.startswith("Sigma") else "pi"
    return lvl, kind, c.n


# internal lattice elements: (order, n, kind) with kind in delta/sigma/pi,
# plus the distinguished top for prefixes outside the prenex hierarchy
_TOP = ("top", 0, "top")


def _lift(c, order):
    if c == _TOP:
        return c
    o, n, k = c
    if o >= order:
        return c
    return (order, 0, "delta")


def _join(a, b):
    if a == _TOP or b == _TOP:
        return _TOP
    order = max(a[0], b[0])
    a, b = _lift(a, order), _lift(b, order)
    (_, n1, k1), (_, n2, k2) = a, b
    if n1 < n2:
        return (order, n2, k2)
    if n2 < n1:
        return (order, n1, k1)
    if k1 == k2:
        return (order, n1, k1)
    if k1 == "delta":
        return (order, n1, k2)
    if k2 == "delta":
        return (order, n1, k1)
    # a genuine sigma/pi clash at the same level prenexes one level up
    return (order, n1 + 1, "delta")


def _quant(c, order, kind):
    """Apply one unbounded quantifier block step of the given kind."""
    if c == _TOP:
        return _TOP
    if order == 0 and c[0] == 1:
        # first-order quantifier over a genuinely second-order formula:
        # the prefix cannot be rearranged into the prenex hierarchy
        return _TOP
    c = _lift(c, order)
    _, n, k = c
    if n == 0:
        return (order, 1, kind)
    if k == kind or k == "delta":
        return (order, n, kind)
    return (order, n + 1, kind)


def _cls(phi: Formula):
    if isinstance(phi, _ATOMS):
        return (0, 0, "delta")
    if isinstance(phi, (And, Or)):
        return _join(_cls(phi.left), _cls(phi.right))
    if isinstance(phi, ForallNum):
        m = match_bounded_forall(phi)
        if m is not None and _cls(m[2]) == (0, 0, "delta"):
            return (0, 0, "delta")
        return _quant(_cls(phi.body), 0, "pi")
    if isinstance(phi, ExistsNum):
        m = match_bounded_exists(phi)
        if m is not None and _cls(m[2]) == (0, 0, "delta"):
            return (0, 0, "delta")
        return _quant(_cls(phi.body), 0, "sigma")
    if isinstance(phi, ForallSet):
        return _quant(_cls(phi.body), 1, "pi")
    if isinstance(phi, ExistsSet):
        return _quant(_cls(phi.body), 1, "sigma")
    raise TypeError(f"not a formula: {phi!r}")


def classify(phi: Formula) -> FormulaClass:
    """Smallest hierarchy class containing phi.

    A formula counts as Delta00 only when every first-order quantifier is a
    recognised bounded pattern and no set quantifier occurs.  Boolean
    combinations that sit in both Sigma and Pi at the same level report the
    Sigma side; prefixes that cannot be prenexed into the hierarchy (a
    first-order quantifier over a second-order one) report Pi1omega.
    """
    light = not free_set_vars(phi)
    c = _cls(phi)
    if c == _TOP:
        return FormulaClass("Pi1omega", 0, light)
    order, n, kind = c
    if n == 0:
        return FormulaClass("Delta00", 0, light)
    if order == 0:
        tag = "Pi0n" if kind == "pi" else "Sigma0n"
    else:
        tag = "Pi1n" if kind == "pi" else "Sigma1n"
    return FormulaClass(tag, n, light)
