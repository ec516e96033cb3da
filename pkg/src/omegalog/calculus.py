"""One-sided sequent rules, finite proofs, and base-theory acceptance.

Each rule relates a conclusion sequent to premise sequents.  A premise may
either drop the principal formula or keep it (both set-forms are accepted),
which makes the checker closed under weakening.  The cut rank bound rho caps
rank(cut formula) strictly; rho = float('inf') places no cap.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

from . import parser
from .semantics import OracleTuple, eval_term
from .syntax import (
    And,
    AtomEq,
    AtomMem,
    CaptureError,
    ExistsNum,
    ExistsSet,
    Exp,
    ForallNum,
    ForallSet,
    Formula,
    ModelConst,
    Or,
    OracleRef,
    Plus,
    Sequent,
    SetRef,
    Term,
    Times,
    Var,
    Var2,
    fresh_index,
    is_atomic,
    is_closed,
    negate,
    numeral,
    rank,
    subst_num_var,
    subst_set_var,
    term_vars,
)

INF = float("inf")


class RuleTag(str, Enum):
    LEM = "lem"
    EQ = "eq"
    AND = "and"
    OR = "or"
    ALL0 = "all0"
    EX0 = "ex0"
    ALL1 = "all1"
    EX1 = "ex1"
    CUT = "cut"
    ORACLE_IN = "oracle-in"
    ORACLE_NOTIN = "oracle-notin"
    AXIOM_T = "axiom"
    OMEGA = "omega"


RULE_ARITY = {
    RuleTag.LEM: 0,
    RuleTag.EQ: 2,
    RuleTag.AND: 2,
    RuleTag.OR: 1,
    RuleTag.ALL0: 1,
    RuleTag.EX0: 1,
    RuleTag.ALL1: 1,
    RuleTag.EX1: 1,
    RuleTag.CUT: 2,
    RuleTag.ORACLE_IN: 0,
    RuleTag.ORACLE_NOTIN: 0,
    RuleTag.AXIOM_T: 0,
}


class BadPosition(ValueError):
    pass


class EigenvariableClash(ValueError):
    pass


# ------------------------------------------------- positions inside atoms
#
# A position addresses a subterm of an atomic formula: first the argument
# slot (0 = lhs/member term, 1 = rhs), then child indices inside the term.


def _term_at(t: Term, path, k: int) -> Term:
    if k == len(path):
        return t
    i = path[k]
    if isinstance(t, (Plus, Times)):
        if i == 0:
            return _term_at(t.left, path, k + 1)
        if i == 1:
            return _term_at(t.right, path, k + 1)
    if isinstance(t, Exp) and i == 0:
        return _term_at(t.arg, path, k + 1)
    raise BadPosition(f"no child {i} at depth {k}")


def _term_replace(t: Term, path, k: int, repl: Term) -> Term:
    if k == len(path):
        return repl
    i = path[k]
    if isinstance(t, Plus):
        if i == 0:
            return Plus(_term_replace(t.left, path, k + 1, repl), t.right)
        if i == 1:
            return Plus(t.left, _term_replace(t.right, path, k + 1, repl))
    if isinstance(t, Times):
        if i == 0:
            return Times(_term_replace(t.left, path, k + 1, repl), t.right)
        if i == 1:
            return Times(t.left, _term_replace(t.right, path, k + 1, repl))
    if isinstance(t, Exp) and i == 0:
        return Exp(_term_replace(t.arg, path, k + 1, repl))
    raise BadPosition(f"no child {i} at depth {k}")


def subterm_at(atom: Formula, position) -> Term:
    position = tuple(position)
    if not position:
        raise BadPosition("empty position")
    slot, rest = position[0], position[1:]
    if isinstance(atom, AtomEq):
        if slot == 0:
            return _term_at(atom.lhs, rest, 0)
        if slot == 1:
            return _term_at(atom.rhs, rest, 0)
        raise BadPosition(f"equation has slots 0 and 1, not {slot}")
    if isinstance(atom, AtomMem):
        if slot == 0:
            return _term_at(atom.term, rest, 0)
        raise BadPosition(f"membership has slot 0 only, not {slot}")
    raise BadPosition("positions address atomic formulas only")


def replace_at(atom: Formula, position, repl: Term) -> Formula:
    position = tuple(position)
    if not position:
        raise BadPosition("empty position")
    slot, rest = position[0], position[1:]
    if isinstance(atom, AtomEq):
        if slot == 0:
            return AtomEq(_term_replace(atom.lhs, rest, 0, repl), atom.rhs, atom.positive)
        if slot == 1:
            return AtomEq(atom.lhs, _term_replace(atom.rhs, rest, 0, repl), atom.positive)
        raise BadPosition(f"equation has slots 0 and 1, not {slot}")
    if isinstance(atom, AtomMem):
        if slot == 0:
            return AtomMem(_term_replace(atom.term, rest, 0, repl), atom.ref, atom.positive)
        raise BadPosition(f"membership has slot 0 only, not {slot}")
    raise BadPosition("positions address atomic formulas only")


def replace_at_all(atom: Formula, positions, repl: Term) -> Formula:
    out = atom
    for p in positions:
        out = replace_at(out, p, repl)
    return out


def term_positions(atom: Formula, target: Term):
    """All positions inside the atom where `target` occurs as a subterm."""

    def walk(t: Term, path):
        if t == target:
            yield tuple(path)
        if isinstance(t, (Plus, Times)):
            yield from walk(t.left, path + [0])
            yield from walk(t.right, path + [1])
        elif isinstance(t, Exp):
            yield from walk(t.arg, path + [0])

    if isinstance(atom, AtomEq):
        yield from walk(atom.lhs, [0])
        yield from walk(atom.rhs, [1])
    elif isinstance(atom, AtomMem):
        yield from walk(atom.term, [0])


def collect_subterms(phi: Formula):
    """Every subterm of every term of the formula, outermost first."""

    def walk_term(t: Term):
        yield t
        if isinstance(t, (Plus, Times)):
            yield from walk_term(t.left)
            yield from walk_term(t.right)
        elif isinstance(t, Exp):
            yield from walk_term(t.arg)

    def walk(f: Formula):
        if isinstance(f, AtomEq):
            yield from walk_term(f.lhs)
            yield from walk_term(f.rhs)
        elif isinstance(f, AtomMem):
            yield from walk_term(f.term)
        elif isinstance(f, (And, Or)):
            yield from walk(f.left)
            yield from walk(f.right)
        else:
            yield from walk(f.body)

    return walk(phi)


# ---------------------------------------------------------------- witnesses


@dataclass(frozen=True)
class EqWitness:
    """Replacement data: rewrite `lhs` to `rhs` inside `atom` at `positions`."""

    atom: Formula
    lhs: Term
    rhs: Term
    positions: tuple

    def __post_init__(self):
        object.__setattr__(self, "positions", tuple(tuple(p) for p in self.positions))


@dataclass(frozen=True)
class RuleInstance:
    tag: RuleTag
    premises: Tuple[Sequent, ...]
    conclusion: Sequent
    witness: object = None


def premise_forms(conclusion: Sequent, principal: Formula, added) -> tuple:
    """The two accepted premise sequents: drop the principal, or keep it."""
    dropped = conclusion.without(principal).with_formulas(*added)
    kept = conclusion.with_formulas(*added)
    return (dropped, kept) if dropped != kept else (dropped,)


def _true_closed_atom(phi: Formula, oracles: Optional[OracleTuple]) -> bool:
    if isinstance(phi, AtomEq) and is_closed(phi):
        return (eval_term(phi.lhs) == eval_term(phi.rhs)) == phi.positive
    if oracles is not None and isinstance(phi, AtomMem) and isinstance(phi.ref, OracleRef):
        if not term_vars(phi.term):
            if phi.ref.index < len(oracles):
                return oracles.member(phi.ref.index, eval_term(phi.term)) == phi.positive
    return False


def rule_violation(
    inst: RuleInstance,
    rho=INF,
    theory: Optional["TheorySpec"] = None,
    oracles: Optional[OracleTuple] = None,
) -> Optional[str]:
    """None when the instance is a correct application; else the reason."""
    tag, prem, conc, wit = inst.tag, inst.premises, inst.conclusion, inst.witness
    if tag == RuleTag.OMEGA:
        return "the omega rule is not a finitary rule"
    want = RULE_ARITY[tag]
    if len(prem) != want:
        return f"{tag.value} takes {want} premises, got {len(prem)}"

    if tag == RuleTag.LEM:
        for f in conc:
            if is_atomic(f) and negate(f) in conc:
                return None
        return "no atomic formula occurs with its dual"

    if tag == RuleTag.AXIOM_T:
        if theory is None:
            return "no base theory supplied"
        if base_proves(theory, conc, oracles):
            return None
        return "bounded base-theory search does not justify the conclusion"

    if tag in (RuleTag.ORACLE_IN, RuleTag.ORACLE_NOTIN):
        if oracles is None:
            return "no oracle tuple supplied"
        positive = tag == RuleTag.ORACLE_IN
        cands = []
        if wit is not None:
            k, i = wit
            cands.append(AtomMem(numeral(k), OracleRef(i), positive))
        else:
            cands = [f for f in conc if isinstance(f, AtomMem) and isinstance(f.ref, OracleRef) and f.positive == positive]
        for atom in cands:
            if atom not in conc:
                continue
            if term_vars(atom.term):
                continue
            i = atom.ref.index
            if i < len(oracles) and oracles.member(i, eval_term(atom.term)) == positive:
                return None
        return "no correct oracle literal found in the conclusion"

    if tag == RuleTag.AND:
        for f in conc:
            if isinstance(f, And):
                ok1 = prem[0] in premise_forms(conc, f, [f.left])
                ok2 = prem[1] in premise_forms(conc, f, [f.right])
                if ok1 and ok2:
                    return None
        return "premises do not split a conjunction of the conclusion"

    if tag == RuleTag.OR:
        for f in conc:
            if isinstance(f, Or):
                if prem[0] in premise_forms(conc, f, [f.left, f.right]):
                    return None
        return "premise does not open a disjunction of the conclusion"

    if tag == RuleTag.ALL0:
        if not isinstance(wit, int):
            return "eigenvariable index required"
        for f in conc:
            if isinstance(f, ForallNum):
                try:
                    inst_body = subst_num_var(f.body, f.var, Var(wit))
                except CaptureError:
                    continue
                if prem[0] not in premise_forms(conc, f, [inst_body]):
                    continue
                if wit in conc.free_num_vars():
                    return f"eigenvariable x{wit} is free in the conclusion"
                return None
        return "premise does not instantiate a universal of the conclusion"

    if tag == RuleTag.EX0:
        if wit is None:
            return "witness term required"
        for f in conc:
            if isinstance(f, ExistsNum):
                try:
                    inst_body = subst_num_var(f.body, f.var, wit)
                except CaptureError:
                    continue
                if prem[0] in premise_forms(conc, f, [inst_body]):
                    return None
        return "premise does not witness an existential of the conclusion"

    if tag == RuleTag.ALL1:
        if not isinstance(wit, int):
            return "set eigenvariable index required"
        for f in conc:
            if isinstance(f, ForallSet):
                try:
                    inst_body = subst_set_var(f.body, f.var, Var2(wit))
                except CaptureError:
                    continue
                if prem[0] not in premise_forms(conc, f, [inst_body]):
                    continue
                if wit in conc.free_set_vars():
                    return f"set eigenvariable X{wit} is free in the conclusion"
                return None
        return "premise does not instantiate a set universal of the conclusion"

    if tag == RuleTag.EX1:
        if not isinstance(wit, (Var2, OracleRef, ModelConst)):
            return "set symbol witness required"
        for f in conc:
            if isinstance(f, ExistsSet):
                try:
                    inst_body = subst_set_var(f.body, f.var, wit)
                except CaptureError:
                    continue
                if prem[0] in premise_forms(conc, f, [inst_body]):
                    return None
        return "premise does not witness a set existential of the conclusion"

    if tag == RuleTag.CUT:
        if wit is None:
            return "cut formula required"
        r = rank(wit)
        if not (r < rho):
            return f"cut rank {r} is not below the bound {rho}"
        ok1 = prem[0] == conc.with_formulas(wit)
        ok2 = prem[1] == conc.with_formulas(negate(wit))
        if ok1 and ok2:
            return None
        return "premises are not the conclusion extended by the cut formula and its dual"

    if tag == RuleTag.EQ:
        if not isinstance(wit, EqWitness):
            return "replacement witness required"
        if not wit.positions:
            return "replacement needs at least one position"
        if not is_atomic(wit.atom):
            return "replacement source must be atomic"
        try:
            for p in wit.positions:
                if subterm_at(wit.atom, p) != wit.lhs:
                    return "a position does not hold the replaced term"
            new_atom = replace_at_all(wit.atom, wit.positions, wit.rhs)
        except BadPosition as e:
            return f"bad position: {e}"
        if new_atom not in conc:
            return "rewritten atom is not in the conclusion"
        eq = AtomEq(wit.lhs, wit.rhs, True)
        ok1 = prem[0] in premise_forms(conc, new_atom, [wit.atom])
        ok2 = prem[1] in premise_forms(conc, new_atom, [eq])
        if ok1 and ok2:
            return None
        return "premises do not supply the source atom and the equation"

    return f"unknown rule {tag}"


def check_rule(inst: RuleInstance, rho=INF, theory=None, oracles=None) -> bool:
    return rule_violation(inst, rho, theory, oracles) is None


# ------------------------------------------------------------ finite proofs


@dataclass(frozen=True)
class FiniteProof:
    tag: RuleTag
    conclusion: Sequent
    witness: object = None
    children: tuple = ()

    def height(self) -> int:
        if not self.children:
            return 0
        return 1 + max(c.height() for c in self.children)

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)


def finite_proof_violation(
    proof: FiniteProof,
    rho=INF,
    theory: Optional["TheorySpec"] = None,
    oracles: Optional[OracleTuple] = None,
    path: tuple = (),
) -> Optional[str]:
    inst = RuleInstance(
        proof.tag,
        tuple(c.conclusion for c in proof.children),
        proof.conclusion,
        proof.witness,
    )
    why = rule_violation(inst, rho, theory, oracles)
    if why is not None:
        return f"at node {list(path)}: {why}"
    for i, c in enumerate(proof.children):
        why = finite_proof_violation(c, rho, theory, oracles, path + (i,))
        if why is not None:
            return why
    return None


def check_finite_proof(proof, rho=INF, theory=None, oracles=None) -> bool:
    return finite_proof_violation(proof, rho, theory, oracles) is None


def weaken(proof: FiniteProof, extra: Sequent) -> FiniteProof:
    """Add the side formulas everywhere; checked proofs stay checked as long
    as no eigenvariable of the proof occurs free in the extras."""
    clash_num = extra.free_num_vars()
    clash_set = extra.free_set_vars()

    def go(p: FiniteProof) -> FiniteProof:
        if p.tag == RuleTag.ALL0 and p.witness in clash_num:
            raise EigenvariableClash(f"x{p.witness} is free in the added formulas")
        if p.tag == RuleTag.ALL1 and p.witness in clash_set:
            raise EigenvariableClash(f"X{p.witness} is free in the added formulas")
        return FiniteProof(
            p.tag,
            Sequent.union(p.conclusion, extra),
            p.witness,
            tuple(go(c) for c in p.children),
        )

    return go(proof)


# ------------------------------------------------------------- JSON shapes


def _witness_to_json(tag: RuleTag, wit):
    if wit is None:
        return None
    if tag in (RuleTag.ALL0, RuleTag.ALL1):
        return wit
    if tag == RuleTag.EX0:
        return parser.print_term(wit)
    if tag == RuleTag.EX1:
        return parser.print_setref(wit)
    if tag == RuleTag.CUT:
        return parser.print_formula(wit)
    if tag in (RuleTag.ORACLE_IN, RuleTag.ORACLE_NOTIN):
        return list(wit)
    if tag == RuleTag.EQ:
        return {
            "atom": parser.print_formula(wit.atom),
            "lhs": parser.print_term(wit.lhs),
            "rhs": parser.print_term(wit.rhs),
            "positions": [list(p) for p in wit.positions],
        }
    if tag == RuleTag.OMEGA:
        return parser.print_formula(wit)
    return None


def _witness_from_json(tag: RuleTag, obj):
    if obj is None:
        return None
    if tag in (RuleTag.ALL0, RuleTag.ALL1):
        return int(obj)
    if tag == RuleTag.EX0:
        return parser.parse_term(obj)
    if tag == RuleTag.EX1:
        phi = parser.parse_formula(f"0 in {obj}")
        return phi.ref
    if tag in (RuleTag.CUT, RuleTag.OMEGA):
        return parser.parse_formula(obj)
    if tag in (RuleTag.ORACLE_IN, RuleTag.ORACLE_NOTIN):
        return tuple(obj)
    if tag == RuleTag.EQ:
        return EqWitness(
            parser.parse_formula(obj["atom"]),
            parser.parse_term(obj["lhs"]),
            parser.parse_term(obj["rhs"]),
            tuple(tuple(p) for p in obj["positions"]),
        )
    return obj


def proof_to_json(proof: FiniteProof) -> dict:
    out = {"tag": proof.tag.value, "conclusion": parser.print_sequent(proof.conclusion)}
    wit = _witness_to_json(proof.tag, proof.witness)
    if wit is not None:
        out["witness"] = wit
    if proof.children:
        out["premises"] = [proof_to_json(c) for c in proof.children]
    return out


def proof_from_json(obj: dict) -> FiniteProof:
    tag = RuleTag(obj["tag"])
    return FiniteProof(
        tag,
        parser.parse_sequent(obj["conclusion"]),
        _witness_from_json(tag, obj.get("witness")),
        tuple(proof_from_json(c) for c in obj.get("premises", ())),
    )


# -------------------------------------------------------------- the theory


@dataclass(frozen=True)
class TheorySpec:
    """A base theory: axiom sequents plus a backward-search depth."""

    axioms: tuple = ()
    search_depth: int = 4
    name: str = ""

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "search_depth": self.search_depth,
            "axioms": [parser.print_sequent(ax) for ax in self.axioms],
        }

    @staticmethod
    def from_json(obj: dict) -> "TheorySpec":
        return TheorySpec(
            tuple(parser.parse_sequent(s) for s in obj["axioms"]),
            int(obj.get("search_depth", 4)),
            obj.get("name", ""),
        )


def _axiom_index(theory: TheorySpec) -> dict:
    """First-formula index over the axioms, built once per theory object.

    An axiom can only be a subset of sequents containing its first formula,
    so large axiom families cost one dict probe per conclusion formula
    instead of a full scan.
    """
    idx = getattr(theory, "_ax_index", None)
    if idx is None:
        idx = {}
        empty = False
        for ax in theory.axioms:
            if len(ax) == 0:
                empty = True
                continue
            idx.setdefault(ax.formulas[0], []).append(ax)
        object.__setattr__(theory, "_ax_index", idx)
        object.__setattr__(theory, "_ax_empty", empty)
    return idx


def _accepts(theory: TheorySpec, seq: Sequent, oracles: Optional[OracleTuple]) -> bool:
    idx = _axiom_index(theory)
    if getattr(theory, "_ax_empty"):
        return True
    for f in seq:
        for ax in idx.get(f, ()):
            if ax.issubset(seq):
                return True
        if _true_closed_atom(f, oracles):
            return True
        if is_atomic(f) and negate(f) in seq:
            return True
    return False


def base_proves(
    theory: TheorySpec,
    seq: Sequent,
    oracles: Optional[OracleTuple] = None,
    depth: Optional[int] = None,
) -> bool:
    """Depth-bounded provability from the base theory.

    Accepts axiom supersets, true closed atoms (oracle literals too, when a
    tuple is given) and dual atomic pairs outright, then searches backward
    through the finitary rules.  Sound but incomplete: a False only means
    the bounded search found nothing.
    """
    depth = theory.search_depth if depth is None else depth
    memo = {}

    def search(s: Sequent, d: int) -> bool:
        if _accepts(theory, s, oracles):
            return True
        if d <= 0:
            return False
        key = (s, d)
        if key in memo:
            return memo[key]
        memo[key] = False  # cycle guard
        out = False
        for f in s:
            if isinstance(f, Or):
                if search(s.without(f).with_formulas(f.left, f.right), d - 1):
                    out = True
                    break
            elif isinstance(f, And):
                if search(s.without(f).with_formulas(f.left), d - 1) and search(
                    s.without(f).with_formulas(f.right), d - 1
                ):
                    out = True
                    break
            elif isinstance(f, ForallNum):
                v = fresh_index(s.all_num_indices())
                try:
                    inst = subst_num_var(f.body, f.var, Var(v))
                except CaptureError:
                    continue
                if search(s.without(f).with_formulas(inst), d - 1):
                    out = True
                    break
            elif isinstance(f, ForallSet):
                v = fresh_index(_all_set_indices(s))
                try:
                    inst = subst_set_var(f.body, f.var, Var2(v))
                except CaptureError:
                    continue
                if search(s.without(f).with_formulas(inst), d - 1):
                    out = True
                    break
        if not out:
            for f in s:
                if isinstance(f, ExistsNum):
                    for t in _witness_terms(s):
                        try:
                            inst = subst_num_var(f.body, f.var, t)
                        except CaptureError:
                            continue
                        if inst in s:
                            continue
                        if search(s.with_formulas(inst), d - 1):
                            out = True
                            break
                    if out:
                        break
                elif isinstance(f, ExistsSet):
                    for r in _witness_setrefs(s):
                        try:
                            inst = subst_set_var(f.body, f.var, r)
                        except CaptureError:
                            continue
                        if inst in s:
                            continue
                        if search(s.with_formulas(inst), d - 1):
                            out = True
                            break
                    if out:
                        break
        memo[key] = out
        return out

    return search(seq, depth)


def _all_set_indices(s: Sequent) -> frozenset:
    from .syntax import all_set_indices

    out = frozenset()
    for f in s:
        out |= all_set_indices(f)
    return out


def _witness_terms(s: Sequent):
    seen = []
    have = set()
    for n in range(9):
        t = numeral(n)
        seen.append(t)
        have.add(t)
    for f in s:
        for t in collect_subterms(f):
            if t not in have:
                have.add(t)
                seen.append(t)
    return seen


def _witness_setrefs(s: Sequent):
    refs = []
    have = set()

    def walk(f: Formula):
        if isinstance(f, AtomMem):
            if f.ref not in have:
                have.add(f.ref)
                refs.append(f.ref)
        elif isinstance(f, (And, Or)):
            walk(f.left)
            walk(f.right)
        elif not is_atomic(f):
            walk(f.body)

    for f in s:
        walk(f)
    refs.append(Var2(fresh_index(_all_set_indices(s))))
    return refs
