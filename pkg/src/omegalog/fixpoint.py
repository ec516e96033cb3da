"""Bounded sequent universes and least-fixed-point provability classes.

The saturation operator adds a universe sequent when the base theory proves
it, when some finitary rule of cut rank below rho concludes it from premises
already in the class, or when the (numeral-truncated) omega rule does.  The
iteration is round-based, so stage k holds exactly F^k(empty); candidate rule
instances are enumerated once per universe since they do not depend on the
growing class.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

from .calculus import (
    INF,
    BadPosition,
    EqWitness,
    RuleInstance,
    RuleTag,
    TheorySpec,
    base_proves,
    check_rule,
    replace_at_all,
    subterm_at,
    term_positions,
)
from .coding import MIN_FORMULA_CODE, NotACode, decode_formula, encode_formula, encode_sequent
from .semantics import OracleTuple
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
    Times,
    Var,
    Var2,
    Zero,
    all_num_indices,
    all_set_indices,
    fresh_index,
    free_num_vars,
    free_set_vars,
    is_atomic,
    negate,
    numeral,
    rank,
    subst_num_var,
    subst_set_var,
    substitute_numerals,
)

_TERM_TYPES = (Zero, One, Var, Plus, Times, Exp)
_SETREF_TYPES = (Var2, OracleRef, ModelConst)


class UniverseTooLarge(ValueError):
    pass


class OutsideUniverseError(ValueError):
    pass


class Membership(str, Enum):
    IN = "In"
    OUT = "Out"
    OUTSIDE = "OutsideUniverse"


def enumerate_formulas(code_bound: int, budget: int = 2_000_000) -> List[Formula]:
    """All formulas with Goedel code <= code_bound, ascending by code."""
    if code_bound > budget:
        raise UniverseTooLarge(f"scanning {code_bound} codes exceeds the budget {budget}")
    out = []
    for n in range(MIN_FORMULA_CODE, code_bound + 1):
        try:
            out.append(decode_formula(n))
        except NotACode:
            continue
    return out


@dataclass(frozen=True)
class SequentUniverse:
    code_bound: int
    len_bound: int
    omega_cutoff: int
    pool: tuple  # formulas ascending by code
    sequents: tuple  # Sequent values ascending by sequent code

    @staticmethod
    def enumerate(code_bound: int, len_bound: int, omega_cutoff: int,
                  budget: int = 100_000) -> "SequentUniverse":
        pool = enumerate_formulas(code_bound)
        return SequentUniverse._build(pool, code_bound, len_bound, omega_cutoff, budget)

    @staticmethod
    def from_formulas(formulas, len_bound: int, omega_cutoff: int,
                      code_bound: Optional[int] = None,
                      budget: int = 100_000) -> "SequentUniverse":
        by_code = sorted({encode_formula(f): f for f in formulas}.items())
        pool = [f for _, f in by_code]
        bound = code_bound if code_bound is not None else (by_code[-1][0] if by_code else 0)
        return SequentUniverse._build(pool, bound, len_bound, omega_cutoff, budget)

    @staticmethod
    def _build(pool, code_bound, len_bound, omega_cutoff, budget) -> "SequentUniverse":
        count = sum(
            1 for k in range(len_bound + 1) for _ in itertools.combinations(range(len(pool)), k)
        ) if len(pool) <= 40 else budget + 1
        if count > budget:
            raise UniverseTooLarge(
                f"{len(pool)} pool formulas with sequent length {len_bound} exceed the budget")
        seqs = []
        for k in range(len_bound + 1):
            for combo in itertools.combinations(pool, k):
                seqs.append(Sequent.of(*combo))
        seqs = sorted({encode_sequent(s): s for s in seqs}.items())
        return SequentUniverse(code_bound, len_bound, omega_cutoff,
                               tuple(pool), tuple(s for _, s in seqs))

    def __post_init__(self):
        object.__setattr__(self, "_codes", {encode_sequent(s): s for s in self.sequents})
        object.__setattr__(self, "_seq_to_code", {s: c for c, s in self._codes.items()})
        object.__setattr__(self, "_pool_set", frozenset(self.pool))

    def __len__(self):
        return len(self.sequents)

    def code_of(self, seq: Sequent) -> Optional[int]:
        return self._seq_to_code.get(seq)

    def sequent_of(self, code: int) -> Optional[Sequent]:
        return self._codes.get(code)

    def __contains__(self, seq: Sequent) -> bool:
        return seq in self._seq_to_code


# ------------------------------------------------------------ provenance


@dataclass(frozen=True)
class Base:
    kind: str = "base"

    def to_json(self):
        return {"kind": "base"}


@dataclass(frozen=True)
class FinRule:
    tag: RuleTag
    premises: tuple  # sequent codes
    kind: str = "rule"

    def to_json(self):
        return {"kind": "rule", "tag": self.tag.value, "premises": list(self.premises)}


@dataclass(frozen=True)
class OmegaJust:
    principal_code: int
    premises: tuple  # sequent codes actually required (in-universe instances)
    checked_to: int  # numeral cutoff used
    skipped: tuple = ()  # instance indices whose premise fell outside the universe
    kind: str = "omega"

    def to_json(self):
        return {
            "kind": "omega",
            "principal": self.principal_code,
            "premises": list(self.premises),
            "checked_to": self.checked_to,
            "skipped": list(self.skipped),
        }


def _just_premises(j) -> tuple:
    if isinstance(j, Base):
        return ()
    return j.premises


@dataclass(frozen=True)
class ProvClass:
    members: frozenset  # sequent codes
    provenance: dict  # code -> Base | FinRule | OmegaJust
    stages: dict  # code -> round number (1-based)
    universe: SequentUniverse
    params: dict = field(default_factory=dict)

    def query(self, seq: Sequent) -> Membership:
        code = self.universe.code_of(seq)
        if code is None:
            return Membership.OUTSIDE
        return Membership.IN if code in self.members else Membership.OUT

    def omega_tainted(self) -> frozenset:
        """Members whose justification depends on a truncated omega step."""
        memo: Dict[int, bool] = {}

        def tainted(code: int) -> bool:
            if code in memo:
                return memo[code]
            memo[code] = False  # provenance premises entered strictly earlier
            j = self.provenance[code]
            out = isinstance(j, OmegaJust) or any(tainted(p) for p in _just_premises(j))
            memo[code] = out
            return out

        return frozenset(c for c in self.members if tainted(c))

    def provenance_chain(self, code: int) -> list:
        """Codes of the justification DAG reachable from `code`, root first."""
        seen, order = set(), []

        def walk(c: int):
            if c in seen or c not in self.provenance:
                return
            seen.add(c)
            order.append(c)
            for p in _just_premises(self.provenance[c]):
                walk(p)

        walk(code)
        return order

    def to_json(self) -> dict:
        return {
            "params": self.params,
            "universe": {
                "code_bound": self.universe.code_bound,
                "len_bound": self.universe.len_bound,
                "omega_cutoff": self.universe.omega_cutoff,
                "size": len(self.universe),
            },
            "members": [
                {
                    "code": c,
                    "stage": self.stages[c],
                    "provenance": self.provenance[c].to_json(),
                }
                for c in sorted(self.members)
            ],
        }


# ------------------------------------------------- candidate enumeration


def _hole_paths(phi: Formula, var: int, first_order: bool) -> list:
    """Paths to free occurrences of the variable (first- or second-order)."""
    out = []

    def walk(f: Formula, path: tuple):
        if isinstance(f, (AtomEq, AtomMem)):
            if first_order:
                for p in term_positions(f, Var(var)):
                    out.append(path + p)
            else:
                if isinstance(f, AtomMem) and isinstance(f.ref, Var2) and f.ref.index == var:
                    out.append(path + ("ref",))
            return
        if isinstance(f, (And, Or)):
            walk(f.left, path + (0,))
            walk(f.right, path + (1,))
            return
        if isinstance(f, (ForallNum, ExistsNum)):
            if first_order and f.var == var:
                return
            walk(f.body, path + (0,))
            return
        if isinstance(f, (ForallSet, ExistsSet)):
            if not first_order and f.var == var:
                return
            walk(f.body, path + (0,))

    walk(phi, ())
    return out


def _follow(phi: Formula, path: tuple):
    """Read whatever sits at a hole path inside another formula, or None."""
    node = phi
    for k, step in enumerate(path):
        if step == "ref":
            return node.ref if isinstance(node, AtomMem) else None
        if isinstance(node, (And, Or)):
            node = node.left if step == 0 else node.right
            continue
        if isinstance(node, (ForallNum, ExistsNum, ForallSet, ExistsSet)):
            if step != 0:
                return None
            node = node.body
            continue
        if isinstance(node, (AtomEq, AtomMem)):
            try:
                return subterm_at(node, path[k:])
            except BadPosition:
                return None
        return None
    return None


def _candidate_instances(universe: SequentUniverse, gamma: Sequent, rho,
                         oracles: Optional[OracleTuple]) -> list:
    """All (justification, premise codes) pairs that could admit gamma.

    Premise tuples are P-independent, so they are enumerated once; saturation
    only re-tests membership of the recorded codes.
    """
    out = []
    code_of = universe.code_of
    pool = universe.pool
    pool_num_vars = frozenset().union(*[all_num_indices(f) for f in pool]) if pool else frozenset()
    pool_set_vars = frozenset().union(*[all_set_indices(f) for f in pool]) if pool else frozenset()

    def forms(principal, added):
        dropped = gamma.without(principal).with_formulas(*added)
        kept = gamma.with_formulas(*added)
        return (dropped, kept) if dropped != kept else (dropped,)

    def push_rule(tag, premise_seqs, witness=None):
        codes = tuple(code_of(p) for p in premise_seqs)
        if any(c is None for c in codes):
            return
        inst = RuleInstance(tag, tuple(premise_seqs), gamma, witness)
        if check_rule(inst, rho, None, oracles):
            out.append((FinRule(tag, codes), codes))

    # zero-premise rules
    for f in gamma:
        if is_atomic(f) and negate(f) in gamma:
            out.append((FinRule(RuleTag.LEM, ()), ()))
            break
    if oracles is not None:
        inst = RuleInstance(RuleTag.ORACLE_IN, (), gamma, None)
        if check_rule(inst, rho, None, oracles):
            out.append((FinRule(RuleTag.ORACLE_IN, ()), ()))
        inst = RuleInstance(RuleTag.ORACLE_NOTIN, (), gamma, None)
        if check_rule(inst, rho, None, oracles):
            out.append((FinRule(RuleTag.ORACLE_NOTIN, ()), ()))

    for f in gamma:
        if isinstance(f, And):
            for p1 in forms(f, [f.left]):
                for p2 in forms(f, [f.right]):
                    push_rule(RuleTag.AND, [p1, p2])
        elif isinstance(f, Or):
            for p in forms(f, [f.left, f.right]):
                push_rule(RuleTag.OR, [p])
        elif isinstance(f, ForallNum):
            if f.var not in free_num_vars(f.body):
                # instance body never changes; a single fresh eigenvariable suffices
                v = fresh_index(gamma.free_num_vars())
                if code_of_formula_in(universe, f.body):
                    for p in forms(f, [f.body]):
                        push_rule(RuleTag.ALL0, [p], witness=v)
            else:
                cands = pool_num_vars | {fresh_index(pool_num_vars | all_num_indices_seq(gamma))}
                for v in sorted(cands):
                    if v in gamma.free_num_vars():
                        continue
                    try:
                        inst_body = subst_num_var(f.body, f.var, Var(v))
                    except Exception:
                        continue
                    if code_of_formula_in(universe, inst_body):
                        for p in forms(f, [inst_body]):
                            push_rule(RuleTag.ALL0, [p], witness=v)
        elif isinstance(f, ExistsNum):
            holes = _hole_paths(f.body, f.var, True)
            if not holes:
                for p in forms(f, [f.body]):
                    push_rule(RuleTag.EX0, [p], witness=numeral(0))
            else:
                for chi in pool:
                    t = _follow(chi, holes[0])
                    if not isinstance(t, _TERM_TYPES):
                        continue
                    try:
                        inst_body = subst_num_var(f.body, f.var, t)
                    except Exception:
                        continue
                    if inst_body != chi:
                        continue
                    for p in forms(f, [inst_body]):
                        push_rule(RuleTag.EX0, [p], witness=t)
        elif isinstance(f, ForallSet):
            if f.var not in free_set_vars(f.body):
                v = fresh_index(gamma.free_set_vars())
                if code_of_formula_in(universe, f.body):
                    for p in forms(f, [f.body]):
                        push_rule(RuleTag.ALL1, [p], witness=v)
            else:
                cands = pool_set_vars | {fresh_index(pool_set_vars | all_set_indices_seq(gamma))}
                for v in sorted(cands):
                    if v in gamma.free_set_vars():
                        continue
                    try:
                        inst_body = subst_set_var(f.body, f.var, Var2(v))
                    except Exception:
                        continue
                    if code_of_formula_in(universe, inst_body):
                        for p in forms(f, [inst_body]):
                            push_rule(RuleTag.ALL1, [p], witness=v)
        elif isinstance(f, ExistsSet):
            holes = _hole_paths(f.body, f.var, False)
            if not holes:
                for p in forms(f, [f.body]):
                    push_rule(RuleTag.EX1, [p], witness=Var2(0))
            else:
                refs = []
                for chi in pool:
                    r = _follow(chi, holes[0])
                    if isinstance(r, _SETREF_TYPES) and r not in refs:
                        refs.append(r)
                for r in refs:
                    try:
                        inst_body = subst_set_var(f.body, f.var, r)
                    except Exception:
                        continue
                    if not code_of_formula_in(universe, inst_body):
                        continue
                    for p in forms(f, [inst_body]):
                        push_rule(RuleTag.EX1, [p], witness=r)

    # cut over pool formulas of admissible rank
    for phi in pool:
        if not (rank(phi) < rho):
            continue
        p1 = gamma.with_formulas(phi)
        p2 = gamma.with_formulas(negate(phi))
        push_rule(RuleTag.CUT, [p1, p2], witness=phi)

    # equality replacement: rewrite r -> r2 inside an atom of gamma
    equations = [e for e in pool if isinstance(e, AtomEq) and e.positive]
    for target in gamma:
        if not is_atomic(target):
            continue
        for eq in equations:
            r, r2 = eq.lhs, eq.rhs
            if r == r2:
                continue
            spots = list(term_positions(target, r2))
            if not spots or len(spots) > 6:
                continue
            for m in range(1, 2 ** len(spots)):
                chosen = tuple(s for b, s in enumerate(spots) if m >> b & 1)
                source = replace_at_all(target, chosen, r)
                if not code_of_formula_in(universe, source):
                    continue
                wit = EqWitness(source, r, r2, chosen)
                for p1 in forms(target, [source]):
                    for p2 in forms(target, [eq]):
                        push_rule(RuleTag.EQ, [p1, p2], witness=wit)

    # truncated omega rule, both premise set-forms
    for f in gamma:
        if not isinstance(f, ForallNum):
            continue
        fcode = encode_formula(f)
        for delta in (gamma.without(f), gamma):
            prem_codes, skipped = [], []
            for n in range(universe.omega_cutoff + 1):
                try:
                    inst = subst_num_var(f.body, f.var, numeral(n))
                except Exception:
                    inst = None
                p = delta.with_formulas(inst) if inst is not None else None
                c = code_of(p) if p is not None else None
                if c is None:
                    skipped.append(n)
                else:
                    prem_codes.append(c)
            if prem_codes:
                out.append((OmegaJust(fcode, tuple(prem_codes), universe.omega_cutoff,
                                      tuple(skipped)), tuple(prem_codes)))
    return out


def all_num_indices_seq(seq: Sequent) -> frozenset:
    got = frozenset()
    for f in seq:
        got |= all_num_indices(f)
    return got


def all_set_indices_seq(seq: Sequent) -> frozenset:
    got = frozenset()
    for f in seq:
        got |= all_set_indices(f)
    return got


def code_of_formula_in(universe: SequentUniverse, phi: Formula) -> bool:
    return phi in universe._pool_set


def omega_instances(phi: ForallNum, cutoff: int) -> list:
    """Canonical numeral instances of the body, as the omega clause builds them.

    Universe pools assembled by hand should include these shapes; a literal
    `1` from the parser is One() while the substituted numeral is (0 + 1).
    """
    if not isinstance(phi, ForallNum):
        raise TypeError("a first-order universal formula is required")
    return [subst_num_var(phi.body, phi.var, numeral(n)) for n in range(cutoff + 1)]


# ---------------------------------------------------------------- engine


class SaturationEngine:
    """Precomputes P-independent rule candidates, then iterates rounds."""

    def __init__(self, universe: SequentUniverse, rho, theory: TheorySpec,
                 oracles: Optional[OracleTuple] = None):
        self.universe = universe
        self.rho = rho
        self.theory = theory
        self.oracles = oracles
        self._cands = None
        self._result: Optional[ProvClass] = None

    def _candidates(self):
        if self._cands is None:
            cands = {}
            for seq in self.universe.sequents:
                code = self.universe.code_of(seq)
                entries = []
                if base_proves(self.theory, seq, self.oracles):
                    entries.append((Base(), ()))
                entries.extend(_candidate_instances(self.universe, seq, self.rho, self.oracles))
                cands[code] = entries
            self._cands = cands
        return self._cands

    def step(self, members: frozenset) -> dict:
        """One application of the operator: code -> first satisfied candidate."""
        admitted = {}
        for code, entries in self._candidates().items():
            for just, needs in entries:
                if all(p in members for p in needs):
                    admitted[code] = just
                    break
        return admitted

    def saturate(self) -> ProvClass:
        if self._result is not None:
            return self._result
        members: frozenset = frozenset()
        provenance: dict = {}
        stages: dict = {}
        round_no = 0
        while True:
            round_no += 1
            admitted = self.step(members)
            new = set(admitted) - set(provenance)
            for c in sorted(new):
                provenance[c] = admitted[c]
                stages[c] = round_no
            grown = frozenset(admitted)
            if grown == members:
                break
            members = grown
        self._result = ProvClass(
            members, provenance, stages, self.universe,
            params={
                "rho": "omega" if self.rho == INF else self.rho,
                "omega_cutoff": self.universe.omega_cutoff,
                "theory": self.theory.name,
                "oracle_width": len(self.oracles) if self.oracles else 0,
            },
        )
        return self._result


def saturate(universe: SequentUniverse, rho, theory: TheorySpec,
             oracles: Optional[OracleTuple] = None) -> ProvClass:
    return SaturationEngine(universe, rho, theory, oracles).saturate()


def operator_I(gamma: Sequent, universe: SequentUniverse, rho, theory: TheorySpec,
               oracles: Optional[OracleTuple] = None) -> Membership:
    if gamma not in universe:
        return Membership.OUTSIDE
    return saturate(universe, rho, theory, oracles).query(gamma)


@dataclass(frozen=True)
class ContainmentReport:
    contained: bool
    missing: tuple  # codes in the smaller run absent from the larger
    left_size: int
    right_size: int


def compare_oracles(universe: SequentUniverse, rho, theory: TheorySpec,
                    a: OracleTuple, a_ext: OracleTuple) -> ContainmentReport:
    if a_ext.sets[: len(a.sets)] != a.sets:
        raise ValueError("the first tuple must be a prefix of the second")
    left = saturate(universe, rho, theory, a)
    right = saturate(universe, rho, theory, a_ext)
    missing = tuple(sorted(left.members - right.members))
    return ContainmentReport(not missing, missing, len(left.members), len(right.members))


def extract_set(universe: SequentUniverse, rho, theory: TheorySpec,
                oracles: Optional[OracleTuple], phi: Formula, n_max: int) -> list:
    free = free_num_vars(phi)
    if len(free) != 1:
        raise ValueError("exactly one free first-order variable required")
    (v,) = free
    cls = saturate(universe, rho, theory, oracles)
    bits = []
    for n in range(n_max + 1):
        inst = substitute_numerals(phi, {v: n})
        seq = Sequent.of(inst)
        if seq not in universe:
            raise OutsideUniverseError(f"instance for n={n} falls outside the universe")
        bits.append(1 if cls.query(seq) == Membership.IN else 0)
    return bits
