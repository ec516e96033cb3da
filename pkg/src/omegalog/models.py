"""Coded omega-models: a finite family of eventually periodic sets standing
in for the second-order domain, with truth values carrying an exactness flag.

First-order quantifiers without a recognized bounded pattern are explored up
to the model's numeral cutoff and marked Truncated unless a decisive exact
instance appears.  Second-order quantifiers range over the family itself, so
they stay exact whenever every branch does; beta checks rerun them over an
external test pool and look for exact-vs-exact disagreement.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

from .calculus import INF, TheorySpec
from .coding import encode_formula
from .fixpoint import Membership, ProvClass
from .semantics import OracleTuple, UPSet, UnresolvedSymbol, eval_formula, eval_term
from .syntax import (
    And,
    AtomEq,
    AtomMem,
    ExistsNum,
    ExistsSet,
    ForallNum,
    ForallSet,
    Formula,
    ModelConst,
    Or,
    OracleRef,
    Sequent,
    Var2,
    match_bounded_exists,
    match_bounded_forall,
    match_ge_atom,
    match_ngt_atom,
    negate,
    numeral,
    or_fold,
    rank,
    subst_num_var,
)

EXACT = "Exact"
TRUNCATED = "Truncated"


class NotAModelOfT(ValueError):
    def __init__(self, axiom: Sequent, message: str = ""):
        super().__init__(message or "an axiom evaluates to an exact falsehood")
        self.axiom = axiom


def to_model_consts(phi: Formula) -> Formula:
    """Reinterpret oracle symbols as the model's own distinguished sets."""
    if isinstance(phi, AtomMem) and isinstance(phi.ref, OracleRef):
        return AtomMem(phi.term, ModelConst(phi.ref.index), phi.positive)
    if isinstance(phi, (And, Or)):
        return type(phi)(to_model_consts(phi.left), to_model_consts(phi.right))
    if isinstance(phi, (ForallNum, ExistsNum, ForallSet, ExistsSet)):
        return type(phi)(phi.var, to_model_consts(phi.body))
    return phi


def _all(pairs):
    """Conjunctive combine over (value, exact) pairs."""
    pairs = list(pairs)
    if any(e and not v for v, e in pairs):
        return False, True
    return all(v for v, _ in pairs), all(e for _, e in pairs)


def _any(pairs):
    pairs = list(pairs)
    if any(e and v for v, e in pairs):
        return True, True
    return any(v for v, _ in pairs), all(e for _, e in pairs)


def _value(phi: Formula, family: tuple, so_pool: tuple, cutoff: int,
           senv: Optional[dict] = None) -> Tuple[bool, bool]:
    """Truth of a sentence in the coded model, with an exactness bit."""
    senv = senv or {}

    if isinstance(phi, AtomEq):
        same = eval_term(phi.lhs) == eval_term(phi.rhs)
        return (same if phi.positive else not same), True
    if isinstance(phi, AtomMem):
        ref = phi.ref
        if isinstance(ref, ModelConst):
            if not (0 <= ref.index < len(family)):
                raise UnresolvedSymbol(f"no family member with index {ref.index}")
            s = family[ref.index]
        elif isinstance(ref, Var2):
            if ref.index not in senv:
                raise UnresolvedSymbol(f"set variable X{ref.index} is not bound here")
            s = senv[ref.index]
        else:
            raise UnresolvedSymbol("oracle symbols must be translated to model constants")
        hit = s.member(eval_term(phi.term))
        return (hit if phi.positive else not hit), True

    if isinstance(phi, And):
        return _all([_value(phi.left, family, so_pool, cutoff, senv),
                     _value(phi.right, family, so_pool, cutoff, senv)])
    if isinstance(phi, Or):
        return _any([_value(phi.left, family, so_pool, cutoff, senv),
                     _value(phi.right, family, so_pool, cutoff, senv)])

    ge = match_ge_atom(phi)
    if ge is not None:
        return eval_term(ge[0]) >= eval_term(ge[1]), True
    ngt = match_ngt_atom(phi)
    if ngt is not None:
        return eval_term(ngt[0]) < eval_term(ngt[1]), True

    bf = match_bounded_forall(phi)
    if bf is not None:
        x, t, body = bf
        return _all(_value(subst_num_var(body, x, numeral(n)), family, so_pool, cutoff, senv)
                    for n in range(eval_term(t)))
    be = match_bounded_exists(phi)
    if be is not None:
        x, t, body = be
        return _any(_value(subst_num_var(body, x, numeral(n)), family, so_pool, cutoff, senv)
                    for n in range(eval_term(t)))

    if isinstance(phi, ForallNum):
        pairs = [_value(subst_num_var(phi.body, phi.var, numeral(n)),
                        family, so_pool, cutoff, senv) for n in range(cutoff + 1)]
        pairs.append((True, False))  # the unexplored tail
        return _all(pairs)
    if isinstance(phi, ExistsNum):
        pairs = [_value(subst_num_var(phi.body, phi.var, numeral(n)),
                        family, so_pool, cutoff, senv) for n in range(cutoff + 1)]
        pairs.append((False, False))
        return _any(pairs)

    if isinstance(phi, ForallSet):
        branches = [_value(phi.body, family, so_pool, cutoff, {**senv, phi.var: s})
                    for s in so_pool]
        return _all(branches) if branches else (True, True)
    if isinstance(phi, ExistsSet):
        branches = [_value(phi.body, family, so_pool, cutoff, {**senv, phi.var: s})
                    for s in so_pool]
        return _any(branches) if branches else (False, True)
    raise TypeError(f"not a formula: {phi!r}")


@dataclass(frozen=True)
class OmegaModel:
    family: tuple  # UPSet values; ModelConst(i) denotes family[i]
    rank: object  # admissible cut rank, int or INF
    cutoff: int
    code_bound: int
    sat: dict = field(default_factory=dict)  # formula code -> bool
    exactness: dict = field(default_factory=dict)  # formula code -> Exact | Truncated
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "_memo", {})

    def satisfies(self, phi: Formula) -> Tuple[bool, bool]:
        """(value, exact) with second-order quantifiers ranging over the family."""
        hit = self._memo.get(phi)
        if hit is None:
            hit = _value(phi, self.family, self.family, self.cutoff)
            self._memo[phi] = hit
        return hit

    def record(self, phi: Formula) -> None:
        v, e = self.satisfies(phi)
        code = encode_formula(phi)
        self.sat[code] = v
        self.exactness[code] = EXACT if e else TRUNCATED

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "family": [s.to_json() for s in self.family],
            "rank": "omega" if self.rank == INF else self.rank,
            "cutoff": self.cutoff,
            "code_bound": self.code_bound,
            "sat": {str(c): v for c, v in sorted(self.sat.items())},
            "exactness": {str(c): e for c, e in sorted(self.exactness.items())},
        }

    @staticmethod
    def from_json(data: dict) -> "OmegaModel":
        rank_ = data["rank"]
        return OmegaModel(
            family=tuple(UPSet.from_json(s) for s in data["family"]),
            rank=INF if rank_ == "omega" else rank_,
            cutoff=data["cutoff"],
            code_bound=data["code_bound"],
            sat={int(k): v for k, v in data.get("sat", {}).items()},
            exactness={int(k): v for k, v in data.get("exactness", {}).items()},
            name=data.get("name", ""),
        )


def build_model(family, rank_, cutoff: int, theory: TheorySpec,
                sentences=(), code_bound: int = 0, name: str = "") -> OmegaModel:
    """Check the axioms in the candidate model, then tabulate the sentences.

    An axiom whose oracle-translated disjunction is exactly false refutes the
    candidate; truncated axiom values are tolerated and left to later checks.
    """
    family = tuple(family)
    model = OmegaModel(family, rank_, cutoff, code_bound, {}, {}, name)
    for axiom in theory.axioms:
        if len(axiom) == 0:
            raise NotAModelOfT(axiom, "the empty sequent cannot hold anywhere")
        phi = to_model_consts(or_fold(axiom))
        v, e = model.satisfies(phi)
        if e and not v:
            raise NotAModelOfT(axiom)
    for phi in sentences:
        model.record(to_model_consts(phi))
    return model


@dataclass(frozen=True)
class ModelPool:
    models: tuple

    def __len__(self):
        return len(self.models)

    def __iter__(self):
        return iter(self.models)

    def to_json(self) -> dict:
        return {"models": [m.to_json() for m in self.models]}

    @staticmethod
    def from_json(data: dict) -> "ModelPool":
        return ModelPool(tuple(OmegaModel.from_json(m) for m in data["models"]))


@dataclass(frozen=True)
class MOutcome:
    kind: str  # Holds | FailsAt | Undetermined
    index: Optional[int] = None

    def __str__(self):
        return f"FailsAt({self.index})" if self.kind == "FailsAt" else self.kind


def operator_M(phi: Formula, pool: ModelPool, rho) -> MOutcome:
    """Truth across every pool model of sufficient rank.

    An empty filtered pool yields Undetermined: no model has vetoed the
    sentence, but nothing vouches for it either.
    """
    psi = to_model_consts(phi)
    eligible = [(i, m) for i, m in enumerate(pool) if m.rank >= rho]
    if not eligible:
        return MOutcome("Undetermined")
    truncated = False
    for i, m in eligible:
        v, e = m.satisfies(psi)
        if e and not v:
            return MOutcome("FailsAt", i)
        if not e:
            truncated = True
    return MOutcome("Undetermined") if truncated else MOutcome("Holds")


# ------------------------------------------------------------ diagnostics


@dataclass(frozen=True)
class BetaReport:
    is_beta: bool
    disagreements: tuple  # (sentence index, family value, test value)
    truncated: tuple  # sentence indices that stayed inexact on either side
    checked: int


def check_beta(model: OmegaModel, testpool, sentences) -> BetaReport:
    """Compare family-ranged and testpool-ranged second-order quantifiers."""
    testpool = tuple(testpool)
    disagreements, truncated = [], []
    sentences = [to_model_consts(s) for s in sentences]
    for i, phi in enumerate(sentences):
        fv, fe = model.satisfies(phi)
        tv, te = _value(phi, model.family, testpool, model.cutoff)
        if fe and te:
            if fv != tv:
                disagreements.append((i, fv, tv))
        else:
            truncated.append(i)
    return BetaReport(not disagreements, tuple(disagreements), tuple(truncated), len(sentences))


@dataclass(frozen=True)
class AbsolutenessReport:
    model_value: bool
    model_exact: bool
    ground_value: bool
    ground_exact: bool
    witness_index: Optional[int]  # family index realizing the outer existential
    absolute: bool


def check_sigma12_absoluteness(phi: Formula, model: OmegaModel, testpool) -> AbsolutenessReport:
    """For an outer second-order existential: find the family witness and
    confirm the testpool reading agrees."""
    psi = to_model_consts(phi)
    if not isinstance(psi, ExistsSet):
        raise TypeError("an outer second-order existential is required")
    mv, me = model.satisfies(psi)
    witness = None
    if mv:
        for i, s in enumerate(model.family):
            v, e = _value(psi.body, model.family, model.family, model.cutoff, {psi.var: s})
            if v and e:
                witness = i
                break
    tv, te = _value(psi, model.family, tuple(testpool), model.cutoff)
    absolute = not (me and te and mv != tv)
    return AbsolutenessReport(mv, me, tv, te, witness, absolute)


@dataclass(frozen=True)
class SoundnessReport:
    violations: tuple  # sequent codes whose disjunction is exactly false
    unverified: tuple  # codes left truncated
    quarantined: tuple  # codes depending on a truncated omega step
    verified: int
    skipped: int


def check_soundness_SPC(cls: ProvClass, model: OmegaModel, rank_bound) -> SoundnessReport:
    """Exact-false detection for rank-bounded singleton members.

    Members justified through a truncated omega step are quarantined rather
    than charged against the model.
    """
    tainted = cls.omega_tainted()
    violations, unverified, quarantined = [], [], []
    verified = skipped = 0
    for code in sorted(cls.members):
        seq = cls.universe.sequent_of(code)
        if len(seq) != 1 or not (rank(seq.formulas[0]) < rank_bound):
            skipped += 1
            continue
        if code in tainted:
            quarantined.append(code)
            continue
        phi = to_model_consts(seq.formulas[0])
        v, e = model.satisfies(phi)
        if e and not v:
            violations.append(code)
        elif not e:
            unverified.append(code)
        else:
            verified += 1
    return SoundnessReport(tuple(violations), tuple(unverified), tuple(quarantined),
                           verified, skipped)


@dataclass(frozen=True)
class ReflectionReport:
    rfn_violations: tuple  # formulas In whose evaluation is False
    rfn_unverifiable: tuple  # formulas In whose evaluation stayed unknown
    cons_violations: tuple  # formulas with both polarities In
    bottom_in: bool
    bottom_chain: tuple  # provenance codes when bottom is In
    checked: int


def check_reflection_instances(cls: ProvClass, formulas,
                               oracles: Optional[OracleTuple] = None,
                               cutoff: int = 64) -> ReflectionReport:
    """Reflection and consistency diagnostics against direct evaluation."""
    formulas = list(formulas)
    rfn_bad, rfn_unknown, cons_bad = [], [], []
    for phi in formulas:
        if cls.query(Sequent.of(phi)) != Membership.IN:
            continue
        verdict = eval_formula(phi, oracles=oracles, cutoff=cutoff)
        if verdict.is_false:
            rfn_bad.append(phi)
        elif verdict.is_unknown:
            rfn_unknown.append(phi)
        if cls.query(Sequent.of(negate(phi))) == Membership.IN:
            cons_bad.append(phi)
    bottom = Sequent.of()
    bottom_in = cls.query(bottom) == Membership.IN
    chain = ()
    if bottom_in:
        chain = tuple(cls.provenance_chain(cls.universe.code_of(bottom)))
    return ReflectionReport(tuple(rfn_bad), tuple(rfn_unknown), tuple(cons_bad),
                            bottom_in, chain, len(formulas))
