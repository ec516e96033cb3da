"""Proof synthesis for true bounded-arithmetic sentences.

The output trees use only atomic cuts: a bounded universal is split into its
finitely many value cases by cutting on the atoms k = v one at a time, and
each case is discharged by replacing the case value for the eigenvariable
inside every atom (an equality step whose side premise closes against the
case assumption).  The base theory therefore needs two open axiom schemata,
case analysis and the strict less-than diagram, on top of the closed atomic
truths the bounded search already accepts on sight.

Synthesized proofs check at any cut bound of 1 or more.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from .calculus import (
    INF,
    EqWitness,
    FiniteProof,
    RuleTag,
    TheorySpec,
    base_proves,
    replace_at_all,
    term_positions,
)
from .omegaproof import NodeDescriptor, OmegaTree
from .ordinals import Ordinal
from .semantics import (
    DEFAULT_CUTOFF,
    OracleTuple,
    UnboundVariable,
    UnresolvedSymbol,
    eval_formula,
    eval_term,
)
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
    One,
    Or,
    OracleRef,
    Plus,
    Sequent,
    Var,
    Var2,
    free_num_vars,
    fresh_index,
    is_atomic,
    is_closed,
    match_bounded_exists,
    match_bounded_forall,
    match_ge_atom,
    match_ngt_atom,
    negate,
    numeral,
    subst_num_var,
    substitute_numerals,
)


class SynthesisError(ValueError):
    pass


class NotTrue(SynthesisError):
    pass


class NotSupported(SynthesisError):
    pass


class CounterexampleFound(SynthesisError):
    def __init__(self, n: int, message: str = ""):
        super().__init__(message or f"instance at {n} evaluates to false")
        self.n = n


@lru_cache(maxsize=16)
def base_arith_theory(value_bound: int = 8, var_bound: int = 8,
                      search_depth: int = 4) -> TheorySpec:
    """Open axiom schemata for case analysis on bounded values.

    Closed true atoms need no axioms (the bounded search accepts them on
    sight), so only genuinely open sequents appear here:

      case analysis   n != (v+1)+w,  0 = v,  ...,  n-1 = v
      less diagram    c != d + w                       for c < d

    both over all variable indices up to var_bound.
    """
    axioms = []
    for n in range(value_bound + 1):
        for v in range(var_bound + 1):
            for w in range(var_bound + 1):
                if v == w:
                    continue
                head = AtomEq(numeral(n), Plus(Plus(Var(v), One()), Var(w)), False)
                cases = [AtomEq(numeral(k), Var(v), True) for k in range(n)]
                axioms.append(Sequent.of(head, *cases))
    for c in range(value_bound + 1):
        for d in range(c + 1, value_bound + 1):
            for w in range(var_bound + 1):
                axioms.append(Sequent.of(AtomEq(numeral(c), Plus(numeral(d), Var(w)), False)))
    return TheorySpec(tuple(axioms), search_depth,
                      f"base-arith(values<={value_bound},vars<={var_bound})")


@dataclass(frozen=True)
class _Ctx:
    oracles: Optional[OracleTuple]
    theory: TheorySpec
    cutoff: int
    value_bound: int
    var_bound: int


def _env_eval(phi: Formula, env: dict, oracles, cutoff: int):
    """Verdict of the formula under the case environment, or None when the
    formula still has unresolved symbols."""
    try:
        keys = {k: v for k, v in env.items() if k in free_num_vars(phi)}
        closed = substitute_numerals(phi, keys) if keys else phi
        return eval_formula(closed, oracles=oracles, cutoff=cutoff)
    except (UnboundVariable, UnresolvedSymbol):
        return None


def _term_value(t, env: dict) -> int:
    return eval_term(t, env)


def _fresh_var(seq: Sequent, env: dict, ctx: _Ctx) -> int:
    v = fresh_index(seq.all_num_indices() | set(env))
    if v > ctx.var_bound:
        raise NotSupported(
            f"needs eigenvariable x{v} beyond the axiom families (bound {ctx.var_bound})")
    return v


def _prove_atom(seq: Sequent, atom: Formula, env: dict, ctx: _Ctx) -> FiniteProof:
    """Close a true atom: replace case values into it until it is closed,
    then lean on the base theory or the oracle rules."""
    free = free_num_vars(atom)
    if not free:
        if isinstance(atom, AtomMem):
            if isinstance(atom.ref, OracleRef):
                tag = RuleTag.ORACLE_IN if atom.positive else RuleTag.ORACLE_NOTIN
                return FiniteProof(tag, seq)
            raise NotSupported("set-membership atoms need an oracle symbol")
        return FiniteProof(RuleTag.AXIOM_T, seq)
    v = min(free)
    if v not in env:
        raise NotSupported(f"variable x{v} is free without a case assumption")
    k = env[v]
    positions = tuple(term_positions(atom, Var(v)))
    source = replace_at_all(atom, positions, numeral(k))
    prem1 = seq.with_formulas(source)
    equation = AtomEq(numeral(k), Var(v), True)
    prem2 = seq.with_formulas(equation)
    if negate(equation) not in seq:
        raise NotSupported(f"case assumption for x{v} = {k} is not in context")
    child1 = _prove_atom(prem1, source, env, ctx)
    child2 = FiniteProof(RuleTag.LEM, prem2)
    wit = EqWitness(source, numeral(k), Var(v), positions)
    return FiniteProof(RuleTag.EQ, seq, wit, (child1, child2))


def _eq_chain(seq: Sequent, atom: Formula, steps: list, env: dict, ctx: _Ctx,
              inner) -> FiniteProof:
    """Rewrite closed value numerals back into the atom one term at a time.

    steps: (positions, numeral_term, actual_term) with the actual term at
    the positions in `atom`; inner(final_seq, final_atom) closes the branch
    where every step has been undone.
    """
    steps = [(p, n, a) for p, n, a in steps if n != a]
    if not steps:
        return inner(seq, atom)
    positions, num, actual = steps[0]
    source = replace_at_all(atom, positions, num)
    prem1 = seq.with_formulas(source)
    equation = AtomEq(num, actual, True)
    prem2 = seq.with_formulas(equation)
    child1 = _eq_chain(prem1, source, steps[1:], env, ctx, inner)
    child2 = _prove_atom(prem2, equation, env, ctx)
    wit = EqWitness(source, num, actual, positions)
    return FiniteProof(RuleTag.EQ, seq, wit, (child1, child2))


def _prove(seq: Sequent, env: dict, ctx: _Ctx) -> FiniteProof:
    for f in seq:
        if is_atomic(f) and negate(f) in seq:
            return FiniteProof(RuleTag.LEM, seq)
    if base_proves(ctx.theory, seq, ctx.oracles, depth=0):
        return FiniteProof(RuleTag.AXIOM_T, seq)

    focus = None
    for f in seq:
        verdict = _env_eval(f, env, ctx.oracles, ctx.cutoff)
        if verdict is not None and verdict.is_true:
            focus = f
            break
    if focus is None:
        raise NotTrue("no member of the goal evaluates to true")
    return _dispatch(seq, focus, env, ctx)


def _dispatch(seq: Sequent, focus: Formula, env: dict, ctx: _Ctx) -> FiniteProof:
    if is_atomic(focus):
        return _prove_atom(seq, focus, env, ctx)

    ge = match_ge_atom(focus)
    if ge is not None:
        a, b = ge
        diff = _term_value(a, env) - _term_value(b, env)
        inst = subst_num_var(focus.body, focus.var, numeral(diff))
        prem = seq.without(focus).with_formulas(inst)
        child = _prove_atom(prem, inst, env, ctx)
        return FiniteProof(RuleTag.EX0, seq, numeral(diff), (child,))

    ngt = match_ngt_atom(focus)
    if ngt is not None:
        return _prove_ngt(seq, focus, env, ctx)

    bf = match_bounded_forall(focus)
    if bf is not None:
        return _prove_bounded_forall(seq, focus, env, ctx)

    if isinstance(focus, ExistsNum):
        # bounded-existential sugar needs no special case: the witness
        # instance is a conjunction the later rounds take apart
        be = match_bounded_exists(focus)
        bound = _term_value(be[1], env) if be is not None else ctx.cutoff + 1
        for n in range(bound):
            inst = subst_num_var(focus.body, focus.var, numeral(n))
            verdict = _env_eval(inst, env, ctx.oracles, ctx.cutoff)
            if verdict is not None and verdict.is_true:
                prem = seq.without(focus).with_formulas(inst)
                child = _prove(prem, env, ctx)
                return FiniteProof(RuleTag.EX0, seq, numeral(n), (child,))
        raise NotTrue("no witness below the cutoff")

    if isinstance(focus, And):
        p1 = seq.without(focus).with_formulas(focus.left)
        p2 = seq.without(focus).with_formulas(focus.right)
        return FiniteProof(RuleTag.AND, seq, None,
                           (_prove(p1, env, ctx), _prove(p2, env, ctx)))
    if isinstance(focus, Or):
        prem = seq.without(focus).with_formulas(focus.left, focus.right)
        return FiniteProof(RuleTag.OR, seq, None, (_prove(prem, env, ctx),))

    if isinstance(focus, ForallNum):
        raise NotSupported("an unbounded universal has no finite synthesis")
    raise NotSupported(f"no synthesis for {type(focus).__name__}")


def _prove_ngt(seq: Sequent, focus: Formula, env: dict, ctx: _Ctx) -> FiniteProof:
    """forall z (a != b + z), true because value(a) < value(b)."""
    a, b = match_ngt_atom(focus)
    c, d = _term_value(a, env), _term_value(b, env)
    if not c < d:
        raise NotTrue("comparison atom is not actually true")
    if d > ctx.value_bound:
        raise NotSupported(f"value {d} exceeds the less-diagram axioms ({ctx.value_bound})")
    w = _fresh_var(seq, env, ctx)
    inst = subst_num_var(focus.body, focus.var, Var(w))  # a != b + w
    s1 = seq.without(focus).with_formulas(inst)

    def leaf(final_seq, final_atom):
        return FiniteProof(RuleTag.AXIOM_T, final_seq)

    steps = [(((0,),), numeral(c), a), (((1, 0),), numeral(d), b)]
    child = _eq_chain(s1, inst, steps, env, ctx, leaf)
    return FiniteProof(RuleTag.ALL0, seq, w, (child,))


def _prove_bounded_forall(seq: Sequent, focus: Formula, env: dict, ctx: _Ctx) -> FiniteProof:
    x, t, _body = match_bounded_forall(focus)
    n_bound = _term_value(t, env)
    if n_bound > ctx.value_bound:
        raise NotSupported(f"bound {n_bound} exceeds the case-analysis axioms ({ctx.value_bound})")

    v = _fresh_var(seq, env, ctx)
    inst = subst_num_var(focus.body, focus.var, Var(v))  # guard(v) | body(v)
    s1 = seq.without(focus).with_formulas(inst)
    guard_v, body_v = inst.left, inst.right
    s2 = s1.without(inst).with_formulas(guard_v, body_v)
    w = _fresh_var(s2, env, ctx)
    atom_g = subst_num_var(guard_v.body, guard_v.var, Var(w))  # t != (v+1)+w
    s3 = s2.without(guard_v).with_formulas(atom_g)

    def after_bridge(s4: Sequent, atom_n: Formula) -> FiniteProof:
        # atom_n is  numeral(n_bound) != (v+1)+w ; cut the cases one by one
        def chain(s_cur: Sequent, k: int) -> FiniteProof:
            if k == n_bound:
                return FiniteProof(RuleTag.AXIOM_T, s_cur)
            case = AtomEq(numeral(k), Var(v), True)
            prem_more = s_cur.with_formulas(case)
            prem_here = s_cur.with_formulas(negate(case))
            here = _prove(prem_here, {**env, v: k}, ctx)
            more = chain(prem_more, k + 1)
            return FiniteProof(RuleTag.CUT, s_cur, case, (more, here))

        return chain(s4, 0)

    bridged = _eq_chain(s3, atom_g, [(((0,),), numeral(n_bound), t)], env, ctx, after_bridge)
    or_node = FiniteProof(RuleTag.OR, s1, None,
                          (FiniteProof(RuleTag.ALL0, s2, w, (bridged,)),))
    # the OR premise opens inst; the inner ALL0 instantiates the guard
    return FiniteProof(RuleTag.ALL0, seq, v, (or_node,))


def synth_delta00(gamma, oracles: Optional[OracleTuple] = None,
                  theory: Optional[TheorySpec] = None, cutoff: int = DEFAULT_CUTOFF,
                  value_bound: int = 8, var_bound: int = 8) -> FiniteProof:
    """A checkable finite proof of a true bounded sentence (sequent or
    formula), using only atomic cuts."""
    if isinstance(gamma, Sequent):
        seq = gamma
    else:
        seq = Sequent.of(gamma)
    if not seq.formulas:
        raise NotTrue("the empty sequent is not provable")
    if seq.free_num_vars() or seq.free_set_vars():
        raise NotSupported("synthesis needs a closed goal")
    if theory is None:
        theory = base_arith_theory(value_bound, var_bound)
    ctx = _Ctx(oracles, theory, cutoff, value_bound, var_bound)
    return _prove(seq, {}, ctx)


def synth_pi01(phi: Formula, oracles: Optional[OracleTuple] = None,
               theory: Optional[TheorySpec] = None, spot_checks=range(5),
               cutoff: int = DEFAULT_CUTOFF, value_bound: int = 8,
               var_bound: int = 8) -> OmegaTree:
    """An omega-rule tree for a universal sentence, with each numeral
    instance discharged by an embedded finite synthesis.

    Spot-checked instances that evaluate to false raise CounterexampleFound
    up front; an instance that later resists synthesis becomes an honest
    stub node the checker will reject.
    """
    if not isinstance(phi, ForallNum):
        raise NotSupported("an outer first-order universal is required")
    if not is_closed(phi):
        raise NotSupported("synthesis needs a closed goal")
    if theory is None:
        theory = base_arith_theory(value_bound, var_bound)
    for n in spot_checks:
        inst = subst_num_var(phi.body, phi.var, numeral(n))
        verdict = eval_formula(inst, oracles=oracles, cutoff=cutoff)
        if verdict.is_false:
            raise CounterexampleFound(n)

    root_label = Sequent.of(phi)
    proofs = {}

    def finite(n: int) -> FiniteProof:
        if n not in proofs:
            inst = subst_num_var(phi.body, phi.var, numeral(n))
            goal = Sequent.of(inst)
            try:
                proofs[n] = synth_delta00(goal, oracles, theory, cutoff,
                                          value_bound, var_bound)
            except SynthesisError:
                proofs[n] = FiniteProof(RuleTag.AXIOM_T, goal)
        return proofs[n]

    def gen(pos):
        if pos == ():
            return NodeDescriptor(root_label, RuleTag.OMEGA, INF, Ordinal.omega(), phi)
        node = finite(pos[0])
        for i in pos[1:]:
            if i >= len(node.children):
                return None
            node = node.children[i]
        return NodeDescriptor(node.conclusion, node.tag, len(node.children),
                              Ordinal.from_int(node.height()), node.witness)

    return OmegaTree.from_generator(gen)
