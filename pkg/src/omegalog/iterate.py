"""Iterated provability classes along an explicitly coded well-order.

Each stage holds the formulas provable from the base theory given one
truncated omega inference whose instance codes all landed in earlier stages.
Working over finite coded orders keeps the well-foundedness check exhaustive
rather than axiomatic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, Optional

from .calculus import TheorySpec, base_proves
from .coding import encode_formula
from .fixpoint import Membership, UniverseTooLarge
from .semantics import OracleTuple
from .syntax import ForallNum, Formula, Sequent, negate, numeral, subst_num_var


class NotAWellOrder(ValueError):
    pass


@dataclass(frozen=True)
class CodedWellOrder:
    domain: tuple  # point codes
    rel: frozenset  # pairs (a, b) with a strictly before b

    def lt(self, a: int, b: int) -> bool:
        return (a, b) in self.rel

    def __len__(self):
        return len(self.domain)

    def sorted_points(self) -> list:
        return sorted(self.domain, key=lambda p: sum(1 for q in self.domain if self.lt(q, p)))

    @staticmethod
    def natural(n: int) -> "CodedWellOrder":
        """The standard order on 0 .. n-1."""
        return CodedWellOrder(tuple(range(n)),
                              frozenset((a, b) for a in range(n) for b in range(n) if a < b))

    def to_json(self) -> dict:
        return {"domain": list(self.domain), "pairs": sorted([a, b] for a, b in self.rel)}

    @staticmethod
    def from_json(data: dict) -> "CodedWellOrder":
        return CodedWellOrder(tuple(data["domain"]),
                              frozenset((a, b) for a, b in data["pairs"]))


def check_wellorder(order: CodedWellOrder) -> None:
    """Exhaustively verify a strict total order on the finite domain."""
    dom = set(order.domain)
    if len(dom) != len(order.domain):
        raise NotAWellOrder("domain has repeated points")
    for a, b in order.rel:
        if a not in dom or b not in dom:
            raise NotAWellOrder(f"pair ({a}, {b}) leaves the domain")
    for a in dom:
        if order.lt(a, a):
            raise NotAWellOrder(f"point {a} precedes itself")
    for a, b in itertools.permutations(dom, 2):
        if order.lt(a, b) == order.lt(b, a):
            raise NotAWellOrder(f"points {a} and {b} are not comparable exactly one way")
    for a, b, c in itertools.permutations(dom, 3):
        if order.lt(a, b) and order.lt(b, c) and not order.lt(a, c):
            raise NotAWellOrder(f"transitivity fails through {a} < {b} < {c}")


@dataclass(frozen=True)
class IPCStages:
    order: CodedWellOrder
    stages: dict  # point -> frozenset of formula codes
    pool: tuple  # formulas admitted into the classes
    params: dict = field(default_factory=dict)

    def below(self, point: int) -> frozenset:
        got = frozenset()
        for q in self.order.domain:
            if self.order.lt(q, point):
                got |= self.stages[q]
        return got

    def union(self) -> frozenset:
        out = frozenset()
        for s in self.stages.values():
            out |= s
        return out

    def stage_of(self, phi: Formula) -> Optional[int]:
        """First point (in order position) whose class contains the formula."""
        code = encode_formula(phi)
        for p in self.order.sorted_points():
            if code in self.stages[p]:
                return p
        return None

    def to_json(self) -> dict:
        return {
            "order": self.order.to_json(),
            "params": self.params,
            "stages": {str(p): sorted(self.stages[p]) for p in self.order.domain},
        }


def run_iteration(order: CodedWellOrder, pool, theory: TheorySpec,
                  oracles: Optional[OracleTuple] = None, omega_cutoff: int = 2,
                  budget: int = 200_000) -> IPCStages:
    """Climb the order, closing each stage under base proof plus one
    truncated omega inference grounded strictly below."""
    check_wellorder(order)
    pool = tuple(dict.fromkeys(pool))
    if len(order) * len(pool) * len(pool) > budget:
        raise UniverseTooLarge("stage count times squared pool size exceeds the budget")

    codes = {phi: encode_formula(phi) for phi in pool}
    base_thms = frozenset(
        codes[phi] for phi in pool if base_proves(theory, Sequent.of(phi), oracles))

    universals = []
    for psi in pool:
        if isinstance(psi, ForallNum):
            inst_codes = []
            ok = True
            for n in range(omega_cutoff + 1):
                try:
                    inst = subst_num_var(psi.body, psi.var, numeral(n))
                except Exception:
                    ok = False
                    break
                inst_codes.append(encode_formula(inst))
            if ok:
                universals.append((psi, frozenset(inst_codes)))

    stages: Dict[int, frozenset] = {}
    discharge: Dict[tuple, bool] = {}
    for point in order.sorted_points():
        lower = frozenset()
        for q, s in stages.items():
            if order.lt(q, point):
                lower |= s
        members = set(base_thms)
        for psi, inst_codes in universals:
            if not inst_codes <= lower:
                continue
            npsi = negate(psi)
            for phi in pool:
                if codes[phi] in members:
                    continue
                key = (codes[psi], codes[phi])
                hit = discharge.get(key)
                if hit is None:
                    hit = base_proves(theory, Sequent.of(npsi, phi), oracles)
                    discharge[key] = hit
                if hit:
                    members.add(codes[phi])
        stages[point] = frozenset(members)

    return IPCStages(order, stages, pool, params={
        "omega_cutoff": omega_cutoff,
        "theory": theory.name,
        "oracle_width": len(oracles) if oracles else 0,
        "pool_size": len(pool),
    })


def operator_R(phi: Formula, order: CodedWellOrder, pool, theory: TheorySpec,
               oracles: Optional[OracleTuple] = None, omega_cutoff: int = 2) -> Membership:
    pool = tuple(dict.fromkeys(pool))
    if phi not in pool:
        return Membership.OUTSIDE
    stages = run_iteration(order, pool, theory, oracles, omega_cutoff)
    return Membership.IN if encode_formula(phi) in stages.union() else Membership.OUT
