"""Labeled omega-trees, preproof checking, and the descendant-first order.

A tree node carries a sequent label, a rule tag, an arity (a natural or
float('inf') for omega nodes), and an ordinal below epsilon_0.  Trees are
backed by an explicit finite table or by a generator function; generators
must be total on downward-closed queries, and partiality raises
GeneratorPartial rather than passing as a leaf.

Checking explores every position up to a depth bound (omega nodes through a
finite child window) plus seeded random deeper paths, verifying rule
instances, ordinal decrease along edges, and the omega-rule's premise shape.
Acceptance certifies nothing beyond the explored region; the policy is
echoed in every report.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import cmp_to_key
from typing import Callable, Dict, Optional, Tuple

from . import parser
from .calculus import (
    INF,
    RULE_ARITY,
    FiniteProof,
    RuleInstance,
    RuleTag,
    TheorySpec,
    _witness_from_json,
    _witness_to_json,
    rule_violation,
)
from .ordinals import Ordinal
from .semantics import OracleTuple
from .syntax import ForallNum, Formula, Sequent, numeral, subst_num_var

Position = Tuple[int, ...]


class GeneratorPartial(RuntimeError):
    """The backing generator failed on a downward-closed query."""

    def __init__(self, pos: Position, why: str):
        super().__init__(f"at position {list(pos)}: {why}")
        self.pos = pos


@dataclass(frozen=True)
class NodeDescriptor:
    label: Sequent
    rule: RuleTag
    arity: object  # int or INF
    ordinal: Ordinal
    witness: object = None


class OmegaTree:
    """Either an explicit finite table of positions or a generator."""

    def __init__(self, table: Optional[Dict[Position, NodeDescriptor]] = None,
                 generator: Optional[Callable[[Position], Optional[NodeDescriptor]]] = None):
        if (table is None) == (generator is None):
            raise ValueError("exactly one backing required")
        self._table = dict(table) if table is not None else None
        self._gen = generator
        self._cache: Dict[Position, Optional[NodeDescriptor]] = {}
        if self._table is not None:
            for pos in self._table:
                if pos and pos[:-1] not in self._table:
                    raise ValueError(f"position {list(pos)} has no parent in the table")

    @staticmethod
    def from_table(table: Dict[Position, NodeDescriptor]) -> "OmegaTree":
        return OmegaTree(table=dict(table))

    @staticmethod
    def from_generator(fn: Callable[[Position], Optional[NodeDescriptor]]) -> "OmegaTree":
        return OmegaTree(generator=fn)

    @property
    def is_table(self) -> bool:
        return self._table is not None

    def positions(self):
        if self._table is None:
            raise ValueError("generator-backed trees have no position table")
        return sorted(self._table.keys())

    def node(self, pos: Position) -> Optional[NodeDescriptor]:
        pos = tuple(pos)
        if self._table is not None:
            return self._table.get(pos)
        if pos in self._cache:
            return self._cache[pos]
        try:
            desc = self._gen(pos)
        except Exception as e:  # noqa: BLE001 - partiality is the diagnosis
            raise GeneratorPartial(pos, f"generator raised {type(e).__name__}: {e}") from e
        self._cache[pos] = desc
        return desc


@dataclass(frozen=True)
class Violation:
    position: tuple
    kind: str
    message: str

    def __str__(self):
        return f"{self.kind} at {list(self.position)}: {self.message}"


@dataclass(frozen=True)
class CheckReport:
    ok: bool
    explored: int
    violation: Optional[Violation] = None
    policy: dict = field(default_factory=dict)

    def __str__(self):
        head = "pass" if self.ok else f"FAIL: {self.violation}"
        return f"{head} (explored {self.explored} nodes, policy {self.policy})"


def _omega_child_matches(label: Sequent, principal: ForallNum, n: int, child_label: Sequent) -> bool:
    inst = subst_num_var(principal.body, principal.var, numeral(n))
    dropped = label.without(principal).with_formulas(inst)
    kept = label.with_formulas(inst)
    return child_label in (dropped, kept)


def _check_node(
    tree: OmegaTree,
    pos: Position,
    desc: NodeDescriptor,
    children: Dict[int, NodeDescriptor],
    rho,
    theory: Optional[TheorySpec],
    oracles: Optional[OracleTuple],
) -> Optional[Violation]:
    """Validate one node against its fetched children (a finite window for
    omega nodes, everything for finitary ones)."""
    for i, child in children.items():
        if not (child.ordinal < desc.ordinal):
            return Violation(pos, "OrdinalNotDecreasing",
                             f"child {i} ordinal {child.ordinal} does not drop below {desc.ordinal}")

    if desc.rule == RuleTag.OMEGA:
        if desc.arity != INF:
            return Violation(pos, "ArityMismatch", "an omega node must have arity omega")
        candidates = []
        if isinstance(desc.witness, ForallNum):
            if desc.witness in desc.label:
                candidates = [desc.witness]
        else:
            candidates = [f for f in desc.label if isinstance(f, ForallNum)]
        if not candidates:
            return Violation(pos, "RuleMismatch", "no universal formula to apply the omega rule to")
        for principal in candidates:
            if all(_omega_child_matches(desc.label, principal, n, c.label) for n, c in children.items()):
                return None
        return Violation(pos, "RuleMismatch",
                         "explored children do not instantiate any universal of the label")

    want = RULE_ARITY[desc.rule]
    if desc.arity != want:
        return Violation(pos, "ArityMismatch",
                         f"rule {desc.rule.value} has arity {want}, descriptor says {desc.arity}")
    missing = [i for i in range(want) if i not in children]
    if missing:
        return Violation(pos, "MissingChild", f"child {missing[0]} of {want} is absent")
    inst = RuleInstance(desc.rule, tuple(children[i].label for i in range(want)), desc.label, desc.witness)
    why = rule_violation(inst, rho, theory, oracles)
    if why is not None:
        return Violation(pos, "RuleMismatch", why)
    return None


def check_preproof(
    tree: OmegaTree,
    rho=INF,
    theory: Optional[TheorySpec] = None,
    oracles: Optional[OracleTuple] = None,
    depth: int = 3,
    samples: int = 0,
    seed: int = 0,
    omega_window: int = 8,
    sample_reach: int = 64,
) -> CheckReport:
    policy = {
        "depth": depth,
        "samples": samples,
        "seed": seed,
        "omega_window": omega_window,
        "sample_reach": sample_reach,
        "rho": "omega" if rho == INF else rho,
    }
    explored = 0

    def fetch_children(pos: Position, desc: NodeDescriptor, indices) -> tuple:
        got = {}
        for i in indices:
            child = tree.node(pos + (i,))
            if child is None:
                if tree.is_table:
                    continue
                raise GeneratorPartial(pos + (i,), "promised child is absent")
            got[i] = child
        return got

    def child_indices(desc: NodeDescriptor):
        if desc.rule == RuleTag.OMEGA:
            return range(omega_window)
        return range(RULE_ARITY[desc.rule])

    def extra_child_check(pos: Position, desc: NodeDescriptor) -> Optional[Violation]:
        if desc.rule == RuleTag.OMEGA:
            return None
        want = RULE_ARITY[desc.rule]
        if tree.is_table:
            if tree.node(pos + (want,)) is not None:
                return Violation(pos, "ExtraChild", f"child {want} beyond arity {want}")
        return None

    def run(pos: Position, desc: NodeDescriptor, remaining: int) -> Optional[Violation]:
        nonlocal explored
        children = fetch_children(pos, desc, child_indices(desc))
        v = _check_node(tree, pos, desc, children, rho, theory, oracles) or extra_child_check(pos, desc)
        explored += 1
        if v is not None:
            return v
        if remaining > 0:
            for i in sorted(children):
                v = run(pos + (i,), children[i], remaining - 1)
                if v is not None:
                    return v
        return None

    root = tree.node(())
    if root is not None:
        v = run((), root, depth)
        if v is not None:
            return CheckReport(False, explored, v, policy)

        rng = random.Random(seed)
        for _ in range(samples):
            pos, desc = (), root
            for _step in range(sample_reach):
                if desc.rule == RuleTag.OMEGA:
                    i = rng.randrange(sample_reach)
                    indices = {0, i}
                else:
                    arity = RULE_ARITY[desc.rule]
                    i = rng.randrange(arity) if arity else None
                    indices = range(arity)
                children = fetch_children(pos, desc, indices)
                v = _check_node(tree, pos, desc, children, rho, theory, oracles)
                explored += 1
                if v is not None:
                    return CheckReport(False, explored, v, policy)
                if i is None or i not in children:
                    break
                pos, desc = pos + (i,), children[i]

    return CheckReport(True, explored, None, policy)


def proof_operator_P(
    gamma: Sequent,
    tree: OmegaTree,
    rho=INF,
    theory: Optional[TheorySpec] = None,
    oracles: Optional[OracleTuple] = None,
    depth: int = 3,
    samples: int = 0,
    seed: int = 0,
    omega_window: int = 8,
    sample_reach: int = 64,
) -> CheckReport:
    """Certificate check for omega-provability of gamma by this tree."""
    root = tree.node(())
    policy = {"depth": depth, "samples": samples, "seed": seed}
    if root is None:
        return CheckReport(False, 0, Violation((), "RootMismatch", "tree has no root"), policy)
    if root.label != gamma:
        return CheckReport(
            False, 0,
            Violation((), "RootMismatch",
                      f"root is labeled {parser.print_sequent(root.label)!r}, wanted {parser.print_sequent(gamma)!r}"),
            policy,
        )
    return check_preproof(tree, rho, theory, oracles, depth, samples, seed, omega_window, sample_reach)


# ----------------------------------------------------------- linearization


@dataclass(frozen=True)
class LinearizedOrder:
    elements: tuple

    def lt(self, p, q) -> bool:
        p, q = tuple(p), tuple(q)
        if p == q:
            return False
        return _kb_cmp(p, q) < 0

    def index(self, p) -> int:
        return self.elements.index(tuple(p))


def _kb_cmp(s: tuple, t: tuple) -> int:
    """Descendants strictly precede ancestors; siblings sort by index."""
    if s == t:
        return 0
    n = min(len(s), len(t))
    for i in range(n):
        if s[i] != t[i]:
            return -1 if s[i] < t[i] else 1
    # one is a proper prefix of the other: the longer (deeper) one comes first
    return -1 if len(s) > len(t) else 1


def linearize(tree: OmegaTree) -> LinearizedOrder:
    """Total order on the positions of an explicit finite tree."""
    elems = sorted(tree.positions(), key=cmp_to_key(_kb_cmp))
    return LinearizedOrder(tuple(elems))


# ------------------------------------------------- finite proof embedding


def proof_to_tree(proof: FiniteProof) -> OmegaTree:
    """Embed a finite proof as an explicit tree, ordinals = subtree heights."""
    table: Dict[Position, NodeDescriptor] = {}

    def walk(p: FiniteProof, pos: Position) -> int:
        heights = [walk(c, pos + (i,)) for i, c in enumerate(p.children)]
        h = 1 + max(heights) if heights else 0
        table[pos] = NodeDescriptor(p.conclusion, p.tag, RULE_ARITY[p.tag], Ordinal.from_int(h), p.witness)
        return h

    walk(proof, ())
    return OmegaTree.from_table(table)


# ------------------------------------------------------------- JSON shapes


def _arity_to_json(a):
    return "omega" if a == INF else a


def _arity_from_json(a):
    return INF if a == "omega" else int(a)


def tree_to_json(tree: OmegaTree) -> dict:
    nodes = []
    for pos in tree.positions():
        d = tree.node(pos)
        entry = {
            "position": list(pos),
            "label": parser.print_sequent(d.label),
            "rule": d.rule.value,
            "arity": _arity_to_json(d.arity),
            "ordinal": d.ordinal.to_json(),
        }
        wit = _witness_to_json(d.rule, d.witness)
        if wit is not None:
            entry["witness"] = wit
        nodes.append(entry)
    return {"nodes": nodes}


def tree_from_json(obj: dict) -> OmegaTree:
    table = {}
    for entry in obj["nodes"]:
        tag = RuleTag(entry["rule"])
        table[tuple(entry["position"])] = NodeDescriptor(
            parser.parse_sequent(entry["label"]),
            tag,
            _arity_from_json(entry["arity"]),
            Ordinal.from_json(entry["ordinal"]),
            _witness_from_json(tag, entry.get("witness")),
        )
    return OmegaTree.from_table(table)
