"""Tableau rules over closure-index nodes and deferral tracking along them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet

from gcmu import formula as fm
from gcmu.closure import ClosureTable

Node = FrozenSet[int]

AXIOM = "axiom"
STATE = "state"
INTERNAL = "internal"

# rule kinds
R_AXIOM = "axiom"
R_AND = "and"
R_OR = "or"
R_UNFOLD = "unfold"
R_MODAL = "modal"

_STATE_KINDS = frozenset({fm.TOP, fm.PROP, fm.NPROP, fm.DIA, fm.BOX})


@dataclass(frozen=True)
class RuleInstance:
    kind: str
    principal: int | None
    conclusions: tuple[Node, ...]
    action: str | None = None
    boxes: tuple[int, ...] = ()


class Tableau:
    """Rule application for one closure table.

    ``principals`` selects the non-modal instances generated for an internal
    node: ``"all"`` gives one instance per principal formula, ``"single"``
    only the first one (non-branching rules before disjunctions, lowest
    index first).  The rules are invertible, so both choices decide the same
    verdicts; ``"single"`` avoids enumerating every interleaving of
    decomposition steps.

    With ``simplify``, a disjunction with a disjunct already in the node
    keeps only that branch, and branches that clash immediately are
    dropped; under ``"single"`` such disjunctions and those with a literal
    disjunct are decomposed first.
    """

    def __init__(self, ct: ClosureTable, principals: str = "all", simplify: bool = False):
        if principals not in ("all", "single"):
            raise ValueError(f"unknown principal policy {principals!r}")
        self.ct = ct
        self.principals = principals
        self.simplify = simplify
        kinds = ct.kinds
        self.kinds = kinds
        self.children = ct.children
        self.aff = ct.affiliation
        self.is_state_kind = [k in _STATE_KINDS for k in kinds]
        self.action = [f.name if f.kind in fm.MODAL_KINDS else None for f in ct.formulas]
        # index of the complementary literal, if present in the closure
        lits = {(f.kind, f.name): i for i, f in enumerate(ct.formulas)
                if f.kind in (fm.PROP, fm.NPROP)}
        self.complement = {}
        for (k, name), i in lits.items():
            if k == fm.PROP and (fm.NPROP, name) in lits:
                j = lits[(fm.NPROP, name)]
                self.complement[i] = j
                self.complement[j] = i
        self.bot = ct.index.get(fm.Bot())
        self.top = ct.index.get(fm.Top())
        self.literal = [k in (fm.PROP, fm.NPROP) for k in kinds]

    def deferrals(self, node: Node) -> frozenset[int]:
        aff = self.aff
        return frozenset(i for i in node if i in aff)

    def classify(self, node: Node) -> str:
        if self.bot is not None and self.bot in node:
            return AXIOM
        comp = self.complement
        for i in node:
            j = comp.get(i)
            if j is not None and j in node:
                return AXIOM
        state = self.is_state_kind
        if all(state[i] for i in node):
            return STATE
        return INTERNAL

    def conclusions(self, node: Node) -> list[RuleInstance]:
        """Rule instances applicable to ``node``, principals in index order."""
        cls = self.classify(node)
        if cls == AXIOM:
            return [RuleInstance(R_AXIOM, None, ())]
        if cls == STATE:
            return self._modal(node)
        kinds = self.kinds
        candidates = sorted(i for i in node if kinds[i] in (fm.AND, fm.OR, fm.MU, fm.NU))
        if self.principals == "single":
            if self.simplify:
                candidates = [min(candidates, key=lambda i: (self._urgency(node, i), i))]
            else:
                linear = [i for i in candidates if kinds[i] != fm.OR]
                candidates = (linear or candidates)[:1]
        return [self._apply(node, i) for i in candidates]

    def _clashes(self, node: Node, i: int) -> bool:
        if i == self.bot:
            return True
        j = self.complement.get(i)
        return j is not None and j in node

    def _urgency(self, node: Node, i: int) -> int:
        if self.kinds[i] != fm.OR:
            return 0
        a, b = self.children[i]
        if a in node or b in node or a == self.top or b == self.top:
            return 1
        if self._clashes(node, a) or self._clashes(node, b):
            return 2
        if self.literal[a] or self.literal[b]:
            return 3
        return 4

    def _apply(self, node: Node, i: int) -> RuleInstance:
        k = self.kinds[i]
        rest = node - {i}
        ch = self.children[i]
        if k == fm.AND:
            return RuleInstance(R_AND, i, (rest.union(ch),))
        if k == fm.OR:
            if not self.simplify:
                return RuleInstance(R_OR, i, (rest | {ch[0]}, rest | {ch[1]}))
            for c in ch:
                if c in rest or c == self.top:
                    return RuleInstance(R_OR, i, (rest | {c},))
            return RuleInstance(R_OR, i, tuple(rest | {c} for c in ch if not self._clashes(rest, c)))
        return RuleInstance(R_UNFOLD, i, (rest.union(ch),))

    def _modal(self, node: Node) -> list[RuleInstance]:
        kinds = self.kinds
        action = self.action
        ch = self.children
        boxes: dict[str, list[int]] = {}
        for i in sorted(node):
            if kinds[i] == fm.BOX:
                boxes.setdefault(action[i], []).append(i)
        out = []
        for i in sorted(node):
            if kinds[i] != fm.DIA:
                continue
            bx = tuple(boxes.get(action[i], ()))
            concl = frozenset(ch[b][0] for b in bx) | {ch[i][0]}
            out.append(RuleInstance(R_MODAL, i, (concl,), action[i], bx))
        return out

    def track(self, delta: Node, focus: frozenset[int], rule: RuleInstance,
              gamma: Node) -> frozenset[int]:
        """The focus obtained by tracking ``focus`` from ``delta`` to its
        conclusion ``gamma`` under ``rule``; an empty focus refocuses."""
        if not focus:
            return self.deferrals(gamma)
        aff = self.aff
        ch = self.children
        out = set()
        if rule.kind == R_MODAL:
            # the diamond principal and every box of the instance pass their body on
            for src in (rule.principal,) + rule.boxes:
                if src in focus:
                    b = ch[src][0]
                    if aff.get(b) == aff[src]:
                        out.add(b)
            return frozenset(out)
        kinds = self.kinds
        for src in focus:
            a = aff[src]
            if src in gamma:
                out.add(src)
            if kinds[src] in (fm.AND, fm.OR, fm.MU, fm.NU):
                for c in ch[src]:
                    if c in gamma and aff.get(c) == a:
                        out.add(c)
        return frozenset(out)


def classify(node: Node, ct: ClosureTable) -> str:
    return Tableau(ct).classify(node)


def conclusions(node: Node, ct: ClosureTable, principals: str = "all",
                simplify: bool = False) -> list[RuleInstance]:
    return Tableau(ct, principals, simplify).conclusions(node)


def track(delta: Node, focus, rule: RuleInstance, gamma: Node, ct: ClosureTable) -> frozenset[int]:
    return Tableau(ct).track(delta, frozenset(focus), rule, gamma)
