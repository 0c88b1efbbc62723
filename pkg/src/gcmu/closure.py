"""Fischer-Ladner closure, eventualities and deferral affiliation.

Every closure formula gets an integer index; nodes of the tableau are
frozensets of these indices.  A formula is a deferral of the eventuality
``theta`` if it is an instance ``alpha sigma`` of an open formula ``alpha``
under a chain ``sigma`` of nested least-fixpoint unfoldings ending in
``theta``.  These instances are enumerated generatively from each
eventuality instead of being recognised by factorisation.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from gcmu import formula as fm
from gcmu.formula import Formula


class AffiliationConflict(Exception):
    """A formula was derived as a deferral of two distinct eventualities."""


Chain = tuple[tuple[str, Formula], ...]


@dataclass(frozen=True)
class DecomposedDeferral:
    """``base`` with the substitution chain ``[X1:=t1];...;[Xn:=tn]``,
    innermost unfolding first; ``tn`` is the eventuality."""

    base: Formula
    chain: Chain

    def induced(self) -> Formula:
        f = self.base
        for var, lit in self.chain:
            f = fm.substitute(f, var, lit)
        return f


@dataclass
class ClosureTable:
    root: Formula
    formulas: list[Formula]
    index: dict[Formula, int]
    # per index: kind, and child indices (AND/OR: both operands, DIA/BOX: body,
    # MU/NU: the unfolding)
    kinds: list[str]
    children: list[tuple[int, ...]]
    eventualities: frozenset[int] = frozenset()
    affiliation: dict[int, int] = field(default_factory=dict)
    decomposition: dict[int, DecomposedDeferral] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.formulas)

    def __getitem__(self, i: int) -> Formula:
        return self.formulas[i]

    def label(self, node) -> list[str]:
        return [fm.to_str(self.formulas[i]) for i in sorted(node)]

    def dump(self) -> str:
        """One line per closure formula: index, formula, affiliation or '-'."""
        lines = []
        for i, f in enumerate(self.formulas):
            aff = self.affiliation.get(i)
            lines.append(f"{i}\t{fm.to_str(f)}\t{'-' if aff is None else aff}")
        return "\n".join(lines) + "\n"


def fischer_ladner(phi0: Formula) -> ClosureTable:
    """Least set containing ``phi0`` closed under immediate subformulas and
    fixpoint unfolding, indexed in breadth-first discovery order."""
    if phi0.free_vars:
        raise fm.OpenFormula(f"closure of open formula {phi0}")
    formulas: list[Formula] = []
    index: dict[Formula, int] = {}
    queue = deque([phi0])
    index[phi0] = 0
    formulas.append(phi0)
    while queue:
        f = queue.popleft()
        succ = [fm.unfold(f)] if f.kind in fm.FIXPOINT_KINDS else list(f.args)
        for g in succ:
            if g not in index:
                index[g] = len(formulas)
                formulas.append(g)
                queue.append(g)
    kinds = [f.kind for f in formulas]
    children = []
    for f in formulas:
        if f.kind in fm.FIXPOINT_KINDS:
            children.append((index[fm.unfold(f)],))
        else:
            children.append(tuple(index[a] for a in f.args))
    return ClosureTable(phi0, formulas, index, kinds, children)


def find_eventualities(ct: ClosureTable) -> frozenset[int]:
    """Indices of the irreducible closed least-fixpoint literals.

    In a clean alternation-free formula a closed mu-literal of the closure is
    reducible exactly when it is the closed instance of an open mu-literal of
    the input (an inner fixpoint unfolded along its enclosing chain).
    """
    reducible = set()
    for lit in _open_instances(ct.root):
        reducible.add(lit)
    return frozenset(i for i, f in enumerate(ct.formulas)
                     if f.kind == fm.MU and f.closed and f not in reducible)


def _open_instances(phi0: Formula):
    """Closed instances of the open fixpoint literals of ``phi0``."""
    out = []
    seen = set()

    def go(g: Formula, env: dict[str, Formula]):
        if g in seen:
            return
        seen.add(g)
        if g.kind in fm.FIXPOINT_KINDS:
            inst = _close(g, env)
            if g.free_vars:
                out.append(inst)
            env = {**env, g.name: inst}
        for a in g.args:
            go(a, env)

    go(phi0, {})
    return out


def _close(g: Formula, env: dict[str, Formula]) -> Formula:
    for x in g.free_vars:
        g = fm.substitute(g, x, env[x])
    return g


def compute_affiliations(ct: ClosureTable) -> ClosureTable:
    """Fill in ``affiliation`` and ``decomposition`` for every deferral.

    Requires ``ct.eventualities``.  Raises :class:`AffiliationConflict` if a
    formula would belong to two eventualities.
    """
    affiliation: dict[int, int] = {}
    decomposition: dict[int, DecomposedDeferral] = {}
    for ev in sorted(ct.eventualities):
        theta = ct.formulas[ev]
        seed = (fm.Var(theta.name), ((theta.name, theta),))
        seen = {seed}
        work = [seed]
        while work:
            base, chain = work.pop()
            dd = DecomposedDeferral(base, chain)
            f = dd.induced()
            i = ct.index.get(f)
            if i is None:
                raise AssertionError(f"deferral {f} missing from closure")
            other = affiliation.get(i)
            if other is not None and other != ev:
                raise AffiliationConflict(
                    f"{f} belongs to both {ct.formulas[other]} and {theta}")
            if other is None:
                affiliation[i] = ev
                decomposition[i] = dd
            for nxt in _decompose(base, chain):
                if nxt not in seen:
                    seen.add(nxt)
                    work.append(nxt)
    ct.affiliation = affiliation
    ct.decomposition = decomposition
    return ct


def _decompose(base: Formula, chain: Chain):
    k = base.kind
    if k in (fm.AND, fm.OR, fm.DIA, fm.BOX):
        # closed operands finish the deferral
        return [(a, chain) for a in base.args if a.free_vars]
    if k == fm.MU:
        return [(base.body, ((base.name, base),) + chain)]
    if k == fm.VAR:
        for pos, (var, lit) in enumerate(chain):
            if var == base.name:
                return [(lit.body, chain[pos:])]
        raise AssertionError(f"variable {base.name} not bound by chain")
    # open nu-literals cannot occur inside an eventuality of an
    # alternation-free formula
    return []


def build_closure(phi0: Formula) -> ClosureTable:
    """Closure table with eventualities and affiliations of a normalized
    closed formula."""
    ct = fischer_ladner(phi0)
    ct.eventualities = find_eventualities(ct)
    return compute_affiliations(ct)


def deferrals_of(node, ct: ClosureTable) -> frozenset[int]:
    aff = ct.affiliation
    return frozenset(i for i in node if i in aff)
