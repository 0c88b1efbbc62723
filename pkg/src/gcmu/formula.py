"""Hash-consed formulas of the modal mu-calculus with CTL sugar.

Formulas are interned: structurally equal formulas are the same object, so
equality and hashing are identity-based and constant time.  Negation is only
available on propositions (negation normal form).
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Iterator

TOP = "top"
BOT = "bot"
PROP = "prop"
NPROP = "nprop"
VAR = "var"
AND = "and"
OR = "or"
DIA = "dia"
BOX = "box"
MU = "mu"
NU = "nu"
# CTL sugar, removed by desugar()
EX = "EX"
AX = "AX"
EF = "EF"
AF = "AF"
EG = "EG"
AG = "AG"
EU = "EU"
AU = "AU"

SUGAR_KINDS = frozenset({EX, AX, EF, AF, EG, AG, EU, AU})
FIXPOINT_KINDS = frozenset({MU, NU})
MODAL_KINDS = frozenset({DIA, BOX})

#: action used for all CTL modalities
CTL_ACTION = "*"


class FormulaError(Exception):
    """Base class for formula processing errors."""


class OpenFormula(FormulaError):
    pass


class UnguardedInput(FormulaError):
    pass


class AlternationDetected(FormulaError):
    pass


class Formula:
    """An interned formula node.

    ``name`` holds the proposition, variable or action name; ``args`` holds
    the children.  Never instantiate directly, use the constructor functions.
    """

    __slots__ = ("kind", "name", "args", "free_vars", "size", "__weakref__")

    kind: str
    name: str | None
    args: tuple[Formula, ...]
    free_vars: frozenset[str]
    size: int

    def __reduce__(self):
        return (_make, (self.kind, self.name, self.args))

    def __repr__(self) -> str:
        return f"Formula({to_str(self)!r})"

    def __str__(self) -> str:
        return to_str(self)

    @property
    def closed(self) -> bool:
        return not self.free_vars

    @property
    def body(self) -> Formula:
        return self.args[0]

    @property
    def left(self) -> Formula:
        return self.args[0]

    @property
    def right(self) -> Formula:
        return self.args[1]


_table: dict[tuple, Formula] = {}


def _make(kind: str, name: str | None = None, args: tuple = ()) -> Formula:
    key = (kind, name, args)
    f = _table.get(key)
    if f is not None:
        return f
    f = object.__new__(Formula)
    f.kind = kind
    f.name = name
    f.args = args
    if kind == VAR:
        f.free_vars = frozenset((name,))
    elif kind in FIXPOINT_KINDS:
        f.free_vars = args[0].free_vars - {name}
    elif args:
        f.free_vars = frozenset().union(*(a.free_vars for a in args))
    else:
        f.free_vars = frozenset()
    f.size = 1 + sum(a.size for a in args)
    # setdefault is atomic for identity-hashed keys, so racing threads agree
    return _table.setdefault(key, f)


def Top() -> Formula:
    return _make(TOP)


def Bot() -> Formula:
    return _make(BOT)


def Prop(name: str) -> Formula:
    return _make(PROP, name)


def NegProp(name: str) -> Formula:
    return _make(NPROP, name)


def Var(name: str) -> Formula:
    return _make(VAR, name)


def And(left: Formula, right: Formula) -> Formula:
    return _make(AND, None, (left, right))


def Or(left: Formula, right: Formula) -> Formula:
    return _make(OR, None, (left, right))


def Diamond(action: str, body: Formula) -> Formula:
    return _make(DIA, action, (body,))


def Box(action: str, body: Formula) -> Formula:
    return _make(BOX, action, (body,))


def Mu(var: str, body: Formula) -> Formula:
    return _make(MU, var, (body,))


def Nu(var: str, body: Formula) -> Formula:
    return _make(NU, var, (body,))


def _sugar(kind):
    def build(*args: Formula) -> Formula:
        return _make(kind, None, tuple(args))

    build.__name__ = kind
    return build


EX_ = _sugar(EX)
AX_ = _sugar(AX)
EF_ = _sugar(EF)
AF_ = _sugar(AF)
EG_ = _sugar(EG)
AG_ = _sugar(AG)
EU_ = _sugar(EU)
AU_ = _sugar(AU)


def conj(*fs: Formula) -> Formula:
    """Left-nested conjunction; ``true`` operands are dropped."""
    fs = [f for f in fs if f.kind != TOP]
    if not fs:
        return Top()
    out = fs[0]
    for f in fs[1:]:
        out = And(out, f)
    return out


def disj(*fs: Formula) -> Formula:
    """Left-nested disjunction; ``false`` operands are dropped."""
    fs = [f for f in fs if f.kind != BOT]
    if not fs:
        return Bot()
    out = fs[0]
    for f in fs[1:]:
        out = Or(out, f)
    return out


# -- traversal --------------------------------------------------------------


def subformulas(f: Formula) -> Iterator[Formula]:
    """Distinct subformulas of ``f`` in pre-order."""
    seen = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g in seen:
            continue
        seen.add(g)
        yield g
        stack.extend(reversed(g.args))


def is_sugared(f: Formula) -> bool:
    return any(g.kind in SUGAR_KINDS for g in subformulas(f))


def op_count(f: Formula) -> int:
    """Number of operator occurrences (connectives, modalities, binders)."""
    if not f.args:
        return 0
    return 1 + sum(op_count(a) for a in f.args)


@lru_cache(maxsize=None)
def substitute(f: Formula, var: str, g: Formula) -> Formula:
    """Replace the free occurrences of ``var`` in ``f`` by ``g``.

    ``g`` is assumed closed, so no capture can occur.
    """
    if var not in f.free_vars:
        return f
    if f.kind == VAR:
        return g
    if f.kind in FIXPOINT_KINDS:
        return _make(f.kind, f.name, (substitute(f.args[0], var, g),))
    return _make(f.kind, f.name, tuple(substitute(a, var, g) for a in f.args))


def unfold(f: Formula) -> Formula:
    """``eta X. psi`` to ``psi[X := eta X. psi]``."""
    assert f.kind in FIXPOINT_KINDS
    return substitute(f.args[0], f.name, f)


# -- printing ---------------------------------------------------------------

_P_OR, _P_AND, _P_UNARY = 1, 2, 3


def to_str(f: Formula) -> str:
    """Render in the concrete syntax accepted by :func:`gcmu.parser.parse`."""
    return _fmt(f, _P_OR, True)


def _paren(s: str, needed: bool) -> str:
    return f"({s})" if needed else s


def _fmt(f: Formula, prec: int, tail: bool) -> str:
    # tail: nothing follows in the enclosing context, so a binder may extend to the end
    k = f.kind
    if k == TOP:
        return "true"
    if k == BOT:
        return "false"
    if k in (PROP, VAR):
        return f.name
    if k == NPROP:
        return "~" + f.name
    if k in (AND, OR):
        p = _P_AND if k == AND else _P_OR
        op = " & " if k == AND else " | "
        wrap = prec > p
        # conj/disj chains parse left-associatively
        s = _fmt(f.args[0], p, False) + op + _fmt(f.args[1], p + 1, tail or wrap)
        return _paren(s, wrap)
    if k in FIXPOINT_KINDS:
        wrap = prec > _P_OR or not tail
        return _paren(f"{k} {f.name}. {_fmt(f.args[0], _P_OR, True)}", wrap)
    if k == DIA:
        return f"<{f.name}> " + _fmt(f.args[0], _P_UNARY, tail)
    if k == BOX:
        return f"[{f.name}] " + _fmt(f.args[0], _P_UNARY, tail)
    if k in (EU, AU):
        q = "E" if k == EU else "A"
        return f"{q}[{_fmt(f.args[0], _P_OR, True)} U {_fmt(f.args[1], _P_OR, True)}]"
    if k in SUGAR_KINDS:
        return f"{k} " + _fmt(f.args[0], _P_UNARY, tail)
    raise ValueError(f"unknown formula kind {k!r}")


# -- desugaring ---------------------------------------------------------------


def desugar(f: Formula) -> Formula:
    """Replace CTL operators by their fixpoint definitions over ``CTL_ACTION``.

    Fresh variables ``Z0, Z1, ...`` avoid every name already used in ``f``.
    """
    used = {g.name for g in subformulas(f) if g.kind in (VAR, MU, NU)}
    fresh = (f"Z{i}" for i in itertools.count() if f"Z{i}" not in used)
    memo: dict[Formula, Formula] = {}

    def go(g: Formula) -> Formula:
        if g in memo:
            return memo[g]
        k = g.kind
        if k in SUGAR_KINDS:
            a = [go(x) for x in g.args]
            z = Var(next(fresh)) if k not in (EX, AX) else None
            if k == EX:
                out = Diamond(CTL_ACTION, a[0])
            elif k == AX:
                out = Box(CTL_ACTION, a[0])
            elif k == EG:
                out = Nu(z.name, And(a[0], Diamond(CTL_ACTION, z)))
            elif k == AG:
                out = Nu(z.name, And(a[0], Box(CTL_ACTION, z)))
            elif k == EF:
                out = Mu(z.name, Or(a[0], Diamond(CTL_ACTION, z)))
            elif k == AF:
                out = Mu(z.name, Or(a[0], Box(CTL_ACTION, z)))
            elif k == EU:
                out = Mu(z.name, Or(a[1], And(a[0], Diamond(CTL_ACTION, z))))
            else:
                out = Mu(z.name, Or(a[1], And(a[0], Box(CTL_ACTION, z))))
        elif g.args:
            out = _make(k, g.name, tuple(go(x) for x in g.args))
        else:
            out = g
        # sugar nodes are not shared: each occurrence needs its own variable
        if k not in SUGAR_KINDS:
            memo[g] = out
        return out

    return go(f)


# -- negation ---------------------------------------------------------------

_DUAL = {TOP: BOT, BOT: TOP, PROP: NPROP, NPROP: PROP, AND: OR, OR: AND,
         DIA: BOX, BOX: DIA, MU: NU, NU: MU, VAR: VAR}


def negate_nnf(f: Formula) -> Formula:
    """Negation of a closed formula, pushed down to the atoms."""
    if f.free_vars:
        raise OpenFormula(f"cannot negate open formula: free {sorted(f.free_vars)}")
    if is_sugared(f):
        f = desugar(f)
    return _dualize(f)


@lru_cache(maxsize=None)
def _dualize(f: Formula) -> Formula:
    return _make(_DUAL[f.kind], f.name, tuple(_dualize(a) for a in f.args))


# -- normalization ------------------------------------------------------------


def normalize(f: Formula) -> Formula:
    """Bring a closed formula into clean, irredundant, guarded form.

    Redundant binders are dropped, all bound variables are renamed to
    ``X0, X1, ...`` in pre-order, and guardedness and alternation-freeness are
    verified.  Raises :class:`OpenFormula`, :class:`UnguardedInput` or
    :class:`AlternationDetected`.
    """
    if is_sugared(f):
        f = desugar(f)
    if f.free_vars:
        raise OpenFormula(f"formula has free variables {sorted(f.free_vars)}")
    f = _drop_redundant(f)
    f = _rename(f)
    check_guarded(f)
    check_alternation_free(f)
    return f


@lru_cache(maxsize=None)
def _drop_redundant(f: Formula) -> Formula:
    if f.kind in FIXPOINT_KINDS:
        body = _drop_redundant(f.args[0])
        if f.name not in body.free_vars:
            return body
        return _make(f.kind, f.name, (body,))
    if not f.args:
        return f
    return _make(f.kind, f.name, tuple(_drop_redundant(a) for a in f.args))


def _rename(f: Formula) -> Formula:
    atoms = {g.name for g in subformulas(f) if g.kind in (PROP, NPROP)}
    names = (f"X{i}" for i in itertools.count() if f"X{i}" not in atoms)

    def go(g: Formula, env: dict[str, str]) -> Formula:
        k = g.kind
        if k == VAR:
            return Var(env[g.name])
        if k in FIXPOINT_KINDS:
            new = next(names)
            return _make(k, new, (go(g.args[0], {**env, g.name: new}),))
        if not g.args:
            return g
        return _make(k, g.name, tuple(go(a, env) for a in g.args))

    return go(f, {})


def check_guarded(f: Formula) -> None:
    """Raise :class:`UnguardedInput` if some variable occurrence is not under a
    modality within the scope of its binder."""

    @lru_cache(maxsize=None)
    def unguarded(g: Formula) -> frozenset:
        # variables with an occurrence not below any modality
        if g.kind == VAR:
            return g.free_vars
        if g.kind in MODAL_KINDS:
            return frozenset()
        if g.kind in FIXPOINT_KINDS:
            return unguarded(g.args[0]) - {g.name}
        return frozenset().union(*(unguarded(a) for a in g.args)) if g.args else frozenset()

    for g in subformulas(f):
        if g.kind in FIXPOINT_KINDS and g.name in unguarded(g.args[0]):
            raise UnguardedInput(f"variable {g.name} occurs unguarded in {to_str(g)}")


def check_alternation_free(f: Formula) -> None:
    """Raise :class:`AlternationDetected` if a subformula has both a free
    mu-variable and a free nu-variable.  Assumes ``f`` is clean."""
    kind_of = {g.name: g.kind for g in subformulas(f) if g.kind in FIXPOINT_KINDS}
    for g in subformulas(f):
        kinds = {kind_of.get(x) for x in g.free_vars}
        if MU in kinds and NU in kinds:
            raise AlternationDetected(
                f"subformula {to_str(g)} has free mu- and nu-variables")


def is_clean(f: Formula) -> bool:
    names = [g.name for g in _occurrences(f) if g.kind in FIXPOINT_KINDS]
    return len(names) == len(set(names))


def is_irredundant(f: Formula) -> bool:
    return all(g.name in g.args[0].free_vars
               for g in subformulas(f) if g.kind in FIXPOINT_KINDS)


def _occurrences(f: Formula) -> Iterator[Formula]:
    # all occurrences, not just distinct subformulas
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(g.args)
