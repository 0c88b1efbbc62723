"""Kripke structures, a naive fixpoint model checker and model extraction.

:func:`mc_eval` is deliberately independent of the solver: it evaluates the
semantic clauses directly, with Kleene iteration for fixpoints, so it can
serve as an oracle for extracted models.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from gcmu import formula as fm
from gcmu.formula import Formula
from gcmu.tableau import STATE

FORMAT_VERSION = 1


class UnboundVariable(fm.FormulaError):
    pass


class NotSat(Exception):
    pass


class IncompleteStrategySubgraph(AssertionError):
    pass


class ModelFormatError(ValueError):
    pass


@dataclass
class KripkeStructure:
    n_states: int
    relations: dict[str, set[tuple[int, int]]] = field(default_factory=dict)
    valuation: dict[str, set[int]] = field(default_factory=dict)
    witness: int | None = None

    def __post_init__(self):
        for a, pairs in self.relations.items():
            for v, w in pairs:
                if not (0 <= v < self.n_states and 0 <= w < self.n_states):
                    raise ModelFormatError(f"edge ({v}, {w}) of {a!r} leaves the state set")
        for p, states in self.valuation.items():
            if any(not 0 <= s < self.n_states for s in states):
                raise ModelFormatError(f"valuation of {p!r} mentions an unknown state")

    @property
    def states(self) -> range:
        return range(self.n_states)

    def successors(self, action: str) -> list[list[int]]:
        succ = [[] for _ in range(self.n_states)]
        for v, w in sorted(self.relations.get(action, ())):
            succ[v].append(w)
        return succ

    def props_of(self, s: int) -> list[str]:
        return sorted(p for p, states in self.valuation.items() if s in states)

    def to_json(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "states": [{"id": s, "props": self.props_of(s)} for s in self.states],
            "relations": {a: sorted([v, w] for v, w in pairs)
                          for a, pairs in sorted(self.relations.items())},
            "witness": self.witness,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)

    @classmethod
    def from_json(cls, data: dict) -> "KripkeStructure":
        try:
            ids = [s["id"] for s in data["states"]]
            if sorted(ids) != list(range(len(ids))):
                raise ModelFormatError("state ids must be 0..n-1")
            valuation: dict[str, set[int]] = {}
            for s in data["states"]:
                for p in s.get("props", ()):
                    valuation.setdefault(p, set()).add(s["id"])
            relations = {a: {(int(v), int(w)) for v, w in pairs}
                         for a, pairs in data.get("relations", {}).items()}
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, ModelFormatError):
                raise
            raise ModelFormatError(f"malformed model: {e}") from e
        return cls(len(ids), relations, valuation, data.get("witness"))

    @classmethod
    def loads(cls, text: str) -> "KripkeStructure":
        return cls.from_json(json.loads(text))

    def to_dot(self) -> str:
        lines = ["digraph kripke {"]
        for s in self.states:
            shape = "doublecircle" if s == self.witness else "circle"
            props = ",".join(self.props_of(s))
            lines.append(f'  s{s} [shape={shape}, label="{s}\\n{props}"];')
        for a, pairs in sorted(self.relations.items()):
            for v, w in sorted(pairs):
                lines.append(f'  s{v} -> s{w} [label="{a}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def mc_eval(K: KripkeStructure, phi: Formula, interp: dict[str, frozenset] | None = None) -> frozenset[int]:
    """States of ``K`` satisfying ``phi`` under the variable interpretation."""
    if fm.is_sugared(phi):
        phi = fm.desugar(phi)
    interp = dict(interp or {})
    missing = phi.free_vars - interp.keys()
    if missing:
        raise UnboundVariable(f"no interpretation for {', '.join(sorted(missing))}")
    W = frozenset(K.states)
    succ_cache: dict[str, list[list[int]]] = {}
    memo: dict = {}

    def succ(a):
        s = succ_cache.get(a)
        if s is None:
            s = succ_cache[a] = K.successors(a)
        return s

    def ev(f: Formula, env: dict[str, frozenset]) -> frozenset:
        key = (f, tuple(sorted((x, env[x]) for x in f.free_vars)))
        r = memo.get(key)
        if r is not None:
            return r
        k = f.kind
        if k == fm.TOP:
            r = W
        elif k == fm.BOT:
            r = frozenset()
        elif k == fm.PROP:
            r = frozenset(K.valuation.get(f.name, ()))
        elif k == fm.NPROP:
            r = W - frozenset(K.valuation.get(f.name, ()))
        elif k == fm.VAR:
            r = env[f.name]
        elif k == fm.AND:
            r = ev(f.args[0], env) & ev(f.args[1], env)
        elif k == fm.OR:
            r = ev(f.args[0], env) | ev(f.args[1], env)
        elif k == fm.DIA:
            body = ev(f.body, env)
            s = succ(f.name)
            r = frozenset(v for v in W if any(w in body for w in s[v]))
        elif k == fm.BOX:
            body = ev(f.body, env)
            s = succ(f.name)
            r = frozenset(v for v in W if all(w in body for w in s[v]))
        elif k in fm.FIXPOINT_KINDS:
            cur = frozenset() if k == fm.MU else W
            while True:
                nxt = ev(f.body, {**env, f.name: cur})
                if nxt == cur:
                    break
                cur = nxt
            r = cur
        else:
            raise fm.FormulaError(f"cannot evaluate {k}")
        memo[key] = r
        return r

    return ev(phi, interp)


def satisfies(K: KripkeStructure, phi: Formula, state: int | None = None) -> bool:
    state = K.witness if state is None else state
    return state is not None and state in mc_eval(K, phi)


def extract_model(outcome) -> KripkeStructure:
    """Kripke structure over the state vertices reached by the rank strategy.

    From every success vertex each rule instance is resolved to a successor
    in ``E`` of least rank; non-state vertices are skipped by following the
    first instance until a state vertex is reached.
    """
    if not outcome.sat:
        raise NotSat("no model for an unsatisfiable formula")
    fg, tab, res = outcome.graph, outcome.tableau, outcome.result
    E, rank = res.E, res.rank
    ct = outcome.closure

    def choose(v: int, k: int) -> int:
        succ = fg.succ[v]
        if succ is None:
            raise IncompleteStrategySubgraph(f"vertex {v} in E is unexpanded")
        best = [w for w in succ[k] if w in E]
        if not best:
            raise IncompleteStrategySubgraph(f"instance {k} of vertex {v} has no successor in E")
        return min(best, key=lambda w: (rank[w], w))

    sat_cache: dict[int, int] = {}

    def saturate(v: int) -> int:
        start = v
        if start in sat_cache:
            return sat_cache[start]
        seen = set()
        while tab.classify(fg.label[v]) != STATE:
            if v in seen:
                raise IncompleteStrategySubgraph(f"non-modal cycle through vertex {v}")
            seen.add(v)
            if not fg.succ[v]:
                raise IncompleteStrategySubgraph(f"non-state vertex {v} has no rule instance")
            v = choose(v, 0)
        sat_cache[start] = v
        return v

    if outcome.root not in E:
        raise NotSat("root is not in the success set")
    ids: dict[int, int] = {}
    order: list[int] = []

    def state_id(v: int) -> int:
        i = ids.get(v)
        if i is None:
            i = ids[v] = len(order)
            order.append(v)
        return i

    witness = state_id(saturate(outcome.root))
    relations: dict[str, set[tuple[int, int]]] = {}
    i = 0
    while i < len(order):
        v = order[i]
        rules = fg.rules[fg.label[v]]
        for k, rule in enumerate(rules):
            w = saturate(choose(v, k))
            relations.setdefault(rule.action, set()).add((i, state_id(w)))
        i += 1
    valuation: dict[str, set[int]] = {}
    for s, v in enumerate(order):
        for j in fg.label[v]:
            f = ct.formulas[j]
            if f.kind == fm.PROP:
                valuation.setdefault(f.name, set()).add(s)
    return KripkeStructure(len(order), relations, valuation, witness)
