"""Global caching main loop: expansion, intermediate propagation, verdict."""

from __future__ import annotations

import dataclasses
import heapq
import time
from collections import deque
from dataclasses import dataclass, field

from gcmu import formula as fm
from gcmu.closure import ClosureTable, build_closure
from gcmu.propagation import FocusedGraph, PropagationResult, compute_rank, propagate
from gcmu.tableau import STATE, Node, Tableau

SAT = "Sat"
UNSAT = "Unsat"

ORDERS = ("fifo", "lifo", "priority")


class BudgetExceeded(Exception):
    """The step or time limit ran out before a verdict was reached."""


class InvariantViolation(AssertionError):
    pass


def parse_policy(policy: str) -> tuple[str, int]:
    """``"final"``, ``"adaptive"`` or ``"every:K"`` as ``(name, K)``."""
    if policy in ("final", "adaptive"):
        return policy, 0
    name, _, k = policy.partition(":")
    if name == "every" and k.isdigit() and int(k) >= 1:
        return "every", int(k)
    raise ValueError(f"bad propagation policy {policy!r} (final, adaptive or every:K with K >= 1)")


@dataclass(frozen=True)
class SolverConfig:
    order: str = "fifo"
    policy: str = "adaptive"
    principals: str = "single"
    simplify: bool = True
    extract_model: bool = False
    max_expansions: int | None = None
    timeout: float | None = None
    # seed each propagation with the previous failure set
    warm_start: bool = True
    # snapshot monotonicity, E/A disjointness, complementation at the end
    check_invariants: bool = False
    # also compute A in the final propagation
    final_A: bool = False

    def __post_init__(self):
        if self.order not in ORDERS:
            raise ValueError(f"unknown expansion order {self.order!r}")
        if self.principals not in ("all", "single"):
            raise ValueError(f"unknown principal policy {self.principals!r}")
        parse_policy(self.policy)

    def fingerprint(self) -> str:
        return (f"order={self.order};propagate={self.policy};principals={self.principals}"
                f";simplify={int(self.simplify)}")


@dataclass
class SolverStats:
    expanded: int = 0
    propagations: int = 0
    vertices: int = 0
    labels: int = 0
    time_ms: float = 0.0

    def lines(self) -> list[str]:
        return [f"{k}={v:.3f}" if isinstance(v, float) else f"{k}={v}"
                for k, v in dataclasses.asdict(self).items()]


@dataclass
class SolverOutcome:
    verdict: str
    stats: SolverStats
    formula: fm.Formula
    closure: ClosureTable
    tableau: Tableau
    graph: FocusedGraph
    result: PropagationResult
    root: int = 0
    # True when the run ended with every reachable label expanded
    complete: bool = False
    model: object = None
    snapshots: list = field(default_factory=list)
    # calls to the expansion step; equals stats.expanded when no label is expanded twice
    expand_calls: int = 0

    @property
    def sat(self) -> bool:
        return self.verdict == SAT


class _Frontier:
    def __init__(self, order: str):
        self.order = order
        self.items: deque | list = deque() if order != "priority" else []
        self.count = 0

    def __len__(self):
        return len(self.items)

    def push(self, label: Node, key: int = 0):
        if self.order == "priority":
            heapq.heappush(self.items, (key, self.count, label))
            self.count += 1
        else:
            self.items.append(label)

    def pop(self) -> Node:
        if self.order == "fifo":
            return self.items.popleft()
        if self.order == "lifo":
            return self.items.pop()
        return heapq.heappop(self.items)[2]


class _Run:
    def __init__(self, phi: fm.Formula, cfg: SolverConfig):
        self.cfg = cfg
        self.phi = phi
        self.ct = build_closure(phi)
        self.tab = Tableau(self.ct, cfg.principals, cfg.simplify)
        self.fg = FocusedGraph()
        self.stats = SolverStats()
        self.prev: PropagationResult | None = None
        self.snapshots: list[tuple[int, int]] = []
        root_label = frozenset({0})
        self.root, _ = self.fg.vertex(root_label, self.tab.deferrals(root_label))
        self.frontier = _Frontier(cfg.order)
        self.seen = {root_label}
        self.frontier.push(root_label)
        self.expand_calls = 0

    def expand(self, t: Node):
        fg, tab = self.fg, self.tab
        self.expand_calls += 1
        if t in fg.rules:
            raise InvariantViolation("label expanded twice")
        rules = tab.conclusions(t)
        fg.rules[t] = rules
        fresh = []
        for r in rules:
            for g in r.conclusions:
                if g not in self.seen:
                    self.seen.add(g)
                    fresh.append(g)
        work = list(fg.by_label.get(t, ()))
        while work:
            v = work.pop()
            label, focus = fg.label[v], fg.focus[v]
            succ = []
            for r in fg.rules[label]:
                ws = []
                for g in r.conclusions:
                    w, new = fg.vertex(g, tab.track(label, focus, r, g))
                    if new and g in fg.rules:
                        work.append(w)
                    ws.append(w)
                succ.append(tuple(ws))
            fg.succ[v] = succ
        for g in fresh:
            key = min(len(fg.focus[w]) for w in fg.by_label[g])
            self.frontier.push(g, key)

    def propagate(self, want_A: bool) -> PropagationResult:
        res = propagate(self.fg, self.prev, want_A=want_A, warm=self.cfg.warm_start, want_rank=False)
        self.stats.propagations += 1
        if self.cfg.check_invariants:
            self.check(res, want_A)
        if not want_A and self.prev is not None:
            res.A = self.prev.A
        self.prev = res
        self.snapshots.append((len(res.E), len(res.A)))
        return res

    def check(self, res: PropagationResult, have_A: bool):
        if res.E & res.A:
            raise InvariantViolation("E and A intersect")
        prev = self.prev
        if prev is not None:
            if not prev.E <= res.E:
                raise InvariantViolation("success set shrank")
            if have_A and not prev.A <= res.A:
                raise InvariantViolation("failure set shrank")
            if have_A and prev.E & res.A or prev.A & res.E:
                raise InvariantViolation("a decided vertex changed sides")

    def run(self) -> SolverOutcome:
        cfg = self.cfg
        policy, every = parse_policy(cfg.policy)
        start = time.perf_counter()
        deadline = None if cfg.timeout is None else start + cfg.timeout
        last_U, last_G = 1, 1
        since = 0
        verdict = None
        res = None
        while self.frontier:
            if cfg.max_expansions is not None and len(self.fg.rules) >= cfg.max_expansions:
                raise BudgetExceeded(f"expansion limit {cfg.max_expansions} reached")
            if deadline is not None and time.perf_counter() > deadline:
                raise BudgetExceeded(f"timeout after {cfg.timeout} s")
            self.expand(self.frontier.pop())
            since += 1
            nG, nU = len(self.fg.rules), len(self.frontier)
            if policy == "every":
                due = since >= every
            elif policy == "adaptive":
                due = nU >= 2 * last_U or nG >= 2 * last_G
            else:
                due = False
            if due and self.frontier:
                since = 0
                last_U, last_G = max(nU, 1), nG
                res = self.propagate(want_A=True)
                if self.root in res.E:
                    verdict = SAT
                    break
                if self.root in res.A:
                    verdict = UNSAT
                    break
        complete = not self.frontier
        if verdict is None:
            want_A = cfg.final_A or cfg.check_invariants
            res = self.propagate(want_A=want_A)
            verdict = SAT if self.root in res.E else UNSAT
            if want_A and cfg.check_invariants:
                covered = res.E | res.A
                if len(covered) != len(self.fg):
                    raise InvariantViolation("E and A do not cover the fully expanded graph")
        res.rank = compute_rank(self.fg, res.E)
        st = self.stats
        st.expanded = len(self.fg.rules)
        st.vertices = len(self.fg)
        st.labels = len(self.seen)
        if cfg.check_invariants and st.expanded > 2 ** min(self.phi.size, 4096):
            raise InvariantViolation("more expanded labels than 2^|phi0|")
        out = SolverOutcome(verdict, st, self.phi, self.ct, self.tab, self.fg, res,
                            self.root, complete, snapshots=self.snapshots,
                            expand_calls=self.expand_calls)
        if cfg.extract_model and verdict == SAT:
            from gcmu.model import extract_model
            out.model = extract_model(out)
        st.time_ms = (time.perf_counter() - start) * 1000.0
        return out


def solve(phi0: fm.Formula, cfg: SolverConfig | None = None) -> SolverOutcome:
    """Decide satisfiability of ``phi0`` (normalized first).

    Raises :class:`BudgetExceeded` when a limit of ``cfg`` runs out, and the
    normalization errors of :func:`gcmu.formula.normalize`.
    """
    cfg = cfg or SolverConfig()
    phi = fm.normalize(phi0)
    return _Run(phi, cfg).run()


def solve_both_modes(phi0: fm.Formula, cfg: SolverConfig | None = None):
    """Solve with intermediate propagation and with final propagation only."""
    cfg = cfg or SolverConfig()
    eager = cfg.policy if cfg.policy != "final" else "every:1"
    return (solve(phi0, dataclasses.replace(cfg, policy=eager)),
            solve(phi0, dataclasses.replace(cfg, policy="final")))


def dump_graph(out: SolverOutcome) -> str:
    """DOT rendering of the focused graph; E green, A red, undecided grey.

    Edges carry the instance number, the rule and the tracked focus.
    """
    fg, ct, res = out.graph, out.closure, out.result
    lines = ["digraph focused {", "  node [shape=box, fontsize=10];"]
    for v in range(len(fg)):
        color = "palegreen" if v in res.E else "lightpink" if v in res.A else "lightgrey"
        label = ", ".join(ct.label(fg.label[v]))
        focus = ", ".join(map(str, sorted(fg.focus[v])))
        text = f"{v}: {{{label}}}\\nfocus {{{focus}}}".replace('"', '\\"')
        style = "filled" if fg.succ[v] is not None else "filled,dashed"
        lines.append(f'  v{v} [label="{text}", style="{style}", fillcolor={color}];')
    for v in range(len(fg)):
        if fg.succ[v] is None:
            continue
        for k, (rule, ws) in enumerate(zip(fg.rules[fg.label[v]], fg.succ[v])):
            tag = rule.kind if rule.action is None else f"{rule.kind} {rule.action}"
            for w in ws:
                tracked = ",".join(map(str, sorted(fg.focus[w])))
                lines.append(f'  v{v} -> v{w} [label="{k}:{tag} {{{tracked}}}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def is_state_vertex(out: SolverOutcome, v: int) -> bool:
    return out.tableau.classify(out.graph.label[v]) == STATE
