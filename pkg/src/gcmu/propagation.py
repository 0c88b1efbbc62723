"""Success and failure sets of a partially expanded focused tableau.

The success set ``E = nu X. mu Y. f(Y) | (f(X) & F)`` and the failure set
``A = mu X. nu Y. g(X) | (g(Y) & ~F)`` are the winning regions of the two
players in the Buechi game on focused nodes whose accepting vertices ``F``
are those with empty focus.  Vertices whose label is still unexpanded are
not part of the base set, so both sets under-approximate their final values.

:func:`compute_E` and :func:`compute_A` solve the strongly connected
components of the undecided vertices bottom-up (plays that leave a component
never return), running the nested fixpoints with predecessor counters inside
each component.  :func:`compute_E_naive` and :func:`compute_A_naive` are
literal Kleene iterations over :func:`f_step` and :func:`g_step` on the whole
graph, kept as a cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from gcmu.tableau import Node


class MonotonicityViolation(AssertionError):
    pass


class FocusedGraph:
    """Reachable focused nodes with their rule-instance successors.

    ``succ[v]`` is ``None`` while the label of ``v`` is unexpanded, otherwise
    one tuple of successor vertices per rule instance (one entry per
    conclusion).  ``rules[label]`` holds the rule instances of an expanded
    label, in the same order.
    """

    def __init__(self):
        self.index: dict[tuple[Node, frozenset], int] = {}
        self.label: list[Node] = []
        self.focus: list[frozenset] = []
        self.succ: list[list[tuple[int, ...]] | None] = []
        self.rules: dict[Node, list] = {}
        self.by_label: dict[Node, list[int]] = {}

    def __len__(self) -> int:
        return len(self.label)

    def vertex(self, label: Node, focus: frozenset) -> tuple[int, bool]:
        """Vertex id for ``(label, focus)`` and whether it was just created."""
        key = (label, focus)
        v = self.index.get(key)
        if v is not None:
            return v, False
        v = len(self.label)
        self.index[key] = v
        self.label.append(label)
        self.focus.append(focus)
        self.succ.append(None)
        self.by_label.setdefault(label, []).append(v)
        return v, True

    def base(self) -> list[int]:
        return [v for v, s in enumerate(self.succ) if s is not None]

    def accepting(self, v: int) -> bool:
        return not self.focus[v]


@dataclass
class PropagationResult:
    E: frozenset[int]
    A: frozenset[int]
    rank: dict[int, int] = field(default_factory=dict)
    outer_iterations: int = 0


def f_step(fg: FocusedGraph, base, Y) -> set[int]:
    """Vertices of ``base`` all of whose instances have a successor in ``Y``."""
    succ = fg.succ
    return {v for v in base if all(any(w in Y for w in inst) for inst in succ[v])}


def g_step(fg: FocusedGraph, base, Y) -> set[int]:
    """Vertices of ``base`` with an instance all of whose successors are in ``Y``."""
    succ = fg.succ
    return {v for v in base if any(all(w in Y for w in inst) for inst in succ[v])}


def compute_E(fg: FocusedGraph, known_E=(), known_A=()) -> PropagationResult:
    """Success set, with ranks.

    ``known_E``/``known_A`` are vertices already decided by an earlier
    propagation on a smaller graph; since both sets only grow during
    expansion they are taken as fixed.
    """
    E, _ = _solve(fg, known_E, known_A, want_E=True, want_A=False)
    return PropagationResult(frozenset(E), frozenset(), compute_rank(fg, E))


def compute_A(fg: FocusedGraph, known_E=(), known_A=()) -> frozenset[int]:
    """Failure set; see :func:`compute_E` for the warm-start arguments."""
    _, A = _solve(fg, known_E, known_A, want_E=False, want_A=True)
    return frozenset(A)


def propagate(fg: FocusedGraph, prev: PropagationResult | None = None,
              want_A: bool = True, warm: bool = True, want_rank: bool = True) -> PropagationResult:
    """Compute ``E`` and optionally ``A`` (and ranks on ``E``).

    With ``warm`` the vertices decided by ``prev`` are not recomputed.
    """
    known_E = known_A = ()
    if warm and prev is not None:
        known_E, known_A = prev.E, prev.A
    E, A = _solve(fg, known_E, known_A, want_E=True, want_A=want_A)
    rank = compute_rank(fg, E) if want_rank else {}
    return PropagationResult(frozenset(E), frozenset(A), rank)


def compute_rank(fg: FocusedGraph, E) -> dict[int, int]:
    """Layer of each vertex in the least fixpoint ``mu Y. f(Y) | (E & F)``,
    which is the last inner iteration of ``E``."""
    succ, focus = fg.succ, fg.focus
    missing = {}
    satisfied = {}
    preds: dict[int, list[tuple[int, int]]] = {}
    rank = {}
    layer = []
    for v in E:
        insts = succ[v]
        missing[v] = len(insts)
        satisfied[v] = [False] * len(insts)
        for k, inst in enumerate(insts):
            for w in set(inst):
                if w in E:
                    preds.setdefault(w, []).append((v, k))
        if not focus[v] or not insts:
            rank[v] = 1
            layer.append(v)
    i = 1
    while layer:
        i += 1
        nxt = []
        for w in layer:
            for v, k in preds.get(w, ()):
                if v in rank or satisfied[v][k]:
                    continue
                satisfied[v][k] = True
                missing[v] -= 1
                if missing[v] == 0:
                    rank[v] = i
                    nxt.append(v)
        layer = nxt
    if len(rank) != len(E):
        raise MonotonicityViolation("success set is not a fixpoint")
    return rank


def _solve(fg, known_E, known_A, want_E, want_A):
    E = set(known_E)
    A = set(known_A)
    todo = [v for v in fg.base() if v not in E and v not in A]
    for comp in _sccs(fg, todo):
        cset = set(comp)
        if want_E:
            E.update(_scc_E(fg, comp, cset, E))
        if want_A:
            A.update(_scc_A(fg, comp, cset, A))
    return E, A


def _sccs(fg, nodes):
    """Strongly connected components of ``nodes`` (edges to other vertices
    ignored), successors before predecessors."""
    succ = fg.succ
    inside = set(nodes)
    adj = {}
    for v in nodes:
        out = set()
        for inst in succ[v]:
            out.update(w for w in inst if w in inside)
        adj[v] = list(out)
    index = {}
    low = {}
    on_stack = set()
    stack = []
    comps = []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        work = [(root, iter(adj[root]))]
        while work:
            v, it = work[-1]
            pushed = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(adj[w])))
                    pushed = True
                    break
                if w in on_stack and index[w] < low[v]:
                    low[v] = index[w]
            if pushed:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                if low[v] < low[u]:
                    low[u] = low[v]
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                comps.append(comp)
    return comps


def _scc_E(fg, comp, cset, E) -> set[int]:
    """Success vertices of one component, given the success set below it."""
    succ, focus = fg.succ, fg.focus
    inner: dict[int, list[list[int]]] = {}
    for v in comp:
        lst = []
        for inst in succ[v]:
            if any(w in E for w in inst):
                continue
            ws = [w for w in set(inst) if w in cset]
            if not ws:
                break
            lst.append(ws)
        else:
            inner[v] = lst
    if len(comp) == 1:
        v = comp[0]
        lst = inner.get(v)
        if lst is None:
            return set()
        if not lst:
            return {v}
        # self-loop: accepted if every open instance loops, i.e. v is in F
        return {v} if not focus[v] else set()
    # every vertex of X keeps, for each open instance, a successor in X;
    # removing the others early only speeds up the outer iteration since
    # the success set is contained in the result of each removal
    X = _trim(inner, set(inner))
    while True:
        Y = _attract(inner, X, [v for v in X if not focus[v]])
        if Y >= X:
            return X
        X = _trim(inner, X & Y)


def _trim(inner, X) -> set[int]:
    """Largest subset of ``X`` in which every open instance of every vertex
    has a successor."""
    count = {}
    preds: dict[int, list[tuple[int, int]]] = {}
    queue = []
    for v in X:
        cs = []
        for k, ws in enumerate(inner[v]):
            c = 0
            for w in ws:
                if w in X:
                    c += 1
                    preds.setdefault(w, []).append((v, k))
            cs.append(c)
        count[v] = cs
        if 0 in cs:
            queue.append(v)
    X = set(X)
    X.difference_update(queue)
    while queue:
        w = queue.pop()
        for v, k in preds.get(w, ()):
            if v not in X:
                continue
            count[v][k] -= 1
            if count[v][k] == 0:
                X.discard(v)
                queue.append(v)
    return X


def _attract(inner, X, target) -> set[int]:
    """Least fixpoint of ``Y -> target | {v in X | every open instance of v
    has a successor in Y}``."""
    missing = {}
    done = {}
    preds: dict[int, list[tuple[int, int]]] = {}
    Y = set(target)
    layer = list(target)
    for v in X:
        lst = inner[v]
        missing[v] = len(lst)
        done[v] = [False] * len(lst)
        if not lst and v not in Y:
            Y.add(v)
            layer.append(v)
        for k, ws in enumerate(lst):
            for w in ws:
                if w in X:
                    preds.setdefault(w, []).append((v, k))
    while layer:
        nxt = []
        for w in layer:
            for v, k in preds.get(w, ()):
                if v in Y or done[v][k]:
                    continue
                done[v][k] = True
                missing[v] -= 1
                if missing[v] == 0:
                    Y.add(v)
                    nxt.append(v)
        layer = nxt
    return Y


def _scc_A(fg, comp, cset, A) -> set[int]:
    """Failure vertices of one component, given the failure set below it."""
    succ, focus = fg.succ, fg.focus
    viable: dict[int, list[list[int]]] = {}
    sure = set()
    for v in comp:
        lst = []
        for inst in succ[v]:
            ws = set(inst)
            if any(w not in cset and w not in A for w in ws):
                continue
            inside = [w for w in ws if w in cset]
            if not inside:
                sure.add(v)
                break
            lst.append(inside)
        if lst:
            viable[v] = lst
    if len(comp) == 1:
        v = comp[0]
        if v in sure:
            return {v}
        # only a self-loop is left; it fails if the focus is never emptied
        return {v} if v in viable and focus[v] else set()
    cand = [v for v in comp if v in viable and v not in sure]
    X = _close(viable, cand, set(sure))
    while True:
        Y = _safe(viable, cand, X, focus)
        if Y <= X:
            return X
        X = _close(viable, cand, Y)


def _close(viable, cand, X) -> set[int]:
    """Least superset of ``X`` containing every candidate with a viable
    instance inside it (the failure set is closed under this step)."""
    X = set(X)
    missing = {}
    preds: dict[int, list[tuple[int, int]]] = {}
    queue = []
    for v in cand:
        if v in X:
            continue
        ms = []
        for k, ws in enumerate(viable[v]):
            m = 0
            for w in ws:
                if w not in X:
                    m += 1
                    preds.setdefault(w, []).append((v, k))
            ms.append(m)
        missing[v] = ms
        if 0 in ms:
            queue.append(v)
    X.update(queue)
    while queue:
        w = queue.pop()
        for v, k in preds.get(w, ()):
            if v in X:
                continue
            missing[v][k] -= 1
            if missing[v][k] == 0:
                X.add(v)
                queue.append(v)
    return X


def _safe(viable, cand, keep, focus) -> set[int]:
    """Greatest fixpoint of ``Y -> keep | {v in cand | focus nonempty and some
    viable instance of v stays in Y}``."""
    Y = set(keep)
    Y.update(cand)
    bad = {}
    good = {}
    preds: dict[int, list[tuple[int, int]]] = {}
    for v in cand:
        lst = viable[v]
        bad[v] = [0] * len(lst)
        for k, ws in enumerate(lst):
            for w in ws:
                preds.setdefault(w, []).append((v, k))
                if w not in Y:
                    bad[v][k] += 1
        good[v] = sum(1 for b in bad[v] if b == 0)
    queue = [v for v in cand if v not in keep and (not focus[v] or good[v] == 0)]
    for v in queue:
        Y.discard(v)
    while queue:
        w = queue.pop()
        for v, k in preds.get(w, ()):
            if v not in Y or v in keep:
                continue
            bad[v][k] += 1
            if bad[v][k] == 1:
                good[v] -= 1
                if good[v] == 0:
                    Y.discard(v)
                    queue.append(v)
    return Y


# -- literal Kleene iterations -------------------------------------------------


def compute_E_naive(fg: FocusedGraph, check: bool = True) -> PropagationResult:
    base = fg.base()
    F = {v for v in base if not fg.focus[v]}
    X = set(base)
    rounds = 0
    while True:
        rounds += 1
        fX = f_step(fg, base, X) & F
        Y: set[int] = set()
        rank: dict[int, int] = {}
        i = 0
        while True:
            i += 1
            newY = f_step(fg, base, Y) | fX
            if check and not Y <= newY:
                raise MonotonicityViolation("inner iteration of E shrank")
            if newY == Y:
                break
            for v in newY - Y:
                rank[v] = i
            Y = newY
        if check and not Y <= X:
            raise MonotonicityViolation("outer iteration of E grew")
        if Y == X:
            return PropagationResult(frozenset(X), frozenset(), rank, rounds)
        X = Y


def compute_A_naive(fg: FocusedGraph, check: bool = True) -> frozenset[int]:
    base = fg.base()
    nonF = {v for v in base if fg.focus[v]}
    X: set[int] = set()
    while True:
        gX = g_step(fg, base, X)
        Y = set(base)
        while True:
            newY = gX | (g_step(fg, base, Y) & nonF)
            if check and not newY <= Y:
                raise MonotonicityViolation("inner iteration of A grew")
            if newY == Y:
                break
            Y = newY
        if check and not X <= Y:
            raise MonotonicityViolation("outer iteration of A shrank")
        if Y == X:
            return frozenset(X)
        X = Y


def dump_tsv(fg: FocusedGraph, res: PropagationResult) -> str:
    """Per-vertex membership (E, A or undecided) and rank as TSV."""
    lines = ["vertex\tlabel\tfocus\texpanded\tstatus\trank"]
    for v in range(len(fg)):
        status = "E" if v in res.E else "A" if v in res.A else "undecided"
        label = ",".join(map(str, sorted(fg.label[v])))
        focus = ",".join(map(str, sorted(fg.focus[v])))
        rank = res.rank.get(v, "") if v in res.E else ""
        lines.append(f"{v}\t{label}\t{focus}\t{int(fg.succ[v] is not None)}\t{status}\t{rank}")
    return "\n".join(lines) + "\n"
