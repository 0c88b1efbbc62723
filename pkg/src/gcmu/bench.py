"""Benchmark formula generators and a CSV timing harness.

Counter atoms: ``x0`` is the least significant bit of counter ``x``, the atom
``x`` says that the counter is running and ``start_x`` marks its start.
"""

from __future__ import annotations

import csv
import io
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

from gcmu import formula as fm
from gcmu.formula import AG_, AF_, AX_, EF_, EX_, And, Formula, NegProp, Or, Prop, conj
from gcmu.solver import BudgetExceeded, SolverConfig, solve

CSV_HEADER = ["family", "params", "verdict", "nodes", "propagations", "time_ms", "config"]


class ParameterError(ValueError):
    pass


def _implies(a: Formula, b: Formula) -> Formula:
    return Or(fm.negate_nnf(a), b)


def _bit(x: str, i: int) -> Formula:
    return Prop(f"{x}{i}")


def _nbit(x: str, i: int) -> Formula:
    return NegProp(f"{x}{i}")


def gen_counter(x: str, n: int, ax=AX_) -> Formula:
    """``c(x, n)``: in every successor the ``n``-bit counter ``x`` is
    incremented, wrapping around from all ones to zero."""
    if n < 1:
        raise ParameterError("counter needs n >= 1")

    def keep(i):
        # bits n-i .. n-1 keep their value
        f = fm.Top()
        for b in range(n - 1, n - i - 1, -1):
            f = conj(Or(_nbit(x, b), ax(_bit(x, b))), Or(_bit(x, b), ax(_nbit(x, b))), f)
        return f

    def c(i):
        if i == 0:
            return fm.Top()
        b = n - i
        return Or(conj(_nbit(x, b), ax(_bit(x, b)), keep(i - 1)),
                  conj(_bit(x, b), ax(_nbit(x, b)), c(i - 1)))

    return c(n)


def gen_init(x: str, m: int) -> Formula:
    """``init(x, m)``: the counter starts at zero and keeps running."""
    zero = conj(Prop(x), *[_nbit(x, i) for i in range(m)])
    return AG_(And(_implies(Prop(f"start_{x}"), zero), _implies(Prop(x), EX_(Prop(x)))))


def _check(n, j, k, check_range):
    if n < 1 or k < 1:
        raise ParameterError("need n >= 1 and k >= 1")
    if j < 0 or (check_range and j >= n):
        raise ParameterError(f"need 0 <= j < n, got j={j}, n={n}")


def gen_early(n: int, j: int, k: int, ex: bool = False, check_range: bool = True) -> Formula:
    """``early(n, j, k)``; with ``ex`` every AX is replaced by EX.

    With ``check_range=False`` the range condition ``j < n`` is not enforced
    and ``p_j`` is then an unconstrained atom.
    """
    _check(n, j, k, check_range)
    ax = EX_ if ex else AX_
    p, r = "p", "r"
    counters = AG_(And(_implies(Prop(r), gen_counter(r, k, ax)),
                       _implies(Prop(p), gen_counter(p, n, ax))))
    branch = _implies(conj(*[_bit(p, i) for i in range(j + 1)]),
                      EX_(And(Prop("start_r"), EF_(Prop(p)))))
    return conj(Prop("start_p"), gen_init(p, n), gen_init(r, k), counters,
                AG_(conj(branch, Or(NegProp(p), NegProp(r)), _implies(Prop(r), ax(Prop(r))))))


def gen_early_gc(n: int, j: int, k: int, ex: bool = False, check_range: bool = True) -> Formula:
    """``early_gc(n, j, k)``: ``early`` plus a counter ``q`` restarted
    infinitely often, at most every second step."""
    _check(n, j, k, check_range)
    ax = EX_ if ex else AX_
    p, q, r = "p", "q", "r"
    b = Prop("b")
    return conj(
        gen_early(n, j, k, ex, check_range), b, gen_init(q, n),
        AG_(conj(Or(NegProp(p), NegProp(q)), Or(NegProp(q), NegProp(r)),
                 _implies(Prop(q), gen_counter(q, n, ax)))),
        AG_(And(AF_(b), _implies(b, conj(EX_(Prop(p)), EX_(Prop("start_q")), ax(NegProp("b")))))),
    )


RANDOM_WEIGHTS = (("and", 2), ("or", 2), ("dia", 1), ("box", 1), ("mu", 1), ("nu", 1))
RANDOM_ACTION = "a"


def gen_random(op_count: int, atom_count: int, seed: int) -> Formula:
    """Random closed, guarded, alternation-free formula with ``op_count``
    operators over atoms ``p0..p{atom_count-1}``.

    A variable leaf is only drawn when a modality separates it from its
    binder, and entering a binder hides the variables of the opposite
    fixpoint kind, so no subformula has free variables of both kinds.
    Binders whose variable is never drawn are removed by normalization, so
    the operator count after normalization can be lower.
    """
    if op_count < 1 or atom_count < 1:
        raise ParameterError("need op_count >= 1 and atom_count >= 1")
    rng = random.Random(seed)
    ops = [o for o, _ in RANDOM_WEIGHTS]
    weights = [w for _, w in RANDOM_WEIGHTS]
    counter = [0]

    def leaf(scope):
        choices = [Prop(f"p{i}") for i in range(atom_count)]
        choices += [NegProp(f"p{i}") for i in range(atom_count)]
        choices += [fm.Var(x) for x, _, guarded in scope if guarded]
        return rng.choice(choices)

    def build(n, scope):
        if n == 0:
            return leaf(scope)
        op = rng.choices(ops, weights)[0]
        if op in ("and", "or"):
            left = rng.randint(0, n - 1)
            a, b = build(left, scope), build(n - 1 - left, scope)
            return And(a, b) if op == "and" else Or(a, b)
        if op in ("dia", "box"):
            inner = tuple((x, kind, True) for x, kind, _ in scope)
            body = build(n - 1, inner)
            return fm.Diamond(RANDOM_ACTION, body) if op == "dia" else fm.Box(RANDOM_ACTION, body)
        x = f"X{counter[0]}"
        counter[0] += 1
        inner = tuple(s for s in scope if s[1] == op) + ((x, op, False),)
        body = build(n - 1, inner)
        return fm.Mu(x, body) if op == "mu" else fm.Nu(x, body)

    return build(op_count, ())


# -- harness -------------------------------------------------------------------

FAMILIES = {
    "early": lambda n, j=4, k=2, **_: gen_early(n, j, k, check_range=False),
    "early_ex": lambda n, j=4, k=2, **_: gen_early(n, j, k, ex=True, check_range=False),
    "early_gc": lambda n, j=2, k=2, **_: gen_early_gc(n, j, k, check_range=False),
    "early_gc_ex": lambda n, j=2, k=2, **_: gen_early_gc(n, j, k, ex=True, check_range=False),
    "counter": lambda n, **_: conj(*[_nbit("x", i) for i in range(n)],
                                    AG_(And(gen_counter("x", n), EX_(fm.Top())))),
    "random": lambda n, atoms=3, seed=0, **_: gen_random(n, atoms, seed),
}


def generate(family: str, params: dict) -> Formula:
    try:
        gen = FAMILIES[family]
    except KeyError:
        raise ParameterError(f"unknown family {family!r} (known: {', '.join(FAMILIES)})") from None
    return gen(**params)


@dataclass
class BenchRecord:
    family: str
    params: str
    verdict: str
    nodes: int
    propagations: int
    time_ms: float
    config: str

    def row(self) -> list:
        return [self.family, self.params, self.verdict, self.nodes, self.propagations,
                f"{self.time_ms:.1f}", self.config]


def format_params(params: dict) -> str:
    return ";".join(f"{k}={v}" for k, v in params.items())


def parse_params(text: str) -> dict:
    out = {}
    for part in filter(None, text.split(";")):
        k, _, v = part.partition("=")
        out[k] = int(v)
    return out


def run_one(family: str, params: dict, cfg: SolverConfig) -> BenchRecord:
    phi = generate(family, params)
    start = time.perf_counter()
    try:
        out = solve(phi, cfg)
        verdict, nodes, props = out.verdict, out.stats.expanded, out.stats.propagations
    except BudgetExceeded:
        verdict, nodes, props = "timeout", 0, 0
    elapsed = (time.perf_counter() - start) * 1000.0
    return BenchRecord(family, format_params(params), verdict, nodes, props, elapsed, cfg.fingerprint())


def _task(args):
    return run_one(*args)


def run_bench(family: str, param_list: list[dict], cfg: SolverConfig | None = None,
              timeout: float | None = 60.0, jobs: int = 1) -> list[BenchRecord]:
    """Solve each instance; timeouts are recorded, never raised.

    Records come back in the order of ``param_list`` also when ``jobs > 1``.
    """
    cfg = cfg or SolverConfig()
    if timeout is not None:
        cfg = replace(cfg, timeout=timeout)
    tasks = [(family, p, cfg) for p in param_list]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_task, tasks))
    return [_task(t) for t in tasks]


def write_csv(records: list[BenchRecord], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow(r.row())


def to_csv(records: list[BenchRecord]) -> str:
    buf = io.StringIO()
    write_csv(records, buf)
    return buf.getvalue()


def read_csv(fh) -> list[BenchRecord]:
    out = []
    for row in csv.DictReader(fh):
        out.append(BenchRecord(row["family"], row["params"], row["verdict"], int(row["nodes"]),
                               int(row["propagations"]), float(row["time_ms"]), row["config"]))
    return out
