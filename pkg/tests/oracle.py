"""Brute-force fixpoint semantics used as an independent oracle."""

from itertools import combinations

from gcmu import formula as fm


def subsets(n):
    for k in range(n + 1):
        for c in combinations(range(n), k):
            yield frozenset(c)


def brute_eval(K, f, env=None):
    """Denotation via Knaster-Tarski: mu is the meet of all prefixed points,
    nu the join of all postfixed points.  Exponential; tiny structures only."""
    env = env or {}
    f = fm.desugar(f) if fm.is_sugared(f) else f
    n = K.n_states
    all_ = frozenset(range(n))

    def go(g, env):
        k = g.kind
        if k == fm.TOP:
            return all_
        if k == fm.BOT:
            return frozenset()
        if k == fm.PROP:
            return frozenset(K.valuation.get(g.name, ()))
        if k == fm.NPROP:
            return all_ - frozenset(K.valuation.get(g.name, ()))
        if k == fm.VAR:
            return env[g.name]
        if k == fm.AND:
            return go(g.args[0], env) & go(g.args[1], env)
        if k == fm.OR:
            return go(g.args[0], env) | go(g.args[1], env)
        if k in (fm.DIA, fm.BOX):
            body = go(g.args[0], env)
            rel = K.relations.get(g.name, set())
            succ = {s: {w for v, w in rel if v == s} for s in range(n)}
            if k == fm.DIA:
                return frozenset(s for s in range(n) if succ[s] & body)
            return frozenset(s for s in range(n) if succ[s] <= body)
        out = all_ if k == fm.MU else frozenset()
        for S in subsets(n):
            val = go(g.args[0], {**env, g.name: S})
            if k == fm.MU and val <= S:
                out &= S
            elif k == fm.NU and S <= val:
                out |= S
        return out

    return go(f, env)
