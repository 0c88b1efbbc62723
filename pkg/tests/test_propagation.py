from hypothesis import given, strategies as st

from gcmu.propagation import (FocusedGraph, compute_A, compute_A_naive, compute_E, compute_E_naive,
                              compute_rank, dump_tsv, f_step, g_step, propagate)


def make_graph(adj, focused=()):
    """``adj[v]`` is None (unexpanded) or a list of successor tuples."""
    fg = FocusedGraph()
    for v in range(len(adj)):
        fg.vertex(frozenset({v}), frozenset({0}) if v in focused else frozenset())
    for v, s in enumerate(adj):
        if s is not None:
            fg.succ[v] = [tuple(i) for i in s]
            fg.rules[frozenset({v})] = [None] * len(s)
    return fg


@st.composite
def graphs(draw, max_n=9):
    n = draw(st.integers(1, max_n))
    adj = []
    for _ in range(n):
        if draw(st.integers(0, 5)) == 0:
            adj.append(None)
            continue
        k = draw(st.integers(0, 3))
        adj.append([draw(st.lists(st.integers(0, n - 1), min_size=0, max_size=2)) for _ in range(k)])
    focused = draw(st.sets(st.integers(0, n - 1)))
    return adj, focused


def test_steps():
    fg = make_graph([[(1,)], [(0, 1), (1,)], None])
    assert f_step(fg, fg.base(), {1}) == {0, 1}
    assert g_step(fg, fg.base(), {1}) == {0, 1}
    assert f_step(fg, fg.base(), {0}) == set()
    assert f_step(fg, fg.base(), {0, 1}) == {0, 1}
    assert g_step(fg, fg.base(), {0}) == set()


def test_trivial_graphs():
    # no instance: a state without diamonds succeeds
    fg = make_graph([[]], focused={0})
    assert compute_E(fg).E == {0}
    # an axiom instance has no conclusions and fails
    fg = make_graph([[()]])
    assert compute_E(fg).E == set() and compute_A(fg) == {0}
    # a loop that never drops its focus fails, a loop through an empty focus succeeds
    assert compute_E(make_graph([[(0,)]], focused={0})).E == set()
    assert compute_A(make_graph([[(0,)]], focused={0})) == {0}
    assert compute_E(make_graph([[(1,)], [(0,)]], focused={0})).E == {0, 1}


def test_frontier_is_undecided():
    fg = make_graph([[(1,)], None])
    res = propagate(fg)
    assert res.E == set() and res.A == set()
    fg = make_graph([[(1,), (2,)], None, [()]])
    assert propagate(fg).A == {0, 2}


def test_ranks_are_layers():
    fg = make_graph([[(1,)], [(2,)], [(2,)]], focused={0, 1})
    res = compute_E(fg)
    assert res.E == {0, 1, 2}
    assert res.rank == {2: 1, 1: 2, 0: 3}


@given(graphs())
def test_fast_matches_naive(g):
    adj, focused = g
    fg = make_graph(adj, focused)
    naive = compute_E_naive(fg)
    res = propagate(fg)
    assert res.E == naive.E
    assert res.A == compute_A_naive(fg)
    assert not res.E & res.A
    assert res.rank == naive.rank
    assert compute_rank(fg, res.E) == naive.rank
    if all(s is not None for s in adj):
        assert res.E | res.A == set(range(len(adj)))


@given(graphs(), st.data())
def test_warm_start_matches_cold(g, data):
    adj, focused = g
    hidden = data.draw(st.sets(st.integers(0, len(adj) - 1)))
    partial = [None if v in hidden else s for v, s in enumerate(adj)]
    prev = propagate(make_graph(partial, focused))
    fg = make_graph(adj, focused)
    warm, cold = propagate(fg, prev), propagate(fg)
    assert prev.E <= cold.E and prev.A <= cold.A
    assert (warm.E, warm.A, warm.rank) == (cold.E, cold.A, cold.rank)


def test_dump_tsv():
    fg = make_graph([[(1,)], None])
    lines = dump_tsv(fg, propagate(fg)).splitlines()
    assert lines[0].split("\t") == ["vertex", "label", "focus", "expanded", "status", "rank"]
    assert lines[2].split("\t")[3:5] == ["0", "undecided"]


def test_solver_graphs_match_naive():
    from gcmu.solver import SolverConfig, solve
    from conftest import random_corpus
    for phi in random_corpus(40, 10, 30):
        out = solve(phi, SolverConfig(policy="final", final_A=True))
        naive = compute_E_naive(out.graph)
        assert out.result.E == naive.E
        assert out.result.A == compute_A_naive(out.graph)
        assert out.result.rank == naive.rank
