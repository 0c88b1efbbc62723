from collections import deque

import pytest

from gcmu import formula as fm
from gcmu.closure import build_closure
from gcmu.parser import parse
from gcmu.tableau import (AXIOM, INTERNAL, R_AND, R_MODAL, R_OR, R_UNFOLD, STATE, Tableau,
                          classify, conclusions, track)

from conftest import EX1, EX2_TEXT, PSI1, PSI2_CLOSED, closure_index


def node(ct, *texts):
    return frozenset(closure_index(ct, t) for t in texts)


@pytest.fixture(scope="module")
def ct1():
    return build_closure(fm.normalize(parse(EX1)))


@pytest.fixture(scope="module")
def ct2():
    return build_closure(fm.normalize(parse(EX2_TEXT)))


def test_classify(ct1):
    assert classify(node(ct1, "r", "~r"), ct1) == AXIOM
    assert classify(node(ct1, "~r", "<*> EG ~r", "p"), ct1) == STATE
    assert classify(node(ct1, "~r", PSI1), ct1) == INTERNAL
    ct = build_closure(fm.normalize(parse("false | <a> p")))
    assert classify(frozenset({ct.index[fm.Bot()]}), ct) == AXIOM


def test_and_or_unfold(ct1):
    g = node(ct1, "EG ~r")
    (r,) = conclusions(g, ct1)
    assert r.kind == R_UNFOLD and r.conclusions == (node(ct1, "~r & <*> EG ~r"),)
    (r,) = conclusions(r.conclusions[0], ct1)
    assert r.kind == R_AND and r.conclusions == (node(ct1, "~r", "<*> EG ~r"),)
    d = node(ct1, f"r | [*] {PSI2_CLOSED}", "p")
    (r,) = conclusions(d, ct1)
    assert r.kind == R_OR
    assert r.conclusions == (node(ct1, "r", "p"), node(ct1, f"[*] {PSI2_CLOSED}", "p"))


def test_principals_all_vs_single(ct1):
    g = node(ct1, PSI1, "EG ~r")
    assert len(conclusions(g, ct1, "all")) == 2
    single = conclusions(g, ct1, "single")
    assert len(single) == 1 and single[0].kind == R_UNFOLD


def test_modal_rule():
    ct = build_closure(fm.normalize(parse("<a> p & <a> q & [a] r & [b] s & <b> t")))
    n = frozenset(i for i, f in enumerate(ct.formulas) if f.kind in (fm.DIA, fm.BOX))
    rules = conclusions(n, ct)
    assert [r.kind for r in rules] == [R_MODAL] * 3
    got = {(r.action, frozenset(fm.to_str(ct[i]) for i in r.conclusions[0])) for r in rules}
    assert got == {("a", frozenset({"p", "r"})), ("a", frozenset({"q", "r"})),
                   ("b", frozenset({"t", "s"}))}


def test_state_without_diamond_has_no_instance():
    ct = build_closure(fm.normalize(parse("p & [a] q")))
    assert conclusions(frozenset({ct.index[fm.Prop("p")], ct.index[fm.Box("a", fm.Prop("q"))]}), ct) == []


def test_simplify_or():
    ct = build_closure(fm.normalize(parse("p & (~p | <a> q) & (p | r)")))
    p, np_ = ct.index[fm.Prop("p")], ct.index[fm.NegProp("p")]
    clash = ct.index[fm.Or(fm.NegProp("p"), fm.Diamond("a", fm.Prop("q")))]
    subsumed = ct.index[fm.Or(fm.Prop("p"), fm.Prop("r"))]
    tab = Tableau(ct, "single", simplify=True)
    (r,) = tab.conclusions(frozenset({p, clash, subsumed}))
    # the disjunction with a present disjunct goes first and keeps one branch
    assert r.principal == subsumed and r.conclusions == (frozenset({p, clash}),)
    (r,) = tab.conclusions(frozenset({p, clash}))
    assert r.conclusions == (frozenset({p, ct.index[fm.Diamond("a", fm.Prop("q"))]}),)
    assert np_ not in r.conclusions[0]


def _tracked_foci(ct, start, focus, target):
    """Foci reaching ``target`` from ``(start, focus)`` through non-modal rules."""
    tab = Tableau(ct, "all")
    out = set()
    seen = {(start, focus)}
    queue = deque(seen)
    while queue:
        d, f = queue.popleft()
        if d == target:
            out.add(f)
            continue
        if tab.classify(d) != INTERNAL:
            continue
        for r in tab.conclusions(d):
            for g in r.conclusions:
                key = (g, tab.track(d, f, r, g))
                if key not in seen:
                    seen.add(key)
                    queue.append(key)
    return out


def test_tracking_inherits_box_deferral(ct1):
    delta4 = closure_index(ct1, PSI2_CLOSED)
    delta3 = closure_index(ct1, f"[*] {PSI2_CLOSED}")
    gamma2 = node(ct1, PSI2_CLOSED, "~r", "<*> EG ~r")
    gamma6 = node(ct1, "~r", "<*> EG ~r", "~p", f"[*] {PSI2_CLOSED}")
    tab = Tableau(ct1)
    assert tab.deferrals(gamma2) == {delta4}
    assert tab.deferrals(gamma6) == {delta3}
    assert _tracked_foci(ct1, gamma2, frozenset({delta4}), gamma6) == {frozenset({delta3})}


def test_tracking_finishes_on_unaffiliated_disjunct(ct2):
    d = closure_index(ct2, f"r | [*] {PSI2_CLOSED}")
    gamma7 = node(ct2, "~q", "<*> EG ~q", "p", f"r | [*] {PSI2_CLOSED}")
    gamma8 = node(ct2, "~q", "<*> EG ~q", "p", "r")
    tab = Tableau(ct2)
    assert tab.deferrals(gamma7) == {d} and tab.deferrals(gamma8) == set()
    (rule,) = tab.conclusions(gamma7)
    assert gamma8 in rule.conclusions
    assert track(gamma7, {d}, rule, gamma8, ct2) == frozenset()
    # the other branch keeps the deferral
    other = next(g for g in rule.conclusions if g != gamma8)
    assert track(gamma7, {d}, rule, other, ct2) == {closure_index(ct2, f"[*] {PSI2_CLOSED}")}


def test_modal_tracking_and_refocus(ct1):
    delta1 = closure_index(ct1, PSI1)
    delta2 = closure_index(ct1, f"[*] {PSI1}")
    st = node(ct1, "~r", "<*> EG ~r", "~q", f"[*] {PSI1}")
    (rule,) = conclusions(st, ct1)
    (g,) = rule.conclusions
    assert g == node(ct1, "EG ~r", PSI1)
    assert track(st, {delta2}, rule, g, ct1) == {delta1}
    # empty focus refocuses on all deferrals of the conclusion
    assert track(st, frozenset(), rule, g, ct1) == {delta1}
