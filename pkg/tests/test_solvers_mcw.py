import numpy as np
import pytest

from fusewidth import expr as X
from fusewidth import oracle as O
from fusewidth import solvers_mcw as M
from fusewidth.expr import parse_expression as P

from helpers import complete, cycle, edgeless, expr_of, path, star


def mx(text, k=None):
    return P(text, "multi", k)


# --- active labels ---------------------------------------------------------------


def test_root_has_no_active_labels():
    e = mx("j1,2(a<1> + b<2>)")
    assert M.active_labels(e)[id(e.root)] == frozenset()


def test_join_child_activates_both_labels():
    e = mx("j1,2(a<1> + b<2>)")
    assert M.active_labels(e)[id(e.root.child)] == {1, 2}


def test_worked_example_label_one_inactive():
    e = mx("j2,3((a<1,2> + b<3>) + (c<1> + d<1>))")
    act = M.active_labels(e)
    assert act[id(e.root.child)] == {2, 3}


def test_join_with_empty_partner_does_not_activate():
    e = mx("j1,2(j1,3(a<1> + b<2>))")
    act = M.active_labels(e)
    assert act[id(e.root.child.child)] == {1, 2}


def test_relabel_carries_activity_down():
    e = mx("j2,3(r1->{1,2}(a<1>) + b<3>)")
    act = M.active_labels(e)
    union = e.root.child
    assert act[id(union.left)] == {2}
    assert act[id(union.left.child)] == {1}


# --- exact solvers ------------------------------------------------------------------


def single():
    return mx("a<1>")


@pytest.mark.parametrize("e,want", [(single(), 1), (expr_of(star(4)), 1), (expr_of(cycle(5)), 2)])
def test_dominating_set(e, want):
    assert M.solve_dominating_set(e) == want


@pytest.mark.parametrize(
    "g,q,want", [(complete(3), 3, 6), (complete(3), 2, 0), (path(3), 2, 2), (cycle(5), 3, 30)]
)
def test_q_coloring_count(g, q, want):
    # cycle C_n has (q-1)^n + (-1)^n (q-1) proper q-colorings
    assert M.solve_q_coloring_count(expr_of(g), q) == want


def test_q_coloring_rejects_q_below_two():
    with pytest.raises(ValueError):
        M.solve_q_coloring_count(expr_of(path(3)), 1)


@pytest.mark.parametrize("g,want", [(edgeless(3), 1), (cycle(5), 3), (complete(4), 4)])
def test_chromatic_number(g, want):
    if g.m == 0:
        e = mx("(a<1> + (b<1> + c<1>))")
    else:
        e = expr_of(g)
    assert M.solve_chromatic_number(e) == want


def test_footprints_never_hold_empty_or_full_sets():
    for seed in range(8):
        e = O.gen_instance("multi", 2 + seed % 2, seed)
        for act, keys in M.footprint_keys(e, 3).values():
            for key in keys:
                assert all(0 < m < 7 for m in key)


def test_footprints_only_on_active_labels():
    e = M.as_normalized_multi(O.gen_instance("multi", 3, 4))
    act = M.active_labels(e)
    keys = M.footprint_keys(e, 2)
    for node in X.iter_preorder(e.root):
        labels, _ = keys[id(node)]
        assert set(labels) == act[id(node)]


# --- Cut&Count --------------------------------------------------------------------------


@pytest.mark.parametrize("g,want", [(path(3), 1), (path(4), 2), (complete(3), 2)])
def test_cvc(g, want):
    assert M.solve_cvc(expr_of(g), M.CutCountContext(seed=1, trials=10)) == want


@pytest.mark.parametrize("g,want", [(star(4), 1), (path(4), 2), (cycle(5), 3)])
def test_cds(g, want):
    assert M.solve_cds(expr_of(g), M.CutCountContext(seed=1, trials=10)) == want


def test_cvc_edgeless_is_zero():
    assert M.solve_cvc(mx("(a<1> + b<1>)")) == 0


def test_cds_needs_connected_graph():
    with pytest.raises(ValueError):
        M.solve_cds(mx("(a<1> + b<1>)"))


def _table(poly, n):
    wmax = 2 * n * n
    return {(int(i) // (wmax + 1), int(i) % (wmax + 1)) for i in np.nonzero(poly)[0]}


@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("constraint", ["vertex-cover", "dominating"])
def test_parity_table_matches_enumeration(seed, constraint):
    e = M.as_normalized_multi(O.gen_instance("multi", 2, seed, n_max=6))
    g = X.evaluate(e)
    rng = np.random.default_rng(seed)
    weights = {t: int(rng.integers(1, 2 * g.n + 1)) for t in g.titles()}
    vs = g.titles()[seed % g.n]
    if constraint == "vertex-cover":
        poly = M.cvc_parity(e, vs, weights)
    else:
        poly = M.cds_parity(e, vs, weights)
    got = _table(poly, g.n)
    ctx = M.CutCountContext(v_star=vs, weights=weights)
    want = set()
    for c in range(g.n + 1):
        for w in range(2 * g.n * g.n + 1):
            if O.count_consistent_cuts_mod2(g, ctx, constraint, c, w):
                want.add((c, w))
    assert got == want


@pytest.mark.parametrize("seed", range(10))
def test_no_false_positives_with_one_trial(seed):
    e = O.gen_instance("multi", 2 + seed % 2, seed)
    g = X.evaluate(e)
    ctx = M.CutCountContext(seed=seed, trials=1)
    got = M.solve_cvc(e, ctx)
    want = O.brute_force("cvc", g)
    assert got is None or (want is not None and got >= want)
    if g.is_connected():
        got = M.solve_cds(e, ctx)
        assert got is None or got >= O.brute_force("cds", g)


def test_same_seed_same_answer():
    e = O.gen_instance("multi", 3, 5)
    a = M.solve("cvc", e, ctx=M.CutCountContext(seed=9, trials=3))
    b = M.solve("cvc", e, ctx=M.CutCountContext(seed=9, trials=3))
    assert a.lines() == b.lines()
    assert "seed 9" in a.lines()


@pytest.mark.parametrize("seed", range(8))
def test_random_instances_match_brute_force(seed):
    e = O.gen_instance("multi", 2 + seed % 2, seed)
    g = X.evaluate(e)
    assert M.solve_dominating_set(e) == O.brute_force("ds", g)
    assert M.solve_chromatic_number(e) == O.brute_force("chromatic", g)
    for q in (2, 3):
        assert M.solve_q_coloring_count(e, q) == O.brute_force("qcolor", g, {"q": q})


@pytest.mark.parametrize("seed", range(4))
def test_fuse_input_goes_through_conversion(seed):
    e = O.gen_instance("fuse", 2, seed)
    g = X.evaluate(e)
    assert M.solve_dominating_set(e) == O.brute_force("ds", g)
    assert M.solve_chromatic_number(e) == O.brute_force("chromatic", g)
