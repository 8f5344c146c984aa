import pytest

from fusewidth import expr as X
from fusewidth import oracle as O
from fusewidth import solvers_fw as FW
from fusewidth.expr import parse_expression as P

from helpers import complete, cycle, expr_of, path, star

EDGE = "j1,2(a<1> + b<2>)"
TWO_EDGES = "(j1,2(a<1> + b<2>) + j1,2(c<1> + d<2>))"
GLUED_PATH = "(j1,2(a<1> ~ v<2>) ~ j2,3(v<2> ~ b<3>))"


def fx(text):
    return P(text, "fuse")


@pytest.mark.parametrize(
    "e,want",
    [(fx(EDGE), 1), (expr_of(complete(3)), 2), (P(GLUED_PATH, "glue"), 2), (expr_of(cycle(5)), 4)],
)
def test_max_cut(e, want):
    assert FW.solve_max_cut(FW.as_reduced_glue(e)) == want


@pytest.mark.parametrize("e,want", [(fx(EDGE), 1), (expr_of(path(4)), 1), (fx(TWO_EDGES), 2)])
def test_eds(e, want):
    assert FW.solve_eds(FW.as_reduced_glue(e)) == want


@pytest.mark.parametrize(
    "e,want",
    [
        (expr_of(complete(3)), True),
        (expr_of(star(3)), False),
        (P("(j2,3(j1,2(a<1> ~ b<2>) ~ c<3>) ~ j2,3(j1,2(a<1> ~ d<2>) ~ c<3>))", "glue"), True),
        (expr_of(path(3)), False),
        (fx(EDGE), False),
    ],
)
def test_hamiltonian_cycle(e, want):
    if e.dialect == "glue":
        assert X.evaluate(e).n == 4 and X.evaluate(e).m == 4
    assert FW.solve_hamiltonian_cycle(FW.as_reduced_glue(e)) is want


def _pinned_checks(e, u, v):
    e = FW.as_reduced_glue(e)
    g = X.evaluate(e)
    pinned = FW.pin_edge_expression(e, u, v)
    assert isinstance(pinned.root, X.Join)
    child = X.evaluate_all(pinned.root)[id(pinned.root.child)]
    assert child.edges == set(g.without_edge(u, v).edges)
    full = X.evaluate(pinned)
    assert full.edges == g.edges
    return child


def test_pin_triangle_each_edge():
    e = expr_of(complete(3))
    for u, v in sorted(X.evaluate(e).edges):
        _pinned_checks(e, u, v)


def test_pin_single_edge_leaves_edgeless_child():
    child = _pinned_checks(fx(EDGE), "a", "b")
    assert not child.edges and len(child.lab) == 2


def test_pin_c4_leaves_p4():
    child = _pinned_checks(expr_of(cycle(4)), "v0", "v1")
    assert len(child.edges) == 3


def test_pin_missing_edge_rejected():
    with pytest.raises(ValueError):
        FW.pin_edge_expression(FW.as_reduced_glue(expr_of(path(3))), "v0", "v2")


def test_unreduced_glue_rejected():
    e = P("(j1,2(a<1> ~ b<2>) ~ j1,2(a<1> ~ b<2>))", "glue")
    with pytest.raises(ValueError):
        FW.solve_max_cut(e)


def test_multi_input_rejected():
    with pytest.raises(ValueError):
        FW.solve("maxcut", P("a<1>", "multi"))


@pytest.mark.parametrize("seed", range(12))
def test_random_instances_match_brute_force(seed):
    e = O.gen_instance("fuse", 2 + seed % 2, seed)
    g = X.evaluate(e)
    rg = FW.as_reduced_glue(e)
    assert FW.solve_max_cut(rg) == O.brute_force("maxcut", g)
    assert FW.solve_eds(rg) == O.brute_force("eds", g)
    assert FW.solve_hamiltonian_cycle(rg) == O.brute_force("hc", g)


def test_report_lines():
    rep = FW.solve("maxcut", expr_of(complete(3)))
    lines = rep.lines()
    assert lines[0] == "answer 2"
    assert lines[1].startswith("max-table ")
    assert FW.solve("hc", expr_of(star(3))).lines()[0] == "answer false"
