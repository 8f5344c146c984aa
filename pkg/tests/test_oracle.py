from pathlib import Path

import pytest

from fusewidth import expr as X
from fusewidth import oracle as O
from fusewidth.graph_core import LabeledGraph, graph_from_edges
from fusewidth.solvers_mcw import CutCountContext

from helpers import complete, cycle, edgeless, path, star

FIXTURES = Path(__file__).parent / "fixtures"


def petersen():
    outer = [(f"o{i}", f"o{(i + 1) % 5}") for i in range(5)]
    inner = [(f"i{i}", f"i{(i + 2) % 5}") for i in range(5)]
    spokes = [(f"o{i}", f"i{i}") for i in range(5)]
    return graph_from_edges(outer + inner + spokes)


def petersen_minus_vertex():
    g = petersen()
    return LabeledGraph({t: g.vertices[t] for t in g.vertices if t != "o0"}, [e for e in g.edges if "o0" not in e], 1)


def test_golden_expression():
    e = O.gen_expression(O.GenConfig("fuse", 3, 20, 7))
    assert X.serialize_expression(e) == (FIXTURES / "gen_fuse_k3_seed7.fx").read_text().strip()


def test_budget_one_is_single_introduce():
    e = O.gen_expression(O.GenConfig("fuse", 2, 1, 3))
    assert isinstance(e.root, X.Introduce)


def test_no_empty_relabels_without_weight():
    for seed in range(30):
        e = O.gen_expression(O.GenConfig("multi", 3, 30, seed, {"relabel_empty": 0.0}))
        assert all(labels for labels in X.evaluate(e).vertices.values())
        assert not any(isinstance(n, X.RelabelSet) and not n.targets for n in X.iter_preorder(e.root))


@pytest.mark.parametrize("dialect", X.DIALECTS)
def test_generated_expressions_validate(dialect):
    kinds = set()
    for seed in range(40):
        e = O.gen_expression(O.GenConfig(dialect, 1 + seed % 3, 30, seed))
        assert X.validate(e).ok
        kinds |= {X.kind(n) for n in X.iter_preorder(e.root)}
    assert kinds == set(X.ALLOWED[dialect])


def test_generation_is_deterministic():
    a = O.gen_expression(O.GenConfig("glue", 3, 30, 11))
    b = O.gen_expression(O.GenConfig("glue", 3, 30, 11))
    assert a == b


def test_instances_in_size_window():
    for seed in range(10):
        g = X.evaluate(O.gen_instance("multi", 2, seed))
        assert 4 <= g.n <= 9


@pytest.mark.parametrize(
    "problem,graph,want",
    [
        ("maxcut", cycle(5), 4),
        ("chromatic", complete(4), 4),
        ("chromatic", edgeless(3), 1),
        ("hc", petersen(), False),
        ("hc", petersen_minus_vertex(), True),
        ("eds", path(4), 1),
        ("ds", star(4), 1),
        ("cvc", path(3), 1),
        ("cds", path(4), 2),
    ],
)
def test_brute_force_values(problem, graph, want):
    assert O.brute_force(problem, graph) == want


def test_guard():
    with pytest.raises(O.GuardError):
        O.brute_force("ds", edgeless(13))


def test_cvc_cds_edge_cases():
    assert O.brute_force("cvc", edgeless(3)) == 0
    two_edges = graph_from_edges([("a", "b"), ("c", "d")])
    assert O.brute_force("cvc", two_edges) is None
    assert O.brute_force("cds", two_edges) is None


def test_cut_parity_single_candidate():
    g = graph_from_edges([("a", "b")])
    ctx = CutCountContext(v_star="a", weights={"a": 3, "b": 1})
    assert O.count_consistent_cuts_mod2(g, ctx, "dominating", 1, 3) == 1
    assert O.count_consistent_cuts_mod2(g, ctx, "dominating", 1, 1) == 0


def test_cut_parity_zero_size():
    ctx = CutCountContext(v_star="v0", weights={t: 1 for t in cycle(4).titles()})
    assert O.count_consistent_cuts_mod2(cycle(4), ctx, "vertex-cover", 0, 0) == 0


def test_cut_parity_c4_covers():
    # the only 2-cover with v0 is {v0, v2}; its two vertices are not adjacent,
    # so v2 may sit on either side: two cuts, even parity
    g = cycle(4)
    ctx = CutCountContext(v_star="v0", weights={t: 1 for t in g.titles()})
    assert O.count_consistent_cuts_mod2(g, ctx, "vertex-cover", 2, 2) == 0


def test_random_graph_reproducible():
    assert O.random_graph(7, 0.4, 5, 2) == O.random_graph(7, 0.4, 5, 2)


def test_linear_expression_builds_graph():
    for g in (cycle(5), complete(4), star(4), path(4)):
        h = X.evaluate(O.linear_expression(g))
        assert set(h.vertices) == set(g.vertices) and h.edges == g.edges
