import networkx as nx
import pytest

from fusewidth import oracle as O
from fusewidth import repsets as P
from fusewidth.graph_core import LabeledGraph
from fusewidth.repsets import AuxMultigraph, PathPacking


def lg(labels, edges, k=3):
    return LabeledGraph({t: {x} for t, x in labels.items()}, edges, k)


def test_packing_rejects_cycle_and_branching():
    g = lg({"a": 1, "b": 1, "c": 1, "d": 1}, [("a", "b"), ("b", "c"), ("a", "c"), ("b", "d")])
    with pytest.raises(P.PackingError):
        PathPacking(g.vertices.keys(), [("a", "b"), ("b", "c"), ("a", "c")], g)
    with pytest.raises(P.PackingError):
        PathPacking(g.vertices.keys(), [("a", "b"), ("b", "c"), ("b", "d")], g)


def test_single_vertex_gives_loop():
    g = lg({"a": 3}, [])
    p = PathPacking({"a"}, [], g)
    assert P.aux_multigraph(g, p).edges == ((3, 3),)


def test_path_with_equal_end_labels_gives_loop():
    g = lg({"a": 1, "b": 2, "c": 1}, [("a", "b"), ("b", "c")])
    p = PathPacking({"a", "b", "c"}, [("a", "b"), ("b", "c")], g)
    assert P.aux_multigraph(g, p).edges == ((1, 1),)


def test_two_disjoint_edges():
    g = lg({"a": 1, "b": 2, "c": 2, "d": 3}, [("a", "b"), ("c", "d")])
    p = PathPacking(g.vertices.keys(), g.edges, g)
    assert P.aux_multigraph(g, p).edges == ((1, 2), (2, 3))


def c4():
    return lg({"a": 1, "b": 2, "c": 1, "d": 2}, [("a", "b"), ("b", "c"), ("c", "d"), ("a", "d")], 2)


def test_equivalence_reflexive_and_profile_based():
    g = c4()
    p1 = PathPacking(g.vertices.keys(), [("a", "b"), ("c", "d")], g)
    p2 = PathPacking(g.vertices.keys(), [("b", "c"), ("a", "d")], g)
    assert P.packings_equivalent(p1, p1, g)
    assert P.packings_equivalent(p1, p2, g)


def test_degree_two_vs_zero_not_equivalent():
    g = lg({"a": 1, "b": 2, "c": 2}, [("a", "b"), ("a", "c")], 2)
    singles = PathPacking(g.vertices.keys(), [], g)  # loop at 1: degree 2
    through = PathPacking(g.vertices.keys(), [("a", "b"), ("a", "c")], g)  # b-a-c: degree 0 at 1
    assert P.aux_multigraph(g, singles).degree(1) == 2
    assert P.aux_multigraph(g, through).degree(1) == 0
    assert not P.packings_equivalent(singles, through, g)


def test_reduce_equivalent_pair_to_one():
    g = c4()
    p1 = PathPacking(g.vertices.keys(), [("a", "b"), ("c", "d")], g)
    p2 = PathPacking(g.vertices.keys(), [("b", "c"), ("a", "d")], g)
    assert len(P.reduce_family([p1, p2], g)) == 1


def test_reduce_empty_family():
    assert P.reduce_family([], c4()) == frozenset()


def _nx_class(g, p):
    m = nx.MultiGraph()
    m.add_nodes_from(range(1, g.k + 1))
    for a, b in p.paths():
        m.add_edge(min(g.label_of(a), g.label_of(b)), max(g.label_of(a), g.label_of(b)))
    degrees = tuple(m.degree(i) for i in range(1, g.k + 1))
    comps = frozenset(frozenset(c) for c in nx.connected_components(m))
    return degrees, comps


@pytest.mark.parametrize("labels", [(1, 2, 1, 2), (1, 1, 2, 2), (1, 2, 3, 1), (3, 2, 1, 2)])
def test_p4_class_count(labels):
    g = lg(dict(zip("abcd", labels)), [("a", "b"), ("b", "c"), ("c", "d")])
    fam = P.maximal_packings(g)
    assert len(fam) == 8
    assert len(P.reduce_family(fam, g)) == len({_nx_class(g, p) for p in fam})


@pytest.mark.parametrize(
    "red,blue,want",
    [
        ([(1, 2)], [(1, 2)], True),
        ([(1, 1)], [(1, 1)], True),
        ([(1, 2)], [], False),
        ([(1, 2), (2, 3)], [(1, 3), (2, 2)], True),
        ([(1, 2), (1, 2)], [(3, 3), (3, 3)], False),
    ],
)
def test_rb_trail(red, blue, want):
    assert P.rb_trail_exists(AuxMultigraph.of(3, red), AuxMultigraph.of(3, blue)) is want


def test_rb_trail_guard():
    big = AuxMultigraph.of(2, [(1, 2)] * 7)
    with pytest.raises(ValueError):
        P.rb_trail_exists(big, big)


def test_glue_longer_path():
    p1 = PathPacking({"a", "v"}, [("a", "v")])
    p2 = PathPacking({"v", "b"}, [("v", "b")])
    out = P.glue_packings(p1, p2)
    assert out is not None and out.paths() == [("a", "b")]


def test_glue_cycle_absent():
    p1 = PathPacking({"u", "a", "v"}, [("u", "a"), ("a", "v")])
    p2 = PathPacking({"u", "b", "v"}, [("u", "b"), ("b", "v")])
    assert P.glue_packings(p1, p2) is None


def test_glue_degree_three_absent():
    p1 = PathPacking({"a", "v", "b"}, [("a", "v"), ("v", "b")])
    p2 = PathPacking({"v", "c"}, [("v", "c")])
    assert P.glue_packings(p1, p2) is None


def test_representativity_small_graphs():
    blues = P.blue_multigraphs(2, 4)
    for seed in range(6):
        g = O.random_graph(4 + seed % 3, 0.5, seed, 2)
        fam = P.maximal_packings(g)
        assert P.representativity_violations(g, fam, blues) == []
        assert len(P.reduce_family(fam, g)) <= P.family_bound(g.n, 2)


def test_blue_enumeration_counts():
    # multisets of size <= 4 drawn from the 3 label pairs on two labels
    assert len(P.blue_multigraphs(2, 4)) == 1 + 3 + 6 + 10 + 15
