"""Small named graphs and expressions shared by the test modules."""

import itertools

from fusewidth import oracle as O
from fusewidth.graph_core import graph_from_edges


def path(n):
    return graph_from_edges([(f"v{i}", f"v{i + 1}") for i in range(n - 1)], [f"v{i}" for i in range(n)])


def cycle(n):
    return graph_from_edges([(f"v{i}", f"v{(i + 1) % n}") for i in range(n)])


def complete(n):
    vs = [f"v{i}" for i in range(n)]
    return graph_from_edges(list(itertools.combinations(vs, 2)), vs)


def star(leaves):
    return graph_from_edges([("c", f"x{i}") for i in range(leaves)])


def edgeless(n):
    return graph_from_edges([], [f"v{i}" for i in range(n)])


def expr_of(g):
    return O.linear_expression(g)
