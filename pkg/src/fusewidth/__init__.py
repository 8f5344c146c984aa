"""Labeled-graph expressions (clique, fuse, glue, multi) and width-parameterized solvers."""

import sys

from .graph_core import LabeledGraph, graphs_equal, label_class
from .expr import Expression, parse_expression, serialize_expression, validate, evaluate

# expression trees are walked recursively in a few places (parser, serializer)
if sys.getrecursionlimit() < 20000:
    sys.setrecursionlimit(20000)

__all__ = [
    "LabeledGraph",
    "graphs_equal",
    "label_class",
    "Expression",
    "parse_expression",
    "serialize_expression",
    "validate",
    "evaluate",
]
