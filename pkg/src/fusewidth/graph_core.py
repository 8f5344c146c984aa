"""Labeled graphs: titled vertices carrying label sets, simple undirected edges."""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping


def edge(a: str, b: str) -> tuple[str, str]:
    """Canonical (sorted) form of an undirected edge."""
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class LabeledGraph:
    vertices: Mapping[str, frozenset[int]]
    edges: frozenset[tuple[str, str]]
    k: int = 1
    _adj: Mapping[str, frozenset[str]] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        verts = {t: frozenset(ls) for t, ls in self.vertices.items()}
        edges = frozenset(edge(*e) for e in self.edges)
        if self.k < 1:
            raise ValueError(f"k must be positive, got {self.k}")
        for t, ls in verts.items():
            bad = [x for x in ls if not 1 <= x <= self.k]
            if bad:
                raise ValueError(f"vertex {t!r} has labels {sorted(bad)} outside 1..{self.k}")
        adj: dict[str, set[str]] = {t: set() for t in verts}
        for a, b in edges:
            if a == b:
                raise ValueError(f"self-loop at {a!r}")
            if a not in verts or b not in verts:
                raise ValueError(f"edge {a}-{b} has an endpoint that is not a vertex")
            adj[a].add(b)
            adj[b].add(a)
        object.__setattr__(self, "vertices", MappingProxyType(verts))
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "_adj", MappingProxyType({t: frozenset(s) for t, s in adj.items()}))

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.edges)

    def titles(self) -> list[str]:
        return sorted(self.vertices)

    def neighbors(self, v: str) -> frozenset[str]:
        return self._adj[v]

    def degree(self, v: str) -> int:
        return len(self._adj[v])

    def is_single_labeled(self) -> bool:
        return all(len(ls) == 1 for ls in self.vertices.values())

    def label_of(self, v: str) -> int:
        """The unique label of v (single-label graphs only)."""
        (lab,) = self.vertices[v]
        return lab

    def nonempty_labels(self) -> set[int]:
        return set().union(*self.vertices.values()) if self.vertices else set()

    def is_connected(self) -> bool:
        if not self.vertices:
            return True
        start = next(iter(self.vertices))
        seen = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for y in self._adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == len(self.vertices)

    def without_edge(self, a: str, b: str) -> "LabeledGraph":
        return LabeledGraph(dict(self.vertices), self.edges - {edge(a, b)}, self.k)

    def with_k(self, k: int) -> "LabeledGraph":
        return LabeledGraph(dict(self.vertices), self.edges, k)


def graphs_equal(g1: LabeledGraph, g2: LabeledGraph) -> bool:
    """Title-exact equality of vertex sets, label sets and edge sets."""
    return dict(g1.vertices) == dict(g2.vertices) and g1.edges == g2.edges


def label_class(g: LabeledGraph, i: int) -> set[str]:
    if not 1 <= i <= g.k:
        raise IndexError(f"label {i} outside 1..{g.k}")
    return {t for t, ls in g.vertices.items() if i in ls}


def graph_from_edges(edges: Iterable[tuple[str, str]], vertices: Iterable[str] = (), label: int = 1) -> LabeledGraph:
    """Convenience constructor: every vertex gets the same single label."""
    edges = [edge(a, b) for a, b in edges]
    verts = set(vertices)
    for a, b in edges:
        verts.update((a, b))
    return LabeledGraph({v: frozenset({label}) for v in verts}, frozenset(edges), max(1, label))


def format_graph(g: LabeledGraph) -> str:
    lines = []
    for t, ls in g.vertices.items():
        lines.append(f"v {t} " + (",".join(map(str, sorted(ls))) if ls else "-"))
    for a, b in g.edges:
        lines.append(f"e {a} {b}")
    return "\n".join([f"k {g.k}"] + sorted(lines)) + "\n"


def parse_graph(text: str) -> LabeledGraph:
    k = None
    verts: dict[str, frozenset[int]] = {}
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            if parts[0] == "k" and len(parts) == 2:
                k = int(parts[1])
            elif parts[0] == "v" and len(parts) == 3:
                labs = frozenset() if parts[2] == "-" else frozenset(int(x) for x in parts[2].split(","))
                if parts[1] in verts:
                    raise ValueError(f"duplicate vertex {parts[1]!r}")
                verts[parts[1]] = labs
            elif parts[0] == "e" and len(parts) == 3:
                edges.append((parts[1], parts[2]))
            else:
                raise ValueError(f"unrecognized record {line!r}")
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    if k is None:
        k = max((max(ls) for ls in verts.values() if ls), default=1)
    return LabeledGraph(verts, frozenset(edge(a, b) for a, b in edges), k)
