"""Path packings, their label-level shadows, and representative families.

A path packing of a graph is a subgraph whose components are paths; it is
maximal when it spans every vertex. Its auxiliary multigraph lives on the
labels: one edge per path, between the labels of the path's two endpoints
(a loop for a single-vertex path or equal endpoint labels).
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache

from .graph_core import LabeledGraph, edge

RB_GUARD = 12


class PackingError(ValueError):
    pass


@dataclass(frozen=True)
class PathPacking:
    vertices: frozenset[str]
    edges: frozenset[tuple[str, str]]
    host: LabeledGraph | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "vertices", frozenset(self.vertices))
        object.__setattr__(self, "edges", frozenset(edge(*e) for e in self.edges))
        if not is_path_packing(self.vertices, self.edges):
            raise PackingError("components are not all paths")
        if self.host is not None:
            if not self.vertices <= self.host.vertices.keys():
                raise PackingError("packing uses vertices outside the host")
            if not self.edges <= self.host.edges:
                raise PackingError("packing uses edges outside the host")

    def is_maximal(self) -> bool:
        return self.host is not None and self.vertices == self.host.vertices.keys()

    def paths(self) -> list[tuple[str, str]]:
        """Endpoint pairs of the components (a single vertex gives (v, v))."""
        adj: dict[str, list[str]] = {v: [] for v in self.vertices}
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        seen: set[str] = set()
        out = []
        for v in sorted(self.vertices):
            if v in seen or len(adj[v]) == 2:
                continue
            # v is an endpoint; walk to the other end
            seen.add(v)
            prev, cur = None, v
            while True:
                nxt = [w for w in adj[cur] if w != prev]
                if not nxt:
                    break
                prev, cur = cur, nxt[0]
                seen.add(cur)
            out.append((v, cur))
        return out

    def key(self) -> tuple:
        return tuple(sorted(self.edges))


def is_path_packing(vertices, edges) -> bool:
    """Every component a path: degrees at most 2 and no cycle."""
    parent = {v: v for v in vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    deg: Counter = Counter()
    for a, b in edges:
        if a not in parent or b not in parent:
            return False
        deg[a] += 1
        deg[b] += 1
        if deg[a] > 2 or deg[b] > 2:
            return False
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        parent[ra] = rb
    return True


@dataclass(frozen=True)
class AuxMultigraph:
    k: int
    edges: tuple[tuple[int, int], ...]  # sorted multiset of sorted label pairs

    @staticmethod
    def of(k: int, pairs) -> "AuxMultigraph":
        return AuxMultigraph(k, tuple(sorted((min(a, b), max(a, b)) for a, b in pairs)))

    def degree(self, i: int) -> int:
        return sum((a == i) + (b == i) for a, b in self.edges)

    def degrees(self) -> tuple[int, ...]:
        return tuple(self.degree(i) for i in range(1, self.k + 1))

    def components(self) -> frozenset[frozenset[int]]:
        """Connected components over the labels 1..k (isolated labels are singletons)."""
        parent = list(range(self.k + 1))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in self.edges:
            parent[find(a)] = find(b)
        groups: dict[int, set[int]] = {}
        for i in range(1, self.k + 1):
            groups.setdefault(find(i), set()).add(i)
        return frozenset(frozenset(s) for s in groups.values())

    def dump(self) -> str:
        return " ".join(f"{a}-{b}" for a, b in self.edges)


def aux_multigraph(g: LabeledGraph, p: PathPacking) -> AuxMultigraph:
    if not p.vertices <= g.vertices.keys() or not p.edges <= g.edges:
        raise PackingError("packing is not a subgraph of the graph")
    return AuxMultigraph.of(g.k, [(g.label_of(a), g.label_of(b)) for a, b in p.paths()])


def signature(g: LabeledGraph, p: PathPacking) -> tuple:
    aux = aux_multigraph(g, p)
    return aux.degrees(), aux.components()


def packings_equivalent(p1: PathPacking, p2: PathPacking, g: LabeledGraph) -> bool:
    return signature(g, p1) == signature(g, p2)


def reduce_family(family, g: LabeledGraph) -> frozenset[PathPacking]:
    """One representative (the least edge set) per equivalence class."""
    best: dict[tuple, PathPacking] = {}
    for p in family:
        s = signature(g, p)
        if s not in best or p.key() < best[s].key():
            best[s] = p
    return frozenset(best.values())


def family_bound(n: int, k: int) -> float:
    return n**k * 2 ** (k * (math.log2(k) + 1))


def maximal_packings(g: LabeledGraph) -> list[PathPacking]:
    """All spanning path packings (exhaustive; small graphs only)."""
    es = sorted(g.edges)
    out = []
    for size in range(len(es) + 1):
        for sub in itertools.combinations(es, size):
            if is_path_packing(g.vertices.keys(), sub):
                out.append(PathPacking(g.vertices.keys(), sub, g))
    return out


def rb_trail_exists(red: AuxMultigraph, blue: AuxMultigraph) -> bool:
    """Closed walk through every edge once, alternating red and blue (exhaustive)."""
    total = len(red.edges) + len(blue.edges)
    if total > RB_GUARD:
        raise ValueError(f"red-blue trail oracle refuses more than {RB_GUARD} edges (got {total})")
    if len(red.edges) != len(blue.edges):
        return False
    if total == 0:
        return True
    edges = [(a, b, 0) for a, b in red.edges] + [(a, b, 1) for a, b in blue.edges]
    full = (1 << total) - 1

    def search(start: int) -> bool:
        @lru_cache(maxsize=None)
        def go(cur: int, color: int, used: int) -> bool:
            if used == full:
                return cur == start
            for n, (a, b, c) in enumerate(edges):
                if c != color or used >> n & 1:
                    continue
                for x, y in ((a, b), (b, a)):
                    if x == cur and go(y, 1 - color, used | 1 << n):
                        return True
            return False

        a, b, _ = edges[0]
        return go(b, 1, 1) if start == a else go(a, 1, 1)

    a, b, _ = edges[0]
    # the trail can start with red edge 0, in either direction
    return search(a) or search(b)


def glue_packings(p1: PathPacking, p2: PathPacking) -> PathPacking | None:
    """Union of two packings of glued graphs, if it is still a path packing."""
    verts = p1.vertices | p2.vertices
    edges = p1.edges | p2.edges
    if not is_path_packing(verts, edges):
        return None
    host = None
    if p1.host is not None and p2.host is not None:
        lab = dict(p1.host.vertices)
        lab.update(p2.host.vertices)
        host = LabeledGraph(lab, p1.host.edges | p2.host.edges, max(p1.host.k, p2.host.k))
    return PathPacking(verts, edges, host)


def blue_multigraphs(k: int, max_edges: int) -> list[AuxMultigraph]:
    """Every multigraph on labels 1..k with at most ``max_edges`` edges (loops allowed)."""
    pairs = [(a, b) for a in range(1, k + 1) for b in range(a, k + 1)]
    out = []
    for size in range(max_edges + 1):
        for combo in itertools.combinations_with_replacement(pairs, size):
            out.append(AuxMultigraph.of(k, combo))
    return out


def representativity_violations(g: LabeledGraph, family, blues) -> list[str]:
    """Blue multigraphs for which the reduced family disagrees with the full one."""
    family = list(family)
    reduced = reduce_family(family, g)
    reds = [aux_multigraph(g, p) for p in family]
    kept = {aux_multigraph(g, p) for p in reduced}
    out = []
    for blue in blues:
        full = any(len(r.edges) == len(blue.edges) and rb_trail_exists(r, blue) for r in set(reds))
        red = any(len(r.edges) == len(blue.edges) and rb_trail_exists(r, blue) for r in kept)
        if full != red:
            out.append(f"blue [{blue.dump()}]: full family {full}, reduced {red}")
    return out
