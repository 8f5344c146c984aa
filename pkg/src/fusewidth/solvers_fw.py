"""Exact solvers on reduced glue expressions: Max Cut, Edge Dominating Set, Hamiltonian Cycle.

Tables are keyed per label. Glue nodes need to know which labels hold the
shared (glue) vertices: on those labels both operands describe the same
single vertex, elsewhere the operands are disjoint and counts add up.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

from . import expr as X
from . import rewrite as R
from .expr import Expression
from .graph_core import LabeledGraph, edge
from .repsets import PathPacking, family_bound, is_path_packing, reduce_family


@dataclass
class SolveReport:
    answer: object
    seed: int | None = None
    max_table: int = 0
    certificate: object = None
    stats: dict = field(default_factory=dict)

    def lines(self) -> list[str]:
        out = [f"answer {format_answer(self.answer)}"]
        if self.seed is not None:
            out.append(f"seed {self.seed}")
        out.append(f"max-table {self.max_table}")
        return out


def format_answer(a) -> str:
    if a is None:
        return "none"
    if isinstance(a, bool):
        return "true" if a else "false"
    return str(a)


def as_reduced_glue(e: Expression) -> Expression:
    """Reduced glue form of a clique, fuse or glue expression."""
    if e.dialect in ("fuse", "clique"):
        return R.fuse_to_reduced_glue(e)
    if e.dialect == "glue":
        return R.glue_to_reduced_glue(e)
    raise ValueError(f"cannot run a glue solver on a {e.dialect} expression")


def _require_reduced(e: Expression) -> Expression:
    if e.dialect in ("fuse", "clique"):
        return R.fuse_to_reduced_glue(e)
    if e.dialect != "glue":
        raise ValueError(f"expected a glue expression, got {e.dialect}")
    rep = X.validate(e)
    if not rep.ok:
        raise ValueError("invalid expression:\n" + str(rep))
    bad = R.reducedness_violations(e)
    if bad:
        raise ValueError("glue expression is not reduced: " + "; ".join(bad[:3]))
    return e


def _glue_labels(a: X._G, b: X._G) -> set[int]:
    out = set()
    for t in a.lab.keys() & b.lab.keys():
        out |= a.lab[t]
    return out


def _label(g: X._G, t: str) -> int:
    (lab,) = g.lab[t]
    return lab


# ---------------------------------------------------------------------------
# Max Cut


def max_cut_tables(e: Expression) -> tuple[dict, dict]:
    """Table of every node: s-vector (vertices per label on side one) -> max crossing edges."""
    e = _require_reduced(e)
    k = e.k
    graphs = X.evaluate_all(e.root)
    tables: dict[int, dict] = {}
    for node in X.iter_postorder(e.root):
        if isinstance(node, X.Introduce):
            i = _label(graphs[id(node)], node.title) - 1
            zero = (0,) * k
            one = tuple(1 if x == i else 0 for x in range(k))
            tables[id(node)] = {zero: 0, one: 0}
        elif isinstance(node, X.Relabel):
            i, j = node.i - 1, node.j - 1
            out: dict = {}
            for s, r in tables[id(node.child)].items():
                s2 = list(s)
                s2[j] += s2[i]
                s2[i] = 0
                s2 = tuple(s2)
                if out.get(s2, -1) < r:
                    out[s2] = r
            tables[id(node)] = out
        elif isinstance(node, X.Join):
            cg = graphs[id(node.child)]
            ui, uj = len(cg.cls(node.i)), len(cg.cls(node.j))
            i, j = node.i - 1, node.j - 1
            tables[id(node)] = {
                s: r + s[i] * (uj - s[j]) + s[j] * (ui - s[i]) for s, r in tables[id(node.child)].items()
            }
        elif isinstance(node, X.Glue):
            ga, gb = graphs[id(node.left)], graphs[id(node.right)]
            glue = sorted(x - 1 for x in _glue_labels(ga, gb))
            right: dict = defaultdict(list)
            for s, r in tables[id(node.right)].items():
                right[tuple(s[x] for x in glue)].append((s, r))
            out = {}
            for s1, r1 in tables[id(node.left)].items():
                for s2, r2 in right[tuple(s1[x] for x in glue)]:
                    s = tuple(s1[x] if x in glue else s1[x] + s2[x] for x in range(k))
                    if out.get(s, -1) < r1 + r2:
                        out[s] = r1 + r2
            tables[id(node)] = out
        else:
            raise ValueError(f"unexpected {X.kind(node)} node in a glue expression")
    return tables, tables[id(e.root)]


def solve_max_cut(e: Expression, stats: dict | None = None) -> int:
    tables, root = max_cut_tables(e)
    if stats is not None:
        stats["max_table"] = max(len(t) for t in tables.values())
    return max(root.values())


# ---------------------------------------------------------------------------
# Edge Dominating Set


def eds_tables(e: Expression) -> tuple[dict, dict]:
    """Table of every node: (s-vector, r-vector) -> min number of chosen edges.

    s_i counts class-i vertices covered by chosen edges, r_i counts class-i
    vertices that a chosen edge created later must cover. Every edge of the
    current graph has an endpoint in one of the two groups.
    """
    e = _require_reduced(e)
    k = e.k
    graphs = X.evaluate_all(e.root)
    tables: dict[int, dict] = {}

    def put(out, key, val):
        if key not in out or out[key] > val:
            out[key] = val

    for node in X.iter_postorder(e.root):
        if isinstance(node, X.Introduce):
            i = _label(graphs[id(node)], node.title) - 1
            zero = (0,) * k
            one = tuple(1 if x == i else 0 for x in range(k))
            tables[id(node)] = {(zero, zero): 0, (zero, one): 0}
        elif isinstance(node, X.Relabel):
            i, j = node.i - 1, node.j - 1
            out = {}
            for (s, r), ell in tables[id(node.child)].items():
                s2, r2 = list(s), list(r)
                s2[j] += s2[i]
                r2[j] += r2[i]
                s2[i] = r2[i] = 0
                put(out, (tuple(s2), tuple(r2)), ell)
            tables[id(node)] = out
        elif isinstance(node, X.Join):
            cg = graphs[id(node.child)]
            ui, uj = len(cg.cls(node.i)), len(cg.cls(node.j))
            i, j = node.i - 1, node.j - 1
            out = {}
            for (s, r), ell in tables[id(node.child)].items():
                if ui - s[i] - r[i] > 0 and uj - s[j] - r[j] > 0:
                    continue  # an edge between two uncovered vertices
                for ai in range(r[i] + 1):
                    for aj in range(r[j] + 1):
                        if ai and aj:
                            cost = max(ai, aj)
                        elif ai:
                            if s[j] == 0:
                                continue
                            cost = ai
                        elif aj:
                            if s[i] == 0:
                                continue
                            cost = aj
                        else:
                            cost = 0
                        s2, r2 = list(s), list(r)
                        s2[i] += ai
                        r2[i] -= ai
                        s2[j] += aj
                        r2[j] -= aj
                        put(out, (tuple(s2), tuple(r2)), ell + cost)
            tables[id(node)] = out
        elif isinstance(node, X.Glue):
            ga, gb = graphs[id(node.left)], graphs[id(node.right)]
            glue = sorted(x - 1 for x in _glue_labels(ga, gb))
            right: dict = defaultdict(list)
            for (s, r), ell in tables[id(node.right)].items():
                right[tuple(s[x] | r[x] for x in glue)].append((s, r, ell))
            out = {}
            for (s1, r1), l1 in tables[id(node.left)].items():
                for s2, r2, l2 in right[tuple(s1[x] | r1[x] for x in glue)]:
                    s = [a + b for a, b in zip(s1, s2)]
                    r = [a + b for a, b in zip(r1, r2)]
                    for x in glue:
                        s[x] = s1[x] | s2[x]
                        r[x] = (r1[x] | r2[x]) & (1 - s[x])
                    put(out, (tuple(s), tuple(r)), l1 + l2)
            tables[id(node)] = out
        else:
            raise ValueError(f"unexpected {X.kind(node)} node in a glue expression")
    return tables, tables[id(e.root)]


def solve_eds(e: Expression, stats: dict | None = None) -> int:
    tables, root = eds_tables(e)
    if stats is not None:
        stats["max_table"] = max(len(t) for t in tables.values())
    return min(ell for (s, r), ell in root.items() if not any(r))


# ---------------------------------------------------------------------------
# Hamiltonian Cycle


def pin_edge_expression(e: Expression, u: str, v: str) -> Expression:
    """Reduced glue expression whose root join creates exactly the edge uv.

    u and v get the fresh labels k+1 and k+2; every join that used to give them
    edges gets a twin join on the fresh label, and the root child evaluates to
    the graph without uv.
    """
    e = _require_reduced(e)
    g = X.evaluate(e)
    if edge(u, v) not in g.edges:
        raise ValueError(f"edge {u}-{v} is not in the graph")
    k = e.k
    fresh = {u: k + 1, v: k + 2}
    top = R.to_tree(e)
    graphs = R._eval(top)
    joins = [t for t in R._pre(top) if t.kind == "join"]
    plans = []
    for t in joins:
        cg = graphs[id(t.kids[0])]
        for x, lx in fresh.items():
            if x not in cg.lab:
                continue
            (cur,) = cg.lab[x]
            if cur == t.a:
                plans.append((t, lx, t.b))
            elif cur == t.b:
                plans.append((t, lx, t.a))
    for t, lx, other in plans:
        R._insert_above(t, R._T("join", lx, other))
    for t in R._pre(top):
        if t.kind == "intro" and t.title in fresh:
            t.labels = frozenset({fresh[t.title]})
    R._insert_above(top.kids[0], R._T("join", k + 1, k + 2))
    R._reduce(top)
    out = R.from_tree(top, "glue", k + 2)
    root = out.root
    assert isinstance(root, X.Join) and {root.i, root.j} == {k + 1, k + 2}
    return out


def _augment(packing: frozenset, new_edges: list, deg: dict, find_root) -> list[frozenset]:
    """Every way of adding a subset of new_edges keeping a path packing."""
    out = []

    def go(idx: int, cur: frozenset, deg: dict, comp: dict):
        if idx == len(new_edges):
            out.append(cur)
            return
        go(idx + 1, cur, deg, comp)
        a, b = new_edges[idx]
        if deg.get(a, 0) < 2 and deg.get(b, 0) < 2 and comp[a] != comp[b]:
            d2 = dict(deg)
            d2[a] = d2.get(a, 0) + 1
            d2[b] = d2.get(b, 0) + 1
            ca, cb = comp[a], comp[b]
            c2 = {x: (ca if c == cb else c) for x, c in comp.items()}
            go(idx + 1, cur | {(a, b)}, d2, c2)

    go(0, packing, deg, find_root)
    return out


def _components(vertices, edges) -> dict:
    comp = {v: v for v in vertices}
    changed = True
    while changed:
        changed = False
        for a, b in edges:
            c = min(comp[a], comp[b])
            if comp[a] != c or comp[b] != c:
                comp[a] = comp[b] = c
                changed = True
    return comp


def _hc_families(e: Expression, stats: dict) -> dict:
    k = e.k
    graphs = X.evaluate_all(e.root)
    fams: dict[int, frozenset] = {}
    frozen = {}

    def lg(node) -> LabeledGraph:
        if id(node) not in frozen:
            frozen[id(node)] = graphs[id(node)].freeze(k)
        return frozen[id(node)]

    def reduce(node, packings) -> frozenset:
        g = lg(node)
        pp = [PathPacking(g.vertices.keys(), es, g) for es in set(packings)]
        red = reduce_family(pp, g)
        fam = frozenset(p.edges for p in red)
        stats["max_family"] = max(stats.get("max_family", 0), len(fam))
        bound = family_bound(g.n, k)
        stats["bound_ok"] = stats.get("bound_ok", True) and len(fam) <= bound
        return fam

    for node in X.iter_postorder(e.root):
        if isinstance(node, X.Introduce):
            fams[id(node)] = frozenset({frozenset()})
        elif isinstance(node, X.Relabel):
            fams[id(node)] = reduce(node, fams[id(node.child)])
        elif isinstance(node, X.Join):
            cg = graphs[id(node.child)]
            new = sorted(
                edge(a, b) for a in cg.cls(node.i) for b in cg.cls(node.j) if edge(a, b) not in cg.edges
            )
            res = []
            for p in fams[id(node.child)]:
                deg: dict = defaultdict(int)
                for a, b in p:
                    deg[a] += 1
                    deg[b] += 1
                res.extend(_augment(p, new, dict(deg), _components(cg.lab.keys(), p)))
            fams[id(node)] = reduce(node, res)
        elif isinstance(node, X.Glue):
            ga = graphs[id(node)]
            res = []
            for p1 in fams[id(node.left)]:
                for p2 in fams[id(node.right)]:
                    es = p1 | p2
                    if is_path_packing(ga.lab.keys(), es):
                        res.append(es)
            fams[id(node)] = reduce(node, res)
        else:
            raise ValueError(f"unexpected {X.kind(node)} node in a glue expression")
    return fams


def solve_hamiltonian_cycle(e: Expression, stats: dict | None = None) -> bool:
    stats = {} if stats is None else stats
    e = as_reduced_glue(e)
    g = X.evaluate(e)
    if g.n < 3:
        stats["reason"] = "fewer than three vertices"
        return False
    u = g.titles()[0]
    for v in sorted(g.neighbors(u)):
        pinned = pin_edge_expression(e, u, v)
        fams = _hc_families(pinned, stats)
        child = pinned.root.child
        for p in fams[id(child)]:
            if len(p) == g.n - 1:
                ends = PathPacking(g.vertices.keys(), p).paths()
                if len(ends) == 1 and set(ends[0]) == {u, v}:
                    stats["certificate"] = sorted(p | {edge(u, v)})
                    return True
    return False


def solve(problem: str, e: Expression) -> SolveReport:
    stats: dict = {}
    if problem == "maxcut":
        ans = solve_max_cut(e, stats)
    elif problem == "eds":
        ans = solve_eds(e, stats)
    elif problem == "hc":
        ans = solve_hamiltonian_cycle(e, stats)
        stats["max_table"] = stats.get("max_family", 0)
    else:
        raise ValueError(f"unknown problem {problem!r}")
    return SolveReport(ans, None, stats.get("max_table", 0), stats.get("certificate"), stats)
