"""Brute-force reference solvers and seeded random generators.

Everything here is plain enumeration; it exists so the real solvers can be
checked against something that is obviously right.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from . import expr as X
from .expr import Expression
from .graph_core import LabeledGraph, edge

GUARD_N = 12

PROBLEMS = ("maxcut", "eds", "hc", "ds", "chromatic", "qcolor", "cvc", "cds")

DEFAULT_WEIGHTS = {
    "introduce": 1.0,
    "unary": 1.5,
    "binary": 1.0,
    "join": 3.0,
    "relabel": 1.0,
    "fuse": 1.0,
    "relabel_empty": 0.3,
    "multi_label": 0.2,
    "join_scale": 0.0,
    "relabel_pair": 0.5,
    "fresh_joins": 0.0,
}


class GuardError(ValueError):
    """Instance too large for exhaustive enumeration."""


# ---------------------------------------------------------------------------
# generators


@dataclass(frozen=True)
class GenConfig:
    dialect: str
    k: int
    budget: int
    seed: int
    weights: dict = field(default_factory=dict)
    max_vertices: int | None = None

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.budget < 1:
            raise ValueError("budget must be at least 1")
        if self.dialect not in X.ALLOWED:
            raise ValueError(f"unknown dialect {self.dialect!r}")

    def weight(self, key: str) -> float:
        return self.weights.get(key, DEFAULT_WEIGHTS[key])


def _rename_titles(node: X.Node, old: str, new: str) -> X.Node:
    out: dict[int, X.Node] = {}
    for n in X.iter_postorder(node):
        if isinstance(n, X.Introduce):
            out[id(n)] = X.Introduce(new, n.labels) if n.title == old else n
        else:
            out[id(n)] = X.with_children(n, [out[id(c)] for c in n.children])
    return out[id(node)]


def _pick(rng: random.Random, options: list[tuple[float, object]]):
    options = [(w, o) for w, o in options if w > 0]
    total = sum(w for w, _ in options)
    r = rng.random() * total
    for w, o in options:
        r -= w
        if r < 0:
            return o
    return options[-1][1]


def _unary_options(cfg: GenConfig, g: X._G, rng: random.Random) -> list[tuple[float, X.Node]]:
    k = cfg.k
    used = sorted(set().union(*g.lab.values())) if g.lab else []
    out = []
    if k >= 2:
        pairs = [(i, j) for i in used for j in used if i < j]
        if cfg.dialect == "multi":
            pairs = [(i, j) for i, j in pairs if not (set(g.cls(i)) & set(g.cls(j)))]
        if cfg.weight("fresh_joins") > 0:
            pairs = [(i, j) for i, j in pairs if any(edge(a, b) not in g.edges for a in g.cls(i) for b in g.cls(j))]
        if pairs:
            i, j = rng.choice(pairs)
            # join_scale > 0 favours joins on larger subgraphs (denser results)
            scale = 1.0 + cfg.weight("join_scale") * (len(g.lab) - 1)
            out.append((cfg.weight("join") * scale, X.Join(i, j, None)))
        if cfg.dialect != "multi" and used:
            i = rng.choice(used)
            j = rng.choice([x for x in range(1, k + 1) if x != i])
            out.append((cfg.weight("relabel"), X.Relabel(i, j, None)))
    if cfg.dialect == "multi" and used:
        i = rng.choice(used)
        if rng.random() < cfg.weight("relabel_empty") / (1.0 + cfg.weight("relabel_empty")):
            targets: tuple[int, ...] = ()
        else:
            size = 2 if k >= 2 and rng.random() < cfg.weight("relabel_pair") else 1
            targets = tuple(sorted(rng.sample(range(1, k + 1), size)))
        if targets != (i,):
            out.append((cfg.weight("relabel"), X.RelabelSet(i, targets, None)))
    if cfg.dialect == "fuse":
        multi = [x for x in used if len(g.cls(x)) >= 2]
        if multi:
            out.append((cfg.weight("fuse"), X.Fuse(rng.choice(multi), None)))
    return out


def _glue_pair(rng: random.Random, left, right):
    """Make the right operand share some uniquely-labeled vertices with the left one."""
    (ln, lg), (rn, rg) = left, right
    candidates = []
    for x in sorted(set().union(*lg.lab.values()) if lg.lab else ()):
        lc, rc = lg.cls(x), rg.cls(x)
        if len(lc) == 1 and len(rc) == 1 and lg.lab[lc[0]] == rg.lab[rc[0]] == frozenset({x}):
            candidates.append((lc[0], rc[0]))
    rng.shuffle(candidates)
    for v1, v2 in candidates[: rng.randint(0, len(candidates))]:
        rn = _rename_titles(rn, v2, v1)
    rg = X.evaluate_all(rn)[id(rn)]
    return X.Glue(ln, rn), X.step(X.Glue(None, None), [lg, rg])


def gen_expression(cfg: GenConfig) -> Expression:
    """A random valid expression with at most ``cfg.budget`` nodes."""
    rng = random.Random(cfg.seed)
    stack: list[tuple[X.Node, X._G]] = []
    used = 0
    nverts = 0
    while True:
        rem = cfg.budget - used
        moves = []
        can_intro = rem >= len(stack) + 1 and (cfg.max_vertices is None or nverts < cfg.max_vertices)
        if can_intro:
            moves.append((cfg.weight("introduce"), "introduce"))
        unary = []
        if stack and rem >= len(stack):
            unary = _unary_options(cfg, stack[-1][1], rng)
            if unary:
                moves.append((cfg.weight("unary"), "unary"))
        if len(stack) >= 2:
            moves.append((cfg.weight("binary") * (3 if rem <= len(stack) else 1), "binary"))
        if not moves:
            break
        move = _pick(rng, moves)
        used += 1
        if move == "introduce":
            title = f"v{nverts}"
            nverts += 1
            labels = [rng.randint(1, cfg.k)]
            if cfg.dialect == "multi" and cfg.k >= 2 and rng.random() < cfg.weight("multi_label"):
                labels = sorted(rng.sample(range(1, cfg.k + 1), 2))
            node = X.Introduce(title, tuple(labels))
            stack.append((node, X.step(node, [])))
        elif move == "unary":
            proto = _pick(rng, unary)
            child, g = stack.pop()
            node = X.with_children(proto, [child])
            stack.append((node, X.step(proto, [g])))
        else:
            right = stack.pop()
            left = stack.pop()
            if cfg.dialect == "glue":
                stack.append(_glue_pair(rng, left, right))
            else:
                node = X.Union(left[0], right[0])
                stack.append((node, X.step(X.Union(None, None), [left[1], right[1]])))
    assert len(stack) == 1
    e = X.make_expression(cfg.dialect, stack[0][0], cfg.k)
    rep = X.validate(e)
    assert rep.ok, str(rep)
    return e


# denser graphs for solver cross-checks
SOLVER_WEIGHTS = {
    "join": 3.0,
    "join_scale": 2.0,
    "fuse": 3.0,
    "relabel_pair": 0.2,
    "multi_label": 0.05,
    "fresh_joins": 1.0,
}


def gen_instance(dialect: str, k: int, seed: int, n_min: int = 4, n_max: int = 9, budget: int = 50) -> Expression:
    """A generated expression whose graph has between n_min and n_max vertices.

    Sub-seeds ``seed * 1000 + attempt`` are tried in order, so the result is
    a deterministic function of the arguments.
    """
    for attempt in range(1000):
        # fuses merge vertices, so only fuse expressions may overshoot the cap
        cap = n_max + 3 if dialect == "fuse" else n_min + (seed + attempt) % (n_max - n_min + 1)
        cfg = GenConfig(dialect, k, budget, seed * 1000 + attempt, SOLVER_WEIGHTS, max_vertices=cap)
        e = gen_expression(cfg)
        n = len(X.evaluate_all(e.root)[id(e.root)].lab)
        if n_min <= n <= n_max:
            return e
    raise RuntimeError("no instance of the requested size found")


def random_graph(n: int, p: float, seed: int, k: int = 1) -> LabeledGraph:
    rng = random.Random(seed)
    titles = [f"v{i}" for i in range(n)]
    edges = [(a, b) for a, b in itertools.combinations(titles, 2) if rng.random() < p]
    labels = {t: frozenset({rng.randint(1, k)}) for t in titles}
    return LabeledGraph(labels, frozenset(edges), k)


# ---------------------------------------------------------------------------
# brute force


def _guard(g: LabeledGraph):
    if g.n > GUARD_N:
        raise GuardError(f"brute force refuses graphs with more than {GUARD_N} vertices (got {g.n})")


def _connected(g: LabeledGraph, verts) -> bool:
    verts = set(verts)
    if not verts:
        return True
    start = next(iter(verts))
    seen = {start}
    todo = [start]
    while todo:
        v = todo.pop()
        for w in g.neighbors(v):
            if w in verts and w not in seen:
                seen.add(w)
                todo.append(w)
    return seen == verts


def _subsets_by_size(items):
    for size in range(len(items) + 1):
        yield from itertools.combinations(items, size)


def _maxcut(g: LabeledGraph) -> int:
    ts = g.titles()
    if not ts:
        return 0
    best = 0
    for bits in range(1 << (len(ts) - 1)):
        side = {t for n, t in enumerate(ts[1:]) if bits >> n & 1}
        best = max(best, sum((a in side) != (b in side) for a, b in g.edges))
    return best


def _eds(g: LabeledGraph) -> int:
    es = sorted(g.edges)
    for s in _subsets_by_size(es):
        cov = {v for e in s for v in e}
        if all(a in cov or b in cov for a, b in es):
            return len(s)
    raise AssertionError("unreachable")


def _hc(g: LabeledGraph) -> bool:
    ts = g.titles()
    n = len(ts)
    if n < 3:
        return False
    start = ts[0]

    def dfs(v, seen, depth):
        if depth == n:
            return start in g.neighbors(v)
        for w in sorted(g.neighbors(v)):
            if w not in seen:
                seen.add(w)
                if dfs(w, seen, depth + 1):
                    return True
                seen.discard(w)
        return False

    return dfs(start, {start}, 1)


def _dominates(g: LabeledGraph, s) -> bool:
    s = set(s)
    return all(v in s or (g.neighbors(v) & s) for v in g.titles())


def _ds(g: LabeledGraph) -> int:
    for s in _subsets_by_size(g.titles()):
        if _dominates(g, s):
            return len(s)
    raise AssertionError("unreachable")


def _colorings(g: LabeledGraph, q: int) -> int:
    ts = g.titles()
    pos = {t: n for n, t in enumerate(ts)}
    count = 0
    for col in itertools.product(range(q), repeat=len(ts)):
        if all(col[pos[a]] != col[pos[b]] for a, b in g.edges):
            count += 1
    return count


def _chromatic(g: LabeledGraph) -> int:
    if g.n == 0:
        return 0
    q = 1
    while _colorings(g, q) == 0:
        q += 1
    return q


def _covers(g: LabeledGraph, s) -> bool:
    s = set(s)
    return all(a in s or b in s for a, b in g.edges)


def _cvc(g: LabeledGraph) -> int | None:
    for s in _subsets_by_size(g.titles()):
        if _covers(g, s) and _connected(g, s):
            return len(s)
    return None


def _cds(g: LabeledGraph) -> int | None:
    if g.n == 0 or not g.is_connected():
        return None
    for s in _subsets_by_size(g.titles()):
        if s and _dominates(g, s) and _connected(g, s):
            return len(s)
    raise AssertionError("unreachable")


def brute_force(problem: str, g: LabeledGraph, params: dict | None = None):
    """Exact answer by exhaustive enumeration (refuses graphs above the size guard)."""
    params = params or {}
    _guard(g)
    if problem == "maxcut":
        return _maxcut(g)
    if problem == "eds":
        return _eds(g)
    if problem == "hc":
        return _hc(g)
    if problem == "ds":
        return _ds(g)
    if problem == "chromatic":
        return _chromatic(g)
    if problem == "qcolor":
        if "q" not in params:
            raise ValueError("qcolor needs the parameter q")
        return _colorings(g, int(params["q"]))
    if problem == "cvc":
        return _cvc(g)
    if problem == "cds":
        return _cds(g)
    raise ValueError(f"unknown problem {problem!r}")


def count_consistent_cuts_mod2(g: LabeledGraph, ctx, constraint: str, c: int, w: int) -> int:
    """Parity of the consistent cuts (L, R) of size c and weight w.

    ``ctx`` provides the pinned vertex ``v_star`` and the vertex weights
    ``weights``; L contains v*, no edge joins L and R, and L u R is a dominating
    set or a vertex cover depending on ``constraint``.
    """
    _guard(g)
    if constraint not in ("dominating", "vertex-cover"):
        raise ValueError(f"unknown constraint {constraint!r}")
    ok = _dominates if constraint == "dominating" else _covers
    vs = ctx.v_star
    others = [t for t in g.titles() if t != vs]
    parity = 0
    for rest in itertools.combinations(others, c - 1) if c >= 1 else ():
        sol = (vs,) + rest
        if sum(ctx.weights[t] for t in sol) != w or not ok(g, sol):
            continue
        for bits in range(1 << len(rest)):
            left = {vs} | {t for n, t in enumerate(rest) if bits >> n & 1}
            right = set(sol) - left
            if not any((a in left and b in right) or (a in right and b in left) for a, b in g.edges):
                parity ^= 1
    return parity


def linear_expression(g: LabeledGraph, order=None) -> Expression:
    """A clique expression for ``g`` adding one vertex at a time.

    Processed vertices share a label exactly when they have the same
    neighbors among the vertices still to come, so the label count stays
    small on paths, cycles, stars and cliques. Labels of ``g`` are ignored.
    """
    order = list(order) if order is not None else g.titles()
    if not order:
        raise ValueError("the empty graph has no expression")
    pos = {t: n for n, t in enumerate(order)}
    root: X.Node | None = None
    classes: dict[frozenset, int] = {}  # future neighborhood -> label
    k = 1
    for n, v in enumerate(order):
        free = min(x for x in range(1, len(classes) + 2) if x not in classes.values())
        leaf: X.Node = X.Introduce(v, (free,))
        root = leaf if root is None else X.Union(root, leaf)
        for sig, lab in sorted(classes.items(), key=lambda kv: kv[1]):
            if v in sig:
                root = X.Join(min(lab, free), max(lab, free), root)
        later = {t for t in order if pos[t] > n}
        merged: dict[frozenset, int] = {}
        items = sorted(classes.items(), key=lambda kv: kv[1]) + [(frozenset(g.neighbors(v)), free)]
        for sig, lab in items:
            key = frozenset(sig) & later
            if key in merged:
                root = X.Relabel(lab, merged[key], root)
            else:
                merged[key] = lab
        classes = merged
        k = max(k, free)
    return X.make_expression("clique", root, k)
