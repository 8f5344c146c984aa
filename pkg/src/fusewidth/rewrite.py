"""Expression rewriting: the fuse-pushing rules and the conversion pipelines.

fuse  --shift/localize-->  fuse (every fuse sits on a union, merges two vertices)
      --fuse_to_glue-->    glue
      --reduce_glue-->     reduced glue (P1 no join recreates an edge, P2 glued
                           operands edge-disjoint, P3 glue vertices have edges
                           on both sides)
fuse  --fuse_to_multi-->   multi over k+1 labels
multi --normalize_multi--> relabels are i->{} or i->{i,j}, one label per introduce

All work happens on a mutable tree (``_T``); the public functions convert from
and back to immutable ``Expression`` values, so node ids are regenerated after
every stage.
"""

from __future__ import annotations

from typing import Iterable

from . import expr as X
from .expr import Expression, _G
from .graph_core import edge

# node-count constants for the size bounds (see README)
C1 = 10  # reduced glue:     nodes <= C1 * k^2 * (m + n)
C2 = 10  # normalized multi: nodes <= C2 * k^2 * n

RULES = tuple(range(1, 15))


class RuleNotApplicable(ValueError):
    pass


# ---------------------------------------------------------------------------
# mutable tree


class _T:
    __slots__ = ("kind", "a", "b", "title", "labels", "kids", "parent", "dead")

    def __init__(self, kind, a=0, b=0, title=None, labels=frozenset(), kids=()):
        self.kind = kind
        self.a = a
        self.b = b
        self.title = title
        self.labels = frozenset(labels)
        self.kids = list(kids)
        self.parent = None
        self.dead = False
        for c in self.kids:
            c.parent = self

    def __repr__(self):
        return f"_T({self.kind},{self.a},{self.b},{self.title},{sorted(self.labels)})"

    @property
    def child(self) -> "_T":
        return self.kids[0]

    def copy_op(self) -> "_T":
        """Childless copy of this node's operation."""
        return _T(self.kind, self.a, self.b, self.title, self.labels)


def _leaf(title: str, labels: Iterable[int]) -> _T:
    return _T("intro", title=title, labels=labels)


def _un(kind: str, a, b=0, child: _T | None = None) -> _T:
    return _T(kind, a, b, kids=[child] if child is not None else [])


_KIND = {
    X.Introduce: "intro", X.Union: "union", X.Glue: "glue", X.Join: "join",
    X.Relabel: "rel", X.RelabelSet: "relset", X.Fuse: "fuse",
}


def to_tree(e: Expression) -> _T:
    built: dict[int, _T] = {}
    for node in X.iter_postorder(e.root):
        kind = _KIND[type(node)]
        kids = [built[id(c)] if id(c) in built else None for c in node.children]
        if kind == "intro":
            t = _leaf(node.title, node.labels)
        elif kind in ("union", "glue"):
            t = _T(kind)
        elif kind == "relset":
            t = _T(kind, node.i, frozenset(node.targets))
        elif kind == "fuse":
            t = _T(kind, node.i)
        else:
            t = _T(kind, node.i, node.j)
        # shared immutable subtrees get distinct mutable copies
        for c in kids:
            if c.parent is not None:
                c = _clone(c)
            c.parent = t
            t.kids.append(c)
        built[id(node)] = t
    top = _T("top", kids=[built[id(e.root)]])
    return top


def _clone(t: _T) -> _T:
    c = t.copy_op()
    for k in t.kids:
        kc = _clone(k)
        kc.parent = c
        c.kids.append(kc)
    return c


def _to_node(t: _T) -> X.Node:
    out: dict[int, X.Node] = {}
    for n in _post(t):
        kids = [out[id(c)] for c in n.kids]
        if n.kind == "intro":
            out[id(n)] = X.Introduce(n.title, tuple(sorted(n.labels)))
        elif n.kind == "union":
            out[id(n)] = X.Union(*kids)
        elif n.kind == "glue":
            out[id(n)] = X.Glue(*kids)
        elif n.kind == "join":
            out[id(n)] = X.Join(n.a, n.b, kids[0])
        elif n.kind == "rel":
            out[id(n)] = X.Relabel(n.a, n.b, kids[0])
        elif n.kind == "relset":
            out[id(n)] = X.RelabelSet(n.a, tuple(sorted(n.b)), kids[0])
        elif n.kind == "fuse":
            out[id(n)] = X.Fuse(n.a, kids[0])
        else:
            raise TypeError(n.kind)
    return out[id(t)]


def from_tree(top: _T, dialect: str, k: int) -> Expression:
    return X.make_expression(dialect, _to_node(top.child), k)


def _post(t: _T) -> list[_T]:
    out = []
    stack = [t]
    while stack:
        n = stack.pop()
        out.append(n)
        stack.extend(n.kids)
    out.reverse()
    return out


def _pre(t: _T) -> list[_T]:
    out = []
    stack = [t]
    while stack:
        n = stack.pop()
        out.append(n)
        stack.extend(reversed(n.kids))
    return out


def _replace(old: _T, new: _T):
    p = old.parent
    p.kids[p.kids.index(old)] = new
    new.parent = p
    old.parent = None


def _suppress(t: _T):
    """Remove a unary node, attaching its child to its parent."""
    assert len(t.kids) == 1, t
    c = t.kids[0]
    _replace(t, c)
    t.kids = []
    t.dead = True


def _remove_leaf(leaf: _T):
    """Remove a leaf together with its binary parent."""
    p = leaf.parent
    assert p.kind in ("union", "glue"), p
    other = p.kids[1] if p.kids[0] is leaf else p.kids[0]
    _replace(p, other)
    p.kids = []
    p.dead = leaf.dead = True


def _insert_above(t: _T, new: _T):
    """Place the childless unary node ``new`` between ``t`` and its parent."""
    _replace(t, new)
    new.kids = [t]
    t.parent = new


def _swap_down(t: _T):
    """t(c(X)) -> c(t(X)) for unary t and c."""
    c = t.kids[0]
    gc = c.kids[0]
    _replace(t, c)
    c.kids = [t]
    t.parent = c
    t.kids = [gc]
    gc.parent = t


def _attached(t: _T) -> bool:
    while t.parent is not None:
        t = t.parent
    return t.kind == "top" and not t.dead


def _proxy(t: _T) -> X.Node:
    if t.kind == "intro":
        return X.Introduce(t.title, tuple(sorted(t.labels)))
    if t.kind == "union":
        return X.Union(None, None)
    if t.kind == "glue":
        return X.Glue(None, None)
    if t.kind == "join":
        return X.Join(t.a, t.b, None)
    if t.kind == "rel":
        return X.Relabel(t.a, t.b, None)
    if t.kind == "relset":
        return X.RelabelSet(t.a, tuple(sorted(t.b)), None)
    return X.Fuse(t.a, None)


def _eval(root: _T) -> dict[int, _G]:
    """Working graph of every node below (and including) ``root``."""
    out: dict[int, _G] = {}
    for n in _post(root):
        if n.kind == "top":
            out[id(n)] = out[id(n.kids[0])]
            continue
        # intermediate trees may hold fuses over empty classes (useless, removed later)
        out[id(n)] = X.step(_proxy(n), [out[id(c)] for c in n.kids], report=[])
    return out


def _useless(t: _T, g: dict[int, _G]) -> bool:
    if t.kind not in ("join", "rel", "relset", "fuse"):
        return False
    return X.is_useless(_proxy(t), g[id(t.kids[0])])


def _suppress_useless(top: _T) -> bool:
    changed = False
    while True:
        g = _eval(top)
        bad = [t for t in _pre(top) if _useless(t, g)]
        if not bad:
            return changed
        # a useless node does not change any G_t, so all of them can go at once
        for t in bad:
            _suppress(t)
        changed = True


def _height(t: _T) -> int:
    best = 0
    stack = [(t, 0)]
    while stack:
        n, d = stack.pop()
        best = max(best, d)
        stack.extend((c, d + 1) for c in n.kids)
    return best


def _plus_height(t: _T) -> int:
    """Maximum number of union/glue nodes on a downward path from t."""
    memo: dict[int, int] = {}
    for n in _post(t):
        sub = max((memo[id(c)] for c in n.kids), default=0)
        memo[id(n)] = sub + (1 if n.kind in ("union", "glue") else 0)
    return memo[id(t)]


def _is_ancestor(y: _T, x: _T) -> bool:
    x = x.parent
    while x is not None:
        if x is y:
            return True
        x = x.parent
    return False


def _map_label(label: int, t: _T) -> int:
    if t.kind == "rel" and label == t.a:
        return t.b
    return label


def _trace(label: int, x: _T, y: _T) -> int:
    """Label at y's input of the class that has ``label`` at x's output (single labels)."""
    p = x.parent
    while p is not y:
        label = _map_label(label, p)
        p = p.parent
    return label


# ---------------------------------------------------------------------------
# the fourteen rules


def _chain(t: _T) -> tuple[list[_T], _T]:
    """Maximal relabel chain rho_{a1->i} ... rho_{aq->i} directly below fuse t."""
    chain = []
    c = t.kids[0]
    while c.kind == "rel" and c.b == t.a and c.a != t.a:
        chain.append(c)
        c = c.kids[0]
    return chain, c


def _need(cond: bool, msg: str):
    if not cond:
        raise RuleNotApplicable(msg)


def _rule_1(t: _T):
    _need(t.kind == "fuse", "rule 1 needs a fuse node")
    _need(t.child.kind == "join", "rule 1 needs a join below the fuse")
    _swap_down(t)


def _rule_2(t: _T):
    _need(t.kind == "fuse", "rule 2 needs a fuse node")
    c = t.child
    _need(c.kind == "rel", "rule 2 needs a relabel below the fuse")
    _need(t.a not in (c.a, c.b), f"rule 2 needs i={t.a} outside {{{c.a},{c.b}}}")
    _swap_down(t)


def _chain_parts(t: _T, rule: int, want: str) -> tuple[list[_T], _T, set[int], set[int]]:
    _need(t.kind == "fuse", f"rule {rule} needs a fuse node")
    chain, tp = _chain(t)
    _need(tp.kind == want, f"rule {rule} needs a {want} node below the relabel chain, found {tp.kind}")
    sources = {c.a for c in chain}
    return chain, tp, sources, sources | {t.a}


def _rule_3(t: _T):
    chain, tp, src, A = _chain_parts(t, 3, "join")
    _need(tp.a in A and tp.b in A, f"rule 3 needs both join labels in {sorted(A)}")
    _suppress(tp)


def _rule_4(t: _T):
    chain, tp, src, A = _chain_parts(t, 4, "join")
    inside = [x for x in (tp.a, tp.b) if x in A]
    _need(len(inside) == 1, f"rule 4 needs exactly one join label in {sorted(A)}")
    other = tp.b if tp.a in A else tp.a
    _suppress(tp)
    _insert_above(t, _T("join", t.a, other))


def _rule_5(t: _T):
    chain, tp, src, A = _chain_parts(t, 5, "join")
    _need(tp.a not in A and tp.b not in A, f"rule 5 needs both join labels outside {sorted(A)}")
    _suppress(tp)
    tp.dead = False
    _insert_above(t, tp)


def _rule_6(t: _T):
    chain, tp, src, A = _chain_parts(t, 6, "rel")
    _need(tp.a not in A and tp.b not in A, f"rule 6 needs both relabel labels outside {sorted(A)}")
    _suppress(tp)
    tp.dead = False
    _insert_above(t, tp)


def _rule_7(t: _T):
    chain, tp, src, A = _chain_parts(t, 7, "rel")
    _need(tp.b in src, f"rule 7 needs the relabel target in {sorted(src)}")
    tp.b = t.a


def _rule_8(t: _T):
    chain, tp, src, A = _chain_parts(t, 8, "rel")
    _need(bool(chain), "rule 8 needs a nonempty relabel chain")
    _need(tp.a == t.a, f"rule 8 needs a relabel with source {t.a}")
    _need(tp.b not in A, f"rule 8 needs the relabel target outside {sorted(A)}")
    i = t.a
    a1 = chain[0].a
    _suppress(chain[0])
    chain[0].dead = False
    _insert_above(t, chain[0])  # rho_{a1->i} now sits above the fuse
    t.a = a1
    for c in chain[1:]:
        c.b = a1
    assert chain[0].b == i


def _rule_9(t: _T):
    chain, tp, src, A = _chain_parts(t, 9, "union")
    for arm in list(tp.kids):
        # copy the chain on top of the arm, first chain node outermost
        node = arm
        for c in reversed(chain):
            cp = c.copy_op()
            _insert_above(node, cp)
            node = cp
    for c in chain:
        _suppress(c)


def _rule_10(t: _T):
    chain, tp, src, A = _chain_parts(t, 10, "fuse")
    _need(tp.a in A, f"rule 10 needs the inner fuse label in {sorted(A)}")
    _suppress(tp)


def _rule_11(t: _T):
    chain, tp, src, A = _chain_parts(t, 11, "fuse")
    _need(tp.a not in A, f"rule 11 needs the inner fuse label outside {sorted(A)}")
    _suppress(tp)
    tp.dead = False
    _insert_above(t, tp)


def _rule_12(t: _T):
    _need(t.kind == "rel", "rule 12 needs a relabel node")
    c = t.child
    _need(c.kind == "intro", "rule 12 needs an introduce below the relabel")
    _need(c.labels == frozenset({t.a}), f"rule 12 needs the introduced label to be {t.a}")
    c.labels = frozenset({t.b})
    _suppress(t)


def _rule_13(t: _T):
    _need(t.kind == "join", "rule 13 needs a join node")
    c = t.child
    _need(c.kind == "rel", "rule 13 needs a relabel below the join")
    i, j = t.a, t.b
    _need(c.b in (i, j), f"rule 13 needs the relabel target in {{{i},{j}}}")
    _need(c.a not in (i, j), f"rule 13 needs the relabel source outside {{{i},{j}}}")
    other = j if c.b == i else i
    _swap_down(t)
    _insert_above(t.child, _T("join", c.a, other))


def _rule_14(t: _T):
    _need(t.kind == "join", "rule 14 needs a join node")
    c = t.child
    _need(c.kind == "rel", "rule 14 needs a relabel below the join")
    _need(c.a not in (t.a, t.b) and c.b not in (t.a, t.b),
          f"rule 14 needs relabel labels outside {{{t.a},{t.b}}}")
    _swap_down(t)


_RULE_FN = {
    1: _rule_1, 2: _rule_2, 3: _rule_3, 4: _rule_4, 5: _rule_5, 6: _rule_6, 7: _rule_7,
    8: _rule_8, 9: _rule_9, 10: _rule_10, 11: _rule_11, 12: _rule_12, 13: _rule_13, 14: _rule_14,
}


def apply_rule(e: Expression, node_id: int, rule: int) -> Expression:
    """Rewrite the node with preorder id ``node_id`` by one of the rules 1..14.

    Rules 1-11 are anchored at a fuse node, rule 12 at a relabel over an
    introduce, rules 13-14 at a join over a relabel.
    """
    if rule not in _RULE_FN:
        raise ValueError(f"unknown rule {rule}")
    top = to_tree(e)
    nodes = _pre(top.child)
    if not 0 <= node_id < len(nodes):
        raise RuleNotApplicable(f"no node with id {node_id}")
    _RULE_FN[rule](nodes[node_id])
    return from_tree(top, e.dialect, e.k)


# ---------------------------------------------------------------------------
# shifting fuses onto unions


def _fuse_ok(t: _T) -> bool:
    """Every node between t and the first union below is a fuse."""
    c = t.kids[0]
    while c.kind == "fuse":
        c = c.kids[0]
    return c.kind == "union"


class _Counter:
    def __init__(self, bound: int):
        self.bound = bound
        self.n = 0

    def tick(self):
        self.n += 1
        if self.n > self.bound:
            raise AssertionError(f"rule applications exceeded the bound {self.bound}")


def _process_fuse(t: _T, k: int) -> int:
    """Push fuse t down until it sits on a union (possibly via other fuses)."""
    # each rule lowers t or lengthens its relabel chain; rule 8 lowers t but shortens
    # the chain, so 2*height + k + 1 applications suffice
    cnt = _Counter(2 * _height(t) + k + 1)
    i_fixed = None
    while True:
        if t.dead:
            return cnt.n
        c = t.kids[0]
        i = t.a
        if c.kind in ("union", "fuse"):
            return cnt.n
        if c.kind == "intro":
            _suppress(t)  # fuses a single vertex
            return cnt.n
        if c.kind == "join":
            _rule_1(t)
            cnt.tick()
            continue
        if c.kind != "rel":
            raise AssertionError(c.kind)
        if c.a == c.b:
            _suppress(c)
            continue
        if i not in (c.a, c.b):
            _rule_2(t)
            cnt.tick()
            continue
        if c.a == i:
            _suppress(t)  # class i is emptied right below t
            return cnt.n
        chain, tp = _chain(t)
        sources = [x.a for x in chain]
        # a repeated source in the chain: the upper copy has an empty source class
        dup = next((x for n, x in enumerate(chain) if x.a in sources[n + 1:]), None)
        if dup is not None:
            _suppress(dup)
            continue
        src = set(sources)
        A = src | {i}
        if tp.kind == "join":
            if tp.a in A and tp.b in A:
                _rule_3(t)
            elif tp.a in A or tp.b in A:
                _rule_4(t)
            else:
                _rule_5(t)
            cnt.tick()
        elif tp.kind == "rel":
            if tp.a == tp.b:
                _suppress(tp)
                continue
            if tp.a not in A and tp.b not in A:
                _rule_6(t)
            elif tp.b in src:
                _rule_7(t)
                if tp.a == tp.b:
                    _suppress(tp)
            elif tp.a == i:
                _rule_8(t)
            else:
                # tp empties a source class of the chain; those chain nodes are useless
                for x in chain:
                    if x.a == tp.a:
                        _suppress(x)
                continue
            cnt.tick()
        elif tp.kind == "union":
            _rule_9(t)
            cnt.tick()
            return cnt.n
        elif tp.kind == "fuse":
            if tp.a in A:
                _rule_10(t)
            else:
                _rule_11(t)
            cnt.tick()
        elif tp.kind == "intro":
            _suppress(t)
            return cnt.n
        else:
            raise AssertionError(tp.kind)


def _shift(top: _T, k: int) -> dict:
    stats = {"rule_applications": 0, "processed": 0}
    _suppress_useless(top)
    for _ in range(100000):
        bad = [t for t in _post(top) if t.kind == "fuse" and not _fuse_ok(t)]
        if not bad:
            break
        # the first violator in postorder has no violating fuse below it
        stats["rule_applications"] += _process_fuse(bad[0], k)
        stats["processed"] += 1
        _suppress_useless(top)
    else:
        raise AssertionError("shift did not terminate")
    return stats


def _fuse_union(t: _T) -> _T:
    c = t.kids[0]
    while c.kind == "fuse":
        c = c.kids[0]
    return c


def _localize(top: _T, k: int):
    _shift(top, k)
    for _ in range(100000):
        g = _eval(top)
        bad = []
        for t in _pre(top):
            if t.kind != "fuse":
                continue
            u = _fuse_union(t)
            sizes = [len(g[id(s)].cls(t.a)) for s in u.kids]
            if max(sizes) >= 2:
                bad.append(t)
        if not bad:
            return
        t = max(bad, key=_plus_height)  # max() keeps the first (preorder) among ties
        u = _fuse_union(t)
        fresh = []
        for arm in list(u.kids):
            f = _T("fuse", t.a)
            _insert_above(arm, f)
            fresh.append(f)
        _suppress_useless(top)
        for f in fresh:
            if not f.dead and _attached(f):
                _process_fuse(f, k)
        _suppress_useless(top)
    raise AssertionError("localization did not terminate")


def _check_shifted(top: _T) -> list[str]:
    return [f"fuse {t.a} not on a union" for t in _pre(top) if t.kind == "fuse" and not _fuse_ok(t)]


def _check_local(top: _T) -> list[str]:
    out = _check_shifted(top)
    g = _eval(top)
    for t in _pre(top):
        if t.kind == "fuse":
            u = _fuse_union(t)
            sizes = [len(g[id(s)].cls(t.a)) for s in u.kids]
            if sizes != [1, 1]:
                out.append(f"fuse {t.a} merges {sizes} vertices from the two sides")
    return out


# ---------------------------------------------------------------------------
# fuse -> glue


def _rename(root: _T, old: str, new: str):
    for n in _pre(root):
        if n.kind == "intro" and n.title == old:
            n.title = new


def _to_glue(top: _T):
    unions = [t for t in _pre(top) if t.kind == "union"]
    order = sorted(range(len(unions)), key=lambda n: (_plus_height(unions[n]), n))
    for n in order:
        u = unions[n]
        fuses = []
        p = u.parent
        while p.kind == "fuse":
            fuses.append(p)
            p = p.parent
        if fuses:
            g1 = _eval(u.kids[0])[id(u.kids[0])]
            g2 = _eval(u.kids[1])[id(u.kids[1])]
            for f in fuses:
                (v1,) = g1.cls(f.a)
                (v2,) = g2.cls(f.a)
                if v1 < v2:
                    _rename(u.kids[1], v2, v1)
                elif v2 < v1:
                    _rename(u.kids[0], v1, v2)
        u.kind = "glue"
        for f in fuses:
            _suppress(f)


# ---------------------------------------------------------------------------
# reduced glue expressions


def _creator(root: _T, v: str, w: str, g: dict[int, _G]) -> _T | None:
    """A join node below ``root`` that creates the edge vw."""
    e = edge(v, w)
    for t in _pre(root):
        if t.kind != "join":
            continue
        cg = g[id(t.kids[0])]
        if v not in cg.lab or w not in cg.lab or e in cg.edges:
            continue
        lv, lw = cg.lab[v], cg.lab[w]
        if (t.a in lv and t.b in lw) or (t.b in lv and t.a in lw):
            return t
    return None


def _p1_violation(top: _T, g) -> tuple | None:
    for t in _pre(top):
        if t.kind != "join":
            continue
        cg = g[id(t.kids[0])]
        ci, cj = set(cg.cls(t.a)), set(cg.cls(t.b))
        for a, b in sorted(cg.edges):
            if (a in ci and b in cj) or (a in cj and b in ci):
                return t, a, b
    return None


def _p2_violation(top: _T, g) -> tuple | None:
    for t in _pre(top):
        if t.kind == "glue":
            common = g[id(t.kids[0])].edges & g[id(t.kids[1])].edges
            if common:
                return t, min(common)
    return None


def _p3_violation(top: _T, g) -> tuple | None:
    for t in _pre(top):
        if t.kind != "glue":
            continue
        g1, g2 = g[id(t.kids[0])], g[id(t.kids[1])]
        for v in sorted(g1.lab.keys() & g2.lab.keys()):
            for side, gs in enumerate((g1, g2)):
                if not any(v in e for e in gs.edges):
                    return t, v, side
    return None


def _cut_vertex(t: _T, v: str, side: int):
    """Remove every introduce of v from one operand of glue t (leaf-pruning loop)."""
    while not t.dead:
        root = t.kids[side]
        leaf = next((n for n in _pre(root) if n.kind == "intro" and n.title == v), None)
        if leaf is None:
            return
        while leaf.parent.kind in ("rel", "join"):
            p = leaf.parent
            if p.kind == "rel" and leaf.labels == frozenset({p.a}):
                _rule_12(p)
            else:
                _suppress(p)  # useless above a single vertex
        _remove_leaf(leaf)


def _reduce(top: _T):
    for _ in range(100000):
        _suppress_useless(top)
        g = _eval(top)
        hit = _p1_violation(top, g)
        if hit:
            t, a, b = hit
            t2 = _creator(t.kids[0], a, b, g)
            assert t2 is not None, "edge without creating join"
            _suppress(t2)
            continue
        hit = _p2_violation(top, g)
        if hit:
            t, (a, b) = hit
            t2 = _creator(t.kids[0], a, b, g)
            assert t2 is not None, "edge without creating join"
            cg = g[id(t2.kids[0])]
            created = [(x, y) for x in cg.cls(t2.a) for y in cg.cls(t2.b) if edge(x, y) not in cg.edges]
            assert len(created) == 1, "glue edge created together with other edges"
            _suppress(t2)
            continue
        hit = _p3_violation(top, g)
        if hit:
            t, v, side = hit
            _cut_vertex(t, v, side)
            continue
        return
    raise AssertionError("reduction did not terminate")


def reducedness_violations(e: Expression) -> list[str]:
    """Violations of P1-P3 (empty list for a reduced glue expression)."""
    top = to_tree(e)
    g = _eval(top)
    out = []
    for t in _pre(top):
        if t.kind == "join":
            cg = g[id(t.kids[0])]
            ci, cj = set(cg.cls(t.a)), set(cg.cls(t.b))
            for a, b in sorted(cg.edges):
                if (a in ci and b in cj) or (a in cj and b in ci):
                    out.append(f"P1: join {t.a},{t.b} recreates edge {a}-{b}")
        elif t.kind == "glue":
            g1, g2 = g[id(t.kids[0])], g[id(t.kids[1])]
            for a, b in sorted(g1.edges & g2.edges):
                out.append(f"P2: glued operands share edge {a}-{b}")
            for v in sorted(g1.lab.keys() & g2.lab.keys()):
                for side, gs in enumerate((g1, g2)):
                    if not any(v in x for x in gs.edges):
                        out.append(f"P3: glue vertex {v} isolated on side {side}")
    return out


# ---------------------------------------------------------------------------
# relabel-run compaction


def _realize(tau: dict[int, frozenset[int]], k: int) -> list[tuple[int, frozenset[int]]] | None:
    """A short relabel sequence with the same effect as ``tau`` on its domain.

    ``tau`` maps every nonempty label to the label set its holders end up with;
    the result lists ``(source, targets)`` bottom-up, or None when a cycle needs
    a spare label and none is free.
    """
    pending = {x: s for x, s in tau.items() if s != frozenset({x})}
    used = set(tau).union(*tau.values()) if tau else set()
    free = [x for x in range(1, k + 1) if x not in used]
    seq = []
    while pending:
        ready = [x for x in sorted(pending) if not ((pending[x] - {x}) & pending.keys())]
        if ready:
            x = ready[0]
            seq.append((x, pending.pop(x)))
            continue
        if not free:
            return None
        tmp = free.pop(0)
        x = min(pending)
        seq.append((x, frozenset({tmp})))
        pending[tmp] = pending.pop(x)
    return seq


def _runs(top: _T, kinds: tuple[str, ...]) -> list[list[_T]]:
    """Maximal chains of relabel nodes, each listed top-down."""
    out = []
    for t in _pre(top):
        if t.kind in kinds and t.parent.kind not in kinds:
            run = [t]
            while run[-1].kids[0].kind in kinds:
                run.append(run[-1].kids[0])
            out.append(run)
    return out


def _replace_run(run: list[_T], ops: list[_T]):
    """Swap the relabel chain ``run`` (top-down) for ``ops`` (bottom-up)."""
    bottom = run[-1].kids[0]
    top_parent = run[0].parent
    idx = top_parent.kids.index(run[0])
    node = bottom
    for op in ops:
        op.kids = [node]
        node.parent = op
        node = op
    top_parent.kids[idx] = node
    node.parent = top_parent
    for r in run:
        r.dead = True
        r.kids = []
        r.parent = None


def _compact_single(top: _T, k: int) -> bool:
    changed = False
    for run in _runs(top, ("rel",)):
        below = run[-1].kids[0]
        g = _eval(below)[id(below)]
        tau = {}
        for x in sorted(set().union(*g.lab.values()) if g.lab else ()):
            y = x
            for r in reversed(run):
                y = _map_label(y, r)
            tau[x] = frozenset({y})
        seq = _realize(tau, k)
        if seq is None or len(seq) >= len(run):
            continue
        ops = []
        for x, s in seq:
            (y,) = s
            ops.append(_T("rel", x, y))
        _replace_run(run, ops)
        changed = True
    return changed


def _normalize_glue(top: _T, k: int) -> bool:
    """Joins below relabels between glues, short relabel runs, introduce parents are glues."""
    changed = False
    for _ in range(100000):
        step = False
        for t in _pre(top):
            if t.kind == "join" and t.kids[0].kind == "rel":
                c = t.kids[0]
                if c.a not in (t.a, t.b) and c.b not in (t.a, t.b):
                    _rule_14(t)
                elif c.b in (t.a, t.b) and c.a not in (t.a, t.b):
                    _rule_13(t)
                else:
                    _suppress(t)  # the relabel empties one joined class
                step = True
                break
        if step:
            _suppress_useless(top)
            changed = True
            continue
        break
    if _compact_single(top, k):
        changed = True
    for t in _pre(top):
        if t.kind == "intro":
            while t.parent.kind in ("rel", "join"):
                p = t.parent
                if p.kind == "rel" and t.labels == frozenset({p.a}):
                    _rule_12(p)
                else:
                    _suppress(p)
                changed = True
    if _suppress_useless(top):
        changed = True
    return changed


# ---------------------------------------------------------------------------
# public pipelines


def _require(e: Expression, dialects: tuple[str, ...]):
    if e.dialect not in dialects:
        raise ValueError(f"expected a {'/'.join(dialects)} expression, got {e.dialect}")
    rep = X.validate(e)
    if rep.violations:
        raise ValueError("invalid expression:\n" + str(rep))


def suppress_useless(e: Expression) -> Expression:
    top = to_tree(e)
    _suppress_useless(top)
    return from_tree(top, e.dialect, e.k)


def shift_fuses_to_unions(e: Expression, stats: dict | None = None) -> Expression:
    _require(e, ("fuse", "clique"))
    top = to_tree(e)
    st = _shift(top, e.k)
    assert not _check_shifted(top)
    if stats is not None:
        stats.update(st)
    return from_tree(top, e.dialect, e.k)


def localize_fuses(e: Expression) -> Expression:
    _require(e, ("fuse", "clique"))
    top = to_tree(e)
    _localize(top, e.k)
    problems = _check_local(top)
    assert not problems, problems
    return from_tree(top, e.dialect, e.k)


def fuse_structure_violations(e: Expression, local: bool = False) -> list[str]:
    top = to_tree(e)
    return _check_local(top) if local else _check_shifted(top)


def fuse_to_glue(e: Expression) -> Expression:
    _require(e, ("fuse", "clique"))
    top = to_tree(e)
    _localize(top, e.k)
    _to_glue(top)
    return from_tree(top, "glue", e.k)


def reduce_glue(e: Expression) -> Expression:
    _require(e, ("glue",))
    top = to_tree(e)
    _reduce(top)
    return from_tree(top, "glue", e.k)


def _reduced_tree(top: _T, k: int):
    for _ in range(1000):
        _reduce(top)
        if not _normalize_glue(top, k):
            break
    else:
        raise AssertionError("normalization did not settle")


def fuse_to_reduced_glue(e: Expression, check_bound: bool = True) -> Expression:
    _require(e, ("fuse", "clique"))
    top = to_tree(e)
    _localize(top, e.k)
    _to_glue(top)
    _reduced_tree(top, e.k)
    out = from_tree(top, "glue", e.k)
    if check_bound:
        g = X.evaluate(out)
        size = out.size()
        limit = glue_bound(e.k, g.m, g.n)
        assert size <= limit, f"reduced glue expression has {size} nodes > {limit}"
    return out


def glue_to_reduced_glue(e: Expression) -> Expression:
    _require(e, ("glue",))
    top = to_tree(e)
    _reduced_tree(top, e.k)
    return from_tree(top, "glue", e.k)


def glue_bound(k: int, m: int, n: int) -> int:
    return C1 * k * k * (m + n)


def multi_bound(k: int, n: int) -> int:
    return C2 * k * k * n


# ---------------------------------------------------------------------------
# fuse -> multi


def _fuse_ancestors(top: _T, k: int) -> dict[int, dict[int, _T]]:
    """For every node x and label i: the fuse ancestor y with y = theta_{rho*_{x,y}(i)}.

    Computed top-down; when several ancestors qualify the nearest one wins (the
    others make x's fuse ancestors skippable).
    """
    F: dict[int, dict[int, _T]] = {id(top.kids[0]): {}}
    for node in _pre(top.kids[0]):
        base = F[id(node)]
        for c in node.kids:
            fc = {}
            for lab in range(1, k + 1):
                up = _map_label(lab, node)
                if up in base:
                    fc[lab] = base[up]
            if node.kind == "fuse":
                fc[node.a] = node
            F[id(c)] = fc
    return F


def _prepare_for_multi(top: _T, k: int):
    for _ in range(100000):
        _suppress_useless(top)
        F = _fuse_ancestors(top, k)
        skippable = [x for x in _pre(top) if x.kind == "fuse" and x.a in F[id(x)]]
        if skippable:
            for x in skippable:
                _suppress(x)
            continue
        changed = False
        for leaf in _pre(top):
            if leaf.kind == "intro" and leaf.parent.kind == "rel":
                p = leaf.parent
                if leaf.labels == frozenset({p.a}):
                    _rule_12(p)
                else:
                    _suppress(p)
                changed = True
        if not changed:
            return
    raise AssertionError("preparation did not settle")


def _fuse_to_multi_tree(top: _T, k: int) -> _T:
    _prepare_for_multi(top, k)
    F = _fuse_ancestors(top, k)
    hat = lambda x: k + x  # noqa: E731
    star = 2 * k + 1

    participants: dict[int, list[str]] = {}
    for leaf in _pre(top):
        if leaf.kind == "intro":
            (lab,) = leaf.labels
            if lab in F[id(leaf)]:
                participants.setdefault(id(F[id(leaf)][lab]), []).append(leaf.title)
    for x in _pre(top):
        if x.kind == "fuse":
            assert x.a not in F[id(x)], "skippable fuse survived"
            assert len(participants.get(id(x), [])) >= 2, "fuse without two original vertices"

    extra: dict[int, set[int]] = {}
    postponed = []  # (new introduce, its real label, join node, hat-removal node)

    def build(x: _T) -> _T | None:
        if x.kind == "intro":
            (lab,) = x.labels
            return None if lab in F[id(x)] else _leaf(x.title, {lab})
        kids = [build(c) for c in x.kids]
        if x.kind == "union":
            a, b = kids
            if a is None or b is None:
                return a if b is None else b
            return _T("union", kids=[a, b])
        c = kids[0]
        fx = F[id(x)]
        if x.kind == "join":
            i, j = x.a, x.b
            fi, fj = i in fx, j in fx
            if not fi and not fj:
                return None if c is None else _un("join", i, j, c)
            if fi and fj:
                xi, xj = fx[i], fx[j]
                if xi is not xj:
                    if _is_ancestor(xi, xj):  # x_j lies below x_i
                        extra.setdefault(id(xj), set()).add(hat(_trace(i, x, xj)))
                    else:
                        extra.setdefault(id(xi), set()).add(hat(_trace(j, x, xi)))
                return c
            if fi:
                i, j = j, i  # now i is the ordinary label, j the fuse label
            assert c is not None
            return _un("relset", i, frozenset({i, hat(j)}), c)
        if x.kind == "rel":
            if c is None:
                return None
            r1 = _un("relset", x.a, frozenset({x.b}), c)
            return _un("relset", hat(x.a), frozenset({hat(x.b)}), r1)
        if x.kind == "fuse":
            i = x.a
            w = _leaf(min(participants[id(x)]), {i} | extra.get(id(x), set()))
            if c is None:
                postponed.append((w, i, None, None))
                return w
            u = _T("union", kids=[c, w])
            jn = _un("join", i, hat(i), u)
            rr = _un("relset", hat(i), frozenset(), jn)
            postponed.append((w, i, jn, rr))
            return rr
        raise AssertionError(x.kind)

    root = build(top.kids[0])
    out = _T("top", kids=[root])

    # merge every hat label with its plain label, using the star label inside postponed sequences
    for w, i, jn, rr in postponed:
        if jn is None:
            continue
        w.labels = (w.labels - {i}) | {star}
        jn.a, jn.b = hat(i), star
        _insert_above(rr, _T("relset", star, frozenset({i})))

    def squash(x: int) -> int:
        if x == star:
            return k + 1
        return x - k if x > k else x

    for n in _pre(out):
        if n.kind == "intro":
            n.labels = frozenset(squash(x) for x in n.labels)
        elif n.kind == "join":
            n.a, n.b = squash(n.a), squash(n.b)
        elif n.kind == "relset":
            n.a, n.b = squash(n.a), frozenset(squash(x) for x in n.b)
    _suppress_useless(out)
    return out


def fuse_to_multi(e: Expression) -> Expression:
    _require(e, ("fuse", "clique"))
    top = to_tree(e)
    out = _fuse_to_multi_tree(top, e.k)
    return from_tree(out, "multi", e.k + 1)


def clique_as_multi(e: Expression) -> Expression:
    """Read a clique/fuse-free expression as a multi expression with singleton labels."""
    top = to_tree(e)
    for n in _pre(top):
        if n.kind == "rel":
            n.kind, n.b = "relset", frozenset({n.b})
        elif n.kind == "fuse":
            raise ValueError("expression contains fuse nodes")
    return from_tree(top, "multi", e.k)


# ---------------------------------------------------------------------------
# multi normalization


def _decompose(src: int, targets: frozenset[int]) -> list[_T]:
    """rho_{i->S} as rho_{i->{i,s}} steps plus rho_{i->{}} (bottom-up)."""
    ops = [_T("relset", src, frozenset({src, s})) for s in sorted(targets - {src})]
    if src not in targets:
        ops.append(_T("relset", src, frozenset()))
    return ops


def _is_normal_relset(t: _T) -> bool:
    return t.kind == "relset" and (not t.b or (len(t.b) == 2 and t.a in t.b))


def _decompose_all(top: _T):
    for t in _pre(top):
        if t.kind == "relset" and not _is_normal_relset(t):
            _replace_run([t], _decompose(t.a, t.b))
        elif t.kind == "intro" and len(t.labels) > 1:
            first, *rest = sorted(t.labels)
            t.labels = frozenset({first})
            node = t
            parent = t.parent
            idx = parent.kids.index(t)
            for s in rest:
                op = _T("relset", first, frozenset({first, s}), kids=[node])
                node = op
            parent.kids[idx] = node
            node.parent = parent


def _multi_push_joins(top: _T) -> bool:
    changed = False
    for _ in range(100000):
        hit = None
        for t in _pre(top):
            if t.kind == "join" and t.kids[0].kind == "relset":
                hit = t
                break
        if hit is None:
            return changed
        t, c = hit, hit.kids[0]
        i, j = t.a, t.b
        if not c.b:
            if c.a in (i, j):
                _suppress(t)
            else:
                _swap_down(t)
        else:
            (b,) = c.b - {c.a}
            if b in (i, j):
                other = j if b == i else i
                assert c.a != other, "inadmissible join"
                _swap_down(t)
                _insert_above(t.kids[0], _T("join", c.a, other))
            else:
                _swap_down(t)
        _suppress_useless(top)
        changed = True
    raise AssertionError("join pushing did not terminate")


def _compact_multi(top: _T, k: int) -> bool:
    changed = False
    for run in _runs(top, ("relset",)):
        below = run[-1].kids[0]
        g = _eval(below)[id(below)]
        tau = {}
        for x in sorted(set().union(*g.lab.values()) if g.lab else ()):
            labs = frozenset({x})
            for r in reversed(run):
                if r.a in labs:
                    labs = (labs - {r.a}) | r.b
            tau[x] = labs
        seq = _realize(tau, k)
        if seq is None:
            continue
        ops = [op for x, s in seq for op in _decompose(x, s)]
        if len(ops) >= len(run):
            continue
        _replace_run(run, ops)
        changed = True
    return changed


def _normalize_multi_tree(top: _T, k: int):
    _decompose_all(top)
    _suppress_useless(top)
    for _ in range(1000):
        changed = _multi_push_joins(top)
        changed |= _compact_multi(top, k)
        changed |= _suppress_useless(top)
        if not changed:
            return
    raise AssertionError("multi normalization did not settle")


def normalize_multi(e: Expression, check_bound: bool = True) -> Expression:
    _require(e, ("multi",))
    top = to_tree(e)
    _normalize_multi_tree(top, e.k)
    out = from_tree(top, "multi", e.k)
    if check_bound:
        n = X.evaluate(out).n
        assert out.size() <= multi_bound(e.k, n), f"normalized multi expression too large ({out.size()} nodes)"
    return out


def multi_violations(e: Expression) -> list[str]:
    """Departures from the normal form expected by the multi solvers."""
    out = []
    table = X.evaluate_all(e.root)
    for node in X.iter_preorder(e.root):
        if isinstance(node, X.Introduce) and len(node.labels) != 1:
            out.append(f"introduce {node.title} has {len(node.labels)} labels")
        elif isinstance(node, X.RelabelSet):
            t = set(node.targets)
            if t and not (len(t) == 2 and node.i in t):
                out.append(f"relabel {node.i}->{sorted(t)} is not elementary")
        elif isinstance(node, X.Join):
            g = table[id(node.child)]
            if not g.cls(node.i) or not g.cls(node.j):
                out.append(f"join {node.i},{node.j} has an empty class")
    return out


def segment_stats(e: Expression) -> list[tuple[int, int]]:
    """(joins, relabels) between consecutive binary nodes or leaves, per segment."""
    out = []
    tops = []
    parent = {}
    for node in X.iter_preorder(e.root):
        for c in node.children:
            parent[id(c)] = node
    for node in X.iter_preorder(e.root):
        if isinstance(node, (X.Join, X.Relabel, X.RelabelSet)):
            p = parent.get(id(node))
            if p is None or not isinstance(p, (X.Join, X.Relabel, X.RelabelSet)):
                tops.append(node)
    for t in tops:
        joins = rels = 0
        n = t
        while isinstance(n, (X.Join, X.Relabel, X.RelabelSet)):
            if isinstance(n, X.Join):
                joins += 1
            else:
                rels += 1
            n = n.child
        out.append((joins, rels))
    return out


__all__ = [
    "C1", "C2", "RuleNotApplicable", "apply_rule", "suppress_useless", "shift_fuses_to_unions",
    "localize_fuses", "fuse_to_glue", "reduce_glue", "fuse_to_reduced_glue", "fuse_to_multi",
    "normalize_multi", "reducedness_violations", "glue_bound", "multi_bound", "clique_as_multi",
    "glue_to_reduced_glue", "multi_violations", "segment_stats", "fuse_structure_violations",
]
