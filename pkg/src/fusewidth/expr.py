"""Expressions over labeled graphs in four dialects.

Concrete syntax::

    expr := title<l1,l2,...>
          | (expr + expr)            disjoint union
          | (expr ~ expr)            glue
          | j i,j(expr)              join
          | r i->j(expr)             single relabel
          | r i->{a,b,...}(expr)     relabel to a set (``r i->{}`` removes i)
          | f i(expr)                fuse

Fused vertices are titled by the lexicographically smallest title of the
fused class, so graphs produced by equivalent expressions compare equal
title-for-title.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Union as TUnion

from .graph_core import LabeledGraph, edge

DIALECTS = ("clique", "fuse", "glue", "multi")

ALLOWED = {
    "clique": {"Introduce", "Union", "Join", "Relabel"},
    "fuse": {"Introduce", "Union", "Join", "Relabel", "Fuse"},
    "glue": {"Introduce", "Join", "Relabel", "Glue"},
    "multi": {"Introduce", "Union", "Join", "RelabelSet"},
}


# ---------------------------------------------------------------------------
# nodes


@dataclass(frozen=True)
class Introduce:
    title: str
    labels: tuple[int, ...]

    @property
    def children(self) -> tuple:
        return ()


@dataclass(frozen=True)
class Union:
    left: "Node"
    right: "Node"

    @property
    def children(self) -> tuple:
        return (self.left, self.right)


@dataclass(frozen=True)
class Glue:
    left: "Node"
    right: "Node"

    @property
    def children(self) -> tuple:
        return (self.left, self.right)


@dataclass(frozen=True)
class Join:
    i: int
    j: int
    child: "Node"

    @property
    def children(self) -> tuple:
        return (self.child,)


@dataclass(frozen=True)
class Relabel:
    i: int
    j: int
    child: "Node"

    @property
    def children(self) -> tuple:
        return (self.child,)


@dataclass(frozen=True)
class RelabelSet:
    i: int
    targets: tuple[int, ...]
    child: "Node"

    @property
    def children(self) -> tuple:
        return (self.child,)


@dataclass(frozen=True)
class Fuse:
    i: int
    child: "Node"

    @property
    def children(self) -> tuple:
        return (self.child,)


Node = TUnion[Introduce, Union, Glue, Join, Relabel, RelabelSet, Fuse]


def kind(node: Node) -> str:
    return type(node).__name__


def with_children(node: Node, kids) -> Node:
    """Copy of ``node`` with its children replaced."""
    if isinstance(node, Introduce):
        return node
    if isinstance(node, (Union, Glue)):
        return type(node)(kids[0], kids[1])
    if isinstance(node, Join):
        return Join(node.i, node.j, kids[0])
    if isinstance(node, Relabel):
        return Relabel(node.i, node.j, kids[0])
    if isinstance(node, RelabelSet):
        return RelabelSet(node.i, node.targets, kids[0])
    return Fuse(node.i, kids[0])


def iter_preorder(root: Node) -> Iterator[Node]:
    stack = [root]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children))


def iter_postorder(root: Node) -> Iterator[Node]:
    """Children before parents, left before right."""
    out = []
    stack = [root]
    while stack:
        node = stack.pop()
        out.append(node)
        stack.extend(node.children)
    return reversed(out)


def node_labels(node: Node) -> set[int]:
    """Labels mentioned by the node itself."""
    if isinstance(node, Introduce):
        return set(node.labels)
    if isinstance(node, (Join, Relabel)):
        return {node.i, node.j}
    if isinstance(node, RelabelSet):
        return {node.i, *node.targets}
    if isinstance(node, Fuse):
        return {node.i}
    return set()


@dataclass(frozen=True)
class Expression:
    dialect: str
    root: Node
    k: int

    def __post_init__(self):
        if self.dialect not in DIALECTS:
            raise ValueError(f"unknown dialect {self.dialect!r}")

    def nodes(self) -> list[Node]:
        """Nodes in preorder; the position is the node id."""
        return list(iter_preorder(self.root))

    def size(self) -> int:
        return sum(1 for _ in iter_preorder(self.root))

    def max_label(self) -> int:
        return max((max(node_labels(n), default=0) for n in iter_preorder(self.root)), default=0)

    def __str__(self) -> str:
        return serialize_expression(self)


def make_expression(dialect: str, root: Node, k: int | None = None) -> Expression:
    top = max((max(node_labels(n), default=0) for n in iter_preorder(root)), default=0)
    return Expression(dialect, root, max(k or 1, top, 1))


# ---------------------------------------------------------------------------
# parsing / serialization


class ExprSyntaxError(ValueError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {msg}")
        self.line = line
        self.col = col


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<word>[A-Za-z0-9_]+)|(?P<arrow>->)|(?P<sym>[()<>{},+~]))")


class _Parser:
    def __init__(self, text: str, dialect: str):
        self.text = text
        self.dialect = dialect
        self.pos = 0

    def where(self, pos: int | None = None) -> tuple[int, int]:
        pos = self.pos if pos is None else pos
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, col

    def error(self, msg: str, pos: int | None = None):
        raise ExprSyntaxError(msg, *self.where(pos))

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self, s: str) -> bool:
        self.skip_ws()
        return self.text.startswith(s, self.pos)

    def expect(self, s: str):
        self.skip_ws()
        if not self.text.startswith(s, self.pos):
            found = self.text[self.pos:self.pos + 1] or "end of input"
            self.error(f"expected {s!r}, found {found!r}")
        self.pos += len(s)

    def number(self) -> int:
        self.skip_ws()
        m = re.compile(r"\d+").match(self.text, self.pos)
        if not m:
            self.error("expected a label number")
        self.pos = m.end()
        return int(m.group())

    def check_kind(self, name: str, pos: int):
        if name not in ALLOWED[self.dialect]:
            self.error(f"{name} nodes are not allowed in the {self.dialect} dialect", pos)

    def parse(self) -> Node:
        node = self.expr()
        self.skip_ws()
        if self.pos != len(self.text):
            self.error("trailing input after expression")
        return node

    def expr(self) -> Node:
        self.skip_ws()
        start = self.pos
        if self.pos >= len(self.text):
            self.error("unexpected end of input")
        if self.text[self.pos] == "(":
            self.pos += 1
            left = self.expr()
            self.skip_ws()
            op = self.text[self.pos:self.pos + 1]
            if op not in ("+", "~"):
                self.error("expected '+' or '~'")
            self.pos += 1
            right = self.expr()
            self.expect(")")
            name = "Union" if op == "+" else "Glue"
            self.check_kind(name, start)
            return Union(left, right) if op == "+" else Glue(left, right)
        m = re.compile(r"[A-Za-z0-9_]+").match(self.text, self.pos)
        if not m:
            self.error(f"unexpected character {self.text[self.pos]!r}")
        word = m.group()
        after = m.end()
        # an operator keyword is a letter immediately followed by its first label number
        # and then a non-title character; everything else is a title
        op = re.compile(r"([jrf])(\d+)").fullmatch(word)
        rest = self.text[after:].lstrip()
        if op and not rest.startswith("<"):
            self.pos = m.start() + 1
            letter = op.group(1)
            i = self.number()
            if letter == "j":
                self.expect(",")
                j = self.number()
                self.check_kind("Join", start)
                return Join(i, j, self.paren())
            if letter == "f":
                self.check_kind("Fuse", start)
                return Fuse(i, self.paren())
            self.expect("->")
            if self.peek("{"):
                self.expect("{")
                targets = []
                if not self.peek("}"):
                    targets.append(self.number())
                    while self.peek(","):
                        self.expect(",")
                        targets.append(self.number())
                self.expect("}")
                self.check_kind("RelabelSet", start)
                return RelabelSet(i, tuple(sorted(set(targets))), self.paren())
            j = self.number()
            self.check_kind("Relabel", start)
            return Relabel(i, j, self.paren())
        self.pos = after
        self.expect("<")
        labels = []
        if not self.peek(">"):
            labels.append(self.number())
            while self.peek(","):
                self.expect(",")
                labels.append(self.number())
        self.expect(">")
        self.check_kind("Introduce", start)
        return Introduce(word, tuple(sorted(set(labels))))

    def paren(self) -> Node:
        # the operand parentheses may double as those of a binary operand: f1(a<1> + b<1>)
        self.expect("(")
        start = self.pos
        node = self.expr()
        self.skip_ws()
        op = self.text[self.pos:self.pos + 1]
        if op in ("+", "~"):
            self.pos += 1
            right = self.expr()
            name = "Union" if op == "+" else "Glue"
            self.check_kind(name, start)
            node = Union(node, right) if op == "+" else Glue(node, right)
        self.expect(")")
        return node


def parse_expression(text: str, dialect: str, k: int | None = None) -> Expression:
    if dialect not in DIALECTS:
        raise ValueError(f"unknown dialect {dialect!r}")
    root = _Parser(text, dialect).parse()
    return make_expression(dialect, root, k)


def _ser(node: Node, out: list[str]):
    if isinstance(node, Introduce):
        out.append(f"{node.title}<{','.join(map(str, sorted(node.labels)))}>")
    elif isinstance(node, (Union, Glue)):
        out.append("(")
        _ser_binary(node, out)
        out.append(")")
    else:
        if isinstance(node, Join):
            out.append(f"j{node.i},{node.j}(")
        elif isinstance(node, Relabel):
            out.append(f"r{node.i}->{node.j}(")
        elif isinstance(node, RelabelSet):
            out.append(f"r{node.i}->{{{','.join(map(str, sorted(node.targets)))}}}(")
        else:
            out.append(f"f{node.i}(")
        if isinstance(node.child, (Union, Glue)):
            _ser_binary(node.child, out)
        else:
            _ser(node.child, out)
        out.append(")")


def _ser_binary(node: Node, out: list[str]):
    _ser(node.left, out)
    out.append(" + " if isinstance(node, Union) else " ~ ")
    _ser(node.right, out)


def serialize_expression(e: Expression) -> str:
    out: list[str] = []
    _ser(e.root, out)
    return "".join(out)


# ---------------------------------------------------------------------------
# semantics


class EvaluationError(ValueError):
    pass


@dataclass
class Violation:
    node_id: int
    rule: str
    message: str

    def __str__(self) -> str:
        return f"node {self.node_id}: [{self.rule}] {self.message}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return bool(self.violations)

    def __str__(self) -> str:
        return "\n".join(map(str, self.violations)) if self.violations else "ok"


class _G:
    """Mutable working graph used during evaluation."""

    __slots__ = ("lab", "edges")

    def __init__(self, lab=None, edges=None):
        self.lab: dict[str, frozenset[int]] = lab if lab is not None else {}
        self.edges: set[tuple[str, str]] = edges if edges is not None else set()

    def cls(self, i: int) -> list[str]:
        return sorted(t for t, ls in self.lab.items() if i in ls)

    def freeze(self, k: int) -> LabeledGraph:
        return LabeledGraph(dict(self.lab), frozenset(self.edges), k)


def step(node: Node, kids: list[_G], report=None, nid: int = -1) -> _G:
    """Apply one node's operation to its children's graphs (children are not modified).

    With ``report`` given, semantic violations are recorded instead of raised and a
    best-effort graph is still returned.
    """

    def fail(rule: str, msg: str):
        if report is None:
            raise EvaluationError(f"{kind(node)} at node {nid}: {msg}")
        report.append(Violation(nid, rule, msg))

    if isinstance(node, Introduce):
        if not node.labels:
            fail("empty-introduce", f"introduce {node.title!r} has no labels")
        return _G({node.title: frozenset(node.labels)})
    if isinstance(node, Union):
        a, b = kids
        common = a.lab.keys() & b.lab.keys()
        if common:
            fail("duplicate-title", f"union operands share titles {sorted(common)}")
        lab = dict(a.lab)
        lab.update(b.lab)
        return _G(lab, a.edges | b.edges)
    if isinstance(node, Glue):
        a, b = kids
        for t in sorted(a.lab.keys() & b.lab.keys()):
            if a.lab[t] != b.lab[t]:
                fail("glueability", f"glue vertex {t!r} has labels {sorted(a.lab[t])} and {sorted(b.lab[t])}")
                continue
            for side, g in (("left", a), ("right", b)):
                for x in g.lab[t]:
                    if len(g.cls(x)) > 1:
                        fail("glueability", f"glue vertex {t!r} is not alone in class {x} on the {side}")
        lab = dict(a.lab)
        lab.update(b.lab)
        return _G(lab, a.edges | b.edges)
    (g,) = kids
    if isinstance(node, Join):
        if node.i == node.j:
            fail("join-distinct", f"join of label {node.i} with itself")
            return _G(dict(g.lab), set(g.edges))
        ci, cj = g.cls(node.i), g.cls(node.j)
        both = set(ci) & set(cj)
        if both:
            fail("join-admissibility", f"vertices {sorted(both)} hold both labels {node.i} and {node.j}")
        edges = set(g.edges)
        edges.update(edge(u, w) for u in ci for w in cj if u != w)
        return _G(dict(g.lab), edges)
    if isinstance(node, (Relabel, RelabelSet)):
        targets = frozenset({node.j}) if isinstance(node, Relabel) else frozenset(node.targets)
        lab = {t: ((ls - {node.i}) | targets) if node.i in ls else ls for t, ls in g.lab.items()}
        return _G(lab, set(g.edges))
    if isinstance(node, Fuse):
        cls = g.cls(node.i)
        if not cls:
            fail("fuse-empty", f"fuse of empty class {node.i}")
            return _G(dict(g.lab), set(g.edges))
        keep = cls[0]
        gone = set(cls)
        lab = {t: ls for t, ls in g.lab.items() if t not in gone}
        lab[keep] = frozenset({node.i}).union(*(g.lab[t] for t in cls))
        edges = set()
        for a, b in g.edges:
            a2 = keep if a in gone else a
            b2 = keep if b in gone else b
            if a2 != b2:
                edges.add(edge(a2, b2))
        return _G(lab, edges)
    raise TypeError(f"not an expression node: {node!r}")


def evaluate_all(root: Node, report=None) -> dict[int, _G]:
    """Working graph of every node, keyed by ``id(node)``."""
    ids = {}
    for n, node in enumerate(iter_preorder(root)):
        ids.setdefault(id(node), n)
    out: dict[int, _G] = {}
    for node in iter_postorder(root):
        if id(node) in out:
            continue
        out[id(node)] = step(node, [out[id(c)] for c in node.children], report, ids[id(node)])
    return out


def evaluate(e: Expression) -> LabeledGraph:
    rep = validate(e)
    if rep.violations:
        raise EvaluationError("invalid expression:\n" + str(rep))
    g = evaluate_all(e.root)[id(e.root)]
    return g.freeze(e.k)


def validate(e: Expression) -> ValidationReport:
    violations: list[Violation] = []
    nodes = e.nodes()
    seen_titles: dict[str, int] = {}
    for nid, node in enumerate(nodes):
        name = kind(node)
        if name not in ALLOWED[e.dialect]:
            violations.append(Violation(nid, "dialect", f"{name} not allowed in {e.dialect} dialect"))
        bad = [x for x in node_labels(node) if not 1 <= x <= e.k]
        if bad:
            violations.append(Violation(nid, "label-range", f"labels {sorted(bad)} outside 1..{e.k}"))
        if isinstance(node, Introduce):
            if e.dialect != "multi" and len(node.labels) != 1:
                violations.append(Violation(nid, "single-label", f"introduce {node.title!r} needs exactly one label"))
            if e.dialect in ("clique", "fuse", "multi"):
                if node.title in seen_titles:
                    violations.append(Violation(
                        nid, "duplicate-title",
                        f"title {node.title!r} already introduced at node {seen_titles[node.title]}"))
                seen_titles.setdefault(node.title, nid)
    if violations:
        return ValidationReport(violations)
    sem: list[Violation] = []
    evaluate_all(e.root, sem)
    # union title clashes are already reported as duplicate titles above
    return ValidationReport([v for v in sem if v.rule != "duplicate-title" or e.dialect == "glue"])


def node_graphs(e: Expression) -> list[LabeledGraph]:
    """G_t for every node t, indexed by preorder node id."""
    table = evaluate_all(e.root)
    kk = max(e.k, e.max_label())
    return [table[id(node)].freeze(kk) for node in e.nodes()]


# ---------------------------------------------------------------------------
# useless nodes


def is_useless(node: Node, child_graph: _G) -> bool:
    g = child_graph
    if isinstance(node, Join):
        ci, cj = g.cls(node.i), g.cls(node.j)
        return all(u == w or edge(u, w) in g.edges for u in ci for w in cj)
    if isinstance(node, Fuse):
        return len(g.cls(node.i)) < 2
    if isinstance(node, Relabel):
        return node.i == node.j or not g.cls(node.i)
    if isinstance(node, RelabelSet):
        return node.targets == (node.i,) or not g.cls(node.i)
    return False


def count_vertices_direct(e: Expression) -> int:
    """Introduce leaves minus fuse merges (non-glue dialects)."""
    table = evaluate_all(e.root)
    leaves = 0
    merged = 0
    for node in iter_preorder(e.root):
        if isinstance(node, Introduce):
            leaves += 1
        elif isinstance(node, Fuse):
            merged += len(table[id(node.child)].cls(node.i)) - 1
    return leaves - merged
