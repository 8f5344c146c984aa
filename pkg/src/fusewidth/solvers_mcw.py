"""Exact and randomized solvers on normalized multi expressions.

Dominating Set, q-Coloring (counting), Chromatic Number, and the two
Cut&Count problems Connected Vertex Cover and Connected Dominating Set.

q-Coloring and CVC share one engine: a dense table with one axis per active
label, indexed by the bit mask of colors used on that label. CVC and CDS count
consistent cuts modulo 2; their table entries are GF(2) polynomials whose
exponent encodes (cardinality, weight) as ``c * (W + 1) + w``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import expr as X
from . import rewrite as R
from .expr import Expression


# ---------------------------------------------------------------------------
# preparation


def as_normalized_multi(e: Expression) -> Expression:
    """Normalized multi form of a clique, fuse or multi expression."""
    if e.dialect == "clique":
        return R.normalize_multi(R.clique_as_multi(e))
    if e.dialect == "fuse":
        return R.normalize_multi(R.fuse_to_multi(e))
    if e.dialect == "multi":
        return e if not R.multi_violations(e) else R.normalize_multi(e)
    raise ValueError(f"cannot run a multi solver on a {e.dialect} expression")


def _parents(root: X.Node) -> dict[int, X.Node]:
    out = {}
    for node in X.iter_preorder(root):
        for c in node.children:
            out[id(c)] = node
    return out


def _sigma(node: X.Node, label: int) -> frozenset[int]:
    if isinstance(node, X.RelabelSet) and node.i == label:
        return frozenset(node.targets)
    if isinstance(node, X.Relabel) and node.i == label:
        return frozenset({node.j})
    return frozenset({label})


def active_labels(e: Expression, graphs: dict | None = None) -> dict[int, frozenset[int]]:
    """Active labels of every node, keyed by ``id(node)``.

    A label is active when its class is nonempty and some ancestor join
    eta_{a,b}, reached through the relabels in between, has a among the images
    of the label and a nonempty class b.
    """
    graphs = graphs if graphs is not None else X.evaluate_all(e.root)
    reach: dict[int, frozenset[int]] = {id(e.root): frozenset()}
    for node in X.iter_preorder(e.root):
        base = reach[id(node)]
        for c in node.children:
            if isinstance(node, X.Join):
                g = graphs[id(node)]
                hit = set(base)
                if g.cls(node.j):
                    hit.add(node.i)
                if g.cls(node.i):
                    hit.add(node.j)
                reach[id(c)] = frozenset(hit)
            elif isinstance(node, (X.Relabel, X.RelabelSet)):
                reach[id(c)] = frozenset(
                    lab for lab in range(1, e.k + 1) if _sigma(node, lab) & base
                )
            else:
                reach[id(c)] = base
    out = {}
    for node in X.iter_preorder(e.root):
        g = graphs[id(node)]
        out[id(node)] = frozenset(lab for lab in reach[id(node)] if g.cls(lab))
    return out


def _labels(node: X.Introduce) -> tuple[int, ...]:
    return tuple(node.labels)


# ---------------------------------------------------------------------------
# Dominating Set


def ds_tables(e: Expression) -> dict[int, dict]:
    """Per node: (z mask, u mask) -> min number of chosen vertices.

    z has bit i when a chosen vertex holds label i; u has bit i when some
    undominated vertex has its pending obligation parked at label i.
    """
    tables: dict[int, dict] = {}

    def put(out, key, val):
        if key not in out or out[key] > val:
            out[key] = val

    for node in X.iter_postorder(e.root):
        if isinstance(node, X.Introduce):
            out = {}
            zmask = sum(1 << lab for lab in node.labels)
            put(out, (zmask, 0), 1)
            for lab in node.labels:
                put(out, (0, 1 << lab), 0)
            tables[id(node)] = out
        elif isinstance(node, X.Join):
            bi, bj = 1 << node.i, 1 << node.j
            out = {}
            for (z, u), size in tables[id(node.child)].items():
                if z & bi:
                    u &= ~bj
                if z & bj:
                    u &= ~bi
                put(out, (z, u), size)
            tables[id(node)] = out
        elif isinstance(node, X.RelabelSet):
            tables[id(node)] = _ds_relabel(tables[id(node.child)], node.i, set(node.targets))
        elif isinstance(node, X.Union):
            out = {}
            for (z1, u1), s1 in tables[id(node.left)].items():
                for (z2, u2), s2 in tables[id(node.right)].items():
                    put(out, (z1 | z2, u1 | u2), s1 + s2)
            tables[id(node)] = out
        else:
            raise ValueError(f"unexpected {X.kind(node)} node in a multi expression")
    return tables


def _ds_relabel(table: dict, i: int, targets: set[int]) -> dict:
    bi = 1 << i
    out: dict = {}

    def put(key, val):
        if key not in out or out[key] > val:
            out[key] = val

    if not targets:
        for (z, u), size in table.items():
            if not u & bi:
                put((z & ~bi, u), size)
        return out
    (j,) = targets - {i}
    bj = 1 << j
    for (z, u), size in table.items():
        z2 = z | bj if z & bi else z
        if u & bi:
            put((z2, u), size)  # every obligation stays at i
            put((z2, u | bj), size)  # some move to j
            put((z2, (u & ~bi) | bj), size)  # all move to j
        else:
            put((z2, u), size)
    return out


def solve_dominating_set(e: Expression, stats: dict | None = None) -> int:
    e = as_normalized_multi(e)
    if not X.evaluate_all(e.root)[id(e.root)].lab:
        return 0
    tables = ds_tables(e)
    table = tables[id(e.root)]
    for lab in range(1, e.k + 1):
        table = _ds_relabel(table, lab, set())
    if stats is not None:
        stats["max_table"] = max(len(t) for t in tables.values())
    return min(table.values())


# ---------------------------------------------------------------------------
# Chromatic Number


def with_sentinel(e: Expression) -> Expression:
    """Give every introduced vertex the extra label k+1, then normalize."""
    e = as_normalized_multi(e)
    k = e.k
    out: dict[int, X.Node] = {}
    for node in X.iter_postorder(e.root):
        if isinstance(node, X.Introduce):
            out[id(node)] = X.Introduce(node.title, tuple(sorted(set(node.labels) | {k + 1})))
        else:
            out[id(node)] = X.with_children(node, [out[id(c)] for c in node.children])
    return R.normalize_multi(X.make_expression("multi", out[id(e.root)], k + 1), check_bound=False)


def _pairings(t1: list[tuple[int, int]], t2: list[tuple[int, int]], min_pairs: int):
    """All ways to identify colors of two records: lists of (S1, S2, count)."""
    caps2 = [c for _, c in t2]

    def rows(idx: int, caps: list[int]):
        if idx == len(t1):
            yield []
            return
        s1, c1 = t1[idx]
        for split in _splits(c1, caps):
            new_caps = [a - b for a, b in zip(caps, split)]
            for rest in rows(idx + 1, new_caps):
                yield [(s1, t2[n][0], x) for n, x in enumerate(split) if x] + rest

    for plan in rows(0, caps2):
        if sum(x for _, _, x in plan) >= min_pairs:
            yield plan


def _splits(total_max: int, caps: list[int]):
    """Vectors x with x[n] <= caps[n] and sum(x) <= total_max."""
    if not caps:
        yield ()
        return
    for x in range(min(total_max, caps[0]) + 1):
        for rest in _splits(total_max - x, caps[1:]):
            yield (x,) + rest


def _chrom_union(a: tuple, b: tuple, cap: int) -> set[tuple]:
    t1 = [(m + 1, c) for m, c in enumerate(a) if c]
    t2 = [(m + 1, c) for m, c in enumerate(b) if c]
    need = sum(a) + sum(b) - cap
    out = set()
    for plan in _pairings(t1, t2, need):
        rec = list(a[m] + b[m] for m in range(len(a)))
        for s1, s2, x in plan:
            rec[s1 - 1] -= x
            rec[s2 - 1] -= x
            rec[(s1 | s2) - 1] += x
        out.add(tuple(rec))
    return out


def _chrom_relabel(rec: tuple, i: int, targets: set[int], size: int) -> tuple:
    bi = 1 << (i - 1)
    out = [0] * size
    if not targets:
        for m in range(1, size + 1):
            if m & bi:
                continue
            out[m - 1] = rec[m - 1] + rec[(m | bi) - 1]
        assert rec[bi - 1] == 0, "a color lost every label"
        return tuple(out)
    (j,) = targets - {i}
    bj = 1 << (j - 1)
    for m in range(1, size + 1):
        if m & bi and not m & bj:
            out[m - 1] = 0
        elif m & bi and m & bj:
            out[m - 1] = rec[m - 1] + rec[(m & ~bj) - 1]
        else:
            out[m - 1] = rec[m - 1]
    return tuple(out)


def chromatic_records(e: Expression, cap: int) -> dict[int, set[tuple]]:
    """Records (colors per label set) of colorings with at most ``cap`` colors."""
    size = (1 << e.k) - 1
    recs: dict[int, set[tuple]] = {}
    for node in X.iter_postorder(e.root):
        if isinstance(node, X.Introduce):
            r = [0] * size
            r[sum(1 << (x - 1) for x in node.labels) - 1] = 1
            recs[id(node)] = {tuple(r)} if cap >= 1 else set()
        elif isinstance(node, X.Join):
            both = (1 << (node.i - 1)) | (1 << (node.j - 1))
            recs[id(node)] = {
                r for r in recs[id(node.child)] if not any(r[m - 1] for m in range(1, size + 1) if m & both == both)
            }
        elif isinstance(node, X.RelabelSet):
            recs[id(node)] = {_chrom_relabel(r, node.i, set(node.targets), size) for r in recs[id(node.child)]}
        elif isinstance(node, X.Union):
            out = set()
            for a in recs[id(node.left)]:
                for b in recs[id(node.right)]:
                    out |= _chrom_union(a, b, cap)
            recs[id(node)] = {r for r in out if sum(r) <= cap}
        else:
            raise ValueError(f"unexpected {X.kind(node)} node in a multi expression")
    return recs


def solve_chromatic_number(e: Expression, stats: dict | None = None) -> int:
    s = with_sentinel(e)
    n = len(X.evaluate_all(s.root)[id(s.root)].lab)
    if n == 0:
        return 0
    # record totals never decrease towards the root, so capping is exact
    for q in range(1, n + 1):
        recs = chromatic_records(s, q)
        if stats is not None:
            stats["max_table"] = max(stats.get("max_table", 0), max(len(r) for r in recs.values()))
        if any(sum(r) == q for r in recs[id(s.root)]):
            return q
        assert not recs[id(s.root)]
    raise AssertionError("no coloring with n colors")


# ---------------------------------------------------------------------------
# footprint engine (q-coloring, CVC)


class _Footprints:
    """Dense tables over color masks of the active labels.

    ``poly`` is the length of the value axis: 1 for plain counts (object
    dtype), or the number of GF(2) coefficients for cut counting.
    """

    def __init__(self, e: Expression, nbits: int, conflict, intro, poly: int):
        self.e = e
        self.q = nbits
        self.base = 1 << nbits
        self.full = self.base - 1
        self.conflict = conflict
        self.intro = intro
        self.poly = poly
        self.graphs = X.evaluate_all(e.root)
        self.active = active_labels(e, self.graphs)
        self.max_rows = 0

    # tables are (act, arr) with arr of shape (base ** len(act), poly)

    def _empty(self, a: int) -> np.ndarray:
        if self.poly == 1:
            arr = np.empty((self.base**a, 1), dtype=object)
            arr.fill(0)
            return arr
        return np.zeros((self.base**a, self.poly), dtype=np.uint8)

    def _digits(self, a: int) -> np.ndarray:
        idx = np.arange(self.base**a)
        if a == 0:
            return np.zeros((1, 0), dtype=int)
        return np.stack([(idx // self.base**p) % self.base for p in range(a)], axis=1).reshape(-1, a)

    def _encode(self, digits: np.ndarray) -> np.ndarray:
        a = digits.shape[1]
        return (digits * (self.base ** np.arange(a))).sum(axis=1) if a else np.zeros(len(digits), dtype=int)

    def _scatter(self, arr: np.ndarray, target: np.ndarray, a_out: int) -> np.ndarray:
        out = self._empty(a_out)
        keep = target >= 0
        if self.poly == 1:
            for src, dst in zip(np.nonzero(keep)[0], target[keep]):
                out[dst, 0] += arr[src, 0]
        else:
            acc = np.zeros(out.shape, dtype=np.int64)
            np.add.at(acc, target[keep], arr[keep])
            out = (acc & 1).astype(np.uint8)
        return out

    def _remap(self, act_in, arr, act_out, sources, check_conflict=None):
        """Move every footprint to its image; ``sources[p]`` lists input positions feeding output label p."""
        d = self._digits(len(act_in))
        masks = np.zeros((len(d), len(act_out)), dtype=int)
        for p, src in enumerate(sources):
            for s in src:
                masks[:, p] |= d[:, s]
        ok = np.ones(len(d), dtype=bool)
        for p in range(len(act_in)):
            ok &= (d[:, p] != 0) & (d[:, p] != self.full)
        assert (masks[ok] != 0).all(), "an active label lost all its colors"
        ok &= (masks != self.full).all(axis=1)
        if check_conflict is not None:
            ok &= check_conflict(d)
        target = np.where(ok, self._encode(masks), -1)
        return tuple(act_out), self._scatter(arr, target, len(act_out))

    def leaf(self, node: X.Introduce):
        act = tuple(sorted(self.active[id(node)]))
        (lab,) = node.labels
        vals = self.intro(node.title)  # {single-color mask: value row}
        arr = self._empty(len(act))
        for mask, row in vals.items():
            if act:
                arr[mask] = row if self.poly > 1 else row
            else:
                if self.poly == 1:
                    arr[0, 0] += row[0]
                else:
                    arr[0] ^= row
        assert not act or act == (lab,)
        return act, arr

    def relabel(self, node: X.RelabelSet, child):
        act_in, arr = child
        act_out = tuple(sorted(self.active[id(node)]))
        sources = []
        for lab in act_out:
            sources.append([p for p, x in enumerate(act_in) if lab in _sigma(node, x)])
        return self._remap(act_in, arr, act_out, sources)

    def join(self, node: X.Join, child):
        act_in, arr = child
        act_out = tuple(sorted(self.active[id(node)]))
        pi = act_in.index(node.i) if node.i in act_in else None
        pj = act_in.index(node.j) if node.j in act_in else None
        sources = [[act_in.index(lab)] for lab in act_out]
        if pi is None or pj is None:
            return self._remap(act_in, arr, act_out, sources)
        return self._remap(act_in, arr, act_out, sources, lambda d: ~self.conflict(d[:, pi], d[:, pj]))

    def _bits_view(self, arr: np.ndarray, a: int) -> np.ndarray:
        # little-endian mixed radix: reverse so every bit is its own axis
        return arr.reshape((2,) * (self.q * a) + (arr.shape[1],))

    def _zeta(self, arr: np.ndarray, a: int, inverse: bool) -> np.ndarray:
        v = self._bits_view(arr.copy(), a)
        for ax in range(self.q * a):
            lo = [slice(None)] * v.ndim
            hi = [slice(None)] * v.ndim
            lo[ax], hi[ax] = 0, 1
            if inverse and self.poly == 1:
                v[tuple(hi)] = v[tuple(hi)] - v[tuple(lo)]
            else:
                v[tuple(hi)] = v[tuple(hi)] + v[tuple(lo)]
                if self.poly > 1:
                    v[tuple(hi)] &= 1
        return v.reshape(arr.shape)

    def union(self, node: X.Union, left, right):
        act_out = tuple(sorted(self.active[id(node)]))
        a = len(act_out)
        lifted = []
        for act_in, arr in (left, right):
            d = self._digits(len(act_in))
            full_d = np.zeros((len(d), a), dtype=int)
            for p, lab in enumerate(act_in):
                full_d[:, act_out.index(lab)] = d[:, p]
            out = self._empty(a)
            out[self._encode(full_d)] = arr
            lifted.append(self._zeta(out, a, inverse=False))
        if self.poly == 1:
            prod = lifted[0] * lifted[1]
        else:
            prod = _gf2_mul(lifted[0], lifted[1], self.poly)
        res = self._zeta(prod, a, inverse=True)
        d = self._digits(a)
        bad = ((d == 0) | (d == self.full)).any(axis=1) if a else np.zeros(1, dtype=bool)
        if self.poly == 1:
            res[bad] = 0
        else:
            res[bad] = 0
        return act_out, res

    def run(self):
        tabs = {}
        for node in X.iter_postorder(self.e.root):
            if isinstance(node, X.Introduce):
                t = self.leaf(node)
            elif isinstance(node, X.RelabelSet):
                t = self.relabel(node, tabs.pop(id(node.child)))
            elif isinstance(node, X.Join):
                t = self.join(node, tabs.pop(id(node.child)))
            elif isinstance(node, X.Union):
                t = self.union(node, tabs.pop(id(node.left)), tabs.pop(id(node.right)))
            else:
                raise ValueError(f"unexpected {X.kind(node)} node in a multi expression")
            self.max_rows = max(self.max_rows, int(np.count_nonzero(np.any(t[1] != 0, axis=1))))
            tabs[id(node)] = t
        act, arr = tabs[id(self.e.root)]
        assert act == ()
        return arr[0]


def _gf2_mul(a: np.ndarray, b: np.ndarray, length: int) -> np.ndarray:
    """Row-wise product of GF(2) polynomials, truncated to ``length`` coefficients."""
    n = 1
    while n < 2 * length:
        n *= 2
    fa = np.fft.rfft(a.astype(np.float64), n, axis=-1)
    fb = np.fft.rfft(b.astype(np.float64), n, axis=-1)
    prod = np.fft.irfft(fa * fb, n, axis=-1)[..., :length]
    return (np.rint(prod).astype(np.int64) & 1).astype(np.uint8)


def solve_q_coloring_count(e: Expression, q: int, stats: dict | None = None) -> int:
    if q < 2:
        raise ValueError("q must be at least 2")
    e = as_normalized_multi(e)
    if not X.evaluate_all(e.root)[id(e.root)].lab:
        return 1

    def conflict(mi, mj):
        return (mi & mj) != 0

    def intro(title):
        return {1 << c: np.array([1], dtype=object) for c in range(q)}

    eng = _Footprints(e, q, conflict, intro, 1)
    ans = int(eng.run()[0])
    if stats is not None:
        stats["max_table"] = eng.max_rows
    return ans


def footprint_keys(e: Expression, q: int) -> dict[int, tuple[tuple, set]]:
    """Active labels and nonzero footprints at every node (for invariant checks)."""
    e = as_normalized_multi(e)

    def conflict(mi, mj):
        return (mi & mj) != 0

    def intro(title):
        return {1 << c: np.array([1], dtype=object) for c in range(q)}

    eng = _Footprints(e, q, conflict, intro, 1)
    out = {}
    tabs = {}
    for node in X.iter_postorder(e.root):
        if isinstance(node, X.Introduce):
            t = eng.leaf(node)
        elif isinstance(node, X.RelabelSet):
            t = eng.relabel(node, tabs[id(node.child)])
        elif isinstance(node, X.Join):
            t = eng.join(node, tabs[id(node.child)])
        else:
            t = eng.union(node, tabs[id(node.left)], tabs[id(node.right)])
        tabs[id(node)] = t
        act, arr = t
        d = eng._digits(len(act))
        nz = {tuple(int(x) for x in d[r]) for r in range(len(d)) if arr[r, 0] != 0}
        out[id(node)] = (act, nz)
    return out


# ---------------------------------------------------------------------------
# Cut&Count


@dataclass
class CutCountContext:
    seed: int = 0
    trials: int = 10
    v_star: str | None = None
    weights: dict | None = None


_L, _R, _N = 1, 2, 4


def _weights_for(titles: list[str], rng: np.random.Generator) -> dict[str, int]:
    n = len(titles)
    return {t: int(rng.integers(1, 2 * n + 1)) for t in titles}


def _exponent(c: int, w: int, wmax: int) -> int:
    return c * (wmax + 1) + w


def _first_odd(poly: np.ndarray, wmax: int) -> int | None:
    nz = np.nonzero(poly)[0]
    if not len(nz):
        return None
    return int(nz.min() // (wmax + 1))


def cvc_parity(e: Expression, v_star: str, weights: dict[str, int], cap: int | None = None,
               stats: dict | None = None) -> np.ndarray:
    """GF(2) polynomial of consistent cuts (L, R) whose union is a vertex cover.

    Coefficient ``c * (W + 1) + w`` is the parity of cuts with |L u R| = c and
    weight w, where W = 2 n^2; cardinalities above ``cap`` are dropped.
    """
    n = len(weights)
    wmax = 2 * n * n
    cmax = n if cap is None else cap
    length = (cmax + 1) * (wmax + 1)

    def conflict(mi, mj):
        lr = ((mi & _L) != 0) & ((mj & _R) != 0)
        rl = ((mi & _R) != 0) & ((mj & _L) != 0)
        nn = ((mi & _N) != 0) & ((mj & _N) != 0)
        return lr | rl | nn

    def intro(title):
        out = {}
        one = np.zeros(length, dtype=np.uint8)
        e1 = _exponent(1, weights[title], wmax)
        if e1 < length:
            one[e1] = 1
        none = np.zeros(length, dtype=np.uint8)
        none[0] = 1
        out[_L] = one
        if title != v_star:
            out[_R] = one.copy()
            out[_N] = none
        return out

    eng = _Footprints(e, 3, conflict, intro, length)
    res = eng.run()
    if stats is not None:
        stats["max_table"] = max(stats.get("max_table", 0), eng.max_rows)
    return res


def _cut_count_driver(e: Expression, ctx: CutCountContext, parity_fn, stats: dict | None):
    g = X.evaluate(e)
    titles = g.titles()
    n = len(titles)
    wmax = 2 * n * n
    best = None
    ss = np.random.SeedSequence(ctx.seed)
    children = ss.spawn(ctx.trials)
    for trial in range(ctx.trials):
        weights = ctx.weights or _weights_for(titles, np.random.default_rng(children[trial]))
        stars = [ctx.v_star] if ctx.v_star is not None else titles
        for vs in stars:
            cap = n if best is None else best - 1
            if cap < 1:
                break
            poly = parity_fn(e, vs, weights, cap, stats)
            c = _first_odd(poly, wmax)
            if c is not None and (best is None or c < best):
                best = c
        if best == 1 or ctx.weights is not None:
            break
    if stats is not None:
        stats["seed"] = ctx.seed
    return best


def solve_cvc(e: Expression, ctx: CutCountContext | None = None, stats: dict | None = None) -> int | None:
    """Minimum connected vertex cover (randomized; None when no trial finds one)."""
    ctx = ctx or CutCountContext()
    e = as_normalized_multi(e)
    g = X.evaluate(e)
    if not g.edges:
        return 0
    return _cut_count_driver(e, ctx, cvc_parity, stats)


# ---------------------------------------------------------------------------
# Connected Dominating Set

# states: 0 = {}, 1 = {F}, 2 = {L}, 3 = {R}, 4 = two or more of L, R, F
_EMPTY, _F, _SL, _SR, _TWO = range(5)

FEAS = np.array(
    [
        [1, 1, 1, 1, 1],
        [1, 1, 0, 0, 0],
        [1, 0, 1, 0, 0],
        [1, 0, 0, 1, 0],
        [1, 0, 0, 0, 0],
    ],
    dtype=bool,
)

MERGE = np.array(
    [
        [_EMPTY, _F, _SL, _SR, _TWO],
        [_F, _F, _TWO, _TWO, _TWO],
        [_SL, _TWO, _SL, _TWO, _TWO],
        [_SR, _TWO, _TWO, _SR, _TWO],
        [_TWO, _TWO, _TWO, _TWO, _TWO],
    ],
    dtype=np.int64,
)


def _pad_removals(e: Expression) -> Expression:
    root = e.root
    for lab in range(1, e.k + 1):
        root = X.RelabelSet(lab, (), root)
    return X.make_expression("multi", root, e.k)


def cds_parity(e: Expression, v_star: str, weights: dict[str, int], cap: int | None = None,
               padded: bool = False, stats: dict | None = None) -> np.ndarray:
    """GF(2) polynomial of consistent cuts (L, R) whose union dominates the graph.

    ``e`` must be normalized; the removal relabels for every label are added
    on top unless ``padded`` is set.
    """
    if not padded:
        e = _pad_removals(e)
    k = e.k
    n = len(weights)
    wmax = 2 * n * n
    cmax = n if cap is None else cap
    length = (cmax + 1) * (wmax + 1)
    nsig = 5**k
    pw = 5 ** np.arange(k)
    sigs = np.stack([(np.arange(nsig) // pw[p]) % 5 for p in range(k)], axis=1).reshape(nsig, k)

    def scatter(arr, target):
        acc = np.zeros((nsig, length), dtype=np.int64)
        keep = target >= 0
        np.add.at(acc, target[keep], arr[keep])
        return (acc & 1).astype(np.uint8)

    nfft = 1
    while nfft < 2 * length:
        nfft *= 2
    tabs: dict[int, np.ndarray] = {}
    for node in X.iter_postorder(e.root):
        if isinstance(node, X.Introduce):
            (lab,) = node.labels
            arr = np.zeros((nsig, length), dtype=np.uint8)
            p = 5 ** (lab - 1)
            e1 = _exponent(1, weights[node.title], wmax)
            if node.title != v_star:
                arr[0, 0] ^= 1
                arr[_F * p, 0] ^= 1
                if e1 < length:
                    arr[_SR * p, e1] ^= 1
            if e1 < length:
                arr[_SL * p, e1] ^= 1
            tabs[id(node)] = arr
        elif isinstance(node, X.Join):
            arr = tabs.pop(id(node.child)).copy()
            ok = FEAS[sigs[:, node.i - 1], sigs[:, node.j - 1]]
            arr[~ok] = 0
            tabs[id(node)] = arr
        elif isinstance(node, X.RelabelSet):
            arr = tabs.pop(id(node.child))
            i = node.i - 1
            new = sigs.copy()
            if not node.targets:
                new[:, i] = _EMPTY
            else:
                (j,) = set(node.targets) - {node.i}
                j -= 1
                new[:, j] = MERGE[sigs[:, j], sigs[:, i]]
            tabs[id(node)] = scatter(arr, (new * pw).sum(axis=1))
        elif isinstance(node, X.Union):
            a = tabs.pop(id(node.left))
            b = tabs.pop(id(node.right))
            ra = np.nonzero(a.any(axis=1))[0]
            rb = np.nonzero(b.any(axis=1))[0]
            fa = np.fft.rfft(a[ra].astype(np.float64), nfft, axis=-1)
            fb = np.fft.rfft(b[rb].astype(np.float64), nfft, axis=-1)
            acc = np.zeros((nsig, fa.shape[1] if len(ra) else nfft // 2 + 1), dtype=np.complex128)
            for x, row in enumerate(ra):
                merged = (MERGE[sigs[row][None, :], sigs[rb]] * pw).sum(axis=1)
                np.add.at(acc, merged, fa[x][None, :] * fb)
            prod = np.fft.irfft(acc, nfft, axis=-1)[:, :length]
            tabs[id(node)] = (np.rint(prod).astype(np.int64) & 1).astype(np.uint8)
        else:
            raise ValueError(f"unexpected {X.kind(node)} node in a multi expression")
        if stats is not None:
            rows = int(np.count_nonzero(tabs[id(node)].any(axis=1)))
            stats["max_table"] = max(stats.get("max_table", 0), rows)
    root = tabs[id(e.root)]
    assert not root[1:].any(), "padded root has a non-empty signature"
    return root[0]


def solve_cds(e: Expression, ctx: CutCountContext | None = None, stats: dict | None = None) -> int | None:
    """Minimum connected dominating set (randomized; None when no trial finds one)."""
    ctx = ctx or CutCountContext()
    e = as_normalized_multi(e)
    g = X.evaluate(e)
    if g.n == 0:
        raise ValueError("connected dominating set of the empty graph is undefined")
    if not g.is_connected():
        raise ValueError("connected dominating set needs a connected graph")
    padded = _pad_removals(e)

    def parity(_e, vs, weights, cap, st):
        return cds_parity(padded, vs, weights, cap, padded=True, stats=st)

    return _cut_count_driver(e, ctx, parity, stats)


SOLVERS = ("ds", "qcolor", "chromatic", "cvc", "cds")


def solve(problem: str, e: Expression, q: int | None = None, ctx: CutCountContext | None = None):
    from .solvers_fw import SolveReport

    stats: dict = {}
    ctx = ctx or CutCountContext()
    if problem == "ds":
        ans = solve_dominating_set(e, stats)
    elif problem == "qcolor":
        if q is None:
            raise ValueError("qcolor needs q")
        ans = solve_q_coloring_count(e, q, stats)
    elif problem == "chromatic":
        ans = solve_chromatic_number(e, stats)
    elif problem == "cvc":
        ans = solve_cvc(e, ctx, stats)
    elif problem == "cds":
        ans = solve_cds(e, ctx, stats)
    else:
        raise ValueError(f"unknown problem {problem!r}")
    seed = ctx.seed if problem in ("cvc", "cds") else None
    return SolveReport(ans, seed, stats.get("max_table", 0), None, stats)

