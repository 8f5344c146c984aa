"""Command line front end.

Exit codes: 0 on success, 1 on domain errors (bad expression, size guard,
failed check), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import re
import sys
import time
from pathlib import Path

from . import expr as X
from . import oracle as O
from . import repsets as P
from . import rewrite as R
from . import solvers_fw as FW
from . import solvers_mcw as MCW
from .graph_core import format_graph, graphs_equal, parse_graph

DEFAULT_SEED = 0
FW_PROBLEMS = ("maxcut", "eds", "hc")
MCW_PROBLEMS = ("ds", "qcolor", "chromatic", "cvc", "cds")


class UsageError(Exception):
    pass


def guess_dialect(text: str) -> str:
    if "~" in text:
        return "glue"
    if re.search(r"->\s*\{", text) or re.search(r"<\s*\d+\s*,", text):
        return "multi"
    if re.search(r"(?<![A-Za-z0-9_])f\d+\s*\(", text):
        return "fuse"
    return "clique"


def _read_expr(args) -> X.Expression:
    path = args.expr
    if path is None:
        raise UsageError("--expr is required")
    text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    dialect = args.dialect or guess_dialect(text)
    return X.parse_expression(text, dialect)


def _add_expr(p: argparse.ArgumentParser, positional: bool = False):
    if positional:
        p.add_argument("expr", nargs="?", help="expression file ('-' for stdin)")
    else:
        p.add_argument("--expr", help="expression file ('-' for stdin)")
    p.add_argument("--dialect", choices=("clique", "fuse", "glue", "multi"))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fusewidth", description="Labeled-graph expressions and width-parameterized solvers.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    for name, help_ in (
        ("parse", "parse and print the canonical form"),
        ("validate", "report violations of the dialect rules"),
        ("eval", "print the labeled graph"),
    ):
        p = sub.add_parser(name, help=help_)
        _add_expr(p, positional=True)
        p.add_argument("--expr", dest="expr_flag")

    p = sub.add_parser("convert", help="run a rewriting pipeline")
    _add_expr(p)
    p.add_argument("--to", required=True, choices=("glue", "reduced-glue", "multi", "normalized-multi"))
    p.add_argument("--report-size", action="store_true")
    p.add_argument("--out")

    p = sub.add_parser("solve", help="solve a graph problem on an expression")
    _add_expr(p)
    p.add_argument("--problem", required=True, choices=FW_PROBLEMS + MCW_PROBLEMS)
    p.add_argument("--q", type=int)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--stats", action="store_true")

    p = sub.add_parser("oracle", help="brute-force answer on a graph file")
    p.add_argument("--problem", required=True, choices=O.PROBLEMS)
    p.add_argument("--graph", required=True)
    p.add_argument("--q", type=int)

    p = sub.add_parser("gen", help="print a random expression")
    p.add_argument("--dialect", required=True, choices=("clique", "fuse", "glue", "multi"))
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--ops", type=int, required=True)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)

    p = sub.add_parser("check", help="run a property suite")
    p.add_argument("--suite", required=True, choices=("roundtrip", "solvers", "repsets"))
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    return ap


# ---------------------------------------------------------------------------
# commands


def cmd_parse(args, out):
    out.append(X.serialize_expression(_read_expr(args)))


def cmd_validate(args, out):
    e = _read_expr(args)
    rep = X.validate(e)
    if rep.ok:
        out.append("ok")
        return 0
    out.extend(str(v) for v in rep.violations)
    return 1


def cmd_eval(args, out):
    e = _read_expr(args)
    out.append(format_graph(X.evaluate(e)).rstrip("\n"))


def cmd_convert(args, out):
    e = _read_expr(args)
    g = X.evaluate(e)
    n, m = g.n, len(g.edges)
    if args.to == "glue":
        res = R.fuse_to_glue(e) if e.dialect != "glue" else e
    elif args.to == "reduced-glue":
        res = FW.as_reduced_glue(e)
    elif args.to == "multi":
        res = R.fuse_to_multi(e) if e.dialect != "multi" else e
    else:
        res = MCW.as_normalized_multi(e)
    text = X.serialize_expression(res)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        out.append(text)
    if args.report_size:
        out.append(f"input-nodes {e.size()}")
        out.append(f"output-nodes {res.size()}")
        out.append(f"n {n}")
        out.append(f"m {m}")
        out.append(f"k {res.k}")
        if args.to == "reduced-glue":
            bound = R.glue_bound(e.k, m, n)
            out.append(f"bound {bound}")
            out.append(f"ratio {res.size() / bound:.4f}")
        elif args.to == "normalized-multi":
            bound = R.multi_bound(e.k, n)
            out.append(f"bound {bound}")
            out.append(f"ratio {res.size() / bound:.4f}")


def cmd_solve(args, out):
    if args.problem == "qcolor" and args.q is None:
        raise UsageError("--problem qcolor needs --q")
    if args.trials < 1:
        raise UsageError("--trials must be positive")
    e = _read_expr(args)
    if args.problem in FW_PROBLEMS:
        rep = FW.solve(args.problem, e)
    else:
        ctx = MCW.CutCountContext(seed=args.seed, trials=args.trials)
        rep = MCW.solve(args.problem, e, q=args.q, ctx=ctx)
    out.extend(rep.lines())
    if args.stats:
        for key in sorted(rep.stats):
            val = rep.stats[key]
            if isinstance(val, (int, float, str)):
                out.append(f"stat {key} {val}")


def cmd_oracle(args, out):
    if args.problem == "qcolor" and args.q is None:
        raise UsageError("--problem qcolor needs --q")
    g = parse_graph(Path(args.graph).read_text(encoding="utf-8"))
    ans = O.brute_force(args.problem, g, {"q": args.q} if args.q is not None else None)
    out.append(f"answer {FW.format_answer(ans)}")


def cmd_gen(args, out):
    if args.k < 1 or args.ops < 1:
        raise UsageError("--k and --ops must be positive")
    e = O.gen_expression(O.GenConfig(args.dialect, args.k, args.ops, args.seed))
    out.append(X.serialize_expression(e))


def cmd_check(args, out):
    suite = {"roundtrip": check_roundtrip, "solvers": check_solvers, "repsets": check_repsets}[args.suite]
    t0 = time.perf_counter()
    passed, failed, notes = suite(args.trials, args.seed)
    out.extend(notes)
    out.append(f"suite {args.suite} pass {passed} fail {failed}")
    print(f"elapsed {time.perf_counter() - t0:.2f}s", file=sys.stderr)
    return 0 if failed == 0 else 1


# ---------------------------------------------------------------------------
# property suites


def check_roundtrip(trials: int, seed: int):
    passed = failed = 0
    notes = []
    for s in range(seed, seed + trials):
        k = 1 + s % 4
        e = O.gen_expression(O.GenConfig("fuse", k, 30, s))
        g = X.evaluate(e)
        problems = []
        rg = R.fuse_to_reduced_glue(e, check_bound=False)
        if not graphs_equal(X.evaluate(rg), g):
            problems.append("reduced glue evaluates differently")
        if R.reducedness_violations(rg):
            problems.append("reduced glue is not reduced")
        if rg.size() > R.glue_bound(k, len(g.edges), g.n):
            problems.append("reduced glue over the size bound")
        me = R.fuse_to_multi(e)
        mg = X.evaluate(me)
        if me.k > k + 1 or set(mg.vertices) != set(g.vertices) or mg.edges != g.edges:
            problems.append("multi form differs")
        nm = R.normalize_multi(me, check_bound=False)
        if nm.size() > R.multi_bound(k, g.n) or R.multi_violations(nm):
            problems.append("normalized multi too large or not normalized")
        if problems:
            failed += 1
            notes.append(f"seed {s}: " + "; ".join(problems))
        else:
            passed += 1
    return passed, failed, notes


def check_solvers(trials: int, seed: int):
    passed = failed = 0
    notes = []
    for s in range(seed, seed + trials):
        k = 2 + s % 2
        fe = O.gen_instance("fuse", k, s)
        me = O.gen_instance("multi", k, s)
        runs = [(p, fe, None) for p in FW_PROBLEMS]
        runs += [("ds", me, None), ("chromatic", me, None), ("qcolor", me, 2 + s % 2), ("cvc", me, None)]
        gm = X.evaluate(me)
        if gm.is_connected():
            runs.append(("cds", me, None))
        for problem, e, q in runs:
            g = X.evaluate(e)
            if problem in FW_PROBLEMS:
                got = FW.solve(problem, e).answer
            else:
                got = MCW.solve(problem, e, q=q, ctx=MCW.CutCountContext(seed=s, trials=10)).answer
            want = O.brute_force(problem, g, {"q": q})
            if got == want:
                passed += 1
            else:
                failed += 1
                notes.append(f"seed {s} {problem}: got {FW.format_answer(got)} want {FW.format_answer(want)}")
    return passed, failed, notes


def check_repsets(trials: int, seed: int):
    passed = failed = 0
    notes = []
    blues = {k: P.blue_multigraphs(k, 4) for k in (1, 2, 3)}
    for s in range(seed, seed + trials):
        n, k = 3 + s % 5, 1 + s % 3
        g = O.random_graph(n, 0.5, s, k)
        fam = P.maximal_packings(g)
        red = P.reduce_family(fam, g)
        bad = P.representativity_violations(g, fam, blues[k])
        if len(red) > P.family_bound(n, k):
            bad.append(f"{len(red)} representatives over the bound")
        if bad:
            failed += 1
            notes.extend(f"seed {s}: {b}" for b in bad)
        else:
            passed += 1
    return passed, failed, notes


COMMANDS = {
    "parse": cmd_parse,
    "validate": cmd_validate,
    "eval": cmd_eval,
    "convert": cmd_convert,
    "solve": cmd_solve,
    "oracle": cmd_oracle,
    "gen": cmd_gen,
    "check": cmd_check,
}


def run(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    if args.cmd in ("parse", "validate", "eval"):
        args.expr = args.expr or args.expr_flag
    out: list[str] = []
    try:
        code = COMMANDS[args.cmd](args, out) or 0
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        ap.print_usage(sys.stderr)
        return 2
    except (ValueError, RuntimeError, AssertionError, OSError) as exc:
        for line in out:
            print(line)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for line in out:
        print(line)
    return code


def main() -> None:
    sys.exit(run())
