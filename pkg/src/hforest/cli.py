"""Command-line entry point.

Exit codes: 0 success or expected outcome, 1 identity violated, 2 usage or
parse error, 3 enumeration budget exceeded.  JSON output is the stable
contract; text output is for people.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Optional

from . import formulas
from .enumerate import DEFAULT_BUDGET, BudgetExceeded, MissingTags, brute_force_enumerator
from .formulas import Sides, det_enumerator
from .graph import (
    CATALOG_BASES,
    Digraph,
    InvalidSize,
    NotAHypercube,
    ParseError,
    base_graph,
    cartesian_product,
    complete_bipartite_strong,
    complete_graph,
    complete_graph_product,
    graph_from_json,
    graph_to_json,
    hypercube,
    hypercube_with_diagonals,
    reindex_directions,
    strong_product_k2,
    with_unit_weights,
)
from .independence import (
    NotFound,
    search_subforest_counterexample,
    verify_bipartite_forced,
    verify_multispin_independence,
    verify_spin_independence,
)
from .laplacian import kronecker_sum_check, product_resultant_sides
from .poly import canonical_string
from .suite import run_suite

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3

IDENTITIES = (
    "cube",
    "diagonals",
    "complete-product",
    "cayley",
    "k2-induction",
    "collapse",
    "matrix-tree",
    "kronecker",
    "prop41",
    "rooted-at-v",
    "degree-enumerator",
    "root-vanishing",
    "count",
)


class UsageError(Exception):
    pass


def resolve_graph(spec: str, index: int = 1) -> Digraph:
    """A catalog name, ``kP`` for K_P, optionally ``:unit``, or a JSON path.

    Complete graphs and k2/k3 get direction index ``index`` so that the two
    factors of a product keep distinct variables.
    """
    unit = spec.endswith(":unit")
    name = spec[: -len(":unit")] if unit else spec
    if name in CATALOG_BASES:
        g = base_graph(name)
        if name in ("k2", "k3"):
            g = reindex_directions(g, index)
    elif name.startswith("k") and name[1:].isdigit():
        g = complete_graph(int(name[1:]), index)
    else:
        path = Path(name)
        if not path.exists():
            raise UsageError(f"unknown graph {spec!r} (not a catalog name or a file)")
        g = graph_from_json(path.read_text())
    return with_unit_weights(g) if unit else g


def _emit(args, payload: dict, text: str):
    out = json.dumps(payload, sort_keys=True, indent=None) if args.format == "json" else text
    if args.out:
        Path(args.out).write_text(out + "\n")
    else:
        print(out)


def _need(value, flag: str):
    if value is None:
        raise UsageError(f"{flag} is required")
    return value


# -- gen ----------------------------------------------------------------------


def cmd_gen(args) -> int:
    fam = args.family
    if fam == "complete":
        g = complete_graph(_need(args.p, "--p"), args.index)
    elif fam == "hypercube":
        g = hypercube(_need(args.n, "--n"))
    elif fam == "hypercube-diag":
        n = _need(args.n, "--n")
        if n < 1:
            raise UsageError("hypercube-diag needs --n >= 1")
        g = hypercube_with_diagonals(n)
    elif fam == "bipartite":
        g, _ = complete_bipartite_strong(_need(args.p, "--p"), args.m or 0)
    elif fam == "cartesian":
        g = cartesian_product(
            resolve_graph(_need(args.g, "--g"), 1), resolve_graph(_need(args.h, "--h"), 2), vertical=args.vertical
        )
    elif fam == "strongk2":
        g = strong_product_k2(resolve_graph(_need(args.base, "--base")))
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown family {fam}")
    text = graph_to_json(g)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return EXIT_OK


# -- enumerator ---------------------------------------------------------------


def poly_payload(p) -> dict:
    terms = [[{v.name: e for v, e in m.items()}, c] for m, c in p.terms()]
    terms.sort(key=lambda tc: (json.dumps(tc[0], sort_keys=True), tc[1]))
    return {"polynomial": canonical_string(p), "terms": terms}


def cmd_enumerator(args) -> int:
    g = resolve_graph(args.graph)
    if args.method == "det":
        p = det_enumerator(g)
    else:
        p = brute_force_enumerator(g, args.budget, args.threads)
    _emit(args, {"method": args.method, **poly_payload(p)}, canonical_string(p))
    return EXIT_OK


# -- verify -------------------------------------------------------------------


def _verify_sides(args) -> tuple[list[tuple[str, Sides]], dict]:
    ident = args.identity
    checks: list[tuple[str, Sides]] = []
    extra: dict = {}
    if ident == "cube":
        n = _need(args.n, "--n")
        checks.append((f"n={n}", formulas.cube_sides(n)))
    elif ident == "diagonals":
        n = _need(args.n, "--n")
        checks.append((f"n={n}", formulas.diagonals_sides(n)))
    elif ident == "complete-product":
        pl = _need(args.p, "--p")
        det = formulas.shift_spins(det_enumerator(complete_graph_product(pl)), 1)
        checks.append((f"p={pl}", Sides(formulas.complete_product(pl), det)))
    elif ident == "cayley":
        p = _need(args.p, "--p")[0]
        det = formulas.shift_spins(det_enumerator(complete_graph(p, 1)), 1)
        checks.append((f"p={p}", Sides(formulas.cayley_formula(p), det)))
    elif ident == "k2-induction":
        checks.append((args.base, formulas.k2_induction_sides(resolve_graph(_need(args.base, "--base")))))
    elif ident == "collapse":
        if args.n is not None:
            g = hypercube_with_diagonals(args.n) if args.diag else hypercube(args.n)
            for d in range(1, args.n + 1):
                checks.append((f"direction {d}", formulas.collapse_sides(g, d)))
        else:
            g = strong_product_k2(resolve_graph(_need(args.base, "--base")))
            checks.append((f"strongk2({args.base})", formulas.collapse_sides(g, 0)))
    elif ident == "matrix-tree":
        g = resolve_graph(_need(args.graph or args.base, "--graph"))
        checks.append(("brute = det", Sides(brute_force_enumerator(g, args.budget, args.threads), det_enumerator(g))))
    elif ident == "kronecker":
        ok = kronecker_sum_check(resolve_graph(_need(args.g, "--g"), 1), resolve_graph(_need(args.h, "--h"), 2))
        one = formulas.Polynomial.const(1)
        checks.append(("entrywise", Sides(one, one if ok else formulas.Polynomial())))
    elif ident == "prop41":
        g = resolve_graph(_need(args.g, "--g"), 1)
        h = resolve_graph(_need(args.h, "--h"), 2)
        checks.append((f"{args.g} x {args.h}", Sides(*product_resultant_sides(g, h))))
    elif ident == "rooted-at-v":
        n = _need(args.n, "--n")
        verts = [args.v] if args.v else [format(i, f"0{n}b") for i in range(1 << n)]
        for v in verts:
            checks.append((f"v={v}", Sides(formulas.rooted_at_v(n, v), formulas.rooted_at_v_det(n, v))))
    elif ident == "degree-enumerator":
        n = _need(args.n, "--n")
        closed = formulas.degree_enumerator_closed(n)
        rebuilt = formulas.degree_enumerator_from_rooted(n, formulas.rooted_at_v_det(n, "0" * n))
        checks.append(("substitution", Sides(rebuilt, closed)))
        if n <= 2:
            checks.append(("direct", Sides(formulas.degree_enumerator_direct(n), closed)))
    elif ident == "root-vanishing":
        n = _need(args.n, "--n")
        subsets = [args.S] if args.S is not None else [[i + 1 for i in range(n) if m >> i & 1] for m in range(1 << n)]
        f = det_enumerator(hypercube_with_diagonals(n))
        for S in subsets:
            value = f.substitute({formulas.T: formulas.root_value(S)})
            checks.append((f"S={S}", Sides(value, formulas.Polynomial())))
    elif ident == "count":
        n = _need(args.n, "--n")
        value = formulas.spanning_count_cn(n)
        extra["value"] = value
        if n <= 3:
            via_det = formulas.spanning_count_from_det(n)
            checks.append(("det", Sides(formulas.Polynomial.const(value), formulas.Polynomial.const(via_det))))
    return checks, extra


def cmd_verify(args) -> int:
    checks, extra = _verify_sides(args)
    results = []
    ok = True
    for label, sides in checks:
        entry = {"check": label, "ok": sides.ok}
        if not sides.ok:
            ok = False
            entry["lhs"] = canonical_string(sides.lhs)
            entry["rhs"] = canonical_string(sides.rhs)
            entry["diff"] = canonical_string(sides.lhs - sides.rhs)
        results.append(entry)
    payload = {"identity": args.identity, "ok": ok, "checks": results, **extra}
    lines = [f"{args.identity}: {'PASS' if ok else 'FAIL'}"]
    lines += [f"  {r['check']}: {'ok' if r['ok'] else 'MISMATCH'}" for r in results]
    if "value" in extra:
        lines.append(f"  value: {extra['value']}")
    for r in results:
        if not r["ok"]:
            lines.append(f"  lhs - rhs: {r['diff']}")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK if ok else EXIT_MISMATCH


# -- independence -------------------------------------------------------------


def cmd_independence(args) -> int:
    kind = args.kind
    if kind == "spin":
        name = args.base or "k2"
        rep = verify_spin_independence(resolve_graph(name), name, args.budget, args.threads)
        code = EXIT_OK if rep.verdict == "PASS" and rep.extra["sizes_divisible"] else EXIT_MISMATCH
    elif kind == "bipartite":
        rep = verify_bipartite_forced(_need(args.p, "--p"), _need(args.m, "--m"), args.budget)
        code = EXIT_OK if rep.verdict == "PASS" else EXIT_MISMATCH
    elif kind == "multispin":
        name = args.base or "k2"
        rep = verify_multispin_independence(resolve_graph(name), args.p or 3, name, args.budget, args.threads)
        code = EXIT_OK
    else:
        try:
            rep = search_subforest_counterexample(args.budget, args.threads)
        except NotFound as exc:
            print(f"NOT FOUND: {exc}", file=sys.stderr)
            return EXIT_MISMATCH
        code = EXIT_OK
    payload = rep.to_dict()
    text = f"{rep.graph}: {rep.verdict} ({len(rep.classes)} classes, {len(rep.violations)} violating)"
    if rep.experimental:
        text += " [EXPERIMENTAL]"
    if rep.witness is not None:
        text += f"\ncounterexample found; {rep.extra['dependent_classes']} dependent classes"
        text += f"\nwitness: {json.dumps(rep.witness['violation'])}"
    _emit(args, payload, text)
    return code


# -- verify-all ---------------------------------------------------------------


def cmd_verify_all(args) -> int:
    outcomes = run_suite(args.budget, args.threads, fault=args.inject_fault)
    failed = [o for o in outcomes if o.status == "FAIL" and not o.experimental]
    payload = {
        "results": [
            {"name": o.name, "status": o.status, "seconds": round(o.seconds, 3), "experimental": o.experimental, "detail": o.detail}
            for o in outcomes
        ],
        "ok": not failed,
    }
    width = max(len(o.name) for o in outcomes) if outcomes else 10
    lines = [f"{'identity':<{width}}  status            time"]
    for o in outcomes:
        tag = " (experimental)" if o.experimental else ""
        lines.append(f"{o.name:<{width}}  {o.status:<16}  {o.seconds:7.2f}s{tag}")
        if o.status == "FAIL":
            lines.append(f"    {o.detail.get('message')}")
            if o.detail.get("diff") is not None:
                lines.append(f"    lhs - rhs: {o.detail['diff']}")
            elif o.detail.get("lhs") is not None:
                lines.append(f"    got {o.detail['lhs']}, expected {o.detail['rhs']}")
    _emit(args, payload, "\n".join(lines))
    return EXIT_MISMATCH if failed else EXIT_OK


# -- parser -------------------------------------------------------------------


def _positive(value: str) -> int:
    iv = int(value)
    if iv < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return iv


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget", type=_positive, default=None, help="max out-arc assignments (env HFOREST_BUDGET)")
    common.add_argument("--threads", type=_positive, default=None, help="worker processes (env HFOREST_THREADS)")
    common.add_argument("--format", choices=("json", "text"), default="text")
    common.add_argument("--out", default=None, help="write output here instead of stdout")

    parser = argparse.ArgumentParser(prog="hforest", description="Rooted-forest enumerators: compute and cross-verify.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", parents=[common], help="write a graph family as JSON")
    gen.add_argument("family", choices=("complete", "hypercube", "hypercube-diag", "bipartite", "cartesian", "strongk2"))
    gen.add_argument("--n", type=int)
    gen.add_argument("--p", type=int)
    gen.add_argument("--m", type=int)
    gen.add_argument("--index", type=int, default=1)
    gen.add_argument("--g")
    gen.add_argument("--h")
    gen.add_argument("--vertical", action="store_true")
    gen.add_argument("--base")
    gen.set_defaults(func=cmd_gen)

    en = sub.add_parser("enumerator", parents=[common], help="forest enumerator of a graph")
    en.add_argument("--graph", required=True)
    en.add_argument("--method", choices=("det", "brute"), default="det")
    en.set_defaults(func=cmd_enumerator)

    ver = sub.add_parser("verify", parents=[common], help="check one identity exactly")
    ver.add_argument("identity", choices=IDENTITIES)
    ver.add_argument("--n", type=int)
    ver.add_argument("--p", type=int, nargs="+")
    ver.add_argument("--g")
    ver.add_argument("--h")
    ver.add_argument("--base")
    ver.add_argument("--graph")
    ver.add_argument("--v")
    ver.add_argument("--S", type=int, nargs="*")
    ver.add_argument("--diag", action="store_true")
    ver.set_defaults(func=cmd_verify)

    ind = sub.add_parser("independence", parents=[common], help="exhaustive spin-independence experiments")
    ind.add_argument("kind", choices=("spin", "bipartite", "multispin", "subforest-counterexample"))
    ind.add_argument("--base")
    ind.add_argument("--p", type=int)
    ind.add_argument("--m", type=int)
    ind.set_defaults(func=cmd_independence)

    va = sub.add_parser("verify-all", parents=[common], help="run the full desk-scale suite")
    va.add_argument("--inject-fault", default=None, help=argparse.SUPPRESS)
    va.set_defaults(func=cmd_verify_all)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.budget is None:
            args.budget = int(os.environ.get("HFOREST_BUDGET", DEFAULT_BUDGET))
        if args.threads is None:
            args.threads = max(1, int(os.environ.get("HFOREST_THREADS", 1)))
    except ValueError:
        print("error: HFOREST_BUDGET / HFOREST_THREADS must be integers", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, ParseError, InvalidSize, NotAHypercube, MissingTags, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main_exit():
    sys.exit(main())
