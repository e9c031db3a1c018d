"""ckgraph command line.

Exit codes: 0 success, 1 a verification failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from typing import List, Optional

from .bhk import finite_formula, k_groups_finite, verify_k1_is_h1
from .bigraph import GraphError, associate_bigraph, betti_finite
from .desc import GraphDescription, truncate
from .ends import (base_dead_ends, betti, count_axes_links, is_rose_tree_desc, k_groups, valency_invariance,
                   valency_set)
from .generate import (random_disjoint_subgraphs, random_graph_with_beta, random_ray_description,
                       random_tree_forest)
from .reduce import ReductionError, reduce_description
from .shrink import SplitSpace, k_invariance, validate_tree_components, verify_J, verify_Pi
from .textio import emit, parse

OK, FAILED, BAD_INPUT = 0, 1, 2


def read_input(path: str) -> GraphDescription:
    if path == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise GraphError(f"cannot read {path}: {exc.strerror}") from None
    return parse(text)


def _card(n: Optional[int]) -> str:
    return "countable" if n is None else str(n)


def cmd_info(args) -> int:
    desc = read_input(args.file)
    n_axes, n_links = count_axes_links(desc)
    print(f"axes: {_card(n_axes)}")
    print(f"links: {_card(n_links)}")
    print(f"components: {len(desc.components())}")
    print(f"rays: {len(desc.rays)}")
    rose = "yes" if is_rose_tree_desc(desc) else "no"
    print(f"beta={betti_total(desc)} gamma={valency_set(desc).gamma} rose-tree={rose}")
    ends = base_dead_ends(desc)
    print(f"dead ends: {', '.join(ends) if ends else 'none'}")
    return OK


def betti_total(desc: GraphDescription):
    total = None
    for comp in desc.components():
        b = betti(comp)
        total = b if total is None else total + b
    return total


def cmd_kgroups(args) -> int:
    desc = read_input(args.file)
    k0, k1 = k_groups(desc, args.depth)
    if args.json:
        print(json.dumps({"k0": k0.to_json(), "k1": k1.to_json(torsion=False)}, separators=(",", ":")))
    else:
        print(f"K0 = {k0}")
        print(f"K1 = {k1}")
    return OK


def cmd_reduce(args) -> int:
    desc = read_input(args.file)
    if not desc.is_connected():
        raise GraphError("reduction needs a connected graph; reduce each component separately")
    if desc.is_finite and not desc.base.links:
        raise GraphError("graph has no edges")
    rose, red = reduce_description(desc, args.depth)
    notes = []
    if not desc.is_finite:
        periods = 2 * max(args.depth, 1)
        notes.append(f"tails checked against a truncation of {periods} periods")
    for s in red.stages:
        notes.append(f"stage {s.name}: axes={len(s.graph.axes)} links={s.graph.n_links} K0 = {s.k0}  K1 = {s.k1}")
    ok = red.groups_preserved
    notes.append(f"K-groups preserved at every stage: {'yes' if ok else 'NO'}")
    notes.append(f"rose-tree: beta={rose.total_beta} gamma={rose.total_gamma}")
    text = emit(rose.to_description())
    if args.emit:
        with open(args.emit, "w", encoding="utf-8") as fh:
            fh.write(text)
        for n in notes:
            print(n)
    else:
        sys.stdout.write(emit(rose.to_description(), notes))
    return OK if ok else FAILED


def _report(name: str, ok: bool, detail: str = "") -> bool:
    print(f"{'PASS' if ok else 'FAIL'} {name}{': ' + detail if detail else ''}")
    return ok


def _finite_connected(desc: GraphDescription):
    if not desc.is_finite:
        raise GraphError("this check needs a finite graph")
    if not desc.is_connected():
        raise GraphError("this check needs a connected graph")
    return associate_bigraph(desc.base)


def verify_shrink(args, rng) -> bool:
    if args.file is None:
        raise GraphError("verify shrink needs a graph file")
    E = _finite_connected(read_input(args.file))
    if args.tree is not None:
        links = [x for x in args.tree.split(",") if x]
        try:
            sel = E.selection(links)
        except GraphError as exc:
            raise GraphError(f"--tree: {exc}") from None
        components = [c for c in E.restrict(sel).components() if c.edges]
    else:
        components = random_tree_forest(rng, E)
    components = validate_tree_components(E, components)
    s = SplitSpace.from_components(E, components)
    J, P = verify_J(s), verify_Pi(s)
    ok = _report("J (cokernels)", J.ok, f"{J}")
    ok &= _report("Pi (kernels)", P.ok, f"{P}")
    ok &= _report("groups of E and E/X", k_invariance(E, components))
    return ok


def verify_finite_formula(args, rng) -> bool:
    if args.file is not None:
        E = _finite_connected(read_input(args.file))
        beta = betti_finite(E)
        if beta < 2:
            raise GraphError(f"the closed form needs Betti number >= 2, graph has {beta}")
        return _report(args.file, k_groups_finite(E) == finite_formula(beta), f"beta={beta}")
    ok = True
    for i in range(args.count):
        beta = rng.randint(2, 12)
        E = associate_bigraph(random_graph_with_beta(rng, beta))
        got = k_groups_finite(E)
        ok &= _report(f"graph {i}", got == finite_formula(beta),
                      f"beta={beta} links={E.n_links} K0 = {got[0]} K1 = {got[1]}")
    return ok


def verify_k1_cycles(args, rng) -> bool:
    if args.file is not None:
        E = _finite_connected(read_input(args.file))
        return _report(args.file, verify_k1_is_h1(E), f"beta={betti_finite(E)}")
    ok = True
    for i in range(args.count):
        beta = rng.randint(2, 12)
        E = associate_bigraph(random_graph_with_beta(rng, beta))
        ok &= _report(f"graph {i}", verify_k1_is_h1(E), f"beta={beta}")
    return ok


def verify_valency(args, rng) -> bool:
    if args.file is not None:
        descs = [read_input(args.file)]
        if descs[0].is_finite:
            raise GraphError("verify valency needs a graph with rays")
    else:
        descs = [random_ray_description(rng) for _ in range(args.count)]
    ok = True
    for i, d in enumerate(descs):
        depth = rng.randint(0, 3)
        T = associate_bigraph(truncate(d, depth))
        Z = random_disjoint_subgraphs(rng, T)
        ok &= _report(f"graph {i}", valency_invariance(d, Z, depth),
                      f"gamma={valency_set(d).gamma} shrunk={len(Z)} depth={depth}")
    return ok


VERIFIERS = {
    "shrink": verify_shrink,
    "finite-formula": verify_finite_formula,
    "k1-cycles": verify_k1_cycles,
    "valency": verify_valency,
}


def cmd_verify(args) -> int:
    rng = random.Random(args.seed)
    return OK if VERIFIERS[args.mode](args, rng) else FAILED


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ckgraph",
                                description="K-theory of Cuntz-Krieger algebras of locally finite graphs")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("info", help="summary of a graph file")
    q.add_argument("file", help="graph file, or - for stdin")
    q.set_defaults(func=cmd_info)

    q = sub.add_parser("kgroups", help="K0 and K1")
    q.add_argument("file")
    q.add_argument("--json", action="store_true", help="machine-readable output")
    q.add_argument("--depth", type=int, default=5, help="periods used to certify ray tails (default 5)")
    q.set_defaults(func=cmd_kgroups)

    q = sub.add_parser("reduce", help="reduce to a rose-tree and print it in the file grammar")
    q.add_argument("file")
    q.add_argument("--depth", type=int, default=5)
    q.add_argument("--emit", metavar="PATH", help="write the rose-tree to PATH and only the summary to stdout")
    q.set_defaults(func=cmd_reduce)

    q = sub.add_parser("verify", help="run a checker")
    q.add_argument("mode", choices=sorted(VERIFIERS))
    q.add_argument("file", nargs="?")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--count", type=int, default=20, help="random cases when no file is given")
    q.add_argument("--tree", help="comma-separated links to shrink (shrink mode)")
    q.set_defaults(func=cmd_verify)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ReductionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return FAILED
    except (GraphError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
