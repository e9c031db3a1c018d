"""Ends of finitely described graphs and the top-level K-group computation.

The exhaustion used is X_k = truncate(desc, k).  The valency set is the
direct limit of the sets of infinite components of E - X_k; for a base with
finitely many periodic rays it stabilises after one step at one end per ray.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .bhk import k_groups_finite
from .bigraph import (GraphError, SubgraphSelection, UndirectedMultigraph, associate_bigraph, dead_ends,
                      factorize, is_rose_tree, subtract)
from .desc import (RESERVED, GraphDescription, RayAttachment, fresh_name, ray_axis, truncate)
from .reduce import ReductionError, reduce_description, rose_tree_k0, rose_tree_k1
from .zlattice import ALEPH_0, AbelianGroup, Cardinal


@dataclass(frozen=True)
class ValencyResult:
    gamma: Cardinal
    end_labels: Tuple[str, ...]
    stabilization_depth: int


def infinite_components(desc: GraphDescription, k: int) -> int:
    """Number of infinite components of desc minus truncate(desc, k)."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if desc.is_finite:
        return 0
    if k >= 1:
        return len(desc.rays)
    if not desc.base.links:
        # removing an edgeless subgraph removes nothing
        return sum(1 for comp in desc.components() if comp.rays)
    # tails leaving one vertex stay joined through it
    return len({r.attach_vertex for r in desc.rays})


def materialized_components(desc: GraphDescription, k: int, extra: int = 2) -> int:
    """Components of truncate(desc, k + extra) - truncate(desc, k) that reach
    the outer cut; a finite stand-in for the infinite components."""
    if desc.is_finite:
        return 0
    big = associate_bigraph(truncate(desc, k + extra))
    small = truncate(desc, k)
    X = big.selection(small.link_map, small.vertices)
    rest = subtract(big, SubgraphSelection(frozenset(), X.edges))
    outer = {ray_axis(r.id, (k + extra) * len(r.period)) for r in desc.rays}
    return sum(1 for c in rest.components() if c.axes & outer)


def valency_set(desc: GraphDescription, max_depth: int = 10) -> ValencyResult:
    if desc.is_finite:
        return ValencyResult(Cardinal(0), (), 0)
    counts = [infinite_components(desc, d) for d in range(max_depth + 2)]
    for d, c in enumerate(counts):
        if c != materialized_components(desc, d):
            raise ReductionError(f"symbolic component count disagrees with the truncation at depth {d}")
        if d and c < counts[d - 1]:
            raise ReductionError("infinite component count decreased")
    depth = next(d for d in range(max_depth + 1) if counts[d] == counts[d + 1])
    return ValencyResult(Cardinal(counts[depth]), tuple(r.id for r in desc.rays), depth)


def _rename_reserved(g: UndirectedMultigraph) -> Tuple[UndirectedMultigraph, Dict[str, str]]:
    taken = set(g.vertices) | {n for n, _, _ in g.links}
    vmap = {}
    for v in g.vertices:
        if RESERVED in v:
            vmap[v] = fresh_name(v.replace(RESERVED, "_"), taken)
            taken.add(vmap[v])
        else:
            vmap[v] = v
    links = {}
    for n, a, b in g.links:
        name = n
        if RESERVED in n:
            name = fresh_name(n.replace(RESERVED, "_"), taken)
            taken.add(name)
        links[name] = (vmap[a], vmap[b])
    return UndirectedMultigraph.build(vmap.values(), links), vmap


def quotient_description(desc: GraphDescription, Z: Sequence[SubgraphSelection], depth: int) -> GraphDescription:
    """desc with the finite subgraphs Z (inside truncate(desc, depth)) shrunk.

    Rays continue from where the truncation cut them, re-attached at the
    image of their cut axis.
    """
    T = associate_bigraph(truncate(desc, depth))
    Q, _, tilde = factorize(T, list(Z))
    base, vmap = _rename_reserved(Q.underlying())
    rays = []
    for r in desc.rays:
        cut = ray_axis(r.id, depth * len(r.period)) if depth else r.attach_vertex
        rays.append(RayAttachment(r.id, vmap[tilde[cut]], r.period))
    return GraphDescription(base, tuple(rays))


def valency_invariance(desc: GraphDescription, Z: Sequence[SubgraphSelection], depth: int) -> bool:
    """Does shrinking the disjoint finite connected subgraphs Z keep the valency set?"""
    q = quotient_description(desc, Z, depth)
    a, b = valency_set(desc), valency_set(q)
    return a.gamma == b.gamma and a.end_labels == b.end_labels


def betti(desc: GraphDescription) -> Cardinal:
    if any(r.has_loops for r in desc.rays):
        return ALEPH_0
    return Cardinal(desc.base.betti())


def formula_groups(beta: Cardinal, gamma: Cardinal) -> Tuple[AbelianGroup, AbelianGroup]:
    """K-groups of an infinite connected graph: (Z^(beta + gamma), Z^beta)."""
    return AbelianGroup.free(beta + gamma), AbelianGroup.free(beta)


@dataclass
class KRoutes:
    pipeline: Tuple[AbelianGroup, AbelianGroup]
    formula: Tuple[AbelianGroup, AbelianGroup]

    @property
    def agree(self) -> bool:
        return self.pipeline == self.formula


def k_routes(desc: GraphDescription, depth: int = 5) -> KRoutes:
    """Both computations for a connected description with rays."""
    if desc.is_finite:
        raise GraphError("finite graphs go through the Smith form")
    rose, _ = reduce_description(desc, depth)
    return KRoutes((rose_tree_k0(rose), rose_tree_k1(rose)),
                   formula_groups(betti(desc), valency_set(desc).gamma))


def k_groups(desc: GraphDescription, depth: int = 5) -> Tuple[AbelianGroup, AbelianGroup]:
    """(K0, K1); a disconnected graph gives the direct sum over its components."""
    k0, k1 = AbelianGroup.free(0), AbelianGroup.free(0)
    for comp in desc.components():
        if comp.is_finite:
            a, b = k_groups_finite(associate_bigraph(comp.base))
        else:
            routes = k_routes(comp, depth)
            if not routes.agree:
                raise ReductionError(f"pipeline gives {routes.pipeline}, formula gives {routes.formula}")
            a, b = routes.pipeline
        k0, k1 = k0 + a, k1 + b
    return k0, k1


def base_dead_ends(desc: GraphDescription) -> List[str]:
    """Dead ends of the whole graph (they can only sit in the base)."""
    E = associate_bigraph(truncate(desc, 2))
    return sorted(a for a in dead_ends(E) if a in set(desc.base.vertices))


def is_rose_tree_desc(desc: GraphDescription) -> bool:
    # cycles can only live in the base; a rose-tree must also be connected
    return is_rose_tree(associate_bigraph(truncate(desc, 1))) is not None


def count_axes_links(desc: GraphDescription) -> Tuple[Optional[int], Optional[int]]:
    """(axes, links), None standing for countably many."""
    if desc.rays:
        return None, None
    return len(desc.base.vertices), len(desc.base.links)
