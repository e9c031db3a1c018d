"""Reduction of a connected graph to a rose-tree with the same K-theory.

The graph is cut into layers X0, X1, ... around a finite seed.  Odd layers
are shrunk along spanning bi-trees, each shrunk axis is split in two by a
fresh bi-edge, and then each odd remnant is shrunk together with the next
even layer.  What is left is a tree of fresh bi-edges with loops hanging off
its axes.  Finally, finite dead branches are folded into their nearest live
ancestor.

Ray descriptions are handled symbolically: with the base as X0 their layers
follow a fixed pattern, so the rose-tree can be written down directly.  It
is then checked against the concrete pipeline run on a deep truncation.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Set, Tuple, Union

from .bhk import operator_groups
from .bigraph import (BiGraph, GraphError, SubgraphSelection, adjusted_edges, associate_bigraph,
                      factorize, is_rose_tree, spanning_bitree, subtract, tree_parents)
from .desc import GraphDescription, RayAttachment, ray_axis, truncate
from .zlattice import ALEPH_0, AbelianGroup, Cardinal


class ReductionError(GraphError):
    """A step of the reduction produced something it should not have; this is a bug, not bad input."""


# ---------------------------------------------------------------------------
#  Layering
# ---------------------------------------------------------------------------

@dataclass
class Layering:
    layers: List[SubgraphSelection]

    def __len__(self):
        return len(self.layers)

    def layer_of(self) -> Dict[str, int]:
        out = {}
        for i, X in enumerate(self.layers):
            for e in X.edges:
                out[e] = i
        return out

    def union(self, upto: int) -> SubgraphSelection:
        sel = SubgraphSelection()
        for X in self.layers[: upto + 1]:
            sel = sel | X
        return sel

    def components(self, E: BiGraph, i: int) -> List[SubgraphSelection]:
        return E.restrict(self.layers[i]).components()


def default_seed(E: BiGraph) -> SubgraphSelection:
    """Closed neighbourhood of the least axis."""
    a = min(E.axes)
    edges = set(E.out_edges(a)) | {E.dual[e] for e in E.out_edges(a)}
    return SubgraphSelection(frozenset([a]), frozenset(edges)).closure(E)


def _connect(K: BiGraph, pieces: List[SubgraphSelection]) -> Set[str]:
    """Edges of K joining the given pieces into one connected piece (shortest paths)."""
    blob_axes = set(pieces[0].axes)
    extra: Set[str] = set()
    rest = [set(p.axes) for p in pieces[1:]]
    while rest:
        target = set().union(*rest)
        prev: Dict[str, Optional[str]] = {a: None for a in blob_axes}
        queue = deque(sorted(blob_axes))
        hit = None
        while queue and hit is None:
            a = queue.popleft()
            for e in K.out_edges(a):
                b = K.rng[e]
                if b in prev:
                    continue
                prev[b] = e
                if b in target:
                    hit = b
                    break
                queue.append(b)
        if hit is None:
            raise ReductionError("pieces of one complement component are not connected inside it")
        b = hit
        while prev[b] is not None:
            e = prev[b]
            extra.update((e, K.dual[e]))
            blob_axes.add(b)
            b = K.src[e]
        merged = [p for p in rest if p & blob_axes]
        for p in merged:
            blob_axes |= p
            rest.remove(p)
    return extra


def layer_decomposition(E: BiGraph, seed: Optional[SubgraphSelection] = None) -> Layering:
    """Layers X0 (the seed), X1, ... exhausting a finite connected bi-graph.

    X_{i+1} holds every edge adjusted to the union so far, joined up by
    shortest paths so that it has a single component inside each
    component of the complement.
    """
    if not E.axes:
        raise GraphError("empty graph")
    if not E.is_connected():
        raise GraphError("layer decomposition needs a connected graph")
    seed = default_seed(E) if seed is None else seed.closure(E)
    E._check_selection(seed)
    if not seed.axes or len(E.restrict(seed).components()) != 1:
        raise GraphError("seed must be a non-empty connected subgraph")
    layers = [seed]
    used = seed
    while used.edges != E.edge_set:
        delta = adjusted_edges(E, used)
        rest = subtract(E, SubgraphSelection(frozenset(), used.edges))
        new_edges: Set[str] = set()
        for K in rest.components():
            dk = delta & K.edges
            if not dk:
                continue
            sub = E.restrict(SubgraphSelection(frozenset(), dk))
            pieces = sub.components()
            new_edges |= dk
            if len(pieces) > 1:
                new_edges |= _connect(rest.restrict(K), pieces)
        if not new_edges:
            raise ReductionError("layering stalled")
        X = SubgraphSelection(frozenset(), frozenset(new_edges)).closure(E)
        layers.append(X)
        used = used | X
    return Layering(layers)


def layering_violations(E: BiGraph, L: Layering, complete: bool = True,
                        checked: Optional[int] = None) -> List[str]:
    """Broken layering conditions, as readable strings (empty when valid).

    ``checked`` limits the adjacency conditions to the first layers, for
    layerings of a truncation whose last layers are cut short.
    """
    out = []
    n = len(L) if checked is None else checked
    seen: Set[str] = set()
    for i, X in enumerate(L.layers):
        if seen & X.edges:
            out.append(f"layer {i} repeats edges")
        seen |= X.edges
    for i in range(len(L)):
        for j in range(i + 2, len(L)):
            if L.layers[i].axes & L.layers[j].axes:
                out.append(f"layers {i} and {j} share axes")
    if len(E.restrict(L.layers[0]).components()) != 1:
        out.append("layer 0 is not connected")
    for i in range(min(n, len(L)) - 1):
        used = L.union(i)
        nxt = L.layers[i + 1]
        missing = adjusted_edges(E, used) - nxt.edges
        if missing:
            out.append(f"edges adjusted to layers 0..{i} missing from layer {i + 1}: {sorted(missing)[:3]}")
        rest = subtract(E, SubgraphSelection(frozenset(), used.edges))
        for K in rest.components():
            inside = nxt.edges & K.edges
            if inside and len(E.restrict(SubgraphSelection(frozenset(), inside)).components()) != 1:
                out.append(f"layer {i + 1} has several components in one complement component")
    if complete and seen != E.edge_set:
        out.append("layers do not cover the graph")
    return out


# ---------------------------------------------------------------------------
#  Rose-trees
# ---------------------------------------------------------------------------

@dataclass
class RoseTree:
    """A tree of axes with loops, optionally continued by periodic tails.

    ``loops`` and ``parent`` describe the finite core.  Each ray in ``rays``
    is an infinite chain hanging off a core axis; its ``period`` lists the
    loop counts of consecutive chain axes.
    """

    root: str
    loops: Dict[str, int]
    parent: Dict[str, Optional[str]]
    rays: Tuple[RayAttachment, ...] = ()

    def __post_init__(self):
        if set(self.loops) != set(self.parent) or self.root not in self.loops:
            raise GraphError("rose-tree core is inconsistent")
        if self.parent[self.root] is not None:
            raise GraphError("root has a parent")
        for a in self.parent:
            seen = set()
            b: Optional[str] = a
            while b is not None:
                if b in seen or b not in self.parent:
                    raise GraphError("rose-tree parent map is not a tree")
                seen.add(b)
                b = self.parent[b]
        for r in self.rays:
            if r.attach_vertex not in self.loops:
                raise GraphError(f"tail {r.id} hangs off an unknown axis")

    @property
    def axes(self) -> List[str]:
        return sorted(self.loops)

    @property
    def is_finite(self) -> bool:
        return not self.rays

    def children(self) -> Dict[str, List[str]]:
        out: Dict[str, List[str]] = {a: [] for a in self.loops}
        for a, p in self.parent.items():
            if p is not None:
                out[p].append(a)
        return {a: sorted(c) for a, c in out.items()}

    @property
    def total_beta(self) -> Cardinal:
        total = Cardinal(sum(self.loops.values()))
        if any(r.has_loops for r in self.rays):
            total = total + ALEPH_0
        return total

    def alive(self) -> Set[str]:
        """Core axes whose subtree reaches a tail; the root always counts."""
        out = {self.root}
        for r in self.rays:
            a: Optional[str] = r.attach_vertex
            while a is not None:
                out.add(a)
                a = self.parent[a]
        return out

    def dead_ends(self) -> List[str]:
        """Non-root core axes meeting a single tree link."""
        ch = self.children()
        n_rays = {a: 0 for a in self.loops}
        for r in self.rays:
            n_rays[r.attach_vertex] += 1
        return sorted(a for a in self.loops if a != self.root and len(ch[a]) + n_rays[a] == 0)

    def valency_numbers(self) -> List[Tuple[str, int]]:
        """Live branches charged to each core axis: all of them at the root,
        all but the incoming one elsewhere.  Tail axes carry 0."""
        alive = self.alive()
        ch = self.children()
        out = []
        for a in self.axes:
            if a not in alive:
                out.append((a, 0))
                continue
            branches = sum(1 for c in ch[a] if c in alive) + sum(1 for r in self.rays if r.attach_vertex == a)
            out.append((a, branches if a == self.root else branches - 1))
        return out

    @property
    def total_gamma(self) -> Cardinal:
        return Cardinal(sum(v for _, v in self.valency_numbers()))

    def pruned(self) -> "RoseTree":
        """Fold every dead branch into its nearest live ancestor."""
        alive = self.alive()
        loops = {a: 0 for a in alive}
        for a, n in self.loops.items():
            b = a
            while b not in alive:
                b = self.parent[b]  # type: ignore[assignment]
            loops[b] += n
        parent = {a: self.parent[a] for a in alive}
        return RoseTree(self.root, loops, parent, self.rays)

    def core_links(self) -> Dict[str, Tuple[str, str]]:
        links = {}
        for a in self.axes:
            p = self.parent[a]
            if p is not None:
                links[f"{a}:up"] = (p, a)
            for i in range(self.loops[a]):
                links[f"{a}:{i}"] = (a, a)
        return links

    def to_description(self) -> GraphDescription:
        from .bigraph import UndirectedMultigraph
        return GraphDescription(UndirectedMultigraph.build(self.axes, self.core_links()), self.rays)

    def to_bigraph(self) -> BiGraph:
        if not self.is_finite:
            raise GraphError("an infinite rose-tree has no finite bi-graph")
        return BiGraph.from_links(self.axes, self.core_links())

    @classmethod
    def from_bigraph(cls, E: BiGraph, root: str) -> "RoseTree":
        split = is_rose_tree(E)
        if split is None:
            raise GraphError("not a rose-tree")
        tree, loop_sel = split
        parents = tree_parents(E, tree, root)
        loops = {a: 0 for a in E.axes}
        for e in loop_sel.edges:
            if E.orientation[e] == 0:
                loops[E.src[e]] += 1
        parent = {a: (E.src[e] if e is not None else None) for a, e in parents.items()}
        return cls(root, loops, parent)


def rose_tree_k0(R: RoseTree) -> AbelianGroup:
    """Free of rank beta + gamma, for an infinite rose-tree without dead ends."""
    if R.is_finite:
        raise GraphError("the closed form holds for infinite rose-trees only; "
                         "finite graphs carry torsion, use the Smith form")
    if R.dead_ends():
        raise GraphError(f"rose-tree has dead ends {R.dead_ends()[:3]}; prune it first")
    return AbelianGroup.free(R.total_beta + R.total_gamma)


def rose_tree_k1(R: RoseTree) -> AbelianGroup:
    """Free of rank beta (the loop count)."""
    if R.is_finite:
        if not R.core_links():
            raise GraphError("graph has no edges; the Cuntz-Krieger algebra is undefined")
        if R.total_beta == 1:
            raise GraphError("a finite graph with a single cycle has K1 of rank 2, not 1")
    return AbelianGroup.free(R.total_beta)


# ---------------------------------------------------------------------------
#  The pipeline on finite bi-graphs
# ---------------------------------------------------------------------------

def _prefix(E: BiGraph) -> str:
    names = set(E.axes) | E.edge_set
    p = "L"
    i = 0
    while any(n.startswith(p) and n[len(p):len(p) + 1].isdigit() for n in names):
        i += 1
        p = f"L{'_' * i}"
    return p


@dataclass
class Stage:
    name: str
    graph: BiGraph
    k0: Optional[AbelianGroup] = None
    k1: Optional[AbelianGroup] = None


@dataclass
class Reduction:
    layering: Layering
    stages: List[Stage]
    rose: RoseTree
    axis_map: Dict[str, str]
    marked: Dict[str, Tuple[int, int]] = field(default_factory=dict)

    def stage(self, name: str) -> Stage:
        for s in self.stages:
            if s.name == name:
                return s
        raise KeyError(name)

    @property
    def groups_preserved(self) -> bool:
        first = (self.stages[0].k0, self.stages[0].k1)
        return first[0] is not None and all((s.k0, s.k1) == first for s in self.stages)


def shrink_odd_layers(E: BiGraph, L: Layering, prefix: str = "L"
                      ) -> Tuple[BiGraph, Dict[str, str], Dict[str, Tuple[int, int]]]:
    """Shrink a spanning bi-tree of every odd-layer component.

    Returns the quotient, the axis map, and the new axes keyed to their
    ``(layer, component)`` index.
    """
    trees, names = [], []
    marked: Dict[str, Tuple[int, int]] = {}
    for i in range(1, len(L), 2):
        for mu, comp in enumerate(L.components(E, i)):
            sub = E.restrict(comp)
            tree = spanning_bitree(sub)
            name = f"{prefix}{i}.{mu}"
            trees.append(tree)
            names.append(name)
            marked[name] = (i, mu)
    Ehat, _, tilde = factorize(E, trees, names)
    return Ehat, tilde, marked


def split_axes(Ehat: BiGraph, L: Layering, marked: Dict[str, Tuple[int, int]]
               ) -> Tuple[BiGraph, Dict[str, str]]:
    """Move the even-layer edges at each marked axis to a new twin axis
    and join the pair by a fresh bi-edge.  Returns the graph and, per marked
    axis, the fresh edge."""
    layer = L.layer_of()
    twin = {a: a + "-" for a in marked}
    src, rng = dict(Ehat.src), dict(Ehat.rng)
    for e in Ehat.edges:
        i = layer[e]
        if src[e] in marked and marked[src[e]][0] == i + 1:
            src[e] = twin[src[e]]
        if rng[e] in marked and marked[rng[e]][0] == i + 1:
            rng[e] = twin[rng[e]]
    dual, orient = dict(Ehat.dual), dict(Ehat.orientation)
    fresh = {}
    for a in sorted(marked):
        eta = a
        bar = eta + "~"
        if eta in src:
            raise ReductionError(f"fresh edge name {eta} is taken")
        src[eta], rng[eta], dual[eta], orient[eta] = twin[a], a, bar, 0
        src[bar], rng[bar], dual[bar], orient[bar] = a, twin[a], eta, 1
        fresh[a] = eta
    axes = set(Ehat.axes) | set(twin.values())
    return BiGraph(axes, src, rng, dual, orient), fresh


def shrink_z_trees(Echeck: BiGraph, L: Layering, marked: Dict[str, Tuple[int, int]],
                   seed_axes: Sequence[str], tilde2: Dict[str, str], prefix: str = "L"
                   ) -> Tuple[BiGraph, Dict[str, str], str]:
    """Shrink each odd remnant together with the next-layer pieces touching it,
    and the remnant of X0 to the root.  Returns (graph, axis map, root)."""
    layer = L.layer_of()
    by_layer: Dict[int, Set[str]] = {}
    for e in Echeck.edges:
        if e in layer:
            by_layer.setdefault(layer[e], set()).add(e)

    pieces: Dict[int, List[SubgraphSelection]] = {}
    for i, es in by_layer.items():
        pieces[i] = Echeck.restrict(SubgraphSelection(frozenset(), frozenset(es))).components()

    comps, names = [], []
    for a in sorted(marked):
        i, _ = marked[a]
        z = SubgraphSelection(frozenset([a]), frozenset(e for e in by_layer.get(i, ()) if Echeck.src[e] == a))
        for p in pieces.get(i + 1, []):
            if a in p.axes:
                z = z | p
        comps.append(spanning_bitree(Echeck.restrict(z)))
        names.append(a)

    root = f"{prefix}0"
    x0_axes = set()
    for s in seed_axes:
        b = tilde2[s]
        x0_axes.add(b + "-" if b in marked else b)
    x0 = SubgraphSelection(frozenset(x0_axes), frozenset(by_layer.get(0, ())))
    comps.append(spanning_bitree(Echeck.restrict(x0)))
    names.append(root)
    try:
        Etilde, _, tilde = factorize(Echeck, comps, names)
    except GraphError as exc:
        raise ReductionError(f"shrinking step failed: {exc}") from exc
    return Etilde, tilde, root


def prune_dead_branches(R: BiGraph, root: str, alive: Set[str]) -> Tuple[BiGraph, Dict[str, str]]:
    """Shrink each live axis together with the dead subtrees hanging off it."""
    split = is_rose_tree(R)
    if split is None:
        raise ReductionError("pruning needs a rose-tree")
    tree, _ = split
    parents = tree_parents(R, tree, root)
    owner = {}
    for a in R.axes:
        b = a
        while b not in alive:
            b = R.src[parents[b]]  # type: ignore[index]
        owner[a] = b
    comps, names = [], []
    for a in sorted(alive):
        axes = {b for b in R.axes if owner[b] == a}
        edges = set()
        for b in axes:
            if b != a:
                e = parents[b]
                edges.update((e, R.dual[e]))  # type: ignore[arg-type]
        comps.append(SubgraphSelection(frozenset(axes), frozenset(edges)))
        names.append(a)
    Q, _, tilde = factorize(R, comps, names)
    return Q, tilde


def reduce_graph(E: BiGraph, seed: Optional[SubgraphSelection] = None, prune: bool = True,
                 check_groups: bool = True) -> Reduction:
    """Run the full layered reduction on a finite connected bi-graph."""
    L = layer_decomposition(E, seed)
    bad = layering_violations(E, L)
    if bad:
        raise ReductionError("; ".join(bad))
    prefix = _prefix(E)
    Ehat, tilde2, marked = shrink_odd_layers(E, L, prefix)
    Echeck, fresh = split_axes(Ehat, L, marked)
    if marked:
        back, _, _ = factorize(Echeck, [Echeck.bi_edge(fresh[a]) for a in sorted(marked)], sorted(marked))
        if back != Ehat:
            raise ReductionError("shrinking the fresh bi-edges does not give back the previous stage")
    Etilde, tilde4, root = shrink_z_trees(Echeck, L, marked, sorted(L.layers[0].axes), tilde2, prefix)
    non_loop = {Etilde.link_of(e) for e in Etilde.edges if not Etilde.is_loop(e)}
    if is_rose_tree(Etilde) is None or not non_loop <= set(fresh.values()):
        raise ReductionError("result of the reduction is not a rose-tree")

    stages = [Stage("input", E), Stage("odd layers shrunk", Ehat), Stage("axes split", Echeck),
              Stage("rose-tree", Etilde)]
    axis_map = {a: tilde4[tilde2[a]] for a in E.axes}
    final = Etilde
    if prune:
        final, tilde5 = prune_dead_branches(Etilde, root, {root})
        stages.append(Stage("pruned", final))
        axis_map = {a: tilde5[b] for a, b in axis_map.items()}
    if check_groups:
        for s in stages:
            s.k0, s.k1 = operator_groups(s.graph)
    return Reduction(L, stages, RoseTree.from_bigraph(final, root), axis_map, marked)


def collapse_to_rose(E: BiGraph) -> RoseTree:
    """Shortcut for finite graphs: shrink one spanning bi-tree to a point."""
    if not E.is_connected():
        raise GraphError("graph is not connected")
    Q, _, _ = factorize(E, [spanning_bitree(E)], ["L0"])
    return RoseTree.from_bigraph(Q, "L0")


# ---------------------------------------------------------------------------
#  Ray descriptions
# ---------------------------------------------------------------------------

def chain_period(ray: RayAttachment) -> Tuple[int, ...]:
    """Loop counts of the chain axes produced from a ray: the k-th chain axis
    absorbs ray axes 2k and 2k+1."""
    p = len(ray.period)
    t = math.lcm(2, p) // 2
    return tuple(ray.loops_at(2 * k) + ray.loops_at(2 * k + 1) for k in range(1, t + 1))


def _attach_names(desc: GraphDescription, prefix: str) -> Dict[str, str]:
    verts = sorted({r.attach_vertex for r in desc.rays})
    return {v: f"{prefix}1.{mu}" for mu, v in enumerate(verts)}


def symbolic_rose(desc: GraphDescription, prefix: str = "L") -> RoseTree:
    """Rose-tree of a connected ray description, read off the layer pattern."""
    root = f"{prefix}0"
    loops = {root: desc.base.betti()}
    parent: Dict[str, Optional[str]] = {root: None}
    names = _attach_names(desc, prefix)
    for v, a in names.items():
        loops[a] = sum(r.loops_at(1) for r in desc.rays_at(v))
        parent[a] = root
    rays = tuple(RayAttachment(r.id, names[r.attach_vertex], chain_period(r)) for r in desc.rays)
    return RoseTree(root, loops, parent, rays)


def layer_decomposition_rays(desc: GraphDescription, depth: int = 5) -> Tuple[BiGraph, Layering, int]:
    """Layers of a ray description, base first, materialised for ``depth`` periods.

    Returns the truncated graph, its layering, and how many leading layers
    agree with those of the infinite graph.
    """
    if not desc.is_connected():
        raise GraphError("layer decomposition needs a connected graph")
    E = associate_bigraph(truncate(desc, depth))
    base = E.selection(desc.base.link_map, desc.base.vertices)
    L = layer_decomposition(E, base)
    steps = min(depth * len(r.period) for r in desc.rays) if desc.rays else len(L)
    return E, L, min(steps + 1, len(L))


def _check_against_truncation(desc: GraphDescription, rose: RoseTree, depth: int) -> Reduction:
    k = 2 * max(depth, 1)
    E, L, _ = layer_decomposition_rays(desc, k)
    bad = layering_violations(E, L, complete=True)
    if bad:
        raise ReductionError("; ".join(bad))
    red = reduce_graph(E, E.selection(desc.base.link_map, desc.base.vertices), prune=False)
    if not red.groups_preserved:
        raise ReductionError("K-groups changed along the truncated reduction")
    fin = red.rose
    m = red.axis_map

    def fail(msg):
        raise ReductionError(f"symbolic rose-tree disagrees with the truncation: {msg}")

    attach = {r.attach_vertex for r in desc.rays}
    for v in desc.base.vertices:
        # an attach vertex also lies in layer 1, so it follows that layer
        if v not in attach and m[v] != fin.root:
            fail(f"base axis {v} not sent to the root")
    if fin.loops[fin.root] != rose.loops[rose.root]:
        fail("root loop count")
    names = _attach_names(desc, "L")
    for r in desc.rays:
        steps = k * len(r.period)
        first = m[ray_axis(r.id, 1)]
        if m[r.attach_vertex] != first or fin.parent[first] != fin.root:
            fail(f"first axis of {r.id} is not a child of the root")
        if fin.loops[first] != rose.loops[names[r.attach_vertex]]:
            fail(f"loops at the attach axis of {r.id}")
        chain = chain_period(r)
        prev = first
        for c in range(1, (steps - 2) // 2):
            a, b = m[ray_axis(r.id, 2 * c)], m[ray_axis(r.id, 2 * c + 1)]
            if a != b or fin.parent[a] != prev:
                fail(f"chain of {r.id} breaks at position {c}")
            if fin.loops[a] != chain[(c - 1) % len(chain)]:
                fail(f"loops of {r.id} at chain position {c}")
            prev = a
    return red


@lru_cache(maxsize=256)
def reduce_description(desc: GraphDescription, depth: int = 5) -> Tuple[RoseTree, Optional[Reduction]]:
    """Pruned rose-tree of a connected description, plus the concrete
    reduction that certified it (of the graph itself, or of a truncation)."""
    if not desc.is_connected():
        raise GraphError("reduction needs a connected graph")
    if desc.is_finite:
        E = associate_bigraph(desc.base)
        red = reduce_graph(E)
        return red.rose, red
    rose = symbolic_rose(desc)
    red = _check_against_truncation(desc, rose, depth)
    return rose.pruned(), red


def reduce_input(obj: Union[BiGraph, GraphDescription], depth: int = 5) -> RoseTree:
    if isinstance(obj, BiGraph):
        return reduce_graph(obj).rose
    return reduce_description(obj, depth)[0]

