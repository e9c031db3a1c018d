"""Bidirected multigraphs ("bi-graphs") and the operations used to shrink them.

Terminology: an *axis* is a vertex, an *edge* is a directed arrow, a
*bi-edge* is a pair of mutually dual edges and a *link* is an undirected
edge of the underlying multigraph.  Axis and edge identifiers are strings;
the orientation-0 edge of every bi-edge carries the link's name and its dual
carries the same name with a trailing ``~``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

DUAL_SUFFIX = "~"


class GraphError(ValueError):
    """Malformed graph data or a violated precondition."""


# ---------------------------------------------------------------------------
#  Undirected multigraphs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UndirectedMultigraph:
    """Finite multigraph; loops and parallel links are allowed.

    ``links`` holds ``(name, a, b)`` triples.  Both fields are normalised to
    sorted tuples so instances hash and compare structurally.
    """

    vertices: Tuple[str, ...]
    links: Tuple[Tuple[str, str, str], ...] = ()

    def __post_init__(self):
        vertices = tuple(sorted(set(self.vertices)))
        if len(vertices) != len(tuple(self.vertices)):
            raise GraphError("duplicate vertex name")
        links = tuple(sorted((str(n), str(a), str(b)) for n, a, b in self.links))
        names = [n for n, _, _ in links]
        if len(set(names)) != len(names):
            raise GraphError("duplicate link name")
        vset = set(vertices)
        for n, a, b in links:
            if a not in vset or b not in vset:
                raise GraphError(f"link {n} has an unknown endpoint")
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "links", links)

    @classmethod
    def build(cls, vertices: Iterable[str], links: Mapping[str, Tuple[str, str]]) -> "UndirectedMultigraph":
        return cls(tuple(vertices), tuple((n, a, b) for n, (a, b) in links.items()))

    @property
    def link_map(self) -> Dict[str, Tuple[str, str]]:
        return {n: (a, b) for n, a, b in self.links}

    def components(self) -> List[FrozenSet[str]]:
        parent = {v: v for v in self.vertices}

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for _, a, b in self.links:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
        groups: Dict[str, set] = {}
        for v in self.vertices:
            groups.setdefault(find(v), set()).add(v)
        return [frozenset(g) for _, g in sorted(groups.items())]

    def betti(self) -> int:
        return len(self.links) - len(self.vertices) + len(self.components())


# ---------------------------------------------------------------------------
#  Bi-graphs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SubgraphSelection:
    """A set of axes and a dual-closed set of edges of some host bi-graph.

    Edge endpoints need not be listed in ``axes``; :meth:`closure` adds them.
    """

    axes: FrozenSet[str] = frozenset()
    edges: FrozenSet[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "axes", frozenset(self.axes))
        object.__setattr__(self, "edges", frozenset(self.edges))

    def closure(self, host: "BiGraph") -> "SubgraphSelection":
        axes = set(self.axes)
        for e in self.edges:
            axes.add(host.src[e])
            axes.add(host.rng[e])
        return SubgraphSelection(frozenset(axes), self.edges)

    def __or__(self, other: "SubgraphSelection") -> "SubgraphSelection":
        return SubgraphSelection(self.axes | other.axes, self.edges | other.edges)

    @property
    def is_empty(self) -> bool:
        return not self.axes and not self.edges


class BiGraph:
    """Directed multigraph with a fixed-point-free duality on edges.

    Immutable after construction; all derived structure is cached.
    """

    def __init__(self, axes: Iterable[str], src: Mapping[str, str], rng: Mapping[str, str],
                 dual: Mapping[str, str], orientation: Mapping[str, int]):
        self.axes: FrozenSet[str] = frozenset(axes)
        self.src: Dict[str, str] = dict(src)
        self.rng: Dict[str, str] = dict(rng)
        self.dual: Dict[str, str] = dict(dual)
        self.orientation: Dict[str, int] = dict(orientation)
        self._validate()

    def _validate(self):
        keys = set(self.src)
        if set(self.rng) != keys or set(self.dual) != keys or set(self.orientation) != keys:
            raise GraphError("src, rng, dual and orientation must share one edge set")
        for e in keys:
            d = self.dual[e]
            if d == e:
                raise GraphError(f"edge {e} is its own dual")
            if d not in keys or self.dual[d] != e:
                raise GraphError(f"dual of {e} is not an involution")
            if self.src[d] != self.rng[e] or self.rng[d] != self.src[e]:
                raise GraphError(f"edge {e} and its dual are not reversed")
            if self.orientation[e] not in (0, 1) or self.orientation[d] != 1 - self.orientation[e]:
                raise GraphError(f"orientation of {e} is inconsistent with its dual")
            if self.src[e] not in self.axes or self.rng[e] not in self.axes:
                raise GraphError(f"edge {e} has an endpoint outside the axis set")

    # -- construction -------------------------------------------------------

    @classmethod
    def from_links(cls, axes: Iterable[str], links: Mapping[str, Tuple[str, str]]) -> "BiGraph":
        src, rng, dual, orient = {}, {}, {}, {}
        for name, (a, b) in links.items():
            bar = name + DUAL_SUFFIX
            if bar in links:
                raise GraphError(f"link name {bar} collides with the dual of {name}")
            src[name], rng[name], dual[name], orient[name] = a, b, bar, 0
            src[bar], rng[bar], dual[bar], orient[bar] = b, a, name, 1
        return cls(axes, src, rng, dual, orient)

    @classmethod
    def empty(cls) -> "BiGraph":
        return cls((), {}, {}, {}, {})

    # -- structure ----------------------------------------------------------

    @cached_property
    def edges(self) -> Tuple[str, ...]:
        return tuple(sorted(self.src))

    @cached_property
    def edge_set(self) -> FrozenSet[str]:
        return frozenset(self.src)

    @cached_property
    def _out(self) -> Dict[str, Tuple[str, ...]]:
        out: Dict[str, list] = {a: [] for a in self.axes}
        for e in self.edges:
            out[self.src[e]].append(e)
        return {a: tuple(es) for a, es in out.items()}

    def out_edges(self, axis: str) -> Tuple[str, ...]:
        """Edges with source ``axis``, sorted by id."""
        return self._out[axis]

    def is_loop(self, e: str) -> bool:
        return self.src[e] == self.rng[e]

    def link_of(self, e: str) -> str:
        """Orientation-0 representative of the bi-edge containing e."""
        return e if self.orientation[e] == 0 else self.dual[e]

    @cached_property
    def links(self) -> Dict[str, Tuple[str, str]]:
        return {e: (self.src[e], self.rng[e]) for e in self.edges if self.orientation[e] == 0}

    def degree(self, axis: str) -> int:
        """Edge ends at ``axis``; a loop counts twice."""
        return len(self._out[axis])

    @property
    def n_links(self) -> int:
        return len(self.src) // 2

    def underlying(self) -> UndirectedMultigraph:
        return UndirectedMultigraph(tuple(self.axes), tuple((n, a, b) for n, (a, b) in self.links.items()))

    def full(self) -> SubgraphSelection:
        return SubgraphSelection(self.axes, self.edge_set)

    def bi_edge(self, e: str) -> SubgraphSelection:
        return SubgraphSelection(frozenset((self.src[e], self.rng[e])), frozenset((e, self.dual[e])))

    def selection(self, links: Iterable[str] = (), axes: Iterable[str] = ()) -> SubgraphSelection:
        """Selection made of the given links (both directions) plus their endpoints."""
        edges = set()
        ax = set(axes)
        for e in links:
            if e not in self.src:
                raise GraphError(f"unknown edge {e}")
            edges.update((e, self.dual[e]))
            ax.update((self.src[e], self.rng[e]))
        unknown = ax - self.axes
        if unknown:
            raise GraphError(f"unknown axes {sorted(unknown)}")
        return SubgraphSelection(frozenset(ax), frozenset(edges))

    def restrict(self, sel: SubgraphSelection) -> "BiGraph":
        """The sub-bi-graph spanned by ``sel`` (endpoints of its edges included)."""
        sel = sel.closure(self)
        self._check_selection(sel)
        es = sel.edges
        return BiGraph(sel.axes, {e: self.src[e] for e in es}, {e: self.rng[e] for e in es},
                       {e: self.dual[e] for e in es}, {e: self.orientation[e] for e in es})

    def _check_selection(self, sel: SubgraphSelection):
        if not sel.edges <= self.edge_set:
            raise GraphError(f"selection edges {sorted(sel.edges - self.edge_set)} not in graph")
        if not sel.axes <= self.axes:
            raise GraphError(f"selection axes {sorted(sel.axes - self.axes)} not in graph")
        for e in sel.edges:
            if self.dual[e] not in sel.edges:
                raise GraphError(f"selection is not closed under duality (edge {e})")

    def components(self) -> List[SubgraphSelection]:
        """Connected components (isolated axes included), ordered by least axis."""
        seen: set = set()
        comps = []
        for start in sorted(self.axes):
            if start in seen:
                continue
            axes = {start}
            edges = set()
            queue = deque([start])
            seen.add(start)
            while queue:
                a = queue.popleft()
                for e in self._out[a]:
                    edges.add(e)
                    edges.add(self.dual[e])
                    b = self.rng[e]
                    if b not in seen:
                        seen.add(b)
                        axes.add(b)
                        queue.append(b)
            comps.append(SubgraphSelection(frozenset(axes), frozenset(edges)))
        return comps

    def is_connected(self) -> bool:
        return len(self.components()) == 1

    def relabel(self, axis_map: Mapping[str, str], edge_map: Mapping[str, str]) -> "BiGraph":
        """Isomorphic copy under bijective renamings of axes and edges."""
        return BiGraph(
            (axis_map[a] for a in self.axes),
            {edge_map[e]: axis_map[self.src[e]] for e in self.edges},
            {edge_map[e]: axis_map[self.rng[e]] for e in self.edges},
            {edge_map[e]: edge_map[self.dual[e]] for e in self.edges},
            {edge_map[e]: self.orientation[e] for e in self.edges},
        )

    def disjoint_union(self, other: "BiGraph") -> "BiGraph":
        if self.axes & other.axes or self.edge_set & other.edge_set:
            raise GraphError("graphs are not disjoint")
        return BiGraph(self.axes | other.axes, {**self.src, **other.src}, {**self.rng, **other.rng},
                       {**self.dual, **other.dual}, {**self.orientation, **other.orientation})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BiGraph):
            return NotImplemented
        return (self.axes == other.axes and self.src == other.src and self.rng == other.rng
                and self.dual == other.dual and self.orientation == other.orientation)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"BiGraph(axes={len(self.axes)}, links={self.n_links})"


# ---------------------------------------------------------------------------
#  Graph calculus
# ---------------------------------------------------------------------------

def associate_bigraph(g: UndirectedMultigraph) -> BiGraph:
    """Replace every link by a bi-edge; a loop gives two distinct loop edges."""
    return BiGraph.from_links(g.vertices, g.link_map)


def subtract(E: BiGraph, X: SubgraphSelection) -> BiGraph:
    """E minus X: drop X's edges, then every axis left without an edge.

    An X without edges leaves E unchanged, isolated axes included.
    """
    if not X.edges <= E.edge_set:
        raise GraphError("X is not a bi-subgraph of E")
    for e in X.edges:
        if E.dual[e] not in X.edges:
            raise GraphError(f"X is not closed under duality (edge {e})")
    if not X.edges:
        return E
    keep = [e for e in E.edges if e not in X.edges]
    axes = {E.src[e] for e in keep} | {E.rng[e] for e in keep}
    return BiGraph(axes, {e: E.src[e] for e in keep}, {e: E.rng[e] for e in keep},
                   {e: E.dual[e] for e in keep}, {e: E.orientation[e] for e in keep})


def adjusted_edges(E: BiGraph, X: SubgraphSelection) -> FrozenSet[str]:
    """Edges outside X with at least one endpoint among X's axes."""
    return frozenset(e for e in E.edges if e not in X.edges and (E.src[e] in X.axes or E.rng[e] in X.axes))


def _is_connected_selection(E: BiGraph, sel: SubgraphSelection) -> bool:
    if not sel.axes:
        return True
    adj: Dict[str, set] = {a: set() for a in sel.axes}
    for e in sel.edges:
        adj[E.src[e]].add(E.rng[e])
    start = min(sel.axes)
    seen = {start}
    queue = [start]
    while queue:
        a = queue.pop()
        for b in adj[a]:
            if b not in seen:
                seen.add(b)
                queue.append(b)
    return seen == set(sel.axes)


def factorize(E: BiGraph, components: Sequence[SubgraphSelection],
              names: Optional[Sequence[str]] = None
              ) -> Tuple[BiGraph, Dict[str, str], Dict[str, str]]:
    """Shrink each connected component to a single fresh axis.

    Returns ``(E/X, iota, tilde_iota)``.  Quotient edges keep their ids, so
    ``iota`` is the identity on ``(E - X)``'s edges; ``tilde_iota`` maps every
    axis of E onto its image.  The new axis for component i is ``names[i]``,
    defaulting to the least axis of that component.
    """
    comps = [c.closure(E) for c in components]
    if names is None:
        names = [min(c.axes) if c.axes else None for c in comps]
    if len(names) != len(comps):
        raise GraphError("one name per component is required")
    seen_axes: set = set()
    for c, name in zip(comps, names):
        E._check_selection(c)
        if not c.axes:
            raise GraphError("empty component")
        if seen_axes & c.axes:
            raise GraphError("components overlap")
        seen_axes |= c.axes
        if not _is_connected_selection(E, c):
            raise GraphError(f"component containing {min(c.axes)} is not connected")
    outside = E.axes - seen_axes
    if len(set(names)) != len(names) or outside & set(names):
        raise GraphError("quotient axis names clash")

    tilde: Dict[str, str] = {a: a for a in outside}
    for c, name in zip(comps, names):
        for a in c.axes:
            tilde[a] = name
    removed = set().union(*(c.edges for c in comps)) if comps else set()
    keep = [e for e in E.edges if e not in removed]
    Q = BiGraph(set(tilde.values()), {e: tilde[E.src[e]] for e in keep}, {e: tilde[E.rng[e]] for e in keep},
                {e: E.dual[e] for e in keep}, {e: E.orientation[e] for e in keep})
    iota = {e: e for e in keep}
    return Q, iota, tilde


def spanning_bitree(E: BiGraph) -> SubgraphSelection:
    """Breadth-first spanning bi-tree from the least axis, lowest edge id first."""
    if not E.axes:
        raise GraphError("empty graph has no spanning tree")
    start = min(E.axes)
    seen = {start}
    edges = set()
    queue = deque([start])
    while queue:
        a = queue.popleft()
        for e in E.out_edges(a):
            b = E.rng[e]
            if b not in seen:
                seen.add(b)
                edges.update((e, E.dual[e]))
                queue.append(b)
    if seen != E.axes:
        raise GraphError("graph is not connected")
    return SubgraphSelection(E.axes, frozenset(edges))


def tree_parents(E: BiGraph, tree: SubgraphSelection, root: str) -> Dict[str, Optional[str]]:
    """For each axis, the tree edge pointing *into* it from its parent (None at root)."""
    parent: Dict[str, Optional[str]] = {root: None}
    queue = deque([root])
    while queue:
        a = queue.popleft()
        for e in E.out_edges(a):
            if e in tree.edges and E.rng[e] not in parent:
                parent[E.rng[e]] = e
                queue.append(E.rng[e])
    return parent


def betti_finite(E: BiGraph) -> int:
    """First Betti number: links - axes + components."""
    return E.n_links - len(E.axes) + len(E.components())


def is_bitree(E: BiGraph) -> bool:
    return bool(E.axes) and E.is_connected() and E.n_links == len(E.axes) - 1


def is_rose_tree(E: BiGraph) -> Optional[Tuple[SubgraphSelection, SubgraphSelection]]:
    """The split (tree edges, loop edges) if E is a rose-tree, else None.

    The split is forced: the tree part must be exactly the non-loop edges.
    """
    tree = frozenset(e for e in E.edges if not E.is_loop(e))
    loops = E.edge_set - tree
    T = BiGraph(E.axes, {e: E.src[e] for e in tree}, {e: E.rng[e] for e in tree},
                {e: E.dual[e] for e in tree}, {e: E.orientation[e] for e in tree})
    if not is_bitree(T):
        return None
    return SubgraphSelection(E.axes, tree), SubgraphSelection(frozenset(E.src[e] for e in loops), loops)


def dead_ends(E: BiGraph) -> FrozenSet[str]:
    """Axes attached to the rest of the graph by exactly one non-loop bi-edge.

    Loops at an axis do not stop it from being a dead end.
    """
    out = set()
    for a in E.axes:
        non_loop = [e for e in E.out_edges(a) if not E.is_loop(e)]
        if len(non_loop) == 1:
            out.add(a)
    return frozenset(out)
