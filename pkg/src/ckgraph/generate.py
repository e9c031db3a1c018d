"""Seeded random inputs for the verifiers and the test-suite."""

from __future__ import annotations

import random
from typing import List, Optional

from .bigraph import BiGraph, SubgraphSelection, UndirectedMultigraph, spanning_bitree
from .desc import GraphDescription, RayAttachment


def random_connected_multigraph(rng: random.Random, n_vertices: int, beta: int,
                                loops: bool = True) -> UndirectedMultigraph:
    """Random tree on n vertices plus ``beta`` chords (parallel links and loops allowed)."""
    if n_vertices < 1:
        raise ValueError("need at least one vertex")
    if n_vertices == 1 and not loops and beta:
        raise ValueError("a single vertex only carries loops")
    names = [f"v{i}" for i in range(n_vertices)]
    links = {}
    for i in range(1, n_vertices):
        links[f"t{i}"] = (names[rng.randrange(i)], names[i])
    j = 0
    while j < beta:
        a, b = rng.choice(names), rng.choice(names)
        if a == b and not loops:
            continue
        links[f"c{j}"] = (a, b)
        j += 1
    return UndirectedMultigraph.build(names, links)


def random_graph_with_beta(rng: random.Random, beta: int, max_links: int = 60) -> UndirectedMultigraph:
    n = rng.randint(1, max(1, max_links - beta + 1))
    return random_connected_multigraph(rng, n, beta)


def random_tree_forest(rng: random.Random, E: BiGraph, keep: float = 0.5) -> List[SubgraphSelection]:
    """Disjoint bi-trees: the components of a random set of spanning-tree links."""
    tree = spanning_bitree(E)
    chosen = [e for e in sorted(tree.edges) if E.orientation[e] == 0 and rng.random() < keep]
    if not chosen:
        return []
    sub = E.restrict(E.selection(chosen))
    return [c for c in sub.components() if c.edges]


def random_disjoint_subgraphs(rng: random.Random, E: BiGraph, parts: int = 3,
                              max_size: int = 4) -> List[SubgraphSelection]:
    """Disjoint connected subgraphs grown from random axes, with a random
    subset of the edges among their axes added on top of the growth tree."""
    free = set(E.axes)
    out = []
    for _ in range(parts):
        if not free:
            break
        start = rng.choice(sorted(free))
        axes, edges = {start}, set()
        free.discard(start)
        target = rng.randint(1, max_size)
        frontier = [start]
        while frontier and len(axes) < target:
            a = frontier.pop(rng.randrange(len(frontier)))
            for e in E.out_edges(a):
                b = E.rng[e]
                if b in free and len(axes) < target:
                    free.discard(b)
                    axes.add(b)
                    edges.update((e, E.dual[e]))
                    frontier.append(b)
        for e in E.edges:
            if E.orientation[e] == 0 and e not in edges and E.src[e] in axes and E.rng[e] in axes:
                if rng.random() < 0.5:
                    edges.update((e, E.dual[e]))
        out.append(SubgraphSelection(frozenset(axes), frozenset(edges)))
    return out


def random_ray_description(rng: random.Random, n_base: Optional[int] = None,
                           n_rays: Optional[int] = None) -> GraphDescription:
    n = n_base if n_base is not None else rng.randint(1, 5)
    base = random_connected_multigraph(rng, n, rng.randint(0, 3))
    k = n_rays if n_rays is not None else rng.randint(1, 3)
    rays = []
    for i in range(k):
        period = tuple(rng.randint(0, 2) for _ in range(rng.randint(1, 3)))
        rays.append(RayAttachment(f"r{i}", rng.choice(base.vertices), period))
    return GraphDescription(base, tuple(rays))
