"""Finitely described graphs: a finite base plus periodic rays.

A ray leaves its attach vertex and walks through infinitely many new axes.
Step ``j`` (counting from 1) adds axis ``<ray>@<j>``, the link ``<ray>@<j>``
from the previous axis of the ray, and ``period[(j - 1) % p]`` loops named
``<ray>@<j>.<i>``.  The ``@`` character is reserved for these generated names.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Tuple

from .bigraph import DUAL_SUFFIX, GraphError, UndirectedMultigraph

RESERVED = "@"


@dataclass(frozen=True)
class RayAttachment:
    id: str
    attach_vertex: str
    period: Tuple[int, ...]

    def __post_init__(self):
        period = tuple(int(x) for x in self.period)
        if not period:
            raise GraphError(f"ray {self.id} has an empty period")
        if any(x < 0 for x in period):
            raise GraphError(f"ray {self.id} has a negative loop count")
        object.__setattr__(self, "period", period)

    def loops_at(self, j: int) -> int:
        """Loops carried by the j-th axis of the ray (j >= 1)."""
        return self.period[(j - 1) % len(self.period)]

    @property
    def has_loops(self) -> bool:
        return any(self.period)


def ray_axis(ray_id: str, j: int) -> str:
    return f"{ray_id}{RESERVED}{j}"


@dataclass(frozen=True)
class GraphDescription:
    """Finite base multigraph with zero or more periodic rays attached."""

    base: UndirectedMultigraph
    rays: Tuple[RayAttachment, ...] = ()

    def __post_init__(self):
        rays = tuple(sorted(self.rays, key=lambda r: r.id))
        object.__setattr__(self, "rays", rays)
        names = set(self.base.vertices) | {n for n, _, _ in self.base.links}
        for n in names:
            if RESERVED in n or n.endswith(DUAL_SUFFIX):
                raise GraphError(f"name {n!r} uses a reserved character")
        ids = [r.id for r in rays]
        if len(set(ids)) != len(ids):
            raise GraphError("duplicate ray name")
        verts = set(self.base.vertices)
        for r in rays:
            if RESERVED in r.id or r.id.endswith(DUAL_SUFFIX):
                raise GraphError(f"name {r.id!r} uses a reserved character")
            if r.id in names:
                raise GraphError(f"duplicate name {r.id}")
            if r.attach_vertex not in verts:
                raise GraphError(f"ray {r.id} attaches to unknown axis {r.attach_vertex}")

    @classmethod
    def finite(cls, graph: UndirectedMultigraph) -> "GraphDescription":
        return cls(graph, ())

    @property
    def is_finite(self) -> bool:
        return not self.rays

    def rays_at(self, vertex: str) -> List[RayAttachment]:
        return [r for r in self.rays if r.attach_vertex == vertex]

    def components(self) -> List["GraphDescription"]:
        """Split along the connected components of the base."""
        out = []
        lm = self.base.link_map
        for comp in self.base.components():
            links = {n: ab for n, ab in lm.items() if ab[0] in comp}
            rays = tuple(r for r in self.rays if r.attach_vertex in comp)
            out.append(GraphDescription(UndirectedMultigraph.build(sorted(comp), links), rays))
        return out

    def is_connected(self) -> bool:
        return len(self.base.components()) == 1


def ray_segment(ray: RayAttachment, first: int, last: int) -> Tuple[List[str], Dict[str, Tuple[str, str]]]:
    """Axes and links contributed by steps ``first..last`` of a ray."""
    axes: List[str] = []
    links: Dict[str, Tuple[str, str]] = {}
    for j in range(first, last + 1):
        a = ray_axis(ray.id, j)
        prev = ray.attach_vertex if j == 1 else ray_axis(ray.id, j - 1)
        axes.append(a)
        links[a] = (prev, a)
        for i in range(ray.loops_at(j)):
            links[f"{a}.{i}"] = (a, a)
    return axes, links


def truncate(desc: GraphDescription, k: int) -> UndirectedMultigraph:
    """Base plus the first k full periods of every ray."""
    if k < 0:
        raise ValueError("truncation depth must be >= 0")
    if desc.is_finite:
        return desc.base
    axes = list(desc.base.vertices)
    links = dict(desc.base.link_map)
    for r in desc.rays:
        a, l = ray_segment(r, 1, k * len(r.period))
        axes.extend(a)
        links.update(l)
    return UndirectedMultigraph.build(axes, links)


def is_subgraph(small: UndirectedMultigraph, big: UndirectedMultigraph) -> bool:
    return set(small.vertices) <= set(big.vertices) and set(small.links) <= set(big.links)


def fresh_name(base: str, taken: Iterable[str]) -> str:
    taken = set(taken)
    if base not in taken:
        return base
    i = 1
    while f"{base}_{i}" in taken:
        i += 1
    return f"{base}_{i}"
