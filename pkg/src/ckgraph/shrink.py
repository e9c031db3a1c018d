"""Shrinking finite bi-trees and checking that K-theory survives.

The edge module splits as G (+) H, with H spanned by the edges of the
bi-trees being shrunk.  ``P`` is the identity on G and Phi on H.  Iterating
``P`` pushes an H-vector off the trees in finitely many steps, giving
``P^inf``.  The reduced operator ``P^inf o Phi`` on G is the Bass-Hashimoto
operator of the quotient graph.  The two checks below confirm, with exact
lattice arithmetic, that the coset map J (cokernels) and the projection Pi
(kernels) are isomorphisms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, List, Sequence, Tuple

from .bhk import EdgeVector, clean, id_minus_phi, operator_groups, phi_image
from .bigraph import BiGraph, GraphError, SubgraphSelection, factorize, is_bitree
from .zlattice import (SparseIntMatrix, cokernel, coordinate_intersection, hermite_basis,
                       kernel_basis, lattice_contains)


class NonTerminatingShrink(GraphError):
    """P-iteration exceeded its step cap: H is not a forest of finite bi-trees."""


@dataclass(frozen=True)
class SplitSpace:
    host: BiGraph
    h_edges: FrozenSet[str]

    def __post_init__(self):
        object.__setattr__(self, "h_edges", frozenset(self.h_edges))
        if not self.h_edges <= self.host.edge_set:
            raise GraphError("H edges must belong to the host graph")
        for e in self.h_edges:
            if self.host.dual[e] not in self.h_edges:
                raise GraphError(f"H is not closed under duality (edge {e})")

    @classmethod
    def from_components(cls, host: BiGraph, components: Sequence[SubgraphSelection]) -> "SplitSpace":
        return cls(host, frozenset().union(*(c.edges for c in components)) if components else frozenset())

    @property
    def g_edges(self) -> Tuple[str, ...]:
        return tuple(e for e in self.host.edges if e not in self.h_edges)

    @property
    def step_cap(self) -> int:
        return 2 * len(self.h_edges) + 2

    def h_components(self) -> List[SubgraphSelection]:
        sub = self.host.restrict(SubgraphSelection(frozenset(), self.h_edges))
        return [c for c in sub.components() if c.edges]

    def is_forest(self) -> bool:
        """Every component of H is a finite bi-tree."""
        return all(is_bitree(self.host.restrict(c)) for c in self.h_components())


@dataclass(frozen=True)
class ShrinkReport:
    well_defined: bool
    injective: bool
    surjective: bool
    p_infinity_max_steps: int
    groups_match: bool

    @property
    def ok(self) -> bool:
        return self.well_defined and self.injective and self.surjective and self.groups_match


def apply_P(s: SplitSpace, v: EdgeVector) -> EdgeVector:
    out: EdgeVector = {}
    for x, c in v.items():
        if x in s.h_edges:
            for y, d in phi_image(s.host, x).items():
                out[y] = out.get(y, 0) + c * d
        else:
            out[x] = out.get(x, 0) + c
    return clean(out)


def p_infinity(s: SplitSpace, v: EdgeVector) -> Tuple[EdgeVector, int]:
    """First iterate P^n(v) supported in G, and that n."""
    v = clean(dict(v))
    steps = 0
    while any(x in s.h_edges for x in v):
        if steps >= s.step_cap:
            raise NonTerminatingShrink(f"P-iteration did not leave H within {s.step_cap} steps")
        v = apply_P(s, v)
        steps += 1
    return v, steps


def reduced_operator(s: SplitSpace) -> SparseIntMatrix:
    """Matrix of P^inf o Phi on G, column-wise."""
    g = s.g_edges
    entries = {}
    for x in g:
        image, _ = p_infinity(s, phi_image(s.host, x))
        for y, c in image.items():
            entries[(y, x)] = c
    return SparseIntMatrix(g, g, entries)


def _embed(columns: List[List[int]], g_edges: Sequence[str], all_edges: Sequence[str]) -> List[Tuple[int, ...]]:
    pos = {e: i for i, e in enumerate(all_edges)}
    out = []
    for col in columns:
        full = [0] * len(all_edges)
        for e, c in zip(g_edges, col):
            full[pos[e]] = c
        out.append(tuple(full))
    return out


def verify_J(s: SplitSpace) -> ShrinkReport:
    """Check that u + Im(Id_G - T~) -> u + Im(Id - Phi) is an isomorphism of cokernels."""
    edges = s.host.edges
    g = s.g_edges
    dim = len(edges)
    A = id_minus_phi(s.host)
    B = SparseIntMatrix.identity(g) - reduced_operator(s)
    im_a = hermite_basis(A.columns_dense(), dim)
    im_b = _embed(B.columns_dense(), g, edges)

    well_defined = lattice_contains(im_a, im_b, dim)

    g_pos = [i for i, e in enumerate(edges) if e not in s.h_edges]
    g_part = coordinate_intersection(im_a, g_pos, dim)
    injective = lattice_contains(im_b, g_part, dim)

    surjective = True
    max_steps = 0
    for i, x in enumerate(edges):
        w, steps = p_infinity(s, {x: 1})
        max_steps = max(max_steps, steps)
        diff = [0] * dim
        diff[i] += 1
        for j, e in enumerate(edges):
            diff[j] -= w.get(e, 0)
        if any(e in s.h_edges for e in w) or not lattice_contains(im_a, [diff], dim):
            surjective = False
            break

    groups_match = cokernel(A) == cokernel(B)
    return ShrinkReport(well_defined, injective, surjective, max_steps, groups_match)


def verify_Pi(s: SplitSpace) -> ShrinkReport:
    """Check that projection to G maps ker(Id - Phi) isomorphically onto ker(Id_G - T~)."""
    edges = s.host.edges
    g = s.g_edges
    dim = len(edges)
    A = id_minus_phi(s.host)
    B = SparseIntMatrix.identity(g) - reduced_operator(s)
    ker_a = kernel_basis(A)
    ker_b = kernel_basis(B)
    g_idx = [i for i, e in enumerate(edges) if e not in s.h_edges]
    projected = [tuple(v[i] for i in g_idx) for v in ker_a]

    well_defined = lattice_contains(ker_b, projected, len(g))
    surjective = lattice_contains(projected, ker_b, len(g))
    h_idx = [i for i, e in enumerate(edges) if e in s.h_edges]
    injective = not coordinate_intersection(ker_a, h_idx, dim)

    max_steps = 0
    for x in sorted(s.h_edges):
        max_steps = max(max_steps, p_infinity(s, {x: 1})[1])
    return ShrinkReport(well_defined, injective, surjective, max_steps, len(ker_a) == len(ker_b))


def validate_tree_components(E: BiGraph, components: Sequence[SubgraphSelection]) -> List[SubgraphSelection]:
    """Close the components and check they are disjoint finite bi-trees."""
    comps = [c.closure(E) for c in components]
    used: set = set()
    for c in comps:
        sub = E.restrict(c)
        if not is_bitree(sub):
            raise GraphError(f"component at {min(c.axes) if c.axes else '?'} is not a bi-tree")
        if used & c.axes:
            raise GraphError("tree components overlap")
        used |= c.axes
    return comps


def k_invariance(E: BiGraph, components: Sequence[SubgraphSelection]) -> bool:
    """K-groups of E equal those of E with the given bi-trees shrunk.

    A quotient without edges counts as having trivial groups."""
    comps = validate_tree_components(E, components)
    Q, _, _ = factorize(E, comps)
    return operator_groups(E) == operator_groups(Q)

