"""Bass-Hashimoto operator and K-groups of finite bi-graphs.

The operator acts on the free module over the edges by

    Phi(x) = (sum of all x' with src(x') = rng(x)) - dual(x)

and for a finite graph K0 = coker(Id - Phi), K1 = ker(Id - Phi).
Matrices are stored column-wise: column x holds the coefficients of the
image of the basis vector x.
"""

from __future__ import annotations

from collections import deque
from typing import Dict, List, Tuple

from .bigraph import BiGraph, GraphError, spanning_bitree, tree_parents
from .zlattice import AbelianGroup, SparseIntMatrix, cokernel, kernel_basis, lattice_equal

EdgeVector = Dict[str, int]


def clean(v: EdgeVector) -> EdgeVector:
    return {k: c for k, c in v.items() if c}


def phi_image(E: BiGraph, x: str) -> EdgeVector:
    """Phi applied to the basis vector x."""
    out: EdgeVector = {}
    for y in E.out_edges(E.rng[x]):
        out[y] = out.get(y, 0) + 1
    bar = E.dual[x]
    out[bar] = out.get(bar, 0) - 1
    return clean(out)


def apply_phi(E: BiGraph, v: EdgeVector) -> EdgeVector:
    out: EdgeVector = {}
    for x, c in v.items():
        for y, d in phi_image(E, x).items():
            out[y] = out.get(y, 0) + c * d
    return clean(out)


def bass_hashimoto(E: BiGraph) -> SparseIntMatrix:
    entries = {}
    for x in E.edges:
        for y, c in phi_image(E, x).items():
            entries[(y, x)] = c
    return SparseIntMatrix(E.edges, E.edges, entries)


def id_minus_phi(E: BiGraph) -> SparseIntMatrix:
    return SparseIntMatrix.identity(E.edges) - bass_hashimoto(E)


def operator_groups(E: BiGraph) -> Tuple[AbelianGroup, AbelianGroup]:
    """(coker, ker) of Id - Phi; both trivial when E has no edges."""
    A = id_minus_phi(E)
    if not E.edges:
        return AbelianGroup.free(0), AbelianGroup.free(0)
    return cokernel(A), AbelianGroup.free(len(kernel_basis(A)))


def k_groups_finite(E: BiGraph) -> Tuple[AbelianGroup, AbelianGroup]:
    """(K0, K1) of a finite bi-graph via the Smith normal form of Id - Phi."""
    if not E.edges:
        raise GraphError("graph has no edges; the Cuntz-Krieger algebra is undefined")
    return operator_groups(E)


def finite_formula(beta: int) -> Tuple[AbelianGroup, AbelianGroup]:
    """Closed form for connected finite graphs of Betti number >= 2:
    K0 = Z^beta (+) Z/(beta - 1), K1 = Z^beta."""
    if beta < 2:
        raise ValueError(f"closed form needs Betti number >= 2, got {beta}")
    return AbelianGroup.from_orders(beta, [beta - 1]), AbelianGroup.free(beta)


def cycle_lattice(E: BiGraph) -> List[EdgeVector]:
    """Fundamental cycles of a spanning bi-tree, each written as sum(y - dual(y))
    over the directed cycle formed by a chord and the tree path closing it."""
    if not E.axes or not E.is_connected():
        raise GraphError("cycle lattice needs a connected graph")
    tree = spanning_bitree(E)
    root = min(E.axes)
    parent = tree_parents(E, tree, root)
    depth = {root: 0}
    order = deque([root])
    while order:
        a = order.popleft()
        for e in E.out_edges(a):
            if e in tree.edges and parent.get(E.rng[e]) == e:
                depth[E.rng[e]] = depth[a] + 1
                order.append(E.rng[e])

    def path(a: str, b: str) -> List[str]:
        # directed tree path a -> b
        up, down = [], []
        while depth[a] > depth[b]:
            up.append(E.dual[parent[a]])
            a = E.src[parent[a]]
        while depth[b] > depth[a]:
            down.append(parent[b])
            b = E.src[parent[b]]
        while a != b:
            up.append(E.dual[parent[a]])
            a = E.src[parent[a]]
            down.append(parent[b])
            b = E.src[parent[b]]
        return up + down[::-1]

    cycles = []
    for chord in E.edges:
        if E.orientation[chord] != 0 or chord in tree.edges:
            continue
        vec: EdgeVector = {}
        for y in [chord] + path(E.rng[chord], E.src[chord]):
            vec[y] = vec.get(y, 0) + 1
            vec[E.dual[y]] = vec.get(E.dual[y], 0) - 1
        cycles.append(clean(vec))
    return cycles


def to_dense(vectors: List[EdgeVector], index) -> List[Tuple[int, ...]]:
    return [tuple(v.get(k, 0) for k in index) for v in vectors]


def verify_k1_is_h1(E: BiGraph) -> bool:
    """Does ker(Id - Phi) coincide with the lattice of fundamental cycles?

    Holds for trees and for Betti number >= 2; a graph with Betti number 1
    has a rank-2 kernel (the two circulations of its cycle), so it fails.
    """
    A = id_minus_phi(E)
    cycles = to_dense(cycle_lattice(E), E.edges)
    return lattice_equal(kernel_basis(A), cycles, dim=len(E.edges))
