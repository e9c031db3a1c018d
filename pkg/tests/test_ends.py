import random

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from ckgraph.bhk import k_groups_finite
from ckgraph.bigraph import GraphError, UndirectedMultigraph, associate_bigraph
from ckgraph.desc import GraphDescription, RayAttachment, is_subgraph, ray_axis, truncate
from ckgraph.ends import (betti, infinite_components, k_groups, k_routes, materialized_components,
                          quotient_description, valency_invariance, valency_set)
from ckgraph.generate import random_disjoint_subgraphs, random_ray_description
from ckgraph.zlattice import ALEPH_0, AbelianGroup

A = UndirectedMultigraph(("a",))
THETA = UndirectedMultigraph.build(["a", "b"], {"x": ("a", "b"), "y": ("a", "b"), "z": ("a", "b")})


def rays(*specs, base=A):
    return GraphDescription(base, tuple(RayAttachment(f"r{i}", v, p) for i, (v, p) in enumerate(specs)))


RAY = rays(("a", (0,)))
LINE = rays(("a", (0,)), ("a", (0,)))
LOOPY = rays(("a", (1,)))


def nx_infinite_components(desc, k, horizon=3):
    """Reference count: components of a deep truncation minus X_k that touch its outer rim."""
    big = truncate(desc, k + horizon)
    inner = set(truncate(desc, k).links)
    G = nx.MultiGraph()
    for n, a, b in big.links:
        if (n, a, b) not in inner:
            G.add_edge(a, b, key=n)
    rim = {ray_axis(r.id, (k + horizon) * len(r.period)) for r in desc.rays}
    return sum(1 for c in nx.connected_components(G) if c & rim)


def test_truncate_examples():
    assert truncate(RAY, 0) == A
    t = truncate(rays(("a", (1,))), 3)
    assert len(t.vertices) == 4
    assert sum(1 for _, a, b in t.links if a == b) == 3
    assert truncate(GraphDescription(THETA), 7) == THETA


def test_truncation_is_monotone_and_exhausts():
    d = rays(("a", (1, 0, 2)), ("b", (0,)), base=THETA)
    for k in range(10):
        assert is_subgraph(truncate(d, k), truncate(d, k + 1))
    for j in range(1, 25):
        assert any(ray_axis("r0", j) in truncate(d, k).vertices for k in range(10))


def test_infinite_component_examples():
    assert [infinite_components(RAY, k) for k in range(1, 5)] == [1] * 4
    two = rays(("a", (0,)), ("a", (0,)), base=THETA)
    for k in range(1, 5):
        assert infinite_components(two, k) == 2 == nx_infinite_components(two, k)
    assert infinite_components(LINE, 3) == 2
    assert infinite_components(GraphDescription(THETA), 2) == 0


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_component_counts_against_networkx(seed):
    d = random_ray_description(random.Random(seed))
    counts = [infinite_components(d, k) for k in range(6)]
    assert counts == sorted(counts)
    for k in range(4):
        assert counts[k] == nx_infinite_components(d, k) == materialized_components(d, k)
    res = valency_set(d)
    diameter = nx.diameter(nx.Graph(nx.MultiGraph(list((a, b) for _, a, b in d.base.links)))) \
        if d.base.links else 0
    assert res.stabilization_depth <= diameter + 1


def test_valency_examples():
    assert valency_set(RAY).gamma == 1
    assert valency_set(RAY).stabilization_depth == 0
    assert valency_set(LINE).gamma == 2
    assert valency_set(GraphDescription(THETA)).gamma == 0
    assert valency_set(LINE).end_labels == ("r0", "r1")


def test_valency_invariance_examples():
    d = rays(("a", (0,)), base=THETA)
    T = associate_bigraph(truncate(d, 2))
    assert valency_invariance(d, [T.selection(["x"])], 2)
    assert valency_invariance(d, [T.selection(["r0@1", "r0@2"])], 2)
    assert valency_invariance(d, [], 0)
    q = quotient_description(d, [T.selection(["x"])], 2)
    assert q.base.betti() == 2 and [r.attach_vertex for r in q.rays] == ["r0_2"]


def test_invalid_z_rejected():
    d = rays(("a", (0,)), base=THETA)
    T = associate_bigraph(truncate(d, 1))
    with pytest.raises(GraphError):
        valency_invariance(d, [T.selection(["x"]), T.selection(["y"])], 1)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_valency_stable_under_shrinking(seed):
    rnd = random.Random(seed)
    d = random_ray_description(rnd)
    depth = rnd.randint(0, 3)
    T = associate_bigraph(truncate(d, depth))
    Z = random_disjoint_subgraphs(rnd, T, parts=rnd.randint(0, 4))
    assert valency_invariance(d, Z, depth)


def test_betti_examples():
    assert betti(RAY) == 0
    assert betti(LOOPY) == ALEPH_0
    assert betti(rays(("a", (0,)), base=THETA)) == 2


def test_k_groups_examples():
    assert k_groups(RAY) == (AbelianGroup.free(1), AbelianGroup.free(0))
    assert k_groups(LINE) == (AbelianGroup.free(2), AbelianGroup.free(0))
    assert k_groups(LOOPY) == (AbelianGroup.free(ALEPH_0), AbelianGroup.free(ALEPH_0))
    assert k_groups(GraphDescription(THETA)) == k_groups_finite(associate_bigraph(THETA))


def test_disconnected_is_direct_sum():
    base = UndirectedMultigraph.build(["a", "p"], {"u": ("p", "p"), "v": ("p", "p"), "w": ("p", "p")})
    d = GraphDescription(base, (RayAttachment("r", "a", (0,)),))
    k0, k1 = k_groups(d)
    assert k0 == AbelianGroup.from_orders(4, [2]) and k1 == AbelianGroup.free(3)


def test_edgeless_finite_component_is_an_error():
    with pytest.raises(GraphError):
        k_groups(GraphDescription(UndirectedMultigraph(("a",))))


def test_truncations_miss_the_end():
    for k in range(1, 11):
        assert k_groups_finite(associate_bigraph(truncate(RAY, k))) == (AbelianGroup.free(0), AbelianGroup.free(0))
    assert k_groups(RAY)[0] == AbelianGroup.free(1)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_routes_agree(seed):
    d = random_ray_description(random.Random(seed))
    routes = k_routes(d, 2)
    assert routes.agree
