"""Independent reference computations (networkx + sympy), used to freeze
expected values in tests/data.  Run as a script to regenerate them:

    python3 tests/oracle.py
"""

import json
import random
from pathlib import Path

import networkx as nx
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form

DATA = Path(__file__).parent / "data" / "oracle_kgroups.json"


def to_nx(links):
    G = nx.MultiGraph()
    for name, a, b in links:
        G.add_edge(a, b, key=name)
    return G


def operator(G):
    """Dense Id - Phi on the directed edges of G, built from networkx edge data."""
    arrows = []
    for a, b, key in sorted(G.edges(keys=True), key=lambda t: t[2]):
        arrows.append((key, 0, a, b))
        arrows.append((key, 1, b, a))
    n = len(arrows)
    M = [[0] * n for _ in range(n)]
    for j, (key, side, s, r) in enumerate(arrows):
        M[j][j] += 1
        for i, (_, _, s2, _) in enumerate(arrows):
            if s2 == r:
                M[i][j] -= 1
        bar = arrows.index((key, 1 - side, r, s))
        M[bar][j] += 1
    return Matrix(M)


def k_groups(links):
    A = operator(to_nx(links))
    n = A.shape[0]
    r = A.rank()
    snf = smith_normal_form(A, domain=ZZ)
    diag = [abs(int(snf[i, i])) for i in range(min(snf.shape))]
    torsion = sorted(d for d in diag if d > 1)
    return {"k0_free": n - r, "k0_torsion": torsion, "k1_free": n - r}


def betti(links, vertices):
    G = to_nx(links)
    G.add_nodes_from(vertices)
    return G.number_of_edges() - G.number_of_nodes() + nx.number_connected_components(G)


def named_graphs():
    g = {
        "rose3": (["a"], [("x", "a", "a"), ("y", "a", "a"), ("z", "a", "a")]),
        "theta": (["a", "b"], [("x", "a", "b"), ("y", "a", "b"), ("z", "a", "b")]),
        "loop": (["a"], [("u", "a", "a")]),
        "triangle": (["a", "b", "c"], [("x1", "a", "b"), ("x2", "b", "c"), ("x3", "c", "a")]),
        "barbell": (["a", "b", "c", "d"], [("l1", "a", "a"), ("p1", "a", "b"), ("p2", "b", "c"),
                                           ("p3", "c", "d"), ("l2", "d", "d")]),
        "path": (["a", "b", "c"], [("x", "a", "b"), ("y", "b", "c")]),
    }
    k4 = nx.complete_graph(4)
    g["k4"] = ([str(v) for v in k4], [(f"e{i}", str(a), str(b)) for i, (a, b) in enumerate(k4.edges())])
    pet = nx.petersen_graph()
    g["petersen"] = ([str(v) for v in pet], [(f"e{i}", str(a), str(b)) for i, (a, b) in enumerate(pet.edges())])
    return g


def random_graphs(count=40, seed=2024):
    rng = random.Random(seed)
    out = {}
    for i in range(count):
        n = rng.randint(1, 7)
        vertices = [f"v{j}" for j in range(n)]
        links = [(f"t{j}", vertices[rng.randrange(j)], vertices[j]) for j in range(1, n)]
        for j in range(rng.randint(0 if n > 1 else 1, 6)):
            links.append((f"c{j}", rng.choice(vertices), rng.choice(vertices)))
        out[f"random{i}"] = (vertices, links)
    return out


def freeze():
    table = {}
    for name, (vertices, links) in {**named_graphs(), **random_graphs()}.items():
        entry = {"vertices": vertices, "links": [list(t) for t in links], "betti": betti(links, vertices)}
        entry.update(k_groups(links))
        table[name] = entry
    DATA.write_text(json.dumps(table, indent=1, sort_keys=True) + "\n")


if __name__ == "__main__":
    freeze()
