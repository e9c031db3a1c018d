import json
from pathlib import Path

import pytest

from ckgraph.bigraph import BiGraph, UndirectedMultigraph, associate_bigraph

DATA = Path(__file__).parent / "data"


def graph(links, axes=None):
    """BiGraph from {name: (a, b)}; axes default to the endpoints."""
    if axes is None:
        axes = sorted({v for ab in links.values() for v in ab})
    return BiGraph.from_links(axes, links)


ROSE3 = {"x": ("a", "a"), "y": ("a", "a"), "z": ("a", "a")}
THETA = {"x": ("a", "b"), "y": ("a", "b"), "z": ("a", "b")}
LOOP = {"u": ("a", "a")}
TRIANGLE = {"x1": ("a", "b"), "x2": ("b", "c"), "x3": ("c", "a")}
PATH = {"x": ("a", "b"), "y": ("b", "c")}
BARBELL = {"l1": ("a", "a"), "p1": ("a", "b"), "p2": ("b", "c"), "p3": ("c", "d"), "l2": ("d", "d")}


@pytest.fixture(scope="session")
def frozen():
    table = json.loads((DATA / "oracle_kgroups.json").read_text())
    out = {}
    for name, entry in table.items():
        g = UndirectedMultigraph(tuple(entry["vertices"]), tuple(tuple(t) for t in entry["links"]))
        out[name] = (associate_bigraph(g), entry)
    return out
