"""K-groups of Cuntz-Krieger algebras of locally finite graphs, computed
from the Bass-Hashimoto operator and a reduction to rose-trees."""

from .bhk import bass_hashimoto, finite_formula, k_groups_finite, verify_k1_is_h1
from .bigraph import BiGraph, GraphError, SubgraphSelection, UndirectedMultigraph, associate_bigraph
from .desc import GraphDescription, RayAttachment, truncate
from .ends import betti, k_groups, valency_set
from .reduce import RoseTree, reduce_description, reduce_graph
from .textio import emit, parse
from .zlattice import AbelianGroup, Cardinal

__all__ = [
    "AbelianGroup", "BiGraph", "Cardinal", "GraphDescription", "GraphError", "RayAttachment", "RoseTree",
    "SubgraphSelection", "UndirectedMultigraph", "associate_bigraph", "bass_hashimoto", "betti", "emit",
    "finite_formula", "k_groups", "k_groups_finite", "parse", "reduce_description", "reduce_graph", "truncate",
    "valency_set", "verify_k1_is_h1",
]

__version__ = "0.1.0"
