"""Graph C*-algebra toolkit for quantum spheres and quantum projective spaces.

Modules
-------
graph      directed graphs with edge multiplicities and the GraphFile format
ktheory    K-groups from the map ``K_E`` via Smith normal form
ideals     hereditary saturated sets and quotient graphs
calculus   normal forms ``S_a S_b*`` and generator maps
catalog    the graphs ``L_{2n+1}``, ``F_n`` and the maps ``q_n``, ``s_n``, ``j_n``
kk         formal Kasparov-product rewriting
numerics   truncated operator representations
cli        command-line front end
"""

from .graph import INFINITE, Graph, GraphError, build_graph, format_graph, graph_isomorphic, parse_graph
from .ktheory import AbelianGroup, k_groups, smith_normal_form
from .ideals import enumerate_hereditary_saturated, quotient_graph, saturate
from .catalog import projective_graph, sphere_graph

__all__ = [
    "INFINITE",
    "AbelianGroup",
    "Graph",
    "GraphError",
    "build_graph",
    "enumerate_hereditary_saturated",
    "format_graph",
    "graph_isomorphic",
    "k_groups",
    "parse_graph",
    "projective_graph",
    "quotient_graph",
    "saturate",
    "smith_normal_form",
    "sphere_graph",
]

__version__ = "0.1.0"
