"""Hereditary saturated sets, the ideals they index, and quotient graphs."""

from qpgraph import enumerate_hereditary_saturated, format_graph, projective_graph, quotient_graph, saturate
from qpgraph.graph import INFINITE, build_graph, graph_isomorphic
from qpgraph.ideals import h_inf_fin
from qpgraph.ktheory import k_groups

# In F_3 the hereditary saturated sets form a chain: each is "everything from w_k on".
lattice = enumerate_hereditary_saturated(projective_graph(3))
print("F_3 lattice:", lattice.describe(), "chain:", lattice.is_chain())

# Dropping the sink w4 gives back F_2 ...
q = quotient_graph(projective_graph(3), {"w4"})
print(format_graph(q))
print("isomorphic to F_2:", graph_isomorphic(q, projective_graph(2)))
print("K-theory of the quotient:", tuple(map(str, k_groups(q))))

# ... and a set that is not closed is completed first.
print("closure of {w3}:", sorted(saturate(projective_graph(3), {"w3"})))

# With infinite emitters that keep finitely many edges outside H, the quotient
# grows extra sinks beta:v, and edges into v are doubled onto them.
g = build_graph(
    ["x", "v", "h", "u"],
    [("x", "v", 1), ("v", "h", INFINITE), ("v", "u", 1)],
)
print("H_inf_fin:", sorted(h_inf_fin(g, {"h"})))
print(format_graph(quotient_graph(g, {"h"})))
