"""K-groups of a few graph algebras, from the integer map K_E."""

from qpgraph import build_graph, k_groups, projective_graph, smith_normal_form, sphere_graph
from qpgraph.graph import INFINITE
from qpgraph.ktheory import K0Basis, k_map

# A graph is a list of vertices plus edge classes (source, target, multiplicity).
# INFINITE marks countably many parallel edges.
cuntz_3 = build_graph(["a"], [("a", "a", 3)])
toeplitz = build_graph(["a", "b"], [("a", "a", 1), ("a", "b", 1)])

for name, g in [("O_3", cuntz_3), ("Toeplitz", toeplitz)]:
    k0, k1 = k_groups(g)
    print(f"{name:10s} K0 = {k0}, K1 = {k1}")

# K_E has one column per regular vertex; K_0 is its cokernel, K_1 its kernel.
g = sphere_graph(2)
m = k_map(g)
print("\nK_E for L_5 (rows v1..v3, columns = regular vertices):")
for row in m:
    print("  ", row)
snf = smith_normal_form(m)
print("invariant factors:", snf.diagonal)
print("K(L_5) =", tuple(map(str, k_groups(g))))

# The projective graphs: K_0 grows by one copy of Z per dimension.
for n in range(1, 7):
    k0, k1 = k_groups(projective_graph(n))
    print(f"F_{n}: K0 = {k0}, K1 = {k1}")

# Classes of individual projections live in the coordinates fixed by one SNF.
basis = K0Basis(projective_graph(2))
for v in ("w1", "w2", "w3"):
    print(f"[P_{v}] =", basis.class_of([v]).free)

# an infinite emitter imposes no relation
print(k_groups(build_graph(["v", "w"], [("v", "w", INFINITE)])))
