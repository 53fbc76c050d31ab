"""The quotient q_n and its splitting s_n, checked on generators."""

from qpgraph.calculus import apply_map, compose_maps, is_identity, isometry, verify_star_hom
from qpgraph.catalog import (
    projection_class,
    projective_graph,
    quotient_map,
    splitting_chain_image,
    splitting_map,
    basis_change_matrix,
)

n = 3
big, small = projective_graph(n), projective_graph(n - 1)
s, q = splitting_map(n), quotient_map(n)

# Each of the infinitely many edges w_i -> w_j is handled uniformly in its label,
# so two labels per class already exercise every relation.
print("s_3:", verify_star_hom(small, big, s))
print("q_3:", verify_star_hom(big, small, q))
print("q_3 o s_3 = id:", is_identity(compose_maps(q, s), small))
print("s_3 o q_3 = id:", is_identity(compose_maps(s, q), big))

# The splitting sends an edge into w_3 to the sum of the edges into w_3 and w_4.
e = isometry(small, "w1", "w3", 5)
print("s_3(S_e) =", apply_map(s, e))

# Pushing a minimal projection up the chain of splittings.
for k in range(n):
    print(f"k={k}:", splitting_chain_image(n, k))

# The projections P_l = P_{w_{l+1}} + ... + P_{w_{n+1}} give a basis of K_0.
print("[P_2] in K_0:", projection_class(n, 2).free)
for row in basis_change_matrix(n):
    print("  ", row)
