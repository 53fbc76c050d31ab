"""Reducing the Kasparov products of Pi_n and I_n to identities."""

from qpgraph import kk

# Pi_n maps CP^n into K^n (+) C; I_n goes back.  Chains are written in product
# order, so [j1.s2] is the class of s2 o j1.
n = 2
Pi, I = kk.build_Pi(n), kk.build_I(n)
print("Pi_2 =")
print(Pi)
print("I_2 =")
print(I)

print("\nI_2 (x) Pi_2 before rewriting:")
print(kk.product(I, Pi))

report = kk.verify_kk_equivalence(n)
print("\nboth products reduce to the identity:", report.passed)
for line in report.trace_lines():
    print("  ", line)

# Replacing each K by C with the Morita classes.
forward, backward, mor = kk.morita_compress(3)
print("\nCP^3 -> C^4:")
print(forward)
print("mutually inverse:", mor.passed)

for m in range(1, 6):
    r = kk.verify_kk_equivalence(m)
    print(f"n={m}: {r.passed}, {len(r.left_trace) + len(r.right_trace)} rewrite steps")
