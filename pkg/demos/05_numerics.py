"""Truncated operator models of the sphere and graph representations."""

import numpy as np

from qpgraph import numerics as nm

n, q = 2, 0.5
trunc = nm.Truncation(n, N=8, M=3)
print("basis size:", trunc.dim)

psi = nm.rep_psi(n, q, trunc)
pi = nm.rep_pi(n, q, trunc)
rho = nm.rep_rho(n, trunc)

# Relations are checked on basis vectors at least two steps from the cutoff.
for label, table, rel in [("psi", psi, "qps"), ("pi", pi, "qps"), ("rho", rho, "graph")]:
    rep = nm.relation_residuals(table, rel)
    print(f"{label:4s} {rel:6s} max residual {rep.max_residual:.2e} over {len(rep.residuals)} relations")

# The other ordering convention for z_i z_j* does not hold in this representation.
printed = nm.relation_residuals(psi, "qps_printed")
print("z_i z_j* = q z_j* z_i instead:", printed.worst())

# The product formula reaches the 0/1 projection after l*N steps.
for row in nm.projection_convergence(n, q, trunc, pi):
    print(f"l={row.l}: steps={row.steps} error={row.max_error:.1e}")

# Watching one diagonal entry converge: k = (1, 2), so k_1 + k_2 = 3.
ks, ms = trunc.grid
idx = int(np.flatnonzero((ks[:, 0] == 1) & (ks[:, 1] == 2) & (ms == 0))[0])
for steps in range(1, 5):
    value = nm.projection_limit(n, q, 2, steps, pi).diagonal()[idx]
    print(f"  steps={steps}: {value:+.6f}")

print("pi(P_l) against rho vertex sums:", nm.check_rel_proj(n, q, trunc).max_residual)
print("projection identities of p_ij:", nm.cp_generator_check(n, q, trunc, full=True).max_residual)
