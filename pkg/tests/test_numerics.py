import math

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st

from qpgraph.numerics import (
    NumericsError,
    Truncation,
    check_rel_proj,
    cp_generator_check,
    edge_name,
    projection_closed_form,
    projection_convergence,
    projection_limit,
    relation_residuals,
    rep_pi,
    rep_psi,
    rep_rho,
    tail_gram,
    vertex_name,
)


def basis_index(trunc, ks, m=0):
    idx = 0
    for k in ks:
        idx = idx * (trunc.N + 1) + k
    if trunc.M is not None:
        idx = idx * (2 * trunc.M + 1) + (m + trunc.M)
    return idx


def test_truncation_validation():
    with pytest.raises(NumericsError):
        Truncation(0, 4)
    with pytest.raises(NumericsError):
        Truncation(2, 1)
    with pytest.raises(NumericsError):
        Truncation(2, 4, 0)
    t = Truncation(2, 4, 2)
    assert t.dim == 25 * 5
    ks, ms = t.grid
    assert tuple(ks[7]) == (0, 1) and ms[7] == 2 - 2  # lexicographic, m fastest
    assert len(t.interior(2)) == 9 * 1


def test_psi_matrix_entries():
    q, t = 0.5, Truncation(2, 5)
    psi = rep_psi(2, q, t)
    z0, z1, z2 = psi["z0"], psi["z1"], psi["z2"]
    assert z0[basis_index(t, (1, 0)), basis_index(t, (0, 0))] == pytest.approx(math.sqrt(1 - q**2))
    assert z1[basis_index(t, (2, 1)), basis_index(t, (2, 0))] == pytest.approx(q**2 * math.sqrt(1 - q**2))
    assert z2[basis_index(t, (0, 0)), basis_index(t, (0, 0))] == 1.0
    assert z2[basis_index(t, (1, 3)), basis_index(t, (1, 3))] == pytest.approx(q**4)
    # shifts out of the box are dropped
    assert z0[:, basis_index(t, (5, 2))].nnz == 0
    assert z1[:, basis_index(t, (3, 5))].nnz == 0


def test_psi_rejects_bad_q():
    for q in (0.0, 1.0, 1.5, -0.2):
        with pytest.raises(NumericsError):
            rep_psi(1, q, Truncation(1, 4))


def test_sum_of_gram_terms_is_identity_on_interior():
    psi = rep_psi(2, 0.5, Truncation(2, 8))
    rep = relation_residuals(psi, "qps")
    assert rep.residuals["sum z_j z_j* - 1"] < 1e-12
    assert rep.max_residual < 1e-12


@pytest.mark.parametrize("q", [0.3, 0.5, 0.8])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_sphere_relations(n, q):
    t = Truncation(n, 6, 3)
    assert relation_residuals(rep_psi(n, q, t), "qps").max_residual < 1e-10
    assert relation_residuals(rep_pi(n, q, t), "qps").max_residual < 1e-10


def test_printed_mixed_relation_convention_fails():
    psi = rep_psi(1, 0.5, Truncation(1, 8))
    rep = relation_residuals(psi, "qps_printed")
    name, worst = rep.worst()
    assert "z0 z1* - q z1* z0" == name
    assert worst > 0.1
    # everything else in the set still holds
    others = [v for k, v in rep.residuals.items() if "* z" not in k.split(" - ")[0] or "*" not in k]
    assert min(rep.residuals.values()) < 1e-12 and others


def test_margin_and_table_checks():
    psi = rep_psi(1, 0.5, Truncation(1, 6))
    with pytest.raises(NumericsError):
        relation_residuals(psi, "qps", margin=1)
    with pytest.raises(NumericsError):
        relation_residuals(psi, "graph")
    with pytest.raises(NumericsError):
        relation_residuals(psi, "nope")
    with pytest.raises(NumericsError):
        relation_residuals(rep_psi(1, 0.5, Truncation(1, 2)), "qps", margin=3)


def test_perturbation_is_detected():
    t = Truncation(2, 8)
    psi = rep_psi(2, 0.5, t)
    z1 = psi["z1"].tolil()
    r, c = basis_index(t, (1, 2)), basis_index(t, (1, 1))
    z1[r, c] += 1e-3
    bad = psi.replace("z1", z1)
    assert relation_residuals(bad, "qps").max_residual >= 1e-4


def test_rho_structure():
    n, t = 2, Truncation(2, 5, 2)
    rho = rep_rho(n, t)
    ops = rho.operators
    assert all(set(np.unique(op.data)) <= {1.0} for op in ops.values())
    total = sum(ops[vertex_name(j)] for j in range(1, n + 2))
    assert (total != sp.identity(t.dim)).nnz == 0
    top = ops[vertex_name(n + 1)].diagonal()
    ks, _ = t.grid
    assert np.array_equal(top, np.all(ks == 0, axis=1).astype(float))
    loop = ops[edge_name(n + 1, n + 1)]
    assert loop[basis_index(t, (0, 0), 1), basis_index(t, (0, 0), 0)] == 1
    assert loop[:, basis_index(t, (1, 0), 0)].nnz == 0
    # v1 -> v3 raises k_1 on the k = 0 stratum
    e13 = ops[edge_name(1, 3)]
    assert e13[basis_index(t, (1, 0), -1), basis_index(t, (0, 0), -1)] == 1


@pytest.mark.parametrize("n", [1, 2, 3])
def test_graph_relations_exact(n):
    rep = relation_residuals(rep_rho(n, Truncation(n, 6, 3)), "graph")
    assert rep.max_residual == 0.0


def test_rho_requires_winding():
    with pytest.raises(NumericsError):
        rep_rho(1, Truncation(1, 4))
    with pytest.raises(NumericsError):
        rep_pi(1, 0.5, Truncation(1, 4))


def test_pi_strata_and_top_generator():
    n, q, t = 2, 0.5, Truncation(2, 5, 2)
    pi, psi = rep_pi(n, q, t), rep_psi(n, q, t)
    stride = 2 * t.M + 1
    for j in range(n):
        for m in range(stride):
            block = pi[f"z{j}"][m::stride, m::stride]
            assert abs(block - psi[f"z{j}"]).max() == 0
    zz = (pi[f"z{n}"] @ pi[f"z{n}"].T).tocsr()
    ks, _ = t.grid
    expected = q ** (2 * ks.sum(axis=1))
    assert abs(zz - sp.diags(expected)).max() < 1e-15


def test_projection_closed_form():
    t = Truncation(2, 4, 2)
    assert (projection_closed_form(2, 0, t) != sp.identity(t.dim)).nnz == 0
    traces = [projection_closed_form(2, l, t).diagonal().sum() for l in range(3)]
    assert traces == [(t.N + 1) ** (2 - l) * (2 * t.M + 1) for l in range(3)]
    assert traces == sorted(traces, reverse=True)
    psi_t = Truncation(3, 4)
    assert projection_closed_form(3, 3, psi_t).diagonal().sum() == 1
    with pytest.raises(NumericsError):
        projection_closed_form(2, 3, t)


def test_projection_limit_on_eigenvectors():
    n, q, t = 2, 0.5, Truncation(2, 6, 2)
    pi = rep_pi(n, q, t)
    l = 2
    for steps in (1, 2, 5):
        d = projection_limit(n, q, l, steps, pi).diagonal()
        assert d[basis_index(t, (0, 0), 0)] == pytest.approx(1.0, abs=1e-12)
    k_total = 3
    v = basis_index(t, (1, 2), 1)
    assert abs(projection_limit(n, q, l, k_total - 1, pi).diagonal()[v]) > 1e-3
    for steps in (k_total, k_total + 2):
        assert abs(projection_limit(n, q, l, steps, pi).diagonal()[v]) < 1e-12


@pytest.mark.parametrize("n", [1, 2, 3])
def test_projection_limit_converges_to_closed_form(n):
    q, t = 0.5, Truncation(n, 5, 2)
    pi = rep_pi(n, q, t)
    for l in range(1, n + 1):
        p = projection_limit(n, q, l, l * t.N, pi)
        assert abs(p - projection_closed_form(n, l, t)).max() < 1e-10
        assert abs(p @ p - p).max() < 1e-10
        assert abs(p - p.T).max() == 0


def test_tail_gram_is_diagonal_power_of_q():
    n, q, t = 3, 0.3, Truncation(3, 4)
    psi = rep_psi(n, q, t)
    ks, _ = t.grid
    for l in range(1, n + 1):
        a = tail_gram(psi, l)
        expected = q ** (2 * ks[:, :l].sum(axis=1))
        assert abs(a - sp.diags(expected)).max() < 1e-14


def test_projection_limit_errors():
    pi = rep_pi(2, 0.5, Truncation(2, 4, 2))
    with pytest.raises(NumericsError):
        projection_limit(2, 0.5, 0, 3, pi)
    with pytest.raises(NumericsError):
        projection_limit(2, 0.5, 1, 0, pi)


@pytest.mark.parametrize("n, trunc", [(2, Truncation(2, 6, 3)), (1, Truncation(1, 6, 3)), (3, Truncation(3, 4, 2))])
def test_rel_proj_is_exact(n, trunc):
    rep = check_rel_proj(n, 0.5, trunc)
    assert rep.max_residual == 0.0
    assert len(rep.residuals) == 2 * n + 1


def test_rel_proj_detects_perturbed_rho():
    t = Truncation(2, 4, 2)
    rho = rep_rho(2, t)
    bad = rho.replace(vertex_name(3), rho[vertex_name(3)] * 0)
    assert check_rel_proj(2, 0.5, t, rho=bad).max_residual > 0


def test_cp_generators():
    rep = cp_generator_check(1, 0.5, Truncation(1, 10))
    assert rep.max_residual < 1e-11
    assert all(v == 0.0 for k, v in rep.residuals.items() if "*" in k)
    assert cp_generator_check(3, 0.5, Truncation(3, 5), full=True).max_residual < 1e-10


def test_convergence_table():
    rows = projection_convergence(2, 0.5, Truncation(2, 5, 2))
    assert [(r.l, r.steps) for r in rows] == [(1, 5), (2, 10)]
    assert all(r.max_error < 1e-10 for r in rows)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 2), st.floats(0.1, 0.9), st.integers(4, 7))
def test_relations_hold_for_random_parameters(n, q, N):
    t = Truncation(n, N, 2)
    assert relation_residuals(rep_psi(n, q, t), "qps").max_residual < 1e-10
    assert relation_residuals(rep_pi(n, q, t), "qps").max_residual < 1e-10
