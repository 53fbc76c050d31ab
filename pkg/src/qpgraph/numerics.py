"""Truncated operator models of the sphere and graph representations.

Three representations are realized as sparse matrices on a finite box of
basis vectors:

``psi``
    the irreducible representation of ``C(S_q^{2n+1})`` on ``zeta(k_1..k_n)``;
``pi``
    ``psi`` on every winding stratum ``m``, with ``z_n`` also moving ``m -> m+1``;
``rho``
    the 0/1 shift representation of ``C*(L_{2n+1})`` on ``xi(k_1..k_n, m)``.

Each ``k_i`` is cut off at ``N``; shifts that leave the box are dropped.
The winding index ``m`` runs over ``-M..M`` and is treated cyclically
(``M + 1`` wraps to ``-M``), so the ``m`` direction is exact and only the
``k`` cutoff needs an interior margin.  Basis order is lexicographic in
``(k_1, ..., k_n, m)``.

Relations are checked on interior basis vectors (every ``k_i <= N - margin``
and ``|m| <= M - margin``), where words of shift degree ``<= margin`` are
evaluated without truncation error.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import numpy as np
import scipy.sparse as sp

from .catalog import sphere_graph, sphere_vertex

Operator = sp.csr_matrix

RELATION_SETS = ("qps", "qps_printed", "graph", "cp")
REQUIRED_MARGIN = {"qps": 2, "qps_printed": 2, "graph": 2, "cp": 2}


class NumericsError(ValueError):
    """Invalid parameters for a truncated computation."""


def _check_q(q: float) -> None:
    if not (0.0 < q < 1.0):
        raise NumericsError(f"q must lie in (0, 1), got {q}")


@dataclass(frozen=True)
class Truncation:
    """Index box ``k_i in 0..N`` (and ``m in -M..M`` when ``M`` is given)."""

    n: int
    N: int
    M: int | None = None

    def __post_init__(self) -> None:
        if self.n < 1:
            raise NumericsError("n must be >= 1")
        if self.N < 2:
            raise NumericsError("N must be >= 2")
        if self.M is not None and self.M < 1:
            raise NumericsError("M must be >= 1")

    @property
    def has_winding(self) -> bool:
        return self.M is not None

    @property
    def winding_size(self) -> int:
        return 1 if self.M is None else 2 * self.M + 1

    @property
    def dim(self) -> int:
        return (self.N + 1) ** self.n * self.winding_size

    def without_winding(self) -> "Truncation":
        return Truncation(self.n, self.N)

    @cached_property
    def grid(self) -> tuple[np.ndarray, np.ndarray]:
        """``(ks, ms)``: ``ks[x]`` is the multi-index of basis vector ``x``, ``ms[x]`` its winding."""
        axes = [np.arange(self.N + 1)] * self.n
        if self.M is not None:
            axes.append(np.arange(-self.M, self.M + 1))
        mesh = np.meshgrid(*axes, indexing="ij")
        flat = np.stack([a.ravel() for a in mesh], axis=1)
        ks = flat[:, : self.n].astype(np.int64)
        ms = flat[:, self.n].astype(np.int64) if self.M is not None else np.zeros(len(flat), np.int64)
        return ks, ms

    def flat_index(self, ks: np.ndarray, ms: np.ndarray) -> np.ndarray:
        idx = np.zeros(len(ks), dtype=np.int64)
        for i in range(self.n):
            idx = idx * (self.N + 1) + ks[:, i]
        if self.M is not None:
            idx = idx * self.winding_size + (ms + self.M)
        return idx

    def interior(self, margin: int) -> np.ndarray:
        """Indices of basis vectors at distance ``>= margin`` from the cutoff."""
        ks, ms = self.grid
        mask = np.all(ks <= self.N - margin, axis=1)
        if self.M is not None:
            mask &= np.abs(ms) <= self.M - margin
        return np.flatnonzero(mask)


def weighted_shift(
    trunc: Truncation,
    coefficient: np.ndarray,
    axis: int | None = None,
    winding: int = 0,
) -> Operator:
    """Operator ``e_x -> coefficient[x] * e_{x'}``, where ``x'`` raises ``k_axis`` by one and ``m`` by ``winding``.

    Targets with ``k_axis > N`` are dropped; ``m`` wraps around.
    """
    ks, ms = trunc.grid
    coefficient = np.asarray(coefficient, dtype=float)
    new_ks = ks.copy()
    keep = coefficient != 0
    if axis is not None:
        new_ks[:, axis] += 1
        keep &= new_ks[:, axis] <= trunc.N
    new_ms = ms
    if winding:
        if trunc.M is None:
            raise NumericsError("winding shift needs a truncation with M")
        new_ms = (ms + trunc.M + winding) % trunc.winding_size - trunc.M
    cols = np.flatnonzero(keep)
    rows = trunc.flat_index(new_ks[cols], new_ms[cols])
    return sp.csr_matrix((coefficient[cols], (rows, cols)), shape=(trunc.dim, trunc.dim))


def diagonal(trunc: Truncation, values: np.ndarray) -> Operator:
    return sp.diags(np.asarray(values, dtype=float), format="csr")


@dataclass
class RepresentationTable:
    """Named operators of one representation on a common truncation."""

    kind: str
    trunc: Truncation
    operators: dict[str, Operator]
    q: float | None = None

    def __getitem__(self, name: str) -> Operator:
        return self.operators[name]

    def __contains__(self, name: str) -> bool:
        return name in self.operators

    def replace(self, name: str, op: Operator) -> "RepresentationTable":
        ops = dict(self.operators)
        ops[name] = sp.csr_matrix(op)
        return RepresentationTable(self.kind, self.trunc, ops, self.q)


# -- psi and pi -----------------------------------------------------------------


def _psi_operators(n: int, q: float, trunc: Truncation, winding: bool) -> dict[str, Operator]:
    ks, _ = trunc.grid
    partial = np.cumsum(ks, axis=1)  # partial[:, j-1] = k_1 + ... + k_j
    ops: dict[str, Operator] = {}
    ops["z0"] = weighted_shift(trunc, np.sqrt(1.0 - q ** (2 * (ks[:, 0] + 1))), axis=0)
    for j in range(1, n):
        coeff = q ** partial[:, j - 1] * np.sqrt(1.0 - q ** (2 * (ks[:, j] + 1)))
        ops[f"z{j}"] = weighted_shift(trunc, coeff, axis=j)
    top = q ** partial[:, n - 1].astype(float)
    ops[f"z{n}"] = weighted_shift(trunc, top, winding=1) if winding else diagonal(trunc, top)
    return ops


def rep_psi(n: int, q: float, trunc: Truncation) -> RepresentationTable:
    """``psi(z_0), ..., psi(z_n)`` on ``zeta(k_1..k_n)``, ``k_i <= N``."""
    _check_q(q)
    if trunc.n != n:
        raise NumericsError("truncation dimension does not match n")
    t = trunc.without_winding()
    return RepresentationTable("psi", t, _psi_operators(n, q, t, winding=False), q)


def rep_pi(n: int, q: float, trunc: Truncation) -> RepresentationTable:
    """``pi(z_j)``: ``psi(z_j)`` on each stratum for ``j < n``; ``pi(z_n)`` also shifts ``m``."""
    _check_q(q)
    if trunc.n != n:
        raise NumericsError("truncation dimension does not match n")
    if not trunc.has_winding:
        raise NumericsError("rep_pi needs a winding cutoff M")
    return RepresentationTable("pi", trunc, _psi_operators(n, q, trunc, winding=True), q)


# -- rho --------------------------------------------------------------------------


def vertex_name(j: int) -> str:
    return f"P_{sphere_vertex(j)}"


def edge_name(i: int, j: int) -> str:
    return f"S_{sphere_vertex(i)}_{sphere_vertex(j)}"


def _leading_zeros(ks: np.ndarray, count: int) -> np.ndarray:
    """Indicator of ``k_1 = ... = k_count = 0``."""
    if count == 0:
        return np.ones(len(ks), dtype=bool)
    return np.all(ks[:, :count] == 0, axis=1)


def rep_rho(n: int, trunc: Truncation) -> RepresentationTable:
    """The 0/1 shift representation of ``C*(L_{2n+1})``.

    ``P_{v_j}`` (``j <= n``) projects onto ``k_1 = ... = k_{j-1} = 0 != k_j``
    and ``P_{v_{n+1}}`` onto ``k = 0``.  The edge ``v_i -> v_j`` raises
    ``k_i`` on the range of ``P_{v_j}``; the edge ``v_i -> v_{n+1}`` raises
    ``k_i`` on ``k = 0``; the loop at ``v_{n+1}`` raises ``m`` on ``k = 0``.
    """
    if trunc.n != n:
        raise NumericsError("truncation dimension does not match n")
    if not trunc.has_winding:
        raise NumericsError("rep_rho needs a winding cutoff M")
    ks, _ = trunc.grid
    supports = {}
    for j in range(1, n + 1):
        supports[j] = _leading_zeros(ks, j - 1) & (ks[:, j - 1] != 0)
    supports[n + 1] = _leading_zeros(ks, n)

    ops: dict[str, Operator] = {}
    for j, mask in supports.items():
        ops[vertex_name(j)] = diagonal(trunc, mask.astype(float))
    for j in range(1, n + 2):
        src_mask = supports[j].astype(float)
        for i in range(1, j + 1):
            if i == n + 1:
                ops[edge_name(i, j)] = weighted_shift(trunc, src_mask, winding=1)
            else:
                ops[edge_name(i, j)] = weighted_shift(trunc, src_mask, axis=i - 1)
    return RepresentationTable("rho", trunc, ops)


# -- residuals -------------------------------------------------------------------


@dataclass
class ResidualReport:
    """Maximum residual per relation over interior basis vectors."""

    residuals: dict[str, float]
    margin: int
    label: str = ""

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)

    def passed(self, tol: float = 1e-10) -> bool:
        return self.max_residual < tol

    def worst(self) -> tuple[str, float]:
        return max(self.residuals.items(), key=lambda kv: kv[1])


def column_residual(op: Operator, columns: np.ndarray) -> float:
    """Largest Euclidean norm of the selected columns of ``op``."""
    sub = sp.csc_matrix(op)[:, columns]
    if sub.nnz == 0:
        return 0.0
    norms = np.sqrt(np.asarray(sub.multiply(sub).sum(axis=0)).ravel())
    return float(norms.max())


def _eye(trunc: Truncation) -> Operator:
    return sp.identity(trunc.dim, format="csr")


def _qps_relations(table: RepresentationTable, printed: bool) -> dict[str, Operator]:
    q = table.q
    n = table.trunc.n
    z = [table[f"z{i}"] for i in range(n + 1)]
    zs = [op.T.tocsr() for op in z]  # real entries: adjoint is transpose
    rel: dict[str, Operator] = {}
    # z_i z_j* = c z_j* z_i with c = q (as printed) or q^{-1} (satisfied by psi)
    c = q if printed else 1.0 / q
    for i in range(n + 1):
        for j in range(n + 1):
            if i < j:
                rel[f"z{i} z{j} - q^-1 z{j} z{i}"] = z[i] @ z[j] - (1.0 / q) * (z[j] @ z[i])
            if i != j:
                tag = "q" if printed else "q^-1"
                rel[f"z{i} z{j}* - {tag} z{j}* z{i}"] = z[i] @ zs[j] - c * (zs[j] @ z[i])
    gram = [z[j] @ zs[j] for j in range(n + 1)]
    for i in range(n + 1):
        tail = sum(gram[i + 1:], sp.csr_matrix((table.trunc.dim, table.trunc.dim)))
        rel[f"z{i}* z{i} - z{i} z{i}* - (1-q^2) tail"] = zs[i] @ z[i] - gram[i] - (1 - q * q) * tail
    rel["sum z_j z_j* - 1"] = sum(gram[1:], gram[0]) - _eye(table.trunc)
    return rel


def _graph_relations(table: RepresentationTable) -> dict[str, Operator]:
    n = table.trunc.n
    g = sphere_graph(n)
    eye = _eye(table.trunc)
    idx = {sphere_vertex(j): j for j in range(1, n + 2)}
    P = {v: table[vertex_name(idx[v])] for v in g.vertices}
    S = {(e.source, e.target): table[edge_name(idx[e.source], idx[e.target])] for e in g.edges}
    St = {k: op.T.tocsr() for k, op in S.items()}
    rel: dict[str, Operator] = {}
    for v in g.vertices:
        rel[f"P_{v}^2 - P_{v}"] = P[v] @ P[v] - P[v]
        rel[f"P_{v}* - P_{v}"] = P[v].T - P[v]
        for w in g.vertices:
            if idx[v] < idx[w]:
                rel[f"P_{v} P_{w}"] = P[v] @ P[w]
    rel["sum P_v - 1"] = sum(P.values(), sp.csr_matrix(eye.shape)) - eye
    for (s, t), op in S.items():
        rel[f"S*S - P_{t} [{s}->{t}]"] = St[(s, t)] @ op - P[t]
        rng = op @ St[(s, t)]
        rel[f"P_{s} SS* - SS* [{s}->{t}]"] = P[s] @ rng - rng
    keys = list(S)
    for a in keys:
        for b in keys:
            if a != b:
                rel[f"S*S [{a[0]}->{a[1]} , {b[0]}->{b[1]}]"] = St[a] @ S[b]
    for v in g.vertices:
        total = sum((S[k] @ St[k] for k in keys if k[0] == v), sp.csr_matrix(eye.shape))
        rel[f"P_{v} - sum SS* [{v}]"] = P[v] - total
    return rel


def _cp_relations(table: RepresentationTable, full: bool) -> dict[str, Operator]:
    q = table.q
    n = table.trunc.n
    z = [table[f"z{i}"] for i in range(n + 1)]
    p = {(i, j): (z[i].T @ z[j]).tocsr() for i in range(n + 1) for j in range(n + 1)}
    r = range(n + 1)
    rel: dict[str, Operator] = {}
    for i in r:
        for k in r:
            rel[f"sum_j p{i}j pj{k} - p{i}{k}"] = sum((p[i, j] @ p[j, k] for j in r), -p[i, k])
            rel[f"p{i}{k}* - p{k}{i}"] = p[i, k].T - p[k, i]
    if not full:
        return rel
    sgn = lambda x: (x > 0) - (x < 0)  # noqa: E731
    zero = sp.csr_matrix((table.trunc.dim, table.trunc.dim))
    for i in r:
        for j in r:
            for k in r:
                for l in r:
                    if i != l and j != k:
                        c = q ** (sgn(k - i) + sgn(j - l))
                        rel[f"p{i}{j} p{k}{l} (commute)"] = p[i, j] @ p[k, l] - c * (p[k, l] @ p[i, j])
            for k in r:
                if i != k:
                    c = q ** (sgn(j - i) + sgn(j - k) + 1)
                    tail = sum((p[i, l] @ p[l, k] for l in r if l > j), zero)
                    rel[f"p{i}{j} p{j}{k} (chain)"] = (
                        p[i, j] @ p[j, k] - c * (p[j, k] @ p[i, j]) + (1 - q * q) * tail
                    )
            if i != j:
                c = q ** (2 * sgn(j - i))
                t1 = sum((p[j, l] @ p[l, j] for l in r if l > i), zero)
                t2 = sum((p[i, l] @ p[l, i] for l in r if l > j), zero)
                rel[f"p{i}{j} p{j}{i} (swap)"] = (
                    p[i, j] @ p[j, i] - c * (p[j, i] @ p[i, j]) - (1 - q * q) * (c * t1 - t2)
                )
    return rel


def relation_operators(table: RepresentationTable, relation_set: str) -> dict[str, Operator]:
    """``LHS - RHS`` for every relation in the set, as operators."""
    if relation_set in ("qps", "qps_printed"):
        if table.kind not in ("psi", "pi"):
            raise NumericsError("sphere relations need a psi or pi table")
        return _qps_relations(table, printed=relation_set == "qps_printed")
    if relation_set == "graph":
        if table.kind != "rho":
            raise NumericsError("graph relations need a rho table")
        return _graph_relations(table)
    if relation_set == "cp":
        if table.kind not in ("psi", "pi"):
            raise NumericsError("projective relations need a psi or pi table")
        return _cp_relations(table, full=True)
    raise NumericsError(f"unknown relation set {relation_set!r}; choose from {RELATION_SETS}")


def relation_residuals(table: RepresentationTable, relation_set: str, margin: int = 2) -> ResidualReport:
    """Maximum residual of each relation over interior basis vectors.

    Relation sets: ``"qps"`` (sphere relations, with ``z_i z_j* = q^{-1} z_j* z_i``),
    ``"qps_printed"`` (the same with ``z_i z_j* = q z_j* z_i``), ``"graph"``
    (Cuntz-Krieger relations of ``L_{2n+1}`` under ``rho``) and ``"cp"``
    (commutation relations of the ``p_ij = z_i* z_j``).
    """
    need = REQUIRED_MARGIN.get(relation_set)
    if need is None:
        raise NumericsError(f"unknown relation set {relation_set!r}; choose from {RELATION_SETS}")
    if margin < need:
        raise NumericsError(f"relation set {relation_set!r} needs margin >= {need}")
    cols = table.trunc.interior(margin)
    if len(cols) == 0:
        raise NumericsError("no interior basis vectors; enlarge the truncation")
    ops = relation_operators(table, relation_set)
    return ResidualReport({k: column_residual(op, cols) for k, op in ops.items()}, margin, relation_set)


# -- projections -----------------------------------------------------------------


def tail_gram(table: RepresentationTable, l: int) -> Operator:
    """``z_l z_l* + ... + z_n z_n*``."""
    n = table.trunc.n
    ops = [table[f"z{j}"] for j in range(l, n + 1)]
    return sum((z @ z.T for z in ops[1:]), ops[0] @ ops[0].T).tocsr()


def projection_limit(n: int, q: float, l: int, steps: int, table: RepresentationTable) -> Operator:
    """``q^{-2m} prod_{r=1}^m (q^2 A - q^{2(r+1)}) / (1 - q^{2r})`` at ``m = steps``, ``A`` the tail Gram sum from ``l``.

    Each factor is rewritten as ``(A - q^{2r}) / (1 - q^{2r})``, which is the
    same operator without the ``q^{-2m}`` blow-up.
    """
    _check_q(q)
    if not 1 <= l <= n:
        raise NumericsError("need 1 <= l <= n")
    if steps < 1:
        raise NumericsError("steps must be >= 1")
    if table.trunc.n != n:
        raise NumericsError("table dimension does not match n")
    A = tail_gram(table, l)
    eye = _eye(table.trunc)
    out = eye
    for r in range(1, steps + 1):
        qr = q ** (2 * r)
        out = (out @ ((A - qr * eye) / (1.0 - qr))).tocsr()
    return out


def projection_closed_form(n: int, l: int, trunc: Truncation) -> Operator:
    """Diagonal projection onto basis vectors with ``k_1 = ... = k_l = 0``."""
    if not 0 <= l <= n:
        raise NumericsError("need 0 <= l <= n")
    if trunc.n != n:
        raise NumericsError("truncation dimension does not match n")
    ks, _ = trunc.grid
    return diagonal(trunc, _leading_zeros(ks, l).astype(float))


def rho_vertex_sum(table: RepresentationTable, indices: Iterable[int]) -> Operator:
    """``rho(P_{w_i} + ...)``, with ``P_{w_i}`` represented as ``rho(P_{v_i})``."""
    eye = _eye(table.trunc)
    return sum((table[vertex_name(i)] for i in indices), sp.csr_matrix(eye.shape)).tocsr()


def check_rel_proj(n: int, q: float, trunc: Truncation, rho: RepresentationTable | None = None) -> ResidualReport:
    """Compare the closed-form ``pi(P_l)`` with the ``rho`` vertex sums on the full box.

    For ``k = 0..n-1`` and ``l = n-k-1`` both ``rho(P_{w_{n-k}} + ... + P_{w_{n+1}})``
    and ``1 - rho(P_{w_1} + ... + P_{w_l})`` are compared; ``l = n`` is
    compared with ``rho(P_{w_{n+1}})``.  All operators are 0/1 diagonals, so the
    residuals are exact.
    """
    _check_q(q)
    table = rho if rho is not None else rep_rho(n, trunc)
    everything = np.arange(trunc.dim)
    eye = _eye(trunc)
    res: dict[str, float] = {}
    for k in range(n):
        l = n - k - 1
        closed = projection_closed_form(n, l, trunc)
        upper = rho_vertex_sum(table, range(n - k, n + 2))
        lower = eye - rho_vertex_sum(table, range(1, l + 1))
        res[f"k={k}: pi(P_{l}) - rho(P_w{n - k}..P_w{n + 1})"] = column_residual(closed - upper, everything)
        res[f"k={k}: pi(P_{l}) - (1 - rho(P_w1..P_w{l}))"] = column_residual(closed - lower, everything)
    closed = projection_closed_form(n, n, trunc)
    res[f"pi(P_{n}) - rho(P_w{n + 1})"] = column_residual(closed - rho_vertex_sum(table, [n + 1]), everything)
    return ResidualReport(res, 0, "rel_proj")


def cp_generator_check(
    n: int, q: float, trunc: Truncation, full: bool = False, margin: int = 2
) -> ResidualReport:
    """Projection identities of ``p_ij = psi(z_i)* psi(z_j)``; ``full`` adds the commutation relations."""
    table = rep_psi(n, q, trunc)
    cols = table.trunc.interior(margin)
    ops = _cp_relations(table, full)
    return ResidualReport({k: column_residual(op, cols) for k, op in ops.items()}, margin, "cp")


@dataclass
class ConvergenceRow:
    l: int
    steps: int
    max_error: float


def projection_convergence(n: int, q: float, trunc: Truncation, table: RepresentationTable | None = None) -> list[ConvergenceRow]:
    """Error ``|projection_limit - projection_closed_form|`` at ``steps = l * N`` for each ``l``."""
    table = table if table is not None else rep_pi(n, q, trunc)
    rows = []
    for l in range(1, n + 1):
        steps = l * trunc.N
        diff = projection_limit(n, q, l, steps, table) - projection_closed_form(n, l, table.trunc)
        err = float(abs(diff).max()) if diff.nnz else 0.0
        rows.append(ConvergenceRow(l, steps, err))
    return rows
