"""K-theory of graph C*-algebras from the integer map ``K_E``.

``K_E : Z V_E -> Z E^0`` sends a regular vertex ``v`` to the sum of the ranges
of its outgoing edges minus ``v``.  ``K_0`` is its cokernel and ``K_1`` its
kernel; both are read off a Smith normal form computed with exact Python
integers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .graph import Graph, GraphError, regular_vertices

IntMatrix = list[list[int]]


def _zeros(rows: int, cols: int) -> IntMatrix:
    return [[0] * cols for _ in range(rows)]


def identity(n: int) -> IntMatrix:
    m = _zeros(n, n)
    for i in range(n):
        m[i][i] = 1
    return m


def matmul(a: IntMatrix, b: IntMatrix, inner: int | None = None) -> IntMatrix:
    """Integer matrix product; ``inner`` gives the shared dimension when it is zero."""
    rows = len(a)
    k = inner if inner is not None else (len(b) if b else 0)
    cols = len(b[0]) if b else 0
    return [[sum(a[i][t] * b[t][j] for t in range(k)) for j in range(cols)] for i in range(rows)]


def determinant(m: IntMatrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(m)
    if any(len(row) != n for row in m):
        raise ValueError("determinant needs a square matrix")
    if n == 0:
        return 1
    a = [row[:] for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def k_map(graph: Graph) -> IntMatrix:
    """Matrix of ``K_E``: rows follow the vertex order, columns the regular vertices.

    A graph without regular vertices gives ``|E^0|`` empty rows.
    """
    regular = regular_vertices(graph)
    m = _zeros(len(graph.vertices), len(regular))
    for j, v in enumerate(regular):
        for e in graph.out_edges(v):
            m[graph.index(e.target)][j] += int(e.multiplicity)
        m[graph.index(v)][j] -= 1
    return m


@dataclass(frozen=True)
class SmithDecomposition:
    """``U @ M @ V == D`` with ``U``, ``V`` unimodular and ``D`` diagonal."""

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix

    @property
    def diagonal(self) -> list[int]:
        return [self.D[i][i] for i in range(min(len(self.D), len(self.V)))]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)


def smith_normal_form(matrix: Sequence[Sequence[int]], cols: int | None = None) -> SmithDecomposition:
    """Smith normal form by elementary row and column operations.

    The pivot at each stage is the entry of least absolute value in the
    remaining block.  ``cols`` is only needed for matrices with no rows.

    >>> smith_normal_form([[2, 1], [0, 2]]).diagonal
    [1, 4]
    """
    a = [list(map(int, row)) for row in matrix]
    m = len(a)
    n = len(a[0]) if m else (cols or 0)
    if any(len(row) != n for row in a):
        raise ValueError("ragged matrix")
    U = identity(m)
    V = identity(n)

    def swap_rows(i: int, j: int) -> None:
        a[i], a[j] = a[j], a[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i: int, j: int) -> None:
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(src: int, dst: int, c: int) -> None:
        # row[dst] += c * row[src]
        a[dst] = [x + c * y for x, y in zip(a[dst], a[src])]
        U[dst] = [x + c * y for x, y in zip(U[dst], U[src])]

    def add_col(src: int, dst: int, c: int) -> None:
        for row in a:
            row[dst] += c * row[src]
        for row in V:
            row[dst] += c * row[src]

    for t in range(min(m, n)):
        while True:
            candidates = [
                (abs(a[i][j]), i, j)
                for i in range(t, m)
                for j in range(t, n)
                if a[i][j] != 0
            ]
            if not candidates:
                break
            _, pi, pj = min(candidates)
            swap_rows(t, pi)
            swap_cols(t, pj)
            p = a[t][t]
            dirty = False
            for i in range(t + 1, m):
                if a[i][t]:
                    add_row(t, i, -(a[i][t] // p))
                    dirty |= a[i][t] != 0
            for j in range(t + 1, n):
                if a[t][j]:
                    add_col(t, j, -(a[t][j] // p))
                    dirty |= a[t][j] != 0
            if dirty:
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if a[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(bad, t, 1)
        if t < m and t < n and a[t][t] < 0:
            U[t] = [-x for x in U[t]]
            a[t] = [-x for x in a[t]]
    return SmithDecomposition(U, a, V)


@dataclass(frozen=True)
class AbelianGroup:
    """``Z^free_rank`` plus cyclic factors ``Z/d`` with ``1 < d_1 | d_2 | ...``."""

    free_rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.free_rank < 0:
            raise ValueError("negative rank")
        for d in self.torsion:
            if d <= 1:
                raise ValueError("torsion factors must exceed 1")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError("torsion factors must form a divisibility chain")

    @classmethod
    def from_invariants(cls, free_rank: int, factors: Iterable[int]) -> "AbelianGroup":
        return cls(free_rank, tuple(d for d in factors if d > 1))

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def __str__(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts += [f"Z/{d}" for d in self.torsion]
        return " (+) ".join(parts) if parts else "0"


def _groups_from_matrix(matrix: IntMatrix, rows: int, cols: int) -> tuple[AbelianGroup, AbelianGroup, SmithDecomposition]:
    snf = smith_normal_form(matrix, cols=cols)
    rank = snf.rank
    coker = AbelianGroup.from_invariants(rows - rank, snf.diagonal[:rank])
    ker = AbelianGroup(cols - rank)
    return coker, ker, snf


def cokernel_kernel(matrix: IntMatrix, cols: int | None = None) -> tuple[AbelianGroup, AbelianGroup]:
    rows = len(matrix)
    n = len(matrix[0]) if rows else (cols or 0)
    coker, ker, _ = _groups_from_matrix(matrix, rows, n)
    return coker, ker


def k_groups(graph: Graph) -> tuple[AbelianGroup, AbelianGroup]:
    """``(K_0, K_1)`` of ``C*(graph)``."""
    return cokernel_kernel(k_map(graph), cols=len(regular_vertices(graph)))


@dataclass(frozen=True)
class K0Class:
    """Coordinates of a ``K_0`` element.

    ``free`` are integer coordinates on the free summands, ``torsion`` are
    residues modulo ``moduli`` in ``range(d)``.
    """

    free: tuple[int, ...]
    torsion: tuple[int, ...] = ()
    moduli: tuple[int, ...] = ()

    def __add__(self, other: "K0Class") -> "K0Class":
        if self.moduli != other.moduli or len(self.free) != len(other.free):
            raise ValueError("classes live in different groups")
        return K0Class(
            tuple(x + y for x, y in zip(self.free, other.free)),
            tuple((x + y) % d for x, y, d in zip(self.torsion, other.torsion, self.moduli)),
            self.moduli,
        )

    @property
    def is_zero(self) -> bool:
        return not any(self.free) and not any(self.torsion)


class K0Basis:
    """Cokernel coordinates of ``K_E`` fixed by one Smith decomposition.

    The vector ``x`` in ``Z E^0`` maps to ``U x``; entries at unit invariant
    factors are dropped, torsion entries are reduced, the rest are free.
    """

    def __init__(self, graph: Graph):
        self.graph = graph
        matrix = k_map(graph)
        self.snf = smith_normal_form(matrix, cols=len(regular_vertices(graph)))
        diag = self.snf.diagonal
        rows = len(graph.vertices)
        self._torsion = [(i, d) for i, d in enumerate(diag) if d > 1]
        self._free = [i for i in range(rows) if i >= len(diag) or diag[i] == 0]

    def coordinates(self, vector: Sequence[int]) -> K0Class:
        u = self.snf.U
        y = [sum(u[i][j] * vector[j] for j in range(len(vector))) for i in range(len(u))]
        return K0Class(
            tuple(y[i] for i in self._free),
            tuple(y[i] % d for i, d in self._torsion),
            tuple(d for _, d in self._torsion),
        )

    def class_of(self, vertices: Iterable[str]) -> K0Class:
        x = [0] * len(self.graph.vertices)
        for v in vertices:
            if v not in self.graph:
                raise GraphError(f"unknown vertex {v!r}")
            x[self.graph.index(v)] += 1
        return self.coordinates(x)


def class_in_k0(graph: Graph, vertex_sum: Iterable[str]) -> K0Class:
    """Class of ``sum_v P_v`` (a multiset of vertices) in ``K_0(C*(graph))``."""
    return K0Basis(graph).class_of(vertex_sum)
