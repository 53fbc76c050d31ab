"""Graphs and maps for odd quantum spheres and quantum projective spaces.

``sphere_graph(n)`` is ``L_{2n+1}`` (vertices ``v1..v{n+1}``, one edge
``v_i -> v_j`` for each ``i <= j``) and ``projective_graph(n)`` is ``F_n``
(vertices ``w1..w{n+1}``, infinitely many edges ``w_i -> w_j`` for ``i < j``).
All projective graphs use the ``w`` names whatever ``n`` is, so the maps
between consecutive dimensions compose directly: ``F_{n-1}`` is literally the
full subgraph of ``F_n`` on ``w1..wn``.

The extension ``0 -> K -> C*(F_n) -> C*(F_{n-1}) -> 0`` comes with the
quotient map ``q_n``, its splitting ``s_n`` and the inclusion ``j_n`` of the
ideal generated by ``P_{w_{n+1}}``, exposed on matrix units ``S_a S_b*``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .calculus import (
    Element,
    GeneratorMap,
    Path,
    apply_map,
    compose_maps,
    make_path,
    projection,
    uniform_map,
    vertex_sum,
)
from .graph import INFINITE, Graph, build_graph
from .ktheory import IntMatrix, K0Basis, K0Class, determinant


def sphere_vertex(i: int) -> str:
    return f"v{i}"


def projective_vertex(i: int) -> str:
    return f"w{i}"


@lru_cache(maxsize=None)
def sphere_graph(n: int) -> Graph:
    if n < 0:
        raise ValueError("n must be >= 0")
    vs = [sphere_vertex(i) for i in range(1, n + 2)]
    edges = [
        (sphere_vertex(i), sphere_vertex(j), 1)
        for i in range(1, n + 2)
        for j in range(i, n + 2)
    ]
    return build_graph(vs, edges)


@lru_cache(maxsize=None)
def projective_graph(n: int) -> Graph:
    if n < 0:
        raise ValueError("n must be >= 0")
    ws = [projective_vertex(i) for i in range(1, n + 2)]
    edges = [
        (projective_vertex(i), projective_vertex(j), INFINITE)
        for i in range(1, n + 2)
        for j in range(i + 1, n + 2)
    ]
    return build_graph(ws, edges)


def _w(i: int) -> str:
    return projective_vertex(i)


@lru_cache(maxsize=None)
def quotient_map(n: int) -> GeneratorMap:
    """``q_n : C*(F_n) -> C*(F_{n-1})``, killing ``w_{n+1}`` and the edges into it."""
    if n < 1:
        raise ValueError("n must be >= 1")
    src, dst = projective_graph(n), projective_graph(n - 1)
    vertex_images = {_w(i): projection(dst, _w(i)) for i in range(1, n + 1)}
    vertex_images[_w(n + 1)] = Element.zero(dst)
    rules = {}
    for i in range(1, n + 1):
        for j in range(i + 1, n + 2):
            rules[(_w(i), _w(j))] = [] if j == n + 1 else [(1, (_w(i), _w(j)))]
    return uniform_map(src, dst, vertex_images, rules, name=f"q{n}")


@lru_cache(maxsize=None)
def splitting_map(n: int) -> GeneratorMap:
    """``s_n : C*(F_{n-1}) -> C*(F_n)``.

    ``P_{w_n}`` goes to ``P_{w_n} + P_{w_{n+1}}`` and each edge into ``w_n``
    goes to the sum of the same-label edges into ``w_n`` and ``w_{n+1}``;
    every other generator keeps its name.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    src, dst = projective_graph(n - 1), projective_graph(n)
    vertex_images = {_w(i): projection(dst, _w(i)) for i in range(1, n)}
    vertex_images[_w(n)] = vertex_sum(dst, [_w(n), _w(n + 1)])
    rules = {}
    for i in range(1, n):
        for j in range(i + 1, n + 1):
            if j == n:
                rules[(_w(i), _w(j))] = [(1, (_w(i), _w(n))), (1, (_w(i), _w(n + 1)))]
            else:
                rules[(_w(i), _w(j))] = [(1, (_w(i), _w(j)))]
    return uniform_map(src, dst, vertex_images, rules, name=f"s{n}")


@dataclass(frozen=True)
class ExtensionData:
    n: int
    ideal_generator: str
    quotient: GeneratorMap
    splitting: GeneratorMap


def extension(n: int) -> ExtensionData:
    return ExtensionData(n, _w(n + 1), quotient_map(n), splitting_map(n))


def matrix_unit_image(n: int, alpha: Path, beta: Path) -> Element:
    """``j_n`` on the matrix unit ``f_{alpha,beta} = S_alpha S_beta*`` of the ideal at ``w_{n+1}``."""
    g = projective_graph(n)
    sink = _w(n + 1)
    if alpha.range != sink or beta.range != sink:
        raise ValueError(f"matrix units need paths ending at {sink}")
    a = make_path(g, alpha.anchor, alpha.steps)
    b = make_path(g, beta.anchor, beta.steps)
    return Element.monomial(g, a, b)


def splitting_chain_image(n: int, k: int) -> Element:
    """``s_n o ... o s_{n-k} o j_{n-k-1}`` applied to the minimal projection ``P_{w_{n-k}}``."""
    if not 0 <= k <= n - 1:
        raise ValueError("need 0 <= k <= n-1")
    start = n - k - 1
    x = matrix_unit_image(start, Path(_w(start + 1)), Path(_w(start + 1)))
    for d in range(start + 1, n + 1):
        x = apply_map(splitting_map(d), x)
    return x


def splitting_chain_map(n: int, k: int) -> GeneratorMap:
    """``s_n o s_{n-1} o ... o s_{n-k}`` as one generator map ``C*(F_{n-k-1}) -> C*(F_n)``."""
    m = splitting_map(n - k)
    for d in range(n - k + 1, n + 1):
        m = compose_maps(splitting_map(d), m)
    return m


def projection_vertices(n: int, l: int) -> list[str]:
    """Vertices whose projections sum to ``P_l`` in ``C*(F_n)``: ``w_{l+1} .. w_{n+1}``."""
    if not 0 <= l <= n:
        raise ValueError("need 0 <= l <= n")
    return [_w(i) for i in range(l + 1, n + 2)]


def projection_element(n: int, l: int) -> Element:
    return vertex_sum(projective_graph(n), projection_vertices(n, l))


def projection_class(n: int, l: int) -> K0Class:
    """``[P_l]`` in ``K_0(C*(F_n))``; ``P_0`` is the unit."""
    return K0Basis(projective_graph(n)).class_of(projection_vertices(n, l))


def basis_change_matrix(n: int) -> IntMatrix:
    """Column ``l`` holds the coordinates of ``[P_l]``; lower triangular with unit diagonal."""
    cols = [projection_class(n, l).free for l in range(n + 1)]
    return [[cols[l][i] for l in range(n + 1)] for i in range(n + 1)]


def basis_change_determinant(n: int) -> int:
    return determinant(basis_change_matrix(n))
