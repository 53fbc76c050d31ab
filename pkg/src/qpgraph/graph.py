"""Directed multigraphs with finite or infinite edge multiplicities.

Parallel edges between two vertices are stored as a single edge class with a
multiplicity.  The multiplicity is a positive ``int`` or :data:`INFINITE`
(``math.inf``), so ordinary addition merges classes and ``inf`` absorbs.
Individual edges are addressed by ``(source, target, label)`` with the label a
nonnegative integer below the multiplicity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

INFINITE = math.inf


class GraphError(ValueError):
    """Raised for malformed graph input."""


@dataclass(frozen=True)
class EdgeClass:
    source: str
    target: str
    multiplicity: int | float

    @property
    def key(self) -> tuple[str, str]:
        return (self.source, self.target)

    @property
    def is_infinite(self) -> bool:
        return self.multiplicity == INFINITE


@dataclass(frozen=True)
class Graph:
    """An immutable directed multigraph.

    ``vertices`` fixes the basis order used by every matrix built from the
    graph.  ``edges`` holds one :class:`EdgeClass` per ``(source, target)``
    pair, sorted by the vertex order.
    """

    vertices: tuple[str, ...]
    edges: tuple[EdgeClass, ...]
    _index: Mapping[str, int] = field(init=False, repr=False, compare=False)
    _classes: Mapping[tuple[str, str], EdgeClass] = field(
        init=False, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        object.__setattr__(self, "_index", {v: i for i, v in enumerate(self.vertices)})
        object.__setattr__(self, "_classes", {e.key: e for e in self.edges})

    def __contains__(self, vertex: object) -> bool:
        return vertex in self._index

    def index(self, vertex: str) -> int:
        try:
            return self._index[vertex]
        except KeyError:
            raise GraphError(f"unknown vertex {vertex!r}") from None

    def edge_class(self, source: str, target: str) -> EdgeClass | None:
        return self._classes.get((source, target))

    def multiplicity(self, source: str, target: str) -> int | float:
        ec = self._classes.get((source, target))
        return 0 if ec is None else ec.multiplicity

    def out_edges(self, vertex: str) -> list[EdgeClass]:
        return [e for e in self.edges if e.source == vertex]

    def in_edges(self, vertex: str) -> list[EdgeClass]:
        return [e for e in self.edges if e.target == vertex]

    def emission(self, vertex: str) -> int | float:
        """Total number of edges leaving ``vertex``."""
        return sum((e.multiplicity for e in self.out_edges(vertex)), 0)

    def successors(self, vertex: str) -> list[str]:
        return [e.target for e in self.out_edges(vertex)]

    def __repr__(self) -> str:
        return f"Graph(vertices={list(self.vertices)}, edges={len(self.edges)})"


def _check_name(name: str) -> None:
    if not isinstance(name, str) or not name or "#" in name or any(c.isspace() for c in name):
        raise GraphError(f"invalid vertex name {name!r}")


def build_graph(
    vertices: Sequence[str],
    edges: Iterable[tuple[str, str, int | float]] = (),
) -> Graph:
    """Build a graph, merging repeated ``(src, dst)`` entries by adding multiplicities.

    >>> g = build_graph(["a"], [("a", "a", 1), ("a", "a", 1)])
    >>> g.multiplicity("a", "a")
    2
    """
    names = list(vertices)
    for v in names:
        _check_name(v)
    if len(set(names)) != len(names):
        raise GraphError("duplicate vertex names")
    known = set(names)
    merged: dict[tuple[str, str], int | float] = {}
    for src, dst, mult in edges:
        for v in (src, dst):
            if v not in known:
                raise GraphError(f"edge uses unknown vertex {v!r}")
        if mult != INFINITE:
            if isinstance(mult, bool) or not isinstance(mult, int):
                raise GraphError(f"multiplicity must be a positive integer or INFINITE, got {mult!r}")
            if mult < 1:
                raise GraphError(f"multiplicity must be >= 1, got {mult}")
        merged[(src, dst)] = merged.get((src, dst), 0) + mult
    order = {v: i for i, v in enumerate(names)}
    classes = sorted(
        (EdgeClass(s, t, m) for (s, t), m in merged.items()),
        key=lambda e: (order[e.source], order[e.target]),
    )
    return Graph(tuple(names), tuple(classes))


def regular_vertices(graph: Graph) -> list[str]:
    """Vertices emitting finitely many and at least one edge, in vertex order."""
    return [v for v in graph.vertices if 0 < graph.emission(v) < INFINITE]


def sinks(graph: Graph) -> list[str]:
    return [v for v in graph.vertices if graph.emission(v) == 0]


def infinite_emitters(graph: Graph) -> list[str]:
    return [v for v in graph.vertices if graph.emission(v) == INFINITE]


def is_row_finite(graph: Graph) -> bool:
    return not infinite_emitters(graph)


def reachable(graph: Graph, start: Iterable[str]) -> set[str]:
    """All vertices reachable from ``start`` by directed paths (including ``start``)."""
    seen = set(start)
    stack = list(seen)
    while stack:
        v = stack.pop()
        for w in graph.successors(v):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


MAX_ISOMORPHISM_VERTICES = 12


def graph_isomorphic(g1: Graph, g2: Graph) -> dict[str, str] | None:
    """Return a vertex bijection ``g1 -> g2`` preserving multiplicities, or ``None``.

    Backtracking search with degree-profile pruning; limited to
    :data:`MAX_ISOMORPHISM_VERTICES` vertices.
    """
    for g in (g1, g2):
        if len(g.vertices) > MAX_ISOMORPHISM_VERTICES:
            raise GraphError(
                f"isomorphism test limited to {MAX_ISOMORPHISM_VERTICES} vertices"
            )
    if len(g1.vertices) != len(g2.vertices) or len(g1.edges) != len(g2.edges):
        return None

    def profile(g: Graph, v: str) -> tuple:
        out = sorted(e.multiplicity for e in g.out_edges(v) if e.target != v)
        inc = sorted(e.multiplicity for e in g.in_edges(v) if e.source != v)
        return (g.multiplicity(v, v), tuple(out), tuple(inc))

    prof1 = {v: profile(g1, v) for v in g1.vertices}
    prof2 = {v: profile(g2, v) for v in g2.vertices}
    if sorted(prof1.values(), key=repr) != sorted(prof2.values(), key=repr):
        return None

    order = list(g1.vertices)
    mapping: dict[str, str] = {}
    used: set[str] = set()

    def consistent(v: str, w: str) -> bool:
        for u, x in mapping.items():
            if g1.multiplicity(v, u) != g2.multiplicity(w, x):
                return False
            if g1.multiplicity(u, v) != g2.multiplicity(x, w):
                return False
        return True

    def search(i: int) -> bool:
        if i == len(order):
            return True
        v = order[i]
        for w in g2.vertices:
            if w in used or prof1[v] != prof2[w] or not consistent(v, w):
                continue
            mapping[v] = w
            used.add(w)
            if search(i + 1):
                return True
            del mapping[v]
            used.discard(w)
        return False

    return dict(mapping) if search(0) else None


# -- text format -------------------------------------------------------------


def _format_mult(m: int | float) -> str:
    return "inf" if m == INFINITE else str(m)


def format_graph(graph: Graph) -> str:
    """Serialize to the line-oriented graph file format."""
    lines = [f"vertex {v}" for v in graph.vertices]
    lines += [f"edge {e.source} {e.target} {_format_mult(e.multiplicity)}" for e in graph.edges]
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> Graph:
    """Parse ``vertex <name>`` / ``edge <src> <dst> <mult>`` declarations.

    ``#`` starts a comment.  Vertices must be declared before use and the
    declaration order becomes the vertex order.
    """
    vertices: list[str] = []
    edges: list[tuple[str, str, int | float]] = []
    declared: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "vertex" and len(parts) == 2:
            vertices.append(parts[1])
            declared.add(parts[1])
        elif parts[0] == "edge" and len(parts) == 4:
            _, src, dst, mult = parts
            for v in (src, dst):
                if v not in declared:
                    raise GraphError(f"line {lineno}: vertex {v!r} used before declaration")
            if mult == "inf":
                m: int | float = INFINITE
            else:
                try:
                    m = int(mult)
                except ValueError:
                    raise GraphError(f"line {lineno}: bad multiplicity {mult!r}") from None
                if m < 1:
                    raise GraphError(f"line {lineno}: multiplicity must be >= 1")
            edges.append((src, dst, m))
        else:
            raise GraphError(f"line {lineno}: cannot parse {raw!r}")
    if not vertices:
        raise GraphError("graph has no vertices")
    return build_graph(vertices, edges)

