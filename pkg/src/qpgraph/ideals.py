"""Hereditary and saturated vertex sets, and quotient graphs.

Each hereditary saturated set ``H`` gives a gauge-invariant ideal ``I_H`` and a
quotient graph ``E/H`` with ``C*(E)/I_H = C*(E/H)``.  For graphs with infinite
emitters the quotient gains a sink ``beta:<v>`` for every ``v`` in
``H_inf_fin``, and every edge into such a ``v`` gets a copy ending at the new
sink.

Only the ``I_H`` family is enumerated.  With infinite emitters there can be
further gauge-invariant ideals (attached to breaking vertices); they are not
produced here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Collection, Iterable

from .graph import INFINITE, Graph, GraphError, build_graph, reachable

BETA_PREFIX = "beta:"
MAX_ENUMERATION_VERTICES = 20


def _as_set(graph: Graph, subset: Iterable[str]) -> frozenset[str]:
    h = frozenset(subset)
    for v in h:
        if v not in graph:
            raise GraphError(f"unknown vertex {v!r}")
    return h


def is_hereditary(graph: Graph, subset: Iterable[str]) -> bool:
    h = _as_set(graph, subset)
    return all(w in h for v in h for w in graph.successors(v))


def is_saturated(graph: Graph, subset: Iterable[str]) -> bool:
    """Every regular vertex whose edges all land in the set is in the set."""
    h = _as_set(graph, subset)
    for v in graph.vertices:
        if v in h:
            continue
        if 0 < graph.emission(v) < INFINITE and all(w in h for w in graph.successors(v)):
            return False
    return True


def is_hereditary_saturated(graph: Graph, subset: Iterable[str]) -> bool:
    h = _as_set(graph, subset)
    return is_hereditary(graph, h) and is_saturated(graph, h)


def saturate(graph: Graph, subset: Iterable[str]) -> frozenset[str]:
    """Smallest hereditary saturated set containing ``subset``."""
    h = set(_as_set(graph, subset))
    regular = [v for v in graph.vertices if 0 < graph.emission(v) < INFINITE]
    while True:
        h = reachable(graph, h)
        forced = [
            v for v in regular if v not in h and all(w in h for w in graph.successors(v))
        ]
        if not forced:
            return frozenset(h)
        h.update(forced)


def _ordered(graph: Graph, subset: Collection[str]) -> tuple[str, ...]:
    return tuple(v for v in graph.vertices if v in subset)


@dataclass(frozen=True)
class IdealLattice:
    """Hereditary saturated sets listed in a linear extension of inclusion."""

    graph: Graph
    members: tuple[frozenset[str], ...]

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, subset: object) -> bool:
        return frozenset(subset) in self.members  # type: ignore[arg-type]

    def covers(self) -> list[tuple[frozenset[str], frozenset[str]]]:
        """Pairs ``(A, B)`` with ``A < B`` and nothing strictly between."""
        out = []
        for a in self.members:
            for b in self.members:
                if a < b and not any(a < c < b for c in self.members):
                    out.append((a, b))
        return out

    def is_chain(self) -> bool:
        return all(a <= b or b <= a for a in self.members for b in self.members)

    def describe(self) -> list[str]:
        return ["{" + ", ".join(_ordered(self.graph, m)) + "}" for m in self.members]


def enumerate_hereditary_saturated(graph: Graph) -> IdealLattice:
    """All hereditary saturated subsets, smallest first."""
    n = len(graph.vertices)
    if n > MAX_ENUMERATION_VERTICES:
        raise GraphError(f"enumeration limited to {MAX_ENUMERATION_VERTICES} vertices")
    verts = graph.vertices
    down = {v: reachable(graph, [v]) for v in verts}
    up = {v: {u for u in verts if v in down[u]} for v in verts}

    found: list[frozenset[str]] = []

    # Hereditary sets are exactly the sets closed under ``down``; branch on
    # each undecided vertex and propagate.
    def branch(i: int, inside: frozenset[str], outside: frozenset[str]) -> None:
        while i < n and (verts[i] in inside or verts[i] in outside):
            i += 1
        if i == n:
            if is_saturated(graph, inside):
                found.append(inside)
            return
        v = verts[i]
        if not (down[v] & outside):
            branch(i + 1, inside | down[v], outside)
        if not (up[v] & inside):
            branch(i + 1, inside, outside | up[v])

    branch(0, frozenset(), frozenset())
    index = {v: i for i, v in enumerate(verts)}
    found.sort(key=lambda s: (len(s), sorted(index[v] for v in s)))
    return IdealLattice(graph, tuple(found))


def _require_closed(graph: Graph, h: frozenset[str]) -> None:
    if not (is_hereditary(graph, h) and is_saturated(graph, h)):
        raise GraphError("vertex set is not hereditary and saturated")


def h_inf_fin(graph: Graph, subset: Iterable[str]) -> frozenset[str]:
    """Infinite emitters outside ``H`` with finitely many, but some, edges leaving ``H``'s complement."""
    h = _as_set(graph, subset)
    _require_closed(graph, h)
    out = set()
    for v in graph.vertices:
        if v in h or graph.emission(v) != INFINITE:
            continue
        into_rest = sum((e.multiplicity for e in graph.out_edges(v) if e.target not in h), 0)
        if 0 < into_rest < INFINITE:
            out.add(v)
    return frozenset(out)


def beta(vertex: str) -> str:
    return BETA_PREFIX + vertex


def quotient_graph(graph: Graph, subset: Iterable[str]) -> Graph:
    """The graph ``E/H`` presenting ``C*(E)/I_H``."""
    h = _as_set(graph, subset)
    extra = h_inf_fin(graph, h)
    kept = [v for v in graph.vertices if v not in h]
    new_sinks = [beta(v) for v in kept if v in extra]
    clash = set(new_sinks) & set(graph.vertices)
    if clash:
        raise GraphError(f"vertex names collide with new sinks: {sorted(clash)}")
    edges = [(e.source, e.target, e.multiplicity) for e in graph.edges if e.target not in h]
    edges += [
        (e.source, beta(e.target), e.multiplicity) for e in graph.edges if e.target in extra
    ]
    return build_graph(kept + new_sinks, edges)
