"""Exact arithmetic in graph C*-algebras on the ``S_a S_b*`` normal form.

An :class:`Element` is a finite rational combination of monomials
``S_alpha S_beta*`` with ``r(alpha) == r(beta)``; the monomial with both paths
empty at ``v`` is ``P_v``.  Products use the path-prefix rule

    (S_a S_b*)(S_m S_n*) = S_{a m'} S_n*   if m = b m'
                         = S_a S_{n b'}*   if b = m b'
                         = 0               otherwise

and never expand ``P_v`` as a sum over its edges, so ``==`` is equality of
normal forms.  :func:`equivalent` also accounts for ``P_v = sum_e S_e S_e*``
at regular vertices by expanding both sides to a common depth; the relation
checks use it.

A :class:`GeneratorMap` assigns images to vertex projections and edge
isometries.  Edge images may be given intensionally, uniformly in the edge
label, which is how the infinitely many parallel edges of the projective
graphs are handled.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .graph import INFINITE, Graph, GraphError, regular_vertices

EdgeInstance = tuple[str, str, int]


class UnmappedGeneratorError(LookupError):
    """A generator has no image under a :class:`GeneratorMap`."""


@dataclass(frozen=True, order=True)
class Path:
    """A path ``e_1 ... e_k``; ``anchor`` is its source vertex (the vertex itself when empty)."""

    anchor: str
    steps: tuple[EdgeInstance, ...] = ()

    @property
    def source(self) -> str:
        return self.anchor

    @property
    def range(self) -> str:
        return self.steps[-1][1] if self.steps else self.anchor

    def __len__(self) -> int:
        return len(self.steps)

    def is_prefix_of(self, other: "Path") -> bool:
        k = len(self.steps)
        return self.anchor == other.anchor and other.steps[:k] == self.steps

    def remainder(self, prefix: "Path") -> "Path":
        """``other`` such that ``self == prefix + other``."""
        return Path(prefix.range, self.steps[len(prefix.steps):])

    def __add__(self, other: "Path") -> "Path":
        if self.range != other.anchor:
            raise GraphError("paths are not composable")
        return Path(self.anchor, self.steps + other.steps)

    def __str__(self) -> str:
        if not self.steps:
            return f"<{self.anchor}>"
        return ".".join(f"{s}>{t}#{m}" for s, t, m in self.steps)


def check_edge(graph: Graph, edge: EdgeInstance) -> None:
    src, dst, label = edge
    ec = graph.edge_class(src, dst)
    if ec is None:
        raise GraphError(f"no edge {src}->{dst}")
    if label < 0 or (ec.multiplicity != INFINITE and label >= ec.multiplicity):
        raise GraphError(f"label {label} out of range for edge {src}->{dst}")


def make_path(graph: Graph, start: str, edges: Sequence[EdgeInstance] = ()) -> Path:
    """Validated path starting at ``start``."""
    if start not in graph:
        raise GraphError(f"unknown vertex {start!r}")
    here = start
    for e in edges:
        check_edge(graph, e)
        if e[0] != here:
            raise GraphError(f"edge {e} does not start at {here}")
        here = e[1]
    return Path(start, tuple(edges))


@dataclass(frozen=True, order=True)
class Monomial:
    alpha: Path
    beta: Path

    def __post_init__(self) -> None:
        if self.alpha.range != self.beta.range:
            raise GraphError("monomial paths must end at the same vertex")

    @property
    def degree(self) -> int:
        """Gauge degree ``|alpha| - |beta|``."""
        return len(self.alpha) - len(self.beta)

    def adjoint(self) -> "Monomial":
        return Monomial(self.beta, self.alpha)

    def __str__(self) -> str:
        if not self.alpha.steps and not self.beta.steps:
            return f"P[{self.alpha.anchor}]"
        parts = []
        if self.alpha.steps:
            parts.append(f"S[{self.alpha}]")
        if self.beta.steps:
            parts.append(f"S[{self.beta}]*")
        return " ".join(parts)


def multiply_monomials(a: Monomial, b: Monomial) -> Monomial | None:
    if a.beta.is_prefix_of(b.alpha):
        return Monomial(a.alpha + b.alpha.remainder(a.beta), b.beta)
    if b.alpha.is_prefix_of(a.beta):
        return Monomial(a.alpha, b.beta + a.beta.remainder(b.alpha))
    return None


class Element:
    """Finite rational combination of monomials in ``C*(graph)``."""

    __slots__ = ("graph", "_terms")

    def __init__(self, graph: Graph, terms: Mapping[Monomial, Fraction] | None = None):
        self.graph = graph
        clean = {m: Fraction(c) for m, c in (terms or {}).items() if c != 0}
        self._terms = dict(sorted(clean.items()))

    # construction ---------------------------------------------------------

    @classmethod
    def zero(cls, graph: Graph) -> "Element":
        return cls(graph)

    @classmethod
    def monomial(cls, graph: Graph, alpha: Path, beta: Path, coefficient=1) -> "Element":
        return cls(graph, {Monomial(alpha, beta): Fraction(coefficient)})

    # inspection -----------------------------------------------------------

    @property
    def terms(self) -> dict[Monomial, Fraction]:
        return dict(self._terms)

    def __iter__(self) -> Iterator[tuple[Monomial, Fraction]]:
        return iter(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def degrees(self) -> set[int]:
        return {m.degree for m in self._terms}

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)) and other == 0:
            return self.is_zero()
        if not isinstance(other, Element):
            return NotImplemented
        return self.graph == other.graph and self._terms == other._terms

    def __hash__(self) -> int:
        return hash(tuple(self._terms.items()))

    def __repr__(self) -> str:
        if not self._terms:
            return "0"
        out = []
        for m, c in self._terms.items():
            coef = "" if c == 1 else "-" if c == -1 else f"{c}*"
            out.append(f"{coef}{m}")
        return " + ".join(out).replace("+ -", "- ")

    # algebra --------------------------------------------------------------

    def _check(self, other: "Element") -> None:
        if other.graph is not self.graph and other.graph != self.graph:
            raise GraphError("elements belong to different graph algebras")

    def __add__(self, other: "Element") -> "Element":
        self._check(other)
        terms = dict(self._terms)
        for m, c in other._terms.items():
            terms[m] = terms.get(m, 0) + c
        return Element(self.graph, terms)

    def __neg__(self) -> "Element":
        return Element(self.graph, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other: "Element") -> "Element":
        return self + (-other)

    def scale(self, c) -> "Element":
        return Element(self.graph, {m: c * v for m, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, Element):
            return multiply(self, other)
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(other))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(other))
        return NotImplemented

    def adjoint(self) -> "Element":
        # rational coefficients are their own conjugates
        return Element(self.graph, {m.adjoint(): c for m, c in self._terms.items()})

    @property
    def star(self) -> "Element":
        return self.adjoint()


def multiply(a: Element, b: Element) -> Element:
    a._check(b)
    terms: dict[Monomial, Fraction] = {}
    for ma, ca in a:
        for mb, cb in b:
            m = multiply_monomials(ma, mb)
            if m is not None:
                terms[m] = terms.get(m, 0) + ca * cb
    return Element(a.graph, terms)


def adjoint(a: Element) -> Element:
    return a.adjoint()


def expand(a: Element, depth: int) -> Element:
    """Apply ``P_v = sum_e S_e S_e*`` at regular ranges until every such term has ``|beta| >= depth``.

    Monomials ending at sinks or infinite emitters are left alone.
    """
    g = a.graph
    regular = set(regular_vertices(g))
    out: dict[Monomial, Fraction] = {}
    stack = list(a)
    while stack:
        mono, c = stack.pop()
        v = mono.alpha.range
        if v in regular and len(mono.beta) < depth:
            for ec in g.out_edges(v):
                for label in range(int(ec.multiplicity)):
                    step = Path(v, ((ec.source, ec.target, label),))
                    stack.append((Monomial(mono.alpha + step, mono.beta + step), c))
        else:
            out[mono] = out.get(mono, 0) + c
    return Element(g, out)


def equivalent(a: Element, b: Element) -> bool:
    """Equality in ``C*(E)``: compare after expanding both sides to a common depth.

    Plain ``==`` compares normal forms and does not see relation (v); this
    expands every term with a regular range to the largest ``|beta|`` present.
    """
    a._check(b)
    depth = max((len(m.beta) for m, _ in list(a) + list(b)), default=0)
    return expand(a, depth) == expand(b, depth)


def projection(graph: Graph, vertex: str) -> Element:
    """``P_v``."""
    p = make_path(graph, vertex)
    return Element.monomial(graph, p, p)


def isometry(graph: Graph, source: str, target: str, label: int = 0) -> Element:
    """``S_e`` for the edge ``source -> target`` with the given label."""
    e = (source, target, label)
    check_edge(graph, e)
    return Element.monomial(graph, Path(source, (e,)), Path(target))


def path_isometry(graph: Graph, path: Path) -> Element:
    """``S_alpha`` (``P_v`` for the empty path at ``v``)."""
    return Element.monomial(graph, path, Path(path.range))


def vertex_sum(graph: Graph, vertices: Iterable[str]) -> Element:
    total = Element.zero(graph)
    for v in vertices:
        total = total + projection(graph, v)
    return total


def unit(graph: Graph) -> Element:
    """``sum_v P_v``, the unit when the vertex set is finite."""
    return vertex_sum(graph, graph.vertices)


# -- maps -------------------------------------------------------------------


EdgeRule = Callable[[str, str, int], Element]


@dataclass(frozen=True)
class GeneratorMap:
    """Images of the generators of ``C*(source)`` in ``C*(target)``.

    ``edge_rule(src, dst, label)`` returns the image of ``S_e``; it raises
    :class:`UnmappedGeneratorError` for edges it does not cover.
    """

    source: Graph
    target: Graph
    vertex_images: Mapping[str, Element]
    edge_rule: EdgeRule = field(repr=False)
    name: str = ""

    def vertex_image(self, vertex: str) -> Element:
        try:
            return self.vertex_images[vertex]
        except KeyError:
            raise UnmappedGeneratorError(f"{self.name or 'map'}: no image for P[{vertex}]") from None

    def edge_image(self, source: str, target: str, label: int) -> Element:
        check_edge(self.source, (source, target, label))
        return self.edge_rule(source, target, label)

    def path_image(self, path: Path) -> Element:
        if not path.steps:
            return self.vertex_image(path.anchor)
        out = self.edge_image(*path.steps[0])
        for e in path.steps[1:]:
            out = out * self.edge_image(*e)
        return out

    def __call__(self, a: Element) -> Element:
        return apply_map(self, a)


def uniform_map(
    source: Graph,
    target: Graph,
    vertex_images: Mapping[str, Element],
    class_rules: Mapping[tuple[str, str], Sequence[tuple[int | Fraction, tuple[str, str]]]],
    name: str = "",
) -> GeneratorMap:
    """Map sending label ``m`` of each source class to ``sum c * S_(t, m)`` over its rule."""
    rules = {k: tuple(v) for k, v in class_rules.items()}

    def rule(src: str, dst: str, label: int) -> Element:
        try:
            terms = rules[(src, dst)]
        except KeyError:
            raise UnmappedGeneratorError(
                f"{name or 'map'}: no image for edges {src}->{dst}"
            ) from None
        out = Element.zero(target)
        for coef, (ts, tt) in terms:
            out = out + isometry(target, ts, tt, label).scale(Fraction(coef))
        return out

    return GeneratorMap(source, target, dict(vertex_images), rule, name)


def apply_map(m: GeneratorMap, a: Element) -> Element:
    """Extend ``m`` multiplicatively and linearly: ``S_a S_b* -> m(S_a) m(S_b)*``."""
    if a.graph != m.source:
        raise GraphError("element is not in the source algebra of the map")
    out = Element.zero(m.target)
    for mono, c in a:
        img = m.path_image(mono.alpha) * m.path_image(mono.beta).adjoint()
        out = out + img.scale(c)
    return out


def compose_maps(f: GeneratorMap, g: GeneratorMap) -> GeneratorMap:
    """``f o g`` (apply ``g`` first)."""
    if g.target != f.source:
        raise GraphError("maps are not composable")
    vertex_images = {v: apply_map(f, img) for v, img in g.vertex_images.items()}

    def rule(src: str, dst: str, label: int) -> Element:
        return apply_map(f, g.edge_rule(src, dst, label))

    name = f"{f.name}o{g.name}" if f.name and g.name else ""
    return GeneratorMap(g.source, f.target, vertex_images, rule, name)


def identity_map(graph: Graph) -> GeneratorMap:
    return GeneratorMap(
        graph,
        graph,
        {v: projection(graph, v) for v in graph.vertices},
        lambda s, t, m: isometry(graph, s, t, m),
        "id",
    )


def edge_instances(graph: Graph, label_budget: int) -> list[EdgeInstance]:
    """Edges with labels below ``label_budget`` (and below the multiplicity)."""
    out = []
    for e in graph.edges:
        top = label_budget if e.multiplicity == INFINITE else min(label_budget, int(e.multiplicity))
        out.extend((e.source, e.target, m) for m in range(top))
    return out


def is_identity(m: GeneratorMap, graph: Graph, label_budget: int = 2) -> bool:
    if m.source != graph or m.target != graph:
        return False
    for v in graph.vertices:
        if not equivalent(m.vertex_image(v), projection(graph, v)):
            return False
    return all(equivalent(m.edge_image(*e), isometry(graph, *e)) for e in edge_instances(graph, label_budget))


@dataclass
class StarHomReport:
    passed: bool
    checks: int
    relation: str | None = None
    detail: str | None = None

    def __str__(self) -> str:
        if self.passed:
            return f"verified ({self.checks} relation instances)"
        return f"failed at relation {self.relation}: {self.detail}"


def verify_star_hom(src: Graph, dst: Graph, m: GeneratorMap, label_budget: int = 2) -> StarHomReport:
    """Check that the images of the generators satisfy the graph relations.

    Edge relations only ever involve two edges at once, so any violation by a
    label-uniform map already shows up with labels ``0`` and ``1``.
    Relation (v) is checked at regular vertices of ``src`` with all of their
    (finitely many) edges.
    """
    if label_budget < 2:
        raise ValueError("label_budget must be at least 2")
    if m.source != src or m.target != dst:
        raise GraphError("map does not go between the given graphs")
    P = {v: m.vertex_image(v) for v in src.vertices}
    edges = edge_instances(src, label_budget)
    S = {e: m.edge_image(*e) for e in edges}
    zero = Element.zero(dst)
    checks = 0

    def relations():
        for v, p in P.items():
            yield "projection", f"P[{v}]", p.adjoint(), p
            yield "projection", f"P[{v}]", p * p, p
        for v in src.vertices:
            for w in src.vertices:
                if v != w:
                    yield "(i)", f"P[{v}] P[{w}]", P[v] * P[w], zero
        for e in edges:
            for f in edges:
                if e != f:
                    yield "(ii)", f"S{e}* S{f}", S[e].adjoint() * S[f], zero
        for e in edges:
            yield "(iii)", f"S{e}* S{e}", S[e].adjoint() * S[e], P[e[1]]
        for e in edges:
            r = S[e] * S[e].adjoint()
            yield "(iv)", f"P[{e[0]}] S{e} S{e}*", P[e[0]] * r, r
        for v in regular_vertices(src):
            total = zero
            for ec in src.out_edges(v):
                for lab in range(int(ec.multiplicity)):
                    s = m.edge_image(ec.source, ec.target, lab)
                    total = total + s * s.adjoint()
            yield "(v)", f"P[{v}] = sum S S*", total, P[v]

    for name, what, lhs, rhs in relations():
        checks += 1
        if not equivalent(lhs, rhs):
            return StarHomReport(False, checks, name, f"{what}: {lhs!r} != {rhs!r}")
    return StarHomReport(True, checks)
