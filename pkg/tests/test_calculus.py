from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from qpgraph.calculus import (
    Element,
    GeneratorMap,
    Monomial,
    Path,
    UnmappedGeneratorError,
    apply_map,
    equivalent,
    expand,
    identity_map,
    is_identity,
    isometry,
    make_path,
    multiply_monomials,
    projection,
    uniform_map,
    unit,
    verify_star_hom,
)
from qpgraph.catalog import projective_graph, sphere_graph, splitting_map
from qpgraph.graph import GraphError, build_graph

F2 = projective_graph(2)
LABELS = (0, 1)


def paths(graph, max_len, labels=LABELS):
    """All paths of length <= max_len using the given labels."""
    out = [Path(v) for v in graph.vertices]
    frontier = list(out)
    for _ in range(max_len):
        nxt = []
        for p in frontier:
            for e in graph.out_edges(p.range):
                for lab in labels:
                    if e.multiplicity == float("inf") or lab < e.multiplicity:
                        nxt.append(Path(p.anchor, p.steps + ((e.source, e.target, lab),)))
        out += nxt
        frontier = nxt
    return out


def monomials(graph, max_len):
    ps = paths(graph, max_len)
    return [Monomial(a, b) for a in ps for b in ps if a.range == b.range]


# -- oracle: monomials as partial maps on the path space --------------------


SPACE = paths(F2, 3)


def act(mono, path):
    """``S_a S_b*`` sends ``b g`` to ``a g`` and kills paths not starting with ``b``."""
    if mono is None or path is None or not mono.beta.is_prefix_of(path):
        return None
    return mono.alpha + path.remainder(mono.beta)


def oracle_product(a, b):
    return {p: act(a, act(b, p)) for p in SPACE}


def as_map(mono):
    return {p: act(mono, p) for p in SPACE}


def test_product_rule_matches_path_space_oracle():
    monos = monomials(F2, 2)
    assert len(monos) == 91
    for a in monos:
        for b in monos:
            assert as_map(multiply_monomials(a, b)) == oracle_product(a, b)


def test_distinct_monomials_act_differently():
    monos = monomials(F2, 2)
    images = {tuple(sorted((str(k), str(v)) for k, v in as_map(m).items())) for m in monos}
    assert len(images) == len(monos)


def test_associativity_exhaustive_on_short_paths():
    monos = monomials(F2, 1)
    assert len(monos) == 35

    def mul(a, b):
        return None if a is None or b is None else multiply_monomials(a, b)

    for a, b, c in product(monos, repeat=3):
        assert mul(mul(a, b), c) == mul(a, mul(b, c))


MONOS2 = monomials(F2, 2)
elements = st.dictionaries(
    st.sampled_from(MONOS2), st.integers(-3, 3).map(Fraction), max_size=4
).map(lambda d: Element(F2, d))


@settings(max_examples=150, deadline=None)
@given(elements, elements, elements)
def test_element_algebra_laws(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a * b).adjoint() == b.adjoint() * a.adjoint()
    assert a.adjoint().adjoint() == a
    assert (a - a) == 0


@settings(max_examples=100, deadline=None)
@given(elements)
def test_unit_is_neutral(a):
    assert unit(F2) * a == a and a * unit(F2) == a


def test_monomial_validation():
    with pytest.raises(GraphError):
        Monomial(Path("w1"), Path("w2"))
    with pytest.raises(GraphError):
        make_path(F2, "w2", [("w1", "w2", 0)])
    with pytest.raises(GraphError):
        isometry(F2, "w2", "w1")
    with pytest.raises(GraphError):
        isometry(sphere_graph(1), "v1", "v1", 1)


def test_projection_and_isometry_relations():
    s = isometry(F2, "w1", "w2", 5)
    assert s.adjoint() * s == projection(F2, "w2")
    assert projection(F2, "w1") * s == s
    assert s.adjoint() * isometry(F2, "w1", "w2", 4) == 0
    assert (s * s.adjoint()).degrees() == {0}
    assert s.degrees() == {1}


def test_expansion_sees_relation_v():
    g = sphere_graph(1)
    p1 = projection(g, "v1")
    total = sum(
        (isometry(g, "v1", t) * isometry(g, "v1", t).adjoint() for t in ("v1", "v2")),
        Element.zero(g),
    )
    assert p1 != total  # different normal forms...
    assert equivalent(p1, total)  # ...same element
    assert equivalent(p1, expand(p1, 3))
    assert not equivalent(p1, projection(g, "v2"))
    # infinite emitters are never expanded
    assert expand(projection(F2, "w1"), 4) == projection(F2, "w1")


@pytest.mark.parametrize("n", [1, 2, 3])
def test_identity_maps_are_star_homomorphisms(n):
    for g in (sphere_graph(n), projective_graph(n)):
        m = identity_map(g)
        assert verify_star_hom(g, g, m).passed
        assert is_identity(m, g)


# -- injected faults ---------------------------------------------------------


def broken_splitting(n, **overrides):
    good = splitting_map(n)
    vertex_images = dict(good.vertex_images)
    vertex_images.update(overrides.get("vertices", {}))
    edge_fix = overrides.get("edge")

    def rule(s, t, label):
        if edge_fix is not None:
            out = edge_fix(s, t, label)
            if out is not None:
                return out
        return good.edge_rule(s, t, label)

    return GeneratorMap(good.source, good.target, vertex_images, rule, "broken")


def test_detects_label_collapse_only_visible_at_label_one():
    tgt = projective_graph(2)
    # every label of w1->w2 goes to the label-0 image: only a second label exposes it
    m = broken_splitting(2, edge=lambda s, t, lab: isometry(tgt, "w1", "w2", 0) + isometry(tgt, "w1", "w3", 0) if (s, t) == ("w1", "w2") else None)
    rep = verify_star_hom(projective_graph(1), tgt, m, label_budget=2)
    assert not rep.passed and rep.relation == "(ii)"


def test_detects_missing_vertex_summand():
    tgt = projective_graph(2)
    m = broken_splitting(2, vertices={"w2": projection(tgt, "w2")})
    rep = verify_star_hom(projective_graph(1), tgt, m)
    assert not rep.passed and rep.relation == "(iii)"


def test_detects_scaled_edge():
    tgt = projective_graph(2)
    m = broken_splitting(2, edge=lambda s, t, lab: isometry(tgt, "w1", "w2", lab).scale(2) if (s, t) == ("w1", "w2") else None)
    rep = verify_star_hom(projective_graph(1), tgt, m)
    assert not rep.passed


def test_detects_non_projection():
    tgt = projective_graph(2)
    m = broken_splitting(2, vertices={"w1": projection(tgt, "w1").scale(2)})
    rep = verify_star_hom(projective_graph(1), tgt, m)
    assert not rep.passed and rep.relation == "projection"


def test_detects_relation_v_failure():
    src = build_graph(["a", "b"], [("a", "b", 1)])
    dst = build_graph(["a", "b"], [("a", "b", 2)])
    m = uniform_map(src, dst, {"a": projection(dst, "a"), "b": projection(dst, "b")}, {("a", "b"): [(1, ("a", "b"))]})
    rep = verify_star_hom(src, dst, m)
    assert not rep.passed and rep.relation == "(v)"


def test_label_budget_must_allow_two_labels():
    with pytest.raises(ValueError):
        verify_star_hom(F2, F2, identity_map(F2), label_budget=1)


def test_unmapped_generator():
    m = uniform_map(F2, F2, {}, {})
    with pytest.raises(UnmappedGeneratorError):
        m.vertex_image("w1")
    with pytest.raises(UnmappedGeneratorError):
        m.edge_image("w1", "w2", 0)


def test_apply_map_rejects_foreign_elements():
    with pytest.raises(GraphError):
        apply_map(identity_map(F2), projection(projective_graph(1), "w1"))
