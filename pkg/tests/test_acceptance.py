"""Acceptance criteria, one test each, every one printing a PASS/FAIL line.

Run under pytest (the lines are repeated in the terminal summary) or
directly with ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import contextlib
import io
import random
import sys
import tempfile
import time
from itertools import product as cartesian
from pathlib import Path as FsPath

sys.path.insert(0, str(FsPath(__file__).parent))

from oracles import cokernel_kernel_ranks, invariant_factors  # noqa: E402
from qpgraph import catalog, kk, numerics  # noqa: E402
from qpgraph.calculus import (  # noqa: E402
    Monomial,
    Path,
    compose_maps,
    is_identity,
    multiply_monomials,
    verify_star_hom,
    vertex_sum,
)
from qpgraph.cli import main  # noqa: E402
from qpgraph.graph import INFINITE, build_graph, format_graph, graph_isomorphic  # noqa: E402
from qpgraph.ideals import is_hereditary_saturated, quotient_graph, saturate  # noqa: E402
from qpgraph.ktheory import k_map, smith_normal_form  # noqa: E402

RESULTS: list[str] = []


def record(number: int, title: str, ok: bool, detail: str) -> bool:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title} -- {detail}"
    RESULTS.append(line)
    print(line)
    return ok


def _cli_ktheory(graph) -> tuple[str, float]:
    """Run ``qpgraph ktheory`` on a serialized graph; return its first line and the wall time."""
    with tempfile.TemporaryDirectory() as tmp:
        path = FsPath(tmp) / "graph.txt"
        path.write_text(format_graph(graph))
        buf = io.StringIO()
        t0 = time.perf_counter()
        with contextlib.redirect_stdout(buf):
            code = main(["ktheory", str(path)])
        elapsed = time.perf_counter() - t0
    if code != 0:
        return f"exit {code}", elapsed
    return buf.getvalue().splitlines()[0], elapsed


# -- 1 ---------------------------------------------------------------------------


def test_criterion_01_projective_ktheory():
    ok, worst = True, 0.0
    for n in range(1, 7):
        line, elapsed = _cli_ktheory(catalog.projective_graph(n))
        worst = max(worst, elapsed)
        ok &= line == f"K0 = Z^{n + 1}, K1 = 0" and elapsed < 1.0
    assert record(1, "K(F_n) = (Z^{n+1}, 0), n=1..6", ok, f"slowest run {worst:.3f}s (limit 1s)")


# -- 2 ---------------------------------------------------------------------------


def test_criterion_02_sphere_ktheory():
    ok = True
    for n in range(1, 6):
        g = catalog.sphere_graph(n)
        line, _ = _cli_ktheory(g)
        regular = [v for v in g.vertices if 0 < g.emission(v) < INFINITE]
        free0, torsion, free1 = cokernel_kernel_ranks(k_map(g), len(g.vertices), len(regular))
        ok &= line == "K0 = Z, K1 = Z" and (free0, torsion, free1) == (1, [], 1)
    assert record(2, "K(L_{2n+1}) = (Z, Z), n=1..5, matches divisor oracle", ok, "exact")


# -- 3 ---------------------------------------------------------------------------


def test_criterion_03_quotient():
    ok = True
    for n in range(2, 7):
        q = quotient_graph(catalog.projective_graph(n), {f"w{n + 1}"})
        ok &= graph_isomorphic(q, catalog.projective_graph(n - 1)) is not None
    assert record(3, "F_n / {w_{n+1}} isomorphic to F_{n-1}, n=2..6", ok, "exact")


# -- 4 ---------------------------------------------------------------------------


def test_criterion_04_splitting():
    ok, worst = True, 0.0
    for n in range(1, 6):
        t0 = time.perf_counter()
        big, small = catalog.projective_graph(n), catalog.projective_graph(n - 1)
        s, q = catalog.splitting_map(n), catalog.quotient_map(n)
        good = (
            verify_star_hom(small, big, s, 2).passed
            and verify_star_hom(big, small, q, 2).passed
            and is_identity(compose_maps(q, s), small, 2)
        )
        elapsed = time.perf_counter() - t0
        worst = max(worst, elapsed)
        ok &= good and elapsed < 5.0
    assert record(4, "s_n, q_n *-homomorphisms and q_n o s_n = id, n=1..5", ok, f"slowest n {worst:.2f}s (limit 5s)")


# -- 5 ---------------------------------------------------------------------------

EXPECTED_N2 = [
    "I(x)Pi (0,0) R2: [j2.pi2] => id_K",
    "I(x)Pi (1,1) R1: [j1.s2.q2.pi1] => [j1.pi1]",
    "I(x)Pi (1,1) R2: [j1.pi1] => id_K",
    "I(x)Pi (2,2) R1: [s1.s2.q2.q1] => [s1.q1]",
    "I(x)Pi (2,2) R1: [s1.q1] => id_C",
    "Pi(x)I (0,0) R4: [q2.pi1.j1.s2] + [q2.q1.s1.s2] => [q2.s2]",
    "Pi(x)I (0,0) R4: [pi2.j2] + [q2.s2] => id_CP2",
]


def _diagonal_trace(rep: kk.KKReport) -> list[str]:
    left = [f"I(x)Pi {t}" for t in rep.left_trace if t.entry[0] == t.entry[1]]
    return left + [f"Pi(x)I {t}" for t in rep.right_trace]


def test_criterion_05_kk_equivalence():
    ok = True
    for n in range(1, 6):
        rep = kk.verify_kk_equivalence(n)
        _, _, mor = kk.morita_compress(n)
        ok &= rep.passed and mor.passed
    trace_ok = _diagonal_trace(kk.verify_kk_equivalence(2)) == EXPECTED_N2
    assert record(
        5,
        "Pi_n, I_n mutually inverse and Morita compression, n=1..5; n=2 trace",
        ok and trace_ok,
        f"equivalences {'ok' if ok else 'FAILED'}, n=2 trace {'matches' if trace_ok else 'DIFFERS'}",
    )


# -- 6 ---------------------------------------------------------------------------


def test_criterion_06_splitting_chain():
    ok, count = True, 0
    for n in range(1, 6):
        g = catalog.projective_graph(n)
        for k in range(n):
            expected = vertex_sum(g, [f"w{i}" for i in range(n - k, n + 2)])
            ok &= catalog.splitting_chain_image(n, k) == expected
            count += 1
    assert record(6, "s_n o ... o s_{n-k} o j_{n-k-1}(P) = sum P_{w_i}, n<=5", ok, f"{count} cases exact")


# -- 7 ---------------------------------------------------------------------------


def test_criterion_07_representations():
    t0 = time.perf_counter()
    worst = 0.0
    for n in (1, 2, 3):
        trunc = numerics.Truncation(n, 8, 3)
        rho = numerics.relation_residuals(numerics.rep_rho(n, trunc), "graph")
        worst = max(worst, rho.max_residual)
        for q in (0.3, 0.5, 0.8):
            psi = numerics.relation_residuals(numerics.rep_psi(n, q, trunc), "qps")
            pi = numerics.relation_residuals(numerics.rep_pi(n, q, trunc), "qps")
            worst = max(worst, psi.max_residual, pi.max_residual)
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-10 and elapsed < 30
    assert record(7, "sphere relations (psi, pi) and graph relations (rho), n<=3", ok, f"max residual {worst:.2e}, {elapsed:.1f}s")


# -- 8 ---------------------------------------------------------------------------


def test_criterion_08_projections():
    worst, rel = 0.0, 0.0
    for n in (1, 2, 3):
        trunc = numerics.Truncation(n, 8, 3)
        for q in (0.3, 0.5, 0.8):
            for row in numerics.projection_convergence(n, q, trunc):
                worst = max(worst, row.max_error)
            rel = max(rel, numerics.check_rel_proj(n, q, trunc).max_residual)
    ok = worst < 1e-10 and rel == 0.0
    assert record(8, "projection limit = closed form at steps >= lN; rel-proj exact, n<=3", ok, f"max |diff| {worst:.2e}, rel-proj {rel:g}")


# -- 9 ---------------------------------------------------------------------------


def test_criterion_09_basis():
    dets = [catalog.basis_change_determinant(n) for n in range(1, 9)]
    ok = all(abs(d) == 1 for d in dets)
    assert record(9, "det(basis change) = +-1, n=1..8", ok, f"dets {dets}")


# -- 10 --------------------------------------------------------------------------


def _random_matrix(rnd: random.Random):
    r, c = rnd.randint(1, 4), rnd.randint(1, 4)
    return [[rnd.randint(-9, 9) for _ in range(c)] for _ in range(r)]


def _random_graph(rnd: random.Random):
    n = rnd.randint(1, 7)
    names = [f"x{i}" for i in range(n)]
    edges = []
    for s, t in cartesian(names, names):
        roll = rnd.random()
        if roll < 0.15:
            edges.append((s, t, INFINITE))
        elif roll < 0.4:
            edges.append((s, t, rnd.randint(1, 3)))
    return build_graph(names, edges)


def _short_monomials():
    g = catalog.projective_graph(2)
    paths = [Path(v) for v in g.vertices]
    for e in g.edges:
        for lab in (0, 1):
            paths.append(Path(e.source, ((e.source, e.target, lab),)))
    return [Monomial(a, b) for a in paths for b in paths if a.range == b.range]


def _criterion5_terms():
    for n in range(1, 6):
        Pi, I = kk.build_Pi(n), kk.build_I(n)
        fwd, bwd, _ = kk.morita_compress(n)
        for m in (kk.product(I, Pi), kk.product(Pi, I), kk.product(bwd, fwd), kk.product(fwd, bwd)):
            for _, entry in m.cells():
                yield entry
                for chain, c in entry:
                    yield kk.FormalSum(entry.domain, entry.codomain, {chain: c})


def test_criterion_10_property_suites():
    rnd = random.Random(20261018)
    snf_ok = 0
    for _ in range(500):
        m = _random_matrix(rnd)
        d = smith_normal_form(m).diagonal
        snf_ok += [x for x in d if x] == invariant_factors(m)
    sat_ok = 0
    for _ in range(200):
        g = _random_graph(rnd)
        s = {v for v in g.vertices if rnd.random() < 0.3}
        t = s | {v for v in g.vertices if rnd.random() < 0.3}
        cs, ct = saturate(g, s), saturate(g, t)
        sat_ok += s <= cs and saturate(g, cs) == cs and cs <= ct and is_hereditary_saturated(g, cs)
    monos = _short_monomials()

    def mul(a, b):
        return None if a is None or b is None else multiply_monomials(a, b)

    assoc = all(mul(mul(a, b), c) == mul(a, mul(b, c)) for a, b, c in cartesian(monos, repeat=3))
    terms = list(_criterion5_terms())
    norm_ok = 0
    for x in terms:
        ms: list = []
        y = kk.normalize(x, measures=ms)
        norm_ok += kk.normalize(y) == y and all(b < a for a, b in zip(ms, ms[1:]))
    ok = snf_ok == 500 and sat_ok == 200 and assoc and norm_ok == len(terms)
    detail = (
        f"SNF {snf_ok}/500, saturate {sat_ok}/200, "
        f"associativity on {len(monos) ** 3} triples {'ok' if assoc else 'FAILED'}, "
        f"normalize {norm_ok}/{len(terms)}"
    )
    assert record(10, "property suites", ok, detail)


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
