"""Command-line front end: ``qpgraph <command> ...``.

Every command prints a short human-readable report, or with ``--json`` a
single JSON document::

    {"schema": "qpgraph.report/1", "command": ..., "inputs": {...},
     "verdict": "verified" | "failed" | "computed", "payload": {...}}

Exit codes: 0 verified/computed, 1 verification failed, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from . import catalog, kk, numerics
from .calculus import compose_maps, is_identity, verify_star_hom
from .graph import Graph, GraphError, format_graph, parse_graph
from .ideals import enumerate_hereditary_saturated, is_hereditary_saturated, quotient_graph, saturate
from .ktheory import k_groups

SCHEMA = "qpgraph.report/1"
EXIT_OK, EXIT_FAILED, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    """Bad user input; reported with exit code 2."""


@dataclass
class Report:
    command: str
    inputs: dict[str, Any]
    verdict: str
    payload: dict[str, Any] = field(default_factory=dict)
    lines: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return EXIT_FAILED if self.verdict == "failed" else EXIT_OK

    def to_json(self) -> str:
        doc = {
            "schema": SCHEMA,
            "command": self.command,
            "inputs": self.inputs,
            "verdict": self.verdict,
            "payload": self.payload,
        }
        if self.warnings:
            doc["warnings"] = self.warnings
        return json.dumps(doc, indent=2, sort_keys=True)

    def to_text(self) -> str:
        return "\n".join(self.lines + [f"verdict: {self.verdict}"])


def _read_graph(path: str) -> Graph:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    try:
        return parse_graph(text)
    except GraphError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _verdict(ok: bool) -> str:
    return "verified" if ok else "failed"


# -- commands --------------------------------------------------------------------


def cmd_ktheory(path: str) -> Report:
    g = _read_graph(path)
    k0, k1 = k_groups(g)
    return Report(
        "ktheory",
        {"file": path},
        "computed",
        {
            "K0": str(k0),
            "K1": str(k1),
            "K0_rank": k0.free_rank,
            "K0_torsion": list(k0.torsion),
            "K1_rank": k1.free_rank,
        },
        [f"K0 = {k0}, K1 = {k1}"],
    )


def cmd_ideals(path: str) -> Report:
    g = _read_graph(path)
    lattice = enumerate_hereditary_saturated(g)
    names = lattice.describe()
    index = {m: i for i, m in enumerate(lattice.members)}
    covers = [[index[a], index[b]] for a, b in lattice.covers()]
    lines = [f"{len(lattice)} hereditary saturated sets" + (" (a chain)" if lattice.is_chain() else "")]
    lines += [f"  [{i}] {s}" for i, s in enumerate(names)]
    return Report(
        "ideals",
        {"file": path},
        "computed",
        {"sets": [sorted(m, key=g.index) for m in lattice.members], "covers": covers, "is_chain": lattice.is_chain()},
        lines,
    )


def cmd_quotient(path: str, drop: Sequence[str]) -> Report:
    g = _read_graph(path)
    unknown = [v for v in drop if v not in g]
    if unknown:
        raise InputError(f"unknown vertices: {', '.join(unknown)}")
    warnings = []
    h = frozenset(drop)
    if not is_hereditary_saturated(g, h):
        closed = saturate(g, h)
        warnings.append(
            "drop set is not hereditary and saturated; using its closure {"
            + ", ".join(sorted(closed, key=g.index))
            + "}"
        )
        h = closed
    q = quotient_graph(g, h)
    text = format_graph(q)
    return Report(
        "quotient",
        {"file": path, "drop": list(drop)},
        "computed",
        {"dropped": sorted(h, key=g.index), "graph": text},
        [text.rstrip("\n")],
        warnings,
    )


def cmd_verify_splitting(n: int, label_budget: int = 2) -> Report:
    if n < 1:
        raise InputError("--n must be >= 1")
    t0 = time.perf_counter()
    ext = catalog.extension(n)
    big, small = catalog.projective_graph(n), catalog.projective_graph(n - 1)
    s_rep = verify_star_hom(small, big, ext.splitting, label_budget)
    q_rep = verify_star_hom(big, small, ext.quotient, label_budget)
    ident = is_identity(compose_maps(ext.quotient, ext.splitting), small, label_budget)
    ok = s_rep.passed and q_rep.passed and ident
    elapsed = time.perf_counter() - t0
    lines = [
        f"s{n}: {s_rep}",
        f"q{n}: {q_rep}",
        f"q{n} o s{n} = id: {'yes' if ident else 'no'}",
    ]
    return Report(
        "verify-splitting",
        {"n": n, "label_budget": label_budget},
        _verdict(ok),
        {
            "splitting": {"passed": s_rep.passed, "checks": s_rep.checks, "detail": s_rep.detail},
            "quotient": {"passed": q_rep.passed, "checks": q_rep.checks, "detail": q_rep.detail},
            "composite_is_identity": ident,
            "seconds": round(elapsed, 4),
        },
        lines,
    )


def cmd_verify_kk(n: int, trace: bool = False) -> Report:
    if n < 1:
        raise InputError("--n must be >= 1")
    rep = kk.verify_kk_equivalence(n)
    _, _, mor = kk.morita_compress(n)
    ok = rep.passed and mor.passed
    lines = [
        f"I{n} (x) Pi{n} = id: {'yes' if rep.left.is_identity() else 'no'}",
        f"Pi{n} (x) I{n} = id: {'yes' if rep.right.is_identity() else 'no'}",
        f"Morita compression to C^{n + 1}: {'yes' if mor.passed else 'no'}",
        f"rules used: {', '.join(sorted(rep.rules_used))}",
    ]
    if trace:
        lines += ["trace:"] + ["  " + t for t in rep.trace_lines()]
    payload: dict[str, Any] = {
        "left_identity": rep.left.is_identity(),
        "right_identity": rep.right.is_identity(),
        "morita": mor.passed,
        "rules_used": sorted(rep.rules_used),
        "steps": len(rep.left_trace) + len(rep.right_trace),
    }
    if trace:
        payload["trace"] = rep.trace_lines()
    return Report("verify-kk", {"n": n, "trace": trace}, _verdict(ok), payload, lines)


def cmd_numerics(n: int, q: float, N: int, M: int, tol: float = 1e-10) -> Report:
    if not 0.0 < q < 1.0:
        raise InputError("--q must lie in (0, 1)")
    if N < 4:
        raise InputError("--trunc must be >= 4")
    if M < 2:
        raise InputError("--winding must be >= 2")
    if n < 1:
        raise InputError("--n must be >= 1")
    trunc = numerics.Truncation(n, N, M)
    psi = numerics.rep_psi(n, q, trunc)
    pi = numerics.rep_pi(n, q, trunc)
    rho = numerics.rep_rho(n, trunc)
    reports = {
        "psi:qps": numerics.relation_residuals(psi, "qps"),
        "pi:qps": numerics.relation_residuals(pi, "qps"),
        "rho:graph": numerics.relation_residuals(rho, "graph"),
        "psi:cp": numerics.cp_generator_check(n, q, trunc, full=True),
    }
    conv = numerics.projection_convergence(n, q, trunc, pi)
    rel = numerics.check_rel_proj(n, q, trunc, rho)
    det = catalog.basis_change_determinant(n)
    ok = (
        all(r.max_residual < tol for r in reports.values())
        and all(c.max_error < tol for c in conv)
        and rel.max_residual == 0.0
        and abs(det) == 1
    )
    lines = [f"truncation: n={n}, q={q}, N={N}, M={M}, tol={tol:g}"]
    for name, r in reports.items():
        worst, val = r.worst()
        lines.append(f"  {name:<10} max residual {val:.3e}  ({len(r.residuals)} relations, worst: {worst})")
    for c in conv:
        lines.append(f"  projection l={c.l}: steps={c.steps} max |limit - closed form| = {c.max_error:.3e}")
    lines.append(f"  rel-proj residual: {rel.max_residual:g}")
    lines.append(f"  det(basis change) = {det}")
    payload = {
        "residuals": {name: r.residuals for name, r in reports.items()},
        "max_residuals": {name: r.max_residual for name, r in reports.items()},
        "projection_convergence": [{"l": c.l, "steps": c.steps, "max_error": c.max_error} for c in conv],
        "rel_proj": rel.residuals,
        "basis_change_determinant": det,
    }
    return Report("numerics", {"n": n, "q": q, "trunc": N, "winding": M, "tol": tol}, _verdict(ok), payload, lines)


# -- entry point -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qpgraph", description=__doc__.splitlines()[0])
    parser.add_argument("--json", action="store_true", help="emit one JSON document")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ktheory", help="K-groups of a graph C*-algebra")
    p.add_argument("file", help="GraphFile path, or - for stdin")

    p = sub.add_parser("ideals", help="hereditary saturated vertex sets")
    p.add_argument("file")

    p = sub.add_parser("quotient", help="quotient graph by a hereditary saturated set")
    p.add_argument("file")
    p.add_argument("--drop", nargs="+", required=True, metavar="VERTEX")

    p = sub.add_parser("verify-splitting", help="check s_n and q_n for F_n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--labels", type=int, default=2, help="edge labels per infinite class (default 2)")

    p = sub.add_parser("verify-kk", help="check Pi_n and I_n are mutually inverse")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trace", action="store_true", help="print the rewrite trace")

    p = sub.add_parser("numerics", help="truncated-operator checks")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--trunc", type=int, required=True, help="cutoff N for each k_i")
    p.add_argument("--winding", type=int, required=True, help="cutoff M for the winding index")
    p.add_argument("--tol", type=float, default=1e-10)

    for action in sub.choices.values():
        action.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="emit one JSON document")
    return parser


def run(args: argparse.Namespace) -> Report:
    if args.command == "ktheory":
        return cmd_ktheory(args.file)
    if args.command == "ideals":
        return cmd_ideals(args.file)
    if args.command == "quotient":
        return cmd_quotient(args.file, args.drop)
    if args.command == "verify-splitting":
        return cmd_verify_splitting(args.n, args.labels)
    if args.command == "verify-kk":
        return cmd_verify_kk(args.n, args.trace)
    if args.command == "numerics":
        return cmd_numerics(args.n, args.q, args.trunc, args.winding, args.tol)
    raise InputError(f"unknown command {args.command}")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = run(args)
    except (InputError, GraphError, numerics.NumericsError, ValueError) as exc:
        if args.json:
            print(json.dumps({"schema": SCHEMA, "command": args.command, "verdict": "error", "error": str(exc)}))
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    print(report.to_json() if args.json else report.to_text())
    return report.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
