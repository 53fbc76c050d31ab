"""Formal Kasparov-product calculus for the split extensions of ``C*(F_n)``.

KK classes are opaque generators:

* ``j(n): K -> CP(n)``   inclusion of the compacts
* ``q(n): CP(n) -> CP(n-1)``   quotient map
* ``s(n): CP(n-1) -> CP(n)``   splitting
* ``pi(n): CP(n) -> K``   class of the quasi-homomorphism ``(1, s o q)``
* ``phi: C -> K`` (rank-one projection) and ``mor: K -> C`` (Morita class)

``CP(0)`` is ``C``.  A :class:`Chain` lists generators in product order, so
``[s o j]`` is the chain ``(j, s)``.  :func:`normalize` rewrites integer
combinations of chains with

* ``R1``  ``(s(n), q(n)) -> id``
* ``R2``  ``(j(n), pi(n)) -> id``
* ``R3``  ``(phi, mor) -> id_C`` and ``(mor, phi) -> id_K``
* ``R4``  ``X.(pi(n), j(n)).Y + X.(q(n), s(n)).Y -> X.Y``
* ``R5``  ``(j(n), q(n)) -> 0`` and ``(s(n), pi(n)) -> 0``

R1, R2 and R4 are the split-exact identities; R5 holds because ``q o j = 0``
and because ``s.pi = 0`` follows from R1, R2 and R4.  The engine verifies
identities by reduction and does not decide equality in general.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

K = "K"
C = "C"


class RewriteError(RuntimeError):
    """Raised when normalization exceeds its iteration cap."""


def cp(n: int) -> str:
    """Name of the object ``C(CP^n_q)``; ``CP(0)`` is ``C``."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return C if n == 0 else f"CP{n}"


@dataclass(frozen=True, order=True)
class Arrow:
    kind: str
    n: int = 0

    def __post_init__(self) -> None:
        if self.kind in ("j", "q", "s", "pi"):
            if self.n < 1:
                raise ValueError(f"{self.kind}(n) needs n >= 1")
        elif self.kind not in ("phi", "mor"):
            raise ValueError(f"unknown generator {self.kind!r}")

    @property
    def domain(self) -> str:
        k, n = self.kind, self.n
        if k == "s":
            return cp(n - 1)
        if k in ("q", "pi"):
            return cp(n)
        return C if k == "phi" else K

    @property
    def codomain(self) -> str:
        k, n = self.kind, self.n
        if k == "q":
            return cp(n - 1)
        if k in ("j", "s"):
            return cp(n)
        return C if k == "mor" else K

    def __str__(self) -> str:
        return self.kind if self.kind in ("phi", "mor") else f"{self.kind}{self.n}"


def j(n: int) -> Arrow:
    return Arrow("j", n)


def q(n: int) -> Arrow:
    return Arrow("q", n)


def s(n: int) -> Arrow:
    return Arrow("s", n)


def pi(n: int) -> Arrow:
    return Arrow("pi", n)


PHI = Arrow("phi")
MOR = Arrow("mor")


@dataclass(frozen=True, order=True)
class Chain:
    """A composable word of generators, read in product order."""

    domain: str
    codomain: str
    arrows: tuple[Arrow, ...] = ()

    def __post_init__(self) -> None:
        here = self.domain
        for a in self.arrows:
            if a.domain != here:
                raise ValueError(f"{a} cannot follow an arrow into {here}")
            here = a.codomain
        if here != self.codomain:
            raise ValueError("chain does not end at its codomain")

    @classmethod
    def of(cls, *arrows: Arrow) -> "Chain":
        if not arrows:
            raise ValueError("use Chain.identity for the empty chain")
        return cls(arrows[0].domain, arrows[-1].codomain, tuple(arrows))

    @classmethod
    def identity(cls, obj: str) -> "Chain":
        return cls(obj, obj, ())

    def then(self, other: "Chain") -> "Chain":
        if self.codomain != other.domain:
            raise ValueError("chains are not composable")
        return Chain(self.domain, other.codomain, self.arrows + other.arrows)

    def __len__(self) -> int:
        return len(self.arrows)

    def __str__(self) -> str:
        if not self.arrows:
            return f"id_{self.domain}"
        return "[" + ".".join(map(str, self.arrows)) + "]"


class FormalSum:
    """Integer combination of chains sharing a domain and codomain."""

    __slots__ = ("domain", "codomain", "_terms")

    def __init__(self, domain: str, codomain: str, terms: dict[Chain, int] | None = None):
        self.domain = domain
        self.codomain = codomain
        clean = {}
        for ch, c in (terms or {}).items():
            if ch.domain != domain or ch.codomain != codomain:
                raise ValueError(f"chain {ch} does not go {domain} -> {codomain}")
            if c:
                clean[ch] = c
        self._terms = dict(sorted(clean.items()))

    @classmethod
    def of(cls, chain: Chain, coefficient: int = 1) -> "FormalSum":
        return cls(chain.domain, chain.codomain, {chain: coefficient})

    @classmethod
    def zero(cls, domain: str, codomain: str) -> "FormalSum":
        return cls(domain, codomain)

    @classmethod
    def identity(cls, obj: str) -> "FormalSum":
        return cls.of(Chain.identity(obj))

    @property
    def terms(self) -> dict[Chain, int]:
        return dict(self._terms)

    def __iter__(self):
        return iter(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_identity(self) -> bool:
        return self.domain == self.codomain and self._terms == {Chain.identity(self.domain): 1}

    def __add__(self, other: "FormalSum") -> "FormalSum":
        if (self.domain, self.codomain) != (other.domain, other.codomain):
            raise ValueError("cannot add classes in different KK groups")
        terms = dict(self._terms)
        for ch, c in other._terms.items():
            terms[ch] = terms.get(ch, 0) + c
        return FormalSum(self.domain, self.codomain, terms)

    def __neg__(self) -> "FormalSum":
        return FormalSum(self.domain, self.codomain, {ch: -c for ch, c in self._terms.items()})

    def __sub__(self, other: "FormalSum") -> "FormalSum":
        return self + (-other)

    def then(self, other: "FormalSum") -> "FormalSum":
        """Kasparov product ``self (x) other``, bilinear in both factors."""
        if self.codomain != other.domain:
            raise ValueError("classes are not composable")
        terms: dict[Chain, int] = {}
        for a, ca in self._terms.items():
            for b, cb in other._terms.items():
                ch = a.then(b)
                terms[ch] = terms.get(ch, 0) + ca * cb
        return FormalSum(self.domain, other.codomain, terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FormalSum):
            return NotImplemented
        return (self.domain, self.codomain, self._terms) == (other.domain, other.codomain, other._terms)

    def __hash__(self) -> int:
        return hash((self.domain, self.codomain, tuple(self._terms.items())))

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for ch, c in self._terms.items():
            parts.append(str(ch) if c == 1 else f"-{ch}" if c == -1 else f"{c}*{ch}")
        return " + ".join(parts).replace("+ -", "- ")

    __repr__ = __str__


@dataclass(frozen=True)
class SumMatrix:
    """Matrix of classes between direct sums; entry ``(i, k)`` goes ``domain[k] -> codomain[i]``."""

    domain: tuple[str, ...]
    codomain: tuple[str, ...]
    entries: tuple[tuple[FormalSum, ...], ...]

    def __post_init__(self) -> None:
        if len(self.entries) != len(self.codomain):
            raise ValueError("one row per codomain summand")
        for i, row in enumerate(self.entries):
            if len(row) != len(self.domain):
                raise ValueError("one column per domain summand")
            for k, e in enumerate(row):
                if (e.domain, e.codomain) != (self.domain[k], self.codomain[i]):
                    raise ValueError(f"entry ({i},{k}) has the wrong type")

    @classmethod
    def build(cls, domain: Sequence[str], codomain: Sequence[str], cells: dict[tuple[int, int], FormalSum]) -> "SumMatrix":
        rows = tuple(
            tuple(cells.get((i, k), FormalSum.zero(domain[k], codomain[i])) for k in range(len(domain)))
            for i in range(len(codomain))
        )
        return cls(tuple(domain), tuple(codomain), rows)

    @classmethod
    def identity(cls, objects: Sequence[str]) -> "SumMatrix":
        return cls.build(objects, objects, {(i, i): FormalSum.identity(o) for i, o in enumerate(objects)})

    @classmethod
    def diagonal(cls, arrows: Sequence[Arrow | str]) -> "SumMatrix":
        """Diagonal matrix; a string entry stands for the identity on that object."""
        dom, cod, cells = [], [], {}
        for i, a in enumerate(arrows):
            if isinstance(a, str):
                dom.append(a)
                cod.append(a)
                cells[(i, i)] = FormalSum.identity(a)
            else:
                dom.append(a.domain)
                cod.append(a.codomain)
                cells[(i, i)] = FormalSum.of(Chain.of(a))
        return cls.build(dom, cod, cells)

    def __getitem__(self, index: tuple[int, int]) -> FormalSum:
        i, k = index
        return self.entries[i][k]

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.codomain), len(self.domain))

    def cells(self):
        for i, row in enumerate(self.entries):
            for k, e in enumerate(row):
                yield (i, k), e

    def map_entries(self, fn) -> "SumMatrix":
        return SumMatrix(self.domain, self.codomain, tuple(tuple(fn(e) for e in row) for row in self.entries))

    def is_identity(self) -> bool:
        if self.domain != self.codomain:
            return False
        return all(e.is_identity() if i == k else e.is_zero() for (i, k), e in self.cells())

    def __str__(self) -> str:
        return "\n".join("| " + " | ".join(str(e) for e in row) + " |" for row in self.entries)


def product(a: SumMatrix, b: SumMatrix) -> SumMatrix:
    """``a (x) b``: first ``a``, then ``b``."""
    if a.codomain != b.domain:
        raise ValueError(f"cannot compose {a.codomain} with {b.domain}")
    cells = {}
    for i in range(len(b.codomain)):
        for k in range(len(a.domain)):
            total = FormalSum.zero(a.domain[k], b.codomain[i])
            for m in range(len(a.codomain)):
                total = total + a[m, k].then(b[i, m])
            cells[(i, k)] = total
    return SumMatrix.build(a.domain, b.codomain, cells)


# -- rewriting ---------------------------------------------------------------


@dataclass(frozen=True)
class TraceStep:
    rule: str
    before: str
    after: str
    entry: tuple[int, int] | None = None

    def __str__(self) -> str:
        where = f"({self.entry[0]},{self.entry[1]}) " if self.entry else ""
        return f"{where}{self.rule}: {self.before} => {self.after}"


_CANCEL = {
    ("s", "q"): "R1",
    ("j", "pi"): "R2",
}
_KILL = {("j", "q"), ("s", "pi")}


def _local_redex(chain: Chain) -> tuple[str, int] | None:
    """Leftmost pair matching R1, R2, R3 or R5: ``(rule, position)``."""
    arr = chain.arrows
    for i in range(len(arr) - 1):
        a, b = arr[i], arr[i + 1]
        key = (a.kind, b.kind)
        if key in _CANCEL and a.n == b.n:
            return _CANCEL[key], i
        if key in (("phi", "mor"), ("mor", "phi")):
            return "R3", i
        if key in _KILL and a.n == b.n:
            return "R5", i
    return None


def measure(x: FormalSum) -> tuple[int, int]:
    """Termination measure ``(total chain length, number of terms)``."""
    return (sum(len(ch) for ch, _ in x), len(x))


def _r4_redex(x: FormalSum):
    terms = x.terms
    for a, ca in terms.items():
        arr = a.arrows
        for i in range(len(arr) - 1):
            p, jj = arr[i], arr[i + 1]
            if p.kind == "pi" and jj.kind == "j" and p.n == jj.n:
                n = p.n
                partner = Chain(a.domain, a.codomain, arr[:i] + (q(n), s(n)) + arr[i + 2:])
                if partner in terms:
                    reduced = Chain(a.domain, a.codomain, arr[:i] + arr[i + 2:])
                    return a, ca, partner, reduced
    return None


def normalize(
    x: FormalSum,
    trace: list[TraceStep] | None = None,
    entry: tuple[int, int] | None = None,
    measures: list[tuple[int, int]] | None = None,
) -> FormalSum:
    """Rewrite to a fixed point: R1, R2, R3, R5 greedily, then one R4 step, repeat.

    Every step strictly lowers :func:`measure`; the number of rounds is
    capped at ``10 * number of terms`` as a safety net.
    """
    cap = 10 * max(1, len(x))
    rounds = 0
    if measures is not None:
        measures.append(measure(x))

    def log(rule: str, before: str, after: str) -> None:
        if trace is not None:
            trace.append(TraceStep(rule, before, after, entry))

    while True:
        progressed = True
        while progressed:
            progressed = False
            for ch, c in x:
                hit = _local_redex(ch)
                if hit is None:
                    continue
                rule, i = hit
                rest = FormalSum(x.domain, x.codomain, {ch: c})
                if rule == "R5":
                    log(rule, str(ch), "0")
                    x = x - rest
                else:
                    new = Chain(ch.domain, ch.codomain, ch.arrows[:i] + ch.arrows[i + 2:])
                    log(rule, str(ch), str(new))
                    x = x - rest + FormalSum(x.domain, x.codomain, {new: c})
                if measures is not None:
                    measures.append(measure(x))
                progressed = True
                break
        found = _r4_redex(x)
        if found is None:
            return x
        a, ca, partner, reduced = found
        log("R4", f"{a} + {partner}", str(reduced))
        x = x + FormalSum(x.domain, x.codomain, {a: -ca, partner: -ca, reduced: ca})
        if measures is not None:
            measures.append(measure(x))
        rounds += 1
        if rounds > cap:
            raise RewriteError("normalization did not reach a fixed point")


def normalize_matrix(
    m: SumMatrix,
    trace: list[TraceStep] | None = None,
    measures: list[list[tuple[int, int]]] | None = None,
) -> SumMatrix:
    """Normalize every entry; ``measures`` collects one measure sequence per entry."""
    cells = {}
    for (i, k), e in m.cells():
        seq: list[tuple[int, int]] | None = [] if measures is not None else None
        cells[(i, k)] = normalize(e, trace, (i, k), seq)
        if measures is not None:
            measures.append(seq)
    return SumMatrix.build(m.domain, m.codomain, cells)


# -- the equivalence ---------------------------------------------------------


def pi_entry(n: int, k: int) -> Chain:
    """Summand ``k`` of ``Pi_n``: ``q_n, ..., q_{n-k+1}`` then ``pi_{n-k}`` (or ``q_1`` when ``k = n``)."""
    qs = tuple(q(d) for d in range(n, n - k, -1))
    if k == n:
        return Chain(cp(n), C, qs)
    return Chain(cp(n), K, qs + (pi(n - k),))


def i_entry(n: int, k: int) -> Chain:
    """Summand ``k`` of ``I_n``: ``j_{n-k}`` (or nothing when ``k = n``) then ``s_{n-k+1}, ..., s_n``."""
    ss = tuple(s(d) for d in range(n - k + 1, n + 1))
    if k == n:
        return Chain(C, cp(n), ss)
    return Chain(K, cp(n), (j(n - k),) + ss)


def summands(n: int) -> tuple[str, ...]:
    """``K^n (+) C``."""
    return (K,) * n + (C,)


def build_Pi(n: int) -> SumMatrix:
    """``Pi_n in KK(CP(n), K^n (+) C)`` as an ``(n+1) x 1`` matrix."""
    if n < 1:
        raise ValueError("n must be >= 1")
    cells = {(k, 0): FormalSum.of(pi_entry(n, k)) for k in range(n + 1)}
    return SumMatrix.build((cp(n),), summands(n), cells)


def build_I(n: int) -> SumMatrix:
    """``I_n in KK(K^n (+) C, CP(n))`` as a ``1 x (n+1)`` matrix."""
    if n < 1:
        raise ValueError("n must be >= 1")
    cells = {(0, k): FormalSum.of(i_entry(n, k)) for k in range(n + 1)}
    return SumMatrix.build(summands(n), (cp(n),), cells)


@dataclass
class KKReport:
    n: int
    passed: bool
    left: SumMatrix
    right: SumMatrix
    left_trace: list[TraceStep] = field(default_factory=list)
    right_trace: list[TraceStep] = field(default_factory=list)
    measures: list[list[tuple[int, int]]] = field(default_factory=list, repr=False)

    @property
    def rules_used(self) -> set[str]:
        return {t.rule for t in self.left_trace + self.right_trace}

    def trace_lines(self) -> list[str]:
        return [f"I(x)Pi {t}" for t in self.left_trace] + [f"Pi(x)I {t}" for t in self.right_trace]


def verify_kk_equivalence(n: int) -> KKReport:
    """Reduce ``I_n (x) Pi_n`` and ``Pi_n (x) I_n`` to identities."""
    Pi, I = build_Pi(n), build_I(n)
    lt: list[TraceStep] = []
    rt: list[TraceStep] = []
    ms: list[list[tuple[int, int]]] = []
    left = normalize_matrix(product(I, Pi), lt, ms)
    right = normalize_matrix(product(Pi, I), rt, ms)
    return KKReport(n, left.is_identity() and right.is_identity(), left, right, lt, rt, ms)


def morita_mor(n: int) -> SumMatrix:
    """``mor`` on each ``K`` summand, identity on ``C``: ``K^n (+) C -> C^(n+1)``."""
    return SumMatrix.diagonal([MOR] * n + [C])


def morita_phi(n: int) -> SumMatrix:
    """``phi`` on each summand but the last: ``C^(n+1) -> K^n (+) C``."""
    return SumMatrix.diagonal([PHI] * n + [C])


def morita_compress(n: int) -> tuple[SumMatrix, SumMatrix, KKReport]:
    """The equivalence ``CP(n) -> C^(n+1)`` and its inverse, with the check that they are mutually inverse."""
    forward = product(build_Pi(n), morita_mor(n))
    backward = product(morita_phi(n), build_I(n))
    lt: list[TraceStep] = []
    rt: list[TraceStep] = []
    ms: list[list[tuple[int, int]]] = []
    left = normalize_matrix(product(backward, forward), lt, ms)
    right = normalize_matrix(product(forward, backward), rt, ms)
    report = KKReport(n, left.is_identity() and right.is_identity(), left, right, lt, rt, ms)
    return forward, backward, report


def generators(n_max: int) -> list[Arrow]:
    """All generators with index up to ``n_max``."""
    out: list[Arrow] = [PHI, MOR]
    for n in range(1, n_max + 1):
        out += [j(n), q(n), s(n), pi(n)]
    return out


def chains_between(chains: Iterable[Chain], domain: str, codomain: str) -> list[Chain]:
    return [c for c in chains if c.domain == domain and c.codomain == codomain]
