"""Rank, k-nullity decisions with certificates, and rational bounds by reduction mod p."""
from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from ..exactlin import (
    GF,
    QQ,
    Field,
    Matrix,
    PrimeField,
    Subspace,
    _rref_rows,
    kernel_basis,
    projective_points,
)
from ..exterior import AltForm, contract, multi_indices, pair_constraint_tensor, render
from . import _kernel

__all__ = [
    "BudgetExceeded",
    "NullityCertificate",
    "NullityProof",
    "RationalBoundCertificate",
    "DEFAULT_BUDGET",
    "radical",
    "rank",
    "verify_witness",
    "verify_certificate",
    "decide_nullity_geq",
    "nullity_exact",
    "rational_witness",
    "certify_rational",
    "projective_count",
]

DEFAULT_BUDGET = 10**8
SCHEMA = "formlab-certificate/1"


class BudgetExceeded(RuntimeError):
    """Raised when a search needs more projective points than allowed."""

    def __init__(self, budget: int, needed: int):
        super().__init__(f"budget of {budget} projective points exceeded (space has {needed})")
        self.budget = budget
        self.needed = needed


def projective_count(q: int, n: int) -> int:
    return (q**n - 1) // (q - 1) if n > 0 else 0


def _vec_json(field: Field, v: Sequence) -> list:
    if field == QQ:
        return [int(x) if Fraction(x).denominator == 1 else str(Fraction(x)) for x in v]
    return [int(x) for x in v]


@dataclass(frozen=True)
class NullityCertificate:
    """Proof of ``null_k >= r`` (Witness) or of ``null_k < r`` (Exhausted)."""

    kind: str
    k: int
    r: int
    field: Field
    witness: Subspace | None = None
    stats: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("Witness", "Exhausted"):
            raise ValueError(f"unknown certificate kind {self.kind!r}")
        if self.kind == "Witness" and (self.witness is None or self.witness.dim != self.r):
            raise ValueError("a Witness certificate needs a witness of dimension r")
        if self.kind == "Exhausted" and not self.field.finite:
            raise ValueError("exhaustion is only possible over a finite field")

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "kind": self.kind,
            "k": self.k,
            "r": self.r,
            "field": self.field.label,
            "witness": [_vec_json(self.field, v) for v in self.witness.vectors] if self.witness else None,
            "stats": dict(self.stats),
        }


@dataclass(frozen=True)
class NullityProof:
    """Exact k-nullity: a witness at ``value`` and an exhaustion at ``value + 1``."""

    value: int
    lower: NullityCertificate
    upper: NullityCertificate | None  # None when value == n

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "kind": "Nullity",
            "k": self.lower.k,
            "value": self.value,
            "field": self.lower.field.label,
            "lower": self.lower.to_json(),
            "upper": self.upper.to_json() if self.upper else None,
        }


# -- linear maps built from contractions ---------------------------------------

def contraction_matrix(g: AltForm) -> Matrix:
    """Matrix of x ↦ ι_x g, rows indexed by ((s-1)-multi-index, component)."""
    field = g.field
    tails = multi_indices(g.n, g.s - 1)
    row_of = {J: i for i, J in enumerate(tails)}
    rows = [[field(0)] * g.n for _ in range(len(tails) * g.m)]
    for idx, val in g.terms:
        for t, a in enumerate(idx):
            J = idx[:t] + idx[t + 1:]
            base = row_of[J] * g.m
            for c in range(g.m):
                x = val[c] if t % 2 == 0 else field.neg(val[c])
                rows[base + c][a - 1] = field.reduce(rows[base + c][a - 1] + x)
    if not rows:
        return Matrix(field, (), g.n)
    return Matrix(field, tuple(tuple(r) for r in rows), g.n)


def radical(f: AltForm) -> Subspace:
    """{v : ι_v f = 0}, the largest W with f(W, K^n, ..., K^n) = 0."""
    if f.s == 0:
        return Subspace.full(f.field, f.n)
    return kernel_basis(contraction_matrix(f))


def rank(f: AltForm) -> int:
    return f.n - radical(f).dim


def _iterated_contraction(f: AltForm, vecs: Iterable[Sequence]) -> AltForm:
    g = f
    for v in vecs:
        g = contract(g, v)
    return g


def verify_witness(f: AltForm, k: int, W: Subspace) -> bool:
    """True iff f vanishes whenever k of its arguments are taken from W."""
    if k > f.s or k < 1:
        raise ValueError(f"need 1 <= k <= s, got k={k}, s={f.s}")
    if W.n != f.n or W.field != f.field:
        raise ValueError("witness lives in a different space")
    for combo in itertools.combinations(W.vectors, k):
        if not _iterated_contraction(f, combo).is_zero():
            return False
    return True


def verify_certificate(f: AltForm, cert: NullityCertificate) -> bool:
    if cert.kind == "Witness":
        return cert.witness.dim == cert.r and verify_witness(f, cert.k, cert.witness)
    return cert.stats.get("points") == projective_count(cert.field.p, f.n)


# -- decision procedures ----------------------------------------------------------

def _check_search_args(f: AltForm, k: int, r: int):
    if not isinstance(f.field, PrimeField):
        raise ValueError("nullity decisions need a finite field; reduce the form mod p first")
    if not 1 <= k <= f.s:
        raise ValueError(f"need 1 <= k <= s, got k={k}, s={f.s}")
    if not 0 <= r <= f.n:
        raise ValueError(f"need 0 <= r <= n, got r={r}, n={f.n}")


def _pair_search(f: AltForm, r: int, budget: int, threads: int) -> tuple[np.ndarray | None, int, int]:
    p, n = f.field.p, f.n
    T = np.ascontiguousarray(pair_constraint_tensor(f))
    total = projective_count(p, n)
    cap = min(total, budget)
    nodes = 0
    # fixed chunking keeps stats independent of the worker count
    chunk = 1 << 16
    starts = list(range(0, cap, chunk))
    width = max(threads, 1)

    def run(start):
        W = np.zeros((r, n), dtype=np.int64)
        idx, cnt = _kernel.search_range(T, p, r, start, min(start + chunk, cap), W)
        return idx, cnt, W

    pool = ThreadPoolExecutor(threads) if threads > 1 else None
    try:
        for wave in range(0, len(starts), width):
            batch = starts[wave: wave + width]
            results = list(pool.map(run, batch)) if pool else [run(s) for s in batch]
            for idx, cnt, W in results:
                nodes += cnt
                if idx >= 0:
                    return W, idx + 1, nodes
    finally:
        if pool:
            pool.shutdown()
    if cap < total:
        raise BudgetExceeded(budget, total)
    return None, total, nodes


def _general_search(f: AltForm, k: int, r: int, budget: int) -> tuple[list | None, int, int]:
    """Backtracking for arbitrary k on exact Python integers (small instances)."""
    field: PrimeField = f.field
    p, n = field.p, f.n
    total = projective_count(p, n)
    cap = min(total, budget)
    nodes = 0

    def constraint_rows(chosen: list, new) -> list[list]:
        # x must satisfy ι_x ι_{w_S} f = 0 for every (k-1)-subset S of chosen ∪ {new} containing new
        if k == 1:
            return []
        rows = []
        for S in itertools.combinations(chosen, k - 2):
            g = _iterated_contraction(f, list(S) + [new])
            if not g.is_zero():
                rows.extend(contraction_matrix(g).rows)
        return rows

    rad_rows = list(contraction_matrix(f).rows) if k == 1 else []

    def restrict(basis: list[list], rows: list[list]) -> list[list]:
        """{y in span(basis) : rows·y = 0}, RREF basis."""
        if not basis:
            return []
        if not rows:
            return basis
        C = [[field.reduce(sum(a * b for a, b in zip(row, bvec))) for bvec in basis] for row in rows]
        K = kernel_basis(Matrix(field, tuple(tuple(c) for c in C), len(basis)))
        vecs = [[field.reduce(sum(c * b[j] for c, b in zip(kv, basis))) for j in range(n)] for kv in K.vectors]
        rr, piv = _rref_rows(field, vecs, n)
        return rr[: len(piv)]

    def lead_of(v) -> int:
        return next(j for j, x in enumerate(v) if x != 0)

    def dfs(chosen: list[list], space: list[list]) -> list[list] | None:
        nonlocal nodes
        need = r - len(chosen) - 1
        d = len(space)
        pivs = [lead_of(b) for b in space]
        for l in range(d):
            if d - l - 1 < need:
                break
            if any(w[pivs[l]] != 0 for w in chosen):
                continue
            for tail in itertools.product(range(p), repeat=d - l - 1):
                x = list(space[l])
                for c, b in zip(tail, space[l + 1:]):
                    if c:
                        x = [field.reduce(a + c * bj) for a, bj in zip(x, b)]
                nodes += 1
                if need == 0:
                    return chosen + [x]
                sub = restrict(space[l + 1:], constraint_rows(chosen, x) + rad_rows)
                if len(sub) >= need:
                    found = dfs(chosen + [x], sub)
                    if found:
                        return found
        return None

    for idx, v in enumerate(projective_points(p, n)):
        if idx >= cap:
            raise BudgetExceeded(budget, total)
        nodes += 1
        v = list(v)
        if k == 1 and any(field.reduce(sum(a * b for a, b in zip(row, v))) for row in rad_rows):
            continue
        if r == 1:
            return [v], idx + 1, nodes
        lead = lead_of(v)
        if n - lead - 1 < r - 1:
            continue
        tail_space = [[int(j == i) for j in range(n)] for i in range(lead + 1, n)]
        space = restrict(tail_space, constraint_rows([], v) + rad_rows)
        if len(space) >= r - 1:
            found = dfs([v], space)
            if found:
                return found, idx + 1, nodes
    return None, total, nodes


def decide_nullity_geq(
    f: AltForm, k: int, r: int, budget: int = DEFAULT_BUDGET, threads: int = 1
) -> tuple[bool, NullityCertificate]:
    """Does some r-dimensional W satisfy f(W^k, K^n, ...) = 0 ?

    Returns (answer, certificate). Raises BudgetExceeded when more than
    ``budget`` first-row projective points would be needed.
    """
    _check_search_args(f, k, r)
    field = f.field
    if r == 0:
        return True, NullityCertificate("Witness", k, 0, field, Subspace.zero(field, f.n), {"points": 0, "nodes": 0})
    if k == 2:
        W, points, nodes = _pair_search(f, r, budget, max(1, threads))
        rows = None if W is None else [[int(x) for x in row] for row in W]
    else:
        rows, points, nodes = _general_search(f, k, r, budget)
    stats = {"points": int(points), "nodes": int(nodes)}
    if rows is None:
        return False, NullityCertificate("Exhausted", k, r, field, None, stats)
    witness = Subspace.span(field, f.n, rows)
    if witness.dim != r or not verify_witness(f, k, witness):
        raise RuntimeError("search produced an invalid witness")
    return True, NullityCertificate("Witness", k, r, field, witness, stats)


def nullity_exact(f: AltForm, k: int, budget: int = DEFAULT_BUDGET, threads: int = 1) -> tuple[int, NullityProof]:
    """Largest r with decide_nullity_geq true, with both bracketing certificates."""
    _check_search_args(f, k, 0)
    lower = None
    for r in range(1, f.n + 1):
        ok, cert = decide_nullity_geq(f, k, r, budget, threads)
        if not ok:
            if lower is None:
                lower = decide_nullity_geq(f, k, 0)[1]
            return r - 1, NullityProof(r - 1, lower, cert)
        lower = cert
    if lower is None:  # n == 0
        lower = decide_nullity_geq(f, k, 0)[1]
    return f.n, NullityProof(f.n, lower, None)


# -- rational forms -----------------------------------------------------------------

def rational_witness(f: AltForm, k: int = 2) -> Subspace:
    """A k-vanishing subspace over Q found greedily (a lower bound, not necessarily maximal)."""
    if f.field != QQ:
        raise ValueError("rational_witness works over Q")
    n = f.n
    if f.is_zero():
        return Subspace.full(QQ, n)
    rad = radical(f)

    def extend(start: list) -> list[list]:
        if k == 1:
            return list(rad.vectors)
        W = Subspace.span(QQ, n, list(rad.vectors) + start)
        while True:
            rows = []
            for S in itertools.combinations(W.vectors, k - 1):
                g = _iterated_contraction(f, S)
                rows.extend(contraction_matrix(g).rows)
            L = kernel_basis(Matrix(QQ, tuple(rows), n)) if rows else Subspace.full(QQ, n)
            new = next((v for v in L.vectors if not W.contains(v)), None)
            if new is None:
                return list(W.vectors)
            W = Subspace.span(QQ, n, list(W.vectors) + [list(new)])

    best: list = list(rad.vectors)
    for i in range(n):
        e = [0] * n
        e[i] = 1
        cand = extend([e])
        if len(cand) > len(best):
            best = cand
    W = Subspace.span(QQ, n, best)
    if not verify_witness(f, k, W):
        raise RuntimeError("greedy rational witness failed to verify")
    return W


@dataclass(frozen=True)
class Specialization:
    """Outcome at one prime. ``proof`` is None when the reduction is degenerate and the prime is skipped."""

    p: int
    null: int | None
    proof: NullityProof | None
    reason: str | None = None

    @property
    def skipped(self) -> bool:
        return self.proof is None

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "null": self.null,
            "skipped": self.reason,
            "proof": self.proof.to_json() if self.proof else None,
        }


@dataclass(frozen=True)
class RationalBoundCertificate:
    """Sandwich  dim(witness) <= null_k over Q <= min_p null_k over GF(p)."""

    form: AltForm
    k: int
    content: int
    witness: Subspace
    specializations: tuple[Specialization, ...]

    @property
    def lower(self) -> int:
        return self.witness.dim

    @property
    def upper(self) -> int:
        return min((s.null for s in self.specializations if not s.skipped), default=self.form.n)

    @property
    def value(self) -> int | None:
        return self.lower if self.lower == self.upper else None

    @property
    def primes(self) -> list[int]:
        return [s.p for s in self.specializations if not s.skipped]

    def to_json(self, include_form: bool = True) -> dict:
        out = {
            "schema": SCHEMA,
            "kind": "RationalBound",
            "k": self.k,
            "r": self.lower,
            "field": "Q",
            "witness": [_vec_json(QQ, v) for v in self.witness.vectors],
            "stats": {"points": sum(
                s.proof.upper.stats["points"] for s in self.specializations if s.proof and s.proof.upper
            )},
            "specializations": [s.to_json() for s in self.specializations],
            "conclusion": {"lower": self.lower, "upper": self.upper, "value": self.value},
            "content": self.content,
            "argument": (
                "The witness is verified over Q. Its saturated integer lattice reduces mod p "
                "to a subspace of the same dimension on which the reduced primitive form "
                "still vanishes, so null over GF(p) >= null over Q for every prime p."
            ),
        }
        if include_form:
            out["form"] = render(self.form)
        return out


def certify_rational(
    f: AltForm,
    primes: Iterable[int],
    witness: Subspace | None = None,
    k: int = 2,
    budget: int = DEFAULT_BUDGET,
    threads: int = 1,
) -> RationalBoundCertificate:
    """Bracket the k-nullity of an integral form over Q.

    The lower bound is a verified rational witness (``witness`` or a greedy one);
    the upper bound is the exact nullity of the primitive form reduced mod each p.
    Primes at which the primitive form loses rank are reported and skipped.
    """
    if f.field != QQ or not f.is_integral():
        raise ValueError("certify_rational needs an integer-coefficient form over Q")
    if witness is None:
        witness = rational_witness(f, k)
    if witness.field != QQ or witness.n != f.n:
        raise ValueError("witness must be a subspace of Q^n")
    if not verify_witness(f, k, witness):
        raise ValueError("witness does not satisfy the vanishing condition over Q")
    content = f.content()
    prim = f.primitive()
    rank_q = rank(f)
    specs = []
    for p in primes:
        fp = prim.over(GF(int(p)))
        rank_p = rank(fp)
        if rank_p < rank_q:
            # the reduction acquires a radical; p is a degenerate prime for this form
            specs.append(Specialization(int(p), None, None, f"rank drops from {rank_q} to {rank_p} mod {p}"))
            continue
        null, proof = nullity_exact(fp, k, budget, threads)
        specs.append(Specialization(int(p), null, proof))
    return RationalBoundCertificate(f, k, content, witness, tuple(specs))
