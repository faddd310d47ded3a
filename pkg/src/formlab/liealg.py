"""Root systems, Chevalley bases, Killing forms and the integer triple form of the compact real form.

Simple roots follow Bourbaki numbering. Structure constants are fixed by the
extraspecial-pair convention: N(α, β) = p + 1 > 0 on every extraspecial pair.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable

import numpy as np

from .analyze import DEFAULT_BUDGET, RationalBoundCertificate, certify_rational, verify_witness
from .exactlin import QQ, Subspace
from .exterior import AltForm, from_terms, render

Root = tuple[int, ...]

# closed-form dim g per type, used as an independent cross-check
DIMENSION = {
    "A": lambda r: r * (r + 2),
    "B": lambda r: r * (2 * r + 1),
    "C": lambda r: r * (2 * r + 1),
    "D": lambda r: r * (2 * r - 1),
    "E": lambda r: {6: 78, 7: 133, 8: 248}[r],
    "F": lambda r: 52,
    "G": lambda r: 14,
}


class LieConsistencyError(RuntimeError):
    """Jacobi, integrality or invariance failed; indicates a convention bug."""


def _check_type(type_label: str, r: int):
    ok = {
        "A": r >= 1,
        "B": r >= 2,
        "C": r >= 2,
        "D": r >= 4,
        "E": r in (6, 7, 8),
        "F": r == 4,
        "G": r == 2,
    }.get(type_label)
    if not ok:
        raise ValueError(f"no simple Lie algebra of type {type_label}{r}")


def parse_type(text: str) -> tuple[str, int]:
    """'A2' -> ('A', 2)."""
    text = text.strip().upper()
    if len(text) < 2 or not text[1:].isdigit():
        raise ValueError(f"expected a type like A2 or G2, got {text!r}")
    label, r = text[0], int(text[1:])
    _check_type(label, r)
    return label, r


def _gram(type_label: str, r: int) -> list[list[int]]:
    """Inner products (α_i, α_j) of the simple roots, short roots having length² 2."""
    B = [[0] * r for _ in range(r)]

    def link(i, j, v):
        B[i - 1][j - 1] = B[j - 1][i - 1] = v

    def chain(ids, v=-1):
        for a, b in zip(ids, ids[1:]):
            link(a, b, v)

    if type_label in "ADE":
        for i in range(r):
            B[i][i] = 2
        if type_label == "A":
            chain(range(1, r + 1))
        elif type_label == "D":
            chain(range(1, r))
            link(r - 2, r, -1)
        else:
            chain([1, 3, 4, 5, 6, 7, 8][: r - 1])
            link(2, 4, -1)
    elif type_label == "B":
        for i in range(r - 1):
            B[i][i] = 4
        B[r - 1][r - 1] = 2
        chain(range(1, r + 1), -2)
    elif type_label == "C":
        for i in range(r - 1):
            B[i][i] = 2
        B[r - 1][r - 1] = 4
        chain(range(1, r))
        link(r - 1, r, -2)
    elif type_label == "F":
        B[0][0] = B[1][1] = 4
        B[2][2] = B[3][3] = 2
        link(1, 2, -2)
        link(2, 3, -2)
        link(3, 4, -1)
    else:  # G
        B[0][0], B[1][1] = 2, 6
        link(1, 2, -3)
    return B


@dataclass(frozen=True)
class RootSystem:
    type_label: str
    rank: int
    gram: tuple[tuple[int, ...], ...]
    positive: tuple[Root, ...]  # by height, then descending lexicographic

    @property
    def label(self) -> str:
        return f"{self.type_label}{self.rank}"

    @property
    def simple(self) -> tuple[Root, ...]:
        return self.positive[: self.rank]

    @cached_property
    def roots(self) -> tuple[Root, ...]:
        return self.positive + tuple(neg(a) for a in self.positive)

    @cached_property
    def root_set(self) -> frozenset:
        return frozenset(self.roots)

    @property
    def dim(self) -> int:
        return len(self.roots) + self.rank

    def ip(self, a: Root, b: Root) -> int:
        G = self.gram
        return sum(a[i] * G[i][j] * b[j] for i in range(self.rank) for j in range(self.rank) if a[i] and b[j])

    def pairing(self, a: Root, i: int) -> int:
        """⟨a, α_i^∨⟩ = 2 (a, α_i) / (α_i, α_i)."""
        num = 2 * sum(a[j] * self.gram[j][i] for j in range(self.rank))
        d = self.gram[i][i]
        assert num % d == 0
        return num // d

    @cached_property
    def cartan_matrix(self) -> tuple[tuple[int, ...], ...]:
        """A[i][j] = ⟨α_i, α_j^∨⟩."""
        e = [tuple(int(t == i) for t in range(self.rank)) for i in range(self.rank)]
        return tuple(tuple(self.pairing(e[i], j) for j in range(self.rank)) for i in range(self.rank))

    def is_root(self, a: Root) -> bool:
        return a in self.root_set


def neg(a: Root) -> Root:
    return tuple(-x for x in a)


def add(a: Root, b: Root) -> Root:
    return tuple(x + y for x, y in zip(a, b))


def sub(a: Root, b: Root) -> Root:
    return tuple(x - y for x, y in zip(a, b))


def build_root_system(type_label: str, r: int) -> RootSystem:
    _check_type(type_label, r)
    gram = tuple(map(tuple, _gram(type_label, r)))
    proto = RootSystem(type_label, r, gram, ())
    simple = [tuple(int(t == i) for t in range(r)) for i in range(r)]
    found = set(simple)
    layer = list(simple)
    while layer:
        nxt = set()
        for b in layer:
            for i in range(r):
                # α_i-string through b: b - pα_i, ..., b + qα_i
                p = 0
                down = b
                while True:
                    down = sub(down, simple[i])
                    if down in found:
                        p += 1
                    else:
                        break
                q = p - proto.pairing(b, i)
                if q > 0:
                    nxt.add(add(b, simple[i]))
        nxt -= found
        found |= nxt
        layer = sorted(nxt)
    positive = tuple(sorted(found, key=lambda a: (sum(a), tuple(-x for x in a))))
    rs = RootSystem(type_label, r, gram, positive)
    if rs.dim != DIMENSION[type_label](r):
        raise LieConsistencyError(f"{rs.label}: root count gives dim {rs.dim}")
    return rs


# -- structure constants -------------------------------------------------------------

class _StructureConstants:
    """N(a, b) with [X_a, X_b] = N(a, b) X_{a+b}, from the extraspecial-pair convention."""

    def __init__(self, rs: RootSystem):
        self.rs = rs
        self.order = {a: i for i, a in enumerate(rs.positive)}
        self.special: dict[tuple[Root, Root], int] = {}
        for xi in rs.positive[rs.rank:]:
            pairs = [(a, sub(xi, a)) for a in rs.positive
                     if self.order[a] < self.order.get(sub(xi, a), -1)]
            a0, b0 = pairs[0]
            self.special[(a0, b0)] = self._p(a0, b0) + 1
            for a, b in pairs[1:]:
                self.special[(a, b)] = self._from_extraspecial(a, b, a0, b0)

    def _p(self, a: Root, b: Root) -> int:
        """Largest p with b - p·a a root."""
        p = 0
        while self.rs.is_root(sub(b, [(p + 1) * x for x in a])):
            p += 1
        return p

    def _from_extraspecial(self, a, b, a1, b1) -> int:
        rs = self.rs
        xi = add(a, b)
        total = Fraction(0)
        t = sub(b, a1)
        if rs.is_root(t):
            total += Fraction(self(b, neg(a1)) * self(a, neg(b1)), rs.ip(t, t))
        t = sub(a, a1)
        if rs.is_root(t):
            total += Fraction(self(neg(a1), a) * self(b, neg(b1)), rs.ip(t, t))
        val = Fraction(rs.ip(xi, xi)) * total / self.special[(a1, b1)]
        if val.denominator != 1:
            raise LieConsistencyError(f"non-integral N({a}, {b}) = {val}")
        return int(val)

    def __call__(self, a: Root, b: Root) -> int:
        rs = self.rs
        c = add(a, b)
        if not rs.is_root(c):
            return 0
        pa, pb = a in self.order, b in self.order
        if pa and pb:
            if self.order[a] < self.order[b]:
                return self.special[(a, b)]
            return -self.special[(b, a)]
        if not pa and not pb:
            return -self(neg(a), neg(b))
        if not pa:
            return -self(b, a)
        # a > 0 > b; with g = -c the three roots a, b, g sum to zero and
        # N(a,b)/(g,g) = N(b,g)/(a,a) = N(g,a)/(b,b)
        g = neg(c)
        if c in self.order:
            val = Fraction(rs.ip(c, c), rs.ip(a, a)) * self(b, g)
        else:
            val = Fraction(rs.ip(c, c), rs.ip(b, b)) * self(g, a)
        if val.denominator != 1:
            raise LieConsistencyError(f"non-integral N({a}, {b})")
        return int(val)


@dataclass(frozen=True, eq=False)
class ChevalleyData:
    """Chevalley basis H_1..H_r, X_α (positive roots in order), X_{-α} (same order).

    ``brackets[i, j]`` is the coordinate vector of [e_i, e_j]; ``killing`` the trace form.
    """

    root_system: RootSystem
    labels: tuple[str, ...]
    brackets: np.ndarray
    killing: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.labels)

    def ad(self, i: int) -> np.ndarray:
        return self.brackets[i].T

    def bracket(self, x, y) -> np.ndarray:
        return np.einsum("i,j,ijk->k", np.asarray(x), np.asarray(y), self.brackets)


def _root_label(a: Root) -> str:
    sign = "-" if any(x < 0 for x in a) else ""
    return f"X{sign}[{''.join(str(abs(x)) for x in a)}]"


def chevalley(rs: RootSystem) -> ChevalleyData:
    r, pos = rs.rank, rs.positive
    npos = len(pos)
    d = r + 2 * npos
    index = {a: r + t for t, a in enumerate(pos)}
    index.update({neg(a): r + npos + t for t, a in enumerate(pos)})
    roots = pos + tuple(neg(a) for a in pos)
    N = _StructureConstants(rs)
    C = np.zeros((d, d, d), dtype=np.int64)
    for i in range(r):
        for a in roots:
            k = index[a]
            C[i, k, k] = rs.pairing(a, i)
            C[k, i, k] = -C[i, k, k]
    for a in roots:
        ia = index[a]
        for b in roots:
            ib = index[b]
            if b == neg(a):
                # [X_a, X_{-a}] = H_a, the coroot 2a/(a,a) in the basis of simple coroots
                aa = rs.ip(a, a)
                for i in range(r):
                    h = Fraction(a[i] * rs.gram[i][i], aa)
                    if h.denominator != 1:
                        raise LieConsistencyError("non-integral coroot")
                    C[ia, ib, i] = int(h)
            else:
                n_ab = N(a, b)
                if n_ab:
                    C[ia, ib, index[add(a, b)]] = n_ab
    ad = np.transpose(C, (0, 2, 1))  # ad[i][k, j] = C[i, j, k]
    killing = np.einsum("ikl,jlk->ij", ad, ad)
    labels = tuple(f"H{i + 1}" for i in range(r)) + tuple(_root_label(a) for a in roots)
    cd = ChevalleyData(rs, labels, C, killing)
    _verify_chevalley(cd)
    return cd


def _verify_chevalley(cd: ChevalleyData):
    C = cd.brackets
    if not np.array_equal(C, -np.transpose(C, (1, 0, 2))):
        raise LieConsistencyError("bracket is not antisymmetric")
    ad = np.transpose(C, (0, 2, 1))
    # Jacobi in the form ad([e_i, e_j]) = [ad e_i, ad e_j]
    flat = ad.reshape(len(ad), -1)
    for i in range(len(ad)):
        lhs = (C[i] @ flat).reshape(ad.shape)
        if not np.array_equal(lhs, ad[i] @ ad - ad @ ad[i]):
            raise LieConsistencyError(f"Jacobi identity fails for {cd.root_system.label}")
    K = cd.killing
    if not np.array_equal(K, K.T):
        raise LieConsistencyError("Killing form not symmetric")
    # invariance κ([x,y],z) = κ(x,[y,z])
    left = np.einsum("xyk,kz->xyz", C, K)
    right = np.einsum("yzk,xk->xyz", C, K)
    if not np.array_equal(left, right):
        raise LieConsistencyError("Killing form not ad-invariant")


# -- compact real form -----------------------------------------------------------------

@dataclass(frozen=True)
class GaussQ:
    """Exact a + b·i with a, b rational."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __add__(self, o: "GaussQ") -> "GaussQ":
        return GaussQ(self.re + o.re, self.im + o.im)

    def __mul__(self, o: "GaussQ") -> "GaussQ":
        return GaussQ(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    def __bool__(self) -> bool:
        return bool(self.re or self.im)


ONE, I_UNIT = GaussQ(Fraction(1)), GaussQ(Fraction(0), Fraction(1))


@dataclass(frozen=True)
class CompactTripleForm:
    type_label: str
    rank: int
    form: AltForm
    cartan_witness: Subspace
    labels: tuple[str, ...]

    @property
    def n(self) -> int:
        return self.form.n

    def sidecar(self) -> dict:
        return {
            "algebra": f"{self.type_label}{self.rank}",
            "dim": self.n,
            "rank": self.rank,
            "basis": list(self.labels),
            "cartan_witness": [[int(x) for x in v] for v in self.cartan_witness.vectors],
            "content": self.form.content(),
        }


def compact_basis(cd: ChevalleyData) -> tuple[list[dict[int, GaussQ]], list[str]]:
    """iH_i, then per positive root the pair X_α − X_{−α}, i(X_α + X_{−α})."""
    rs = cd.root_system
    r, npos = rs.rank, len(rs.positive)
    vecs: list[dict[int, GaussQ]] = [{i: I_UNIT} for i in range(r)]
    labels = [f"iH{i + 1}" for i in range(r)]
    minus_one = GaussQ(Fraction(-1))
    for t, a in enumerate(rs.positive):
        p, m = r + t, r + npos + t
        tag = "".join(map(str, a))
        vecs.append({p: ONE, m: minus_one})
        vecs.append({p: I_UNIT, m: I_UNIT})
        labels += [f"U[{tag}]", f"V[{tag}]"]
    return vecs, labels


def compact_triple(cd: ChevalleyData) -> CompactTripleForm:
    """Ψ(x, y, z) = κ(x, [y, z]) on the compact basis, verified integral, real and alternating."""
    rs = cd.root_system
    d = cd.dim
    vecs, labels = compact_basis(cd)
    # Φ[a, b, c] = κ(e_a, [e_b, e_c]) on the Chevalley basis, sparse
    phi = np.einsum("bck,ak->abc", cd.brackets, cd.killing)
    support: list[list[tuple[int, GaussQ]]] = [[] for _ in range(d)]
    for x, v in enumerate(vecs):
        for a, c in v.items():
            support[a].append((x, c))
    acc: dict[tuple[int, int, int], GaussQ] = {}
    for a, b, c in zip(*np.nonzero(phi)):
        val = GaussQ(Fraction(int(phi[a, b, c])))
        for x, cx in support[a]:
            for y, cy in support[b]:
                for z, cz in support[c]:
                    key = (x, y, z)
                    acc[key] = acc.get(key, GaussQ()) + cx * cy * cz * val
    terms = []
    for (x, y, z), v in acc.items():
        if not v:
            continue
        if v.im != 0 or v.re.denominator != 1:
            raise LieConsistencyError(f"coefficient {v} at {(x, y, z)} is not an integer")
        if x < y < z:
            terms.append(((x + 1, y + 1, z + 1), int(v.re)))
    form = from_terms(3, d, 1, QQ, terms)
    # alternation: every ordered value must equal the signed sorted value
    for (x, y, z), v in acc.items():
        want = form.coeff((x + 1, y + 1, z + 1))[0]
        if v.re != want or v.im != 0:
            raise LieConsistencyError(f"form is not alternating at {(x, y, z)}")
    r = rs.rank
    witness = Subspace.span(QQ, d, [[int(j == i) for j in range(d)] for i in range(r)])
    if not verify_witness(form, 2, witness):
        raise LieConsistencyError("Cartan directions are not 2-vanishing")
    return CompactTripleForm(rs.type_label, r, form, witness, tuple(labels))


def lie_triple_form(type_label: str, r: int) -> CompactTripleForm:
    return compact_triple(chevalley(build_root_system(type_label, r)))


def lie_nullity_certificate(
    type_label: str,
    r: int,
    primes: Iterable[int],
    budget: int = DEFAULT_BUDGET,
    threads: int = 1,
) -> RationalBoundCertificate:
    ct = lie_triple_form(type_label, r)
    return certify_rational(ct.form, primes, witness=ct.cartan_witness, k=2, budget=budget, threads=threads)


def export(ct: CompactTripleForm) -> tuple[str, str]:
    """(form file text, sidecar JSON text)."""
    return render(ct.form), json.dumps(ct.sidecar(), indent=2) + "\n"
