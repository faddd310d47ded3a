"""Spans ι(V) = ⋀^k V ∧ ⋀^{s-k} K^n inside ⋀^s K^n, Plücker coordinates, and the membership criterion.

Coordinates on ⋀^s K^n are indexed by strictly increasing multi-indices in
lexicographic order, the same convention as :mod:`formlab.exterior`.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb

import numpy as np

from .exactlin import Field, Matrix, PrimeField, Subspace, det, gaussian_binomial, rref_matrices
from .exterior import AltForm, multi_indices, sort_with_sign

GRASS_CAP = 2_000_000


class EnumerationCapExceeded(RuntimeError):
    pass


def iota_dim(n: int, s: int, k: int, r: int) -> int:
    """Dimension of ι(V) for any r-dimensional V ⊂ K^n."""
    if not (1 <= k <= s <= n and k <= r <= n):
        raise ValueError(f"need 1 <= k <= s <= n and k <= r <= n, got n={n}, s={s}, k={k}, r={r}")
    return sum(comb(i - 1, k - 1) * comb(n - i, s - k) for i in range(k, r + 1))


def _minors(field: Field, rows: list, k: int) -> dict[tuple, object]:
    """k×k minors of the matrix formed by ``rows`` (exactly k rows), keyed by 1-based column sets."""
    n = len(rows[0])
    out = {}
    for cols in itertools.combinations(range(n), k):
        m = det(Matrix.of(field, [[row[c] for c in cols] for row in rows]))
        if m != 0:
            out[tuple(c + 1 for c in cols)] = m
    return out


@dataclass(frozen=True)
class IotaSpan:
    V: Subspace
    k: int
    s: int
    span: Subspace  # inside K^N, N = C(n, s)

    @property
    def dim(self) -> int:
        return self.span.dim


def iota_generators(V: Subspace, k: int, s: int) -> list[list]:
    """Coordinates of v_{i1}∧..∧v_{ik}∧e_{j1}∧..∧e_{j(s-k)} for basis vectors of V."""
    field, n = V.field, V.n
    basis = multi_indices(n, s)
    pos = {I: t for t, I in enumerate(basis)}
    gens = []
    for rows in itertools.combinations(V.vectors, k):
        w = _minors(field, list(rows), k)
        for J in multi_indices(n, s - k):
            g = [field(0)] * len(basis)
            for K, c in w.items():
                sign, I = sort_with_sign(K + J)
                if sign:
                    g[pos[I]] = field.reduce(g[pos[I]] + sign * c)
            if any(x != 0 for x in g):
                gens.append(g)
    return gens


def iota_span(V: Subspace, k: int, s: int) -> IotaSpan:
    r = V.dim
    expected = iota_dim(V.n, s, k, r)
    span = Subspace.span(V.field, comb(V.n, s), iota_generators(V, k, s))
    if span.dim != expected:
        raise AssertionError(f"dim ι(V) = {span.dim}, but the closed form gives {expected}")
    return IotaSpan(V, k, s, span)


@dataclass(frozen=True)
class PluckerVector:
    d: int
    N: int
    field: Field
    coords: tuple  # over all d-subsets of 1..N in lexicographic order

    def __getitem__(self, idx) -> object:
        """P_{i1..id} for 1-based indices in any order (alternating)."""
        sign, key = sort_with_sign(tuple(idx))
        if sign == 0:
            return self.field(0)
        val = self.coords[_subset_rank(key, self.N)]
        return val if sign > 0 else self.field.neg(val)

    def nonzero(self) -> dict[tuple, object]:
        return {I: c for I, c in zip(itertools.combinations(range(1, self.N + 1), self.d), self.coords) if c != 0}

    def three_term_relations_hold(self) -> bool:
        """P_{Sab}P_{Scd} - P_{Sac}P_{Sbd} + P_{Sad}P_{Sbc} = 0 for all S of size d-2 and a<b<c<d."""
        if self.d < 2 or self.N < 4:
            return True
        F = self.field
        for S in itertools.combinations(range(1, self.N + 1), self.d - 2):
            rest = [x for x in range(1, self.N + 1) if x not in S]
            for a, b, c, e in itertools.combinations(rest, 4):
                val = (self[S + (a, b)] * self[S + (c, e)] - self[S + (a, c)] * self[S + (b, e)]
                       + self[S + (a, e)] * self[S + (b, c)])
                if F.reduce(val) != 0:
                    return False
        return True


def _subset_rank(key: tuple, N: int) -> int:
    """Position of a 1-based increasing tuple among all subsets of its size, lexicographically."""
    d = len(key)
    rank, prev = 0, 0
    for t, x in enumerate(key):
        for y in range(prev + 1, x):
            rank += comb(N - y, d - t - 1)
        prev = x
    return rank


def plucker(W: Subspace) -> PluckerVector:
    """Minors of the reduced echelon basis, scaled so the first nonzero coordinate is 1."""
    d = W.dim
    if d == 0:
        raise ValueError("Plücker coordinates need a nonzero subspace")
    field, rows = W.field, [list(v) for v in W.vectors]
    coords = [det(Matrix.of(field, [[row[c] for c in cols] for row in rows]))
              for cols in itertools.combinations(range(W.n), d)]
    lead = next(c for c in coords if c != 0)
    inv = field.inv(lead)
    return PluckerVector(d, W.n, field, tuple(field.reduce(c * inv) for c in coords))


# -- the membership criterion, by enumeration ----------------------------------------

def _batched_det(M: np.ndarray, p: int) -> np.ndarray:
    """Determinants mod p of a stack of small square int64 matrices (Leibniz expansion)."""
    k = M.shape[-1]
    out = np.zeros(M.shape[:-2], dtype=np.int64)
    for perm in itertools.permutations(range(k)):
        sign = sort_with_sign(tuple(x + 1 for x in perm))[0]
        term = np.ones(M.shape[:-2], dtype=np.int64)
        for i, j in enumerate(perm):
            term = term * M[..., i, j] % p
        out = (out + sign * term) % p
    return out


def kernel_functionals(f: AltForm) -> np.ndarray:
    """The m × C(n,s) coefficient matrix whose kernel is Ker(f) ⊂ ⋀^s K^n."""
    basis = multi_indices(f.n, f.s)
    out = np.zeros((f.m, len(basis)), dtype=np.int64)
    pos = {I: t for t, I in enumerate(basis)}
    for idx, val in f.terms:
        out[:, pos[idx]] = [int(x) for x in val]
    return out


def check_iff(f: AltForm, k: int, r: int, cap: int = GRASS_CAP) -> bool:
    """Is there V ∈ G_r(K^n) with ι(V) ⊆ Ker(f)?  Decided by enumerating G_r(K^n)."""
    if not isinstance(f.field, PrimeField):
        raise ValueError("check_iff enumerates a Grassmannian over a finite field")
    if not (1 <= k <= f.s and 0 <= r <= f.n):
        raise ValueError("need 1 <= k <= s and 0 <= r <= n")
    p, n, s = f.field.p, f.n, f.s
    if r < k or f.is_zero():
        return True  # ι(V) = 0 when r < k
    count = gaussian_binomial(n, r, p)
    if count > cap:
        raise EnumerationCapExceeded(f"G_{r}(GF({p})^{n}) has {count} points, cap is {cap}")
    F = kernel_functionals(f)
    # pairing of a k-vector coordinate K with a completion J: column of F at K ∪ J with sign
    kidx, jidx = multi_indices(n, k), multi_indices(n, s - k)
    pos = {I: t for t, I in enumerate(multi_indices(n, s))}
    P = np.zeros((len(kidx), len(jidx) * f.m), dtype=np.int64)
    for a, K in enumerate(kidx):
        for b, J in enumerate(jidx):
            sign, I = sort_with_sign(K + J)
            if sign:
                P[a, b * f.m:(b + 1) * f.m] = (sign * F[:, pos[I]]) % p
    cols = np.array([[c - 1 for c in K] for K in kidx], dtype=np.int64)
    grass = rref_matrices(p, n, r)
    for lo in range(0, count, 8192):
        Vs = grass[lo: lo + 8192]
        ok = np.ones(len(Vs), dtype=bool)
        for rows in itertools.combinations(range(r), k):
            sub = Vs[:, list(rows), :]  # (c, k, n)
            # minors on every k-subset of columns: (c, C(n,k))
            minors = _batched_det(np.transpose(sub[:, :, cols], (0, 2, 1, 3)), p)
            ok &= ~((minors @ P) % p).any(axis=1)
            if not ok.any():
                break
        if ok.any():
            return True
    return False
