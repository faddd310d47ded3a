"""Alternating s-forms  Ψ: ⋀^s K^n → K^m  with sparse coefficient storage.

Indices are 1-based throughout (``e1..en``). A form is stored by its values on
strictly increasing multi-indices; anything given out of order picks up the
permutation sign once, at construction.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from typing import Iterable, Sequence

import numpy as np

from .exactlin import QQ, Field, Matrix, PrimeField, det, inverse, parse_field

__all__ = [
    "AltForm",
    "FormSyntaxError",
    "from_terms",
    "monomial_form",
    "evaluate",
    "contract",
    "a_matrix",
    "gl_act",
    "random_form",
    "render",
    "parse",
    "multi_indices",
    "pair_constraint_tensor",
    "to_dense",
]

MultiIndex = tuple[int, ...]


class FormSyntaxError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


def sort_with_sign(idx: Sequence[int]) -> tuple[int, MultiIndex]:
    """Sort an index tuple; return (sign of the sorting permutation, sorted). Sign 0 on repeats."""
    idx = list(idx)
    if len(set(idx)) != len(idx):
        return 0, tuple(sorted(idx))
    sign = 1
    # insertion sort counts transpositions
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(idx)


def multi_indices(n: int, s: int) -> list[MultiIndex]:
    """Strictly increasing 1-based s-tuples in lexicographic order."""
    return list(itertools.combinations(range(1, n + 1), s))


@dataclass(frozen=True)
class AltForm:
    s: int
    n: int
    m: int
    field: Field
    terms: tuple[tuple[MultiIndex, tuple], ...]

    def __post_init__(self):
        if self.s < 0 or self.n < 0 or self.m < 1:
            raise ValueError(f"bad shape s={self.s} n={self.n} m={self.m}")
        if self.s > self.n and self.terms:
            raise ValueError("arity exceeds dimension")
        prev = None
        for idx, val in self.terms:
            if len(idx) != self.s or any(not (1 <= i <= self.n) for i in idx):
                raise ValueError(f"invalid multi-index {idx} for s={self.s}, n={self.n}")
            if any(a >= b for a, b in zip(idx, idx[1:])):
                raise ValueError(f"multi-index {idx} is not strictly increasing")
            if prev is not None and idx <= prev:
                raise ValueError("terms must be sorted and unique")
            if len(val) != self.m or all(x == 0 for x in val):
                raise ValueError(f"bad value {val} at {idx}")
            prev = idx

    @cached_property
    def coeffs(self) -> dict[MultiIndex, tuple]:
        return dict(self.terms)

    def coeff(self, idx: Sequence[int]) -> tuple:
        """Value on e_{i1},...,e_{is} for any index order (sign applied)."""
        sign, key = sort_with_sign(idx)
        zero = (self.field(0),) * self.m
        if sign == 0 or key not in self.coeffs:
            return zero
        v = self.coeffs[key]
        return v if sign > 0 else tuple(self.field.neg(x) for x in v)

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other: "AltForm") -> "AltForm":
        if (self.s, self.n, self.m, self.field) != (other.s, other.n, other.m, other.field):
            raise ValueError("forms of different shape or field")
        return from_terms(self.s, self.n, self.m, self.field, list(self.terms) + list(other.terms))

    def scale(self, c) -> "AltForm":
        c = self.field(c)
        red = self.field.reduce
        return from_terms(self.s, self.n, self.m, self.field,
                          [(i, tuple(red(c * x) for x in v)) for i, v in self.terms])

    def is_integral(self) -> bool:
        return self.field == QQ and all(Fraction(x).denominator == 1 for _, v in self.terms for x in v)

    def content(self) -> int:
        """gcd of all coefficients of an integral form (0 for the zero form)."""
        if not self.is_integral():
            raise ValueError("content is defined for integral forms over Q")
        return reduce(math.gcd, (abs(int(x)) for _, v in self.terms for x in v), 0)

    def primitive(self) -> "AltForm":
        c = self.content()
        return self if c in (0, 1) else self.scale(Fraction(1, c))

    def over(self, field: Field) -> "AltForm":
        """Same coefficients read in another field (e.g. reduction of an integral form mod p)."""
        if field == self.field:
            return self
        if self.field != QQ:
            raise ValueError(f"cannot move a form over {self.field!r} to {field!r}")
        return from_terms(self.s, self.n, self.m, field,
                          [(i, tuple(field(x) for x in v)) for i, v in self.terms])

    def __repr__(self) -> str:
        body = " + ".join(
            f"{v[0] if self.m == 1 else list(v)}*e{''.join(map(str, i)) if self.n < 10 else i}"
            for i, v in self.terms
        ) or "0"
        return f"AltForm(s={self.s}, n={self.n}, m={self.m}, {self.field!r}: {body})"


def from_terms(s: int, n: int, m: int, field: Field, terms: Iterable) -> AltForm:
    """Build a form from (index-tuple, value) pairs; value is a scalar when m == 1."""
    acc: dict[MultiIndex, list] = {}
    for idx, val in terms:
        idx = tuple(int(i) for i in idx)
        if len(idx) != s:
            raise ValueError(f"term {idx} does not have {s} indices")
        if any(not (1 <= i <= n) for i in idx):
            raise ValueError(f"index out of range 1..{n} in term {idx}")
        sign, key = sort_with_sign(idx)
        if sign == 0:
            raise ValueError(f"repeated index in term {idx}")
        vec = (val,) if m == 1 and not isinstance(val, (tuple, list)) else tuple(val)
        if len(vec) != m:
            raise ValueError(f"term {idx} has {len(vec)} components, expected {m}")
        slot = acc.setdefault(key, [field(0)] * m)
        for c, x in enumerate(vec):
            slot[c] = field.reduce(slot[c] + sign * field(x))
    clean = tuple((k, tuple(v)) for k, v in sorted(acc.items()) if any(x != 0 for x in v))
    return AltForm(s, n, m, field, clean)


def monomial_form(n: int, field: Field, *indices: Sequence[int], s: int | None = None) -> AltForm:
    """Sum of basis covectors, e.g. ``monomial_form(6, F, (1,2,3), (4,5,6))``."""
    if s is None:
        if not indices:
            raise ValueError("give s for the zero form")
        s = len(indices[0])
    return from_terms(s, n, 1, field, [(i, 1) for i in indices])


def _check_vectors(f: AltForm, vectors: Sequence[Sequence]) -> list[list]:
    out = []
    for v in vectors:
        if len(v) != f.n:
            raise ValueError(f"vector of length {len(v)} for a form on K^{f.n}")
        out.append([f.field(x) for x in v])
    return out


def _small_det(field: Field, rows: list[list]):
    k = len(rows)
    if k == 0:
        return field(1)
    if k == 1:
        return rows[0][0]
    if k == 2:
        return field.reduce(rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0])
    return det(Matrix(field, tuple(tuple(r) for r in rows), k))


def evaluate(f: AltForm, *vectors: Sequence) -> tuple:
    """f(v1, ..., vs) as an m-vector."""
    if len(vectors) != f.s:
        raise ValueError(f"expected {f.s} arguments, got {len(vectors)}")
    vecs = _check_vectors(f, vectors)
    red = f.field.reduce
    out = [f.field(0)] * f.m
    for idx, val in f.terms:
        d = _small_det(f.field, [[v[i - 1] for i in idx] for v in vecs])
        if d != 0:
            for c in range(f.m):
                out[c] = red(out[c] + d * val[c])
    return tuple(out)


def contract(f: AltForm, v: Sequence) -> AltForm:
    """Interior product ι_v f, the (s-1)-form w ↦ f(v, w)."""
    if f.s == 0:
        raise ValueError("cannot contract a 0-form")
    (v,) = _check_vectors(f, [v])
    field = f.field
    terms = []
    for idx, val in f.terms:
        for t, i in enumerate(idx):
            a = v[i - 1]
            if a == 0:
                continue
            c = a if t % 2 == 0 else field.neg(a)
            terms.append((idx[:t] + idx[t + 1:], tuple(field.reduce(c * x) for x in val)))
    return from_terms(f.s - 1, f.n, f.m, field, terms)


def a_matrix(f: AltForm, v: Sequence) -> Matrix:
    """The skew n×n matrix A(v) with A[i][j] = f(v, e_i, e_j)."""
    if f.s != 3 or f.m != 1:
        raise ValueError("a_matrix needs a scalar-valued 3-form")
    g = contract(f, v)
    field = f.field
    rows = [[field(0)] * f.n for _ in range(f.n)]
    for (i, j), (x,) in g.terms:
        rows[i - 1][j - 1] = x
        rows[j - 1][i - 1] = field.neg(x)
    return Matrix(field, tuple(tuple(r) for r in rows), f.n)


def gl_act(g: Matrix, f: AltForm) -> AltForm:
    """(g·f)(x1..xs) = f(g⁻¹x1, ..., g⁻¹xs)."""
    if g.shape != (f.n, f.n):
        raise ValueError(f"need an {f.n}x{f.n} matrix")
    if g.field != f.field:
        raise ValueError("field mismatch")
    h = inverse(g)  # raises on singular g
    cols = [[h.rows[r][c] for r in range(f.n)] for c in range(f.n)]
    terms = []
    for idx in multi_indices(f.n, f.s):
        val = evaluate(f, *[cols[i - 1] for i in idx])
        if any(x != 0 for x in val):
            terms.append((idx, val))
    return from_terms(f.s, f.n, f.m, f.field, terms)


def random_form(s: int, n: int, m: int, field: Field, seed) -> AltForm:
    """Independently uniform coefficients on every multi-index.

    ``seed`` is anything ``numpy.random.default_rng`` accepts, or a Generator.
    """
    if not isinstance(field, PrimeField):
        raise ValueError("random forms need a finite field")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    idxs = multi_indices(n, s)
    vals = rng.integers(0, field.p, size=(len(idxs), m))
    return from_terms(s, n, m, field, [(i, tuple(int(x) for x in row)) for i, row in zip(idxs, vals)])


# -- dense views used by the enumeration kernels ---------------------------------

def to_dense(f: AltForm) -> np.ndarray:
    """Full alternating tensor of shape (n,)*s + (m,), int64 residues (finite fields only)."""
    if not isinstance(f.field, PrimeField):
        raise ValueError("dense int64 view needs a finite field")
    p = f.field.p
    out = np.zeros((f.n,) * f.s + (f.m,), dtype=np.int64)
    perms = [(_perm_parity(pi), pi) for pi in itertools.permutations(range(f.s))]
    for idx, val in f.terms:
        z = np.array(val, dtype=np.int64)
        for sign, pi in perms:
            out[tuple(idx[t] - 1 for t in pi)] = z if sign > 0 else (-z) % p
    return out


def _perm_parity(pi: Sequence[int]) -> int:
    return sort_with_sign(pi)[0]


def pair_constraint_tensor(f: AltForm) -> np.ndarray:
    """Tensor T of shape (n, R, n) with (Σ_a v_a T[a]) x = 0  ⇔  ι_x ι_v f = 0.

    Rows are indexed by (J, c): J an (s-2)-multi-index, c a codomain component.
    """
    if f.s < 2:
        raise ValueError("pair constraints need arity >= 2")
    dense = to_dense(f)
    n = f.n
    tail = multi_indices(n, f.s - 2)
    R = len(tail) * f.m
    T = np.zeros((n, R, n), dtype=np.int64)
    for jpos, J in enumerate(tail):
        sl = dense[(slice(None), slice(None)) + tuple(j - 1 for j in J)]  # (n, n, m)
        for c in range(f.m):
            T[:, jpos * f.m + c, :] = sl[:, :, c]
    return T


# -- text format -----------------------------------------------------------------

def _fmt(field: Field, x) -> str:
    if field == QQ:
        x = Fraction(x)
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return str(int(x))


def render(f: AltForm) -> str:
    lines = [
        "altform v1",
        "field Q" if f.field == QQ else f"field gf {f.field.p}",
        f"arity {f.s}",
        f"dim {f.n}",
        f"codim {f.m}",
    ]
    for idx, val in f.terms:
        lines.append("term " + " ".join(map(str, idx)) + " " + " ".join(_fmt(f.field, x) for x in val))
    return "\n".join(lines) + "\n"


def _header_int(lineno: int, line: str, key: str) -> int:
    parts = line.split()
    if len(parts) != 2 or parts[0] != key:
        raise FormSyntaxError(lineno, f"expected '{key} <int>', got {line!r}")
    try:
        val = int(parts[1])
    except ValueError:
        raise FormSyntaxError(lineno, f"expected an integer after '{key}'") from None
    if val < 0:
        raise FormSyntaxError(lineno, f"negative {key}")
    return val


def parse(text: str) -> AltForm:
    lines = [(i + 1, ln.strip()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, ln) for i, ln in lines if ln and not ln.startswith("#")]
    if len(lines) < 5:
        raise FormSyntaxError(lines[-1][0] if lines else 1, "truncated header")
    (l1, magic), (l2, fline) = lines[0], lines[1]
    if magic != "altform v1":
        raise FormSyntaxError(l1, f"expected 'altform v1', got {magic!r}")
    parts = fline.split()
    if not parts or parts[0] != "field":
        raise FormSyntaxError(l2, f"expected a field line, got {fline!r}")
    try:
        field = parse_field(" ".join(parts[1:]))
    except (ValueError, TypeError) as exc:
        raise FormSyntaxError(l2, str(exc)) from None
    s = _header_int(*lines[2], "arity")
    n = _header_int(*lines[3], "dim")
    m = _header_int(*lines[4], "codim")
    if m < 1:
        raise FormSyntaxError(lines[4][0], "codim must be >= 1")
    terms = []
    for lineno, ln in lines[5:]:
        parts = ln.split()
        if parts[0] != "term" or len(parts) != 1 + s + m:
            raise FormSyntaxError(lineno, f"expected 'term' with {s} indices and {m} coefficients")
        try:
            idx = tuple(int(x) for x in parts[1: 1 + s])
        except ValueError:
            raise FormSyntaxError(lineno, "indices must be integers") from None
        try:
            val = tuple(field(Fraction(x)) for x in parts[1 + s:])
        except (ValueError, ZeroDivisionError) as exc:
            raise FormSyntaxError(lineno, f"bad coefficient: {exc}") from None
        if any(not (1 <= i <= n) for i in idx):
            raise FormSyntaxError(lineno, f"index out of range 1..{n} in term {idx}")
        if len(set(idx)) != s:
            raise FormSyntaxError(lineno, f"repeated index in term {idx}")
        terms.append((idx, val))
    return from_terms(s, n, m, field, terms)
