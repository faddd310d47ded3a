"""Exact scalars and linear algebra over Q and odd prime fields.

Elements of GF(p) are plain ``int`` residues in ``[0, p)``; rationals are
``fractions.Fraction``. Matrices and subspaces are immutable values.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

__all__ = [
    "Field",
    "PrimeField",
    "Rationals",
    "QQ",
    "GF",
    "parse_field",
    "Matrix",
    "Subspace",
    "rref",
    "kernel_basis",
    "span_intersect_and_sum",
    "det",
    "inverse",
    "gaussian_binomial",
    "rref_matrices",
    "projective_points",
    "random_invertible",
]

P_MAX = 2**31


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    i = 3
    while i * i <= p:
        if p % i == 0:
            return False
        i += 2
    return True


class Field:
    """Common interface of the two supported scalar domains."""

    finite: bool = False

    def __call__(self, x):
        raise NotImplementedError

    def reduce(self, x):
        raise NotImplementedError

    def inv(self, x):
        raise NotImplementedError

    @property
    def label(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class PrimeField(Field):
    p: int

    finite = True

    def __post_init__(self):
        if not isinstance(self.p, (int, np.integer)) or isinstance(self.p, bool):
            raise TypeError(f"modulus must be an integer, got {self.p!r}")
        if self.p == 2:
            raise ValueError("characteristic 2 is not supported")
        if not (3 <= self.p < P_MAX) or not _is_prime(int(self.p)):
            raise ValueError(f"modulus must be an odd prime below 2**31, got {self.p}")
        object.__setattr__(self, "p", int(self.p))

    def __call__(self, x) -> int:
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise ZeroDivisionError(f"{x} has no image in GF({self.p})")
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        if isinstance(x, str):
            return self(Fraction(x))
        return int(x) % self.p

    def reduce(self, x) -> int:
        return x % self.p

    def inv(self, x) -> int:
        if x % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(int(x), -1, self.p)

    def neg(self, x) -> int:
        return -x % self.p

    def elements(self) -> range:
        return range(self.p)

    def signed(self, x) -> int:
        """Symmetric representative in (-p/2, p/2)."""
        x %= self.p
        return x - self.p if x > self.p // 2 else x

    @property
    def label(self) -> str:
        return f"gf:{self.p}"

    def __repr__(self) -> str:
        return f"GF({self.p})"


@dataclass(frozen=True)
class Rationals(Field):
    finite = False

    def __call__(self, x) -> Fraction:
        return Fraction(x)

    def reduce(self, x) -> Fraction:
        return x if isinstance(x, Fraction) else Fraction(x)

    def inv(self, x) -> Fraction:
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / Fraction(x)

    def neg(self, x) -> Fraction:
        return -x

    @property
    def label(self) -> str:
        return "Q"

    def __repr__(self) -> str:
        return "QQ"


QQ = Rationals()


@lru_cache(maxsize=None)
def GF(p: int) -> PrimeField:
    return PrimeField(p)


def parse_field(text: str) -> Field:
    """Accepts ``Q``, ``gf:3``, ``gf 3``, ``GF(3)``."""
    t = text.strip().lower().replace("(", ":").replace(")", "").replace(" ", ":")
    if t in ("q", "qq"):
        return QQ
    if t.startswith("gf:"):
        try:
            return GF(int(t[3:]))
        except ValueError as exc:
            raise ValueError(f"bad field {text!r}: {exc}") from None
    raise ValueError(f"unknown field {text!r}")


@dataclass(frozen=True)
class Matrix:
    field: Field
    rows: tuple[tuple, ...]
    ncols: int

    @classmethod
    def of(cls, field: Field, rows: Iterable[Iterable], ncols: int | None = None) -> "Matrix":
        data = tuple(tuple(field(x) for x in row) for row in rows)
        if ncols is None:
            if not data:
                raise ValueError("ncols is required for a matrix with no rows")
            ncols = len(data[0])
        if any(len(r) != ncols for r in data):
            raise ValueError("ragged matrix")
        return cls(field, data, ncols)

    @classmethod
    def zeros(cls, field: Field, nrows: int, ncols: int) -> "Matrix":
        z = field(0)
        return cls(field, tuple((z,) * ncols for _ in range(nrows)), ncols)

    @classmethod
    def identity(cls, field: Field, n: int) -> "Matrix":
        return cls.of(field, [[int(i == j) for j in range(n)] for i in range(n)], n)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def transpose(self) -> "Matrix":
        cols = tuple(tuple(r[j] for r in self.rows) for j in range(self.ncols))
        return Matrix(self.field, cols, self.nrows)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        red = self.field.reduce
        cols = list(zip(*other.rows)) if other.rows else [()] * other.ncols
        out = tuple(
            tuple(red(sum(a * b for a, b in zip(row, col))) for col in cols)
            for row in self.rows
        )
        return Matrix(self.field, out, other.ncols)

    def apply(self, v: Sequence) -> tuple:
        """Matrix-vector product."""
        if len(v) != self.ncols:
            raise ValueError("vector length mismatch")
        red = self.field.reduce
        return tuple(red(sum(a * b for a, b in zip(row, v))) for row in self.rows)

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.rows for x in row)

    def tolist(self) -> list[list]:
        return [list(r) for r in self.rows]


def _rref_rows(field: Field, rows: list[list], ncols: int) -> tuple[list[list], list[int]]:
    """In-place reduced row echelon form of a list-of-lists; returns (rows, pivots)."""
    red = field.reduce
    pivots: list[int] = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = field.inv(rows[r][c])
        prow = [red(x * inv) for x in rows[r]]
        rows[r] = prow
        for i in range(nrows):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [red(a - f * b) for a, b in zip(rows[i], prow)]
        pivots.append(c)
        r += 1
    return rows, pivots


def rref(m: Matrix) -> tuple[Matrix, int, list[int]]:
    rows, pivots = _rref_rows(m.field, [list(r) for r in m.rows], m.ncols)
    return Matrix(m.field, tuple(tuple(r) for r in rows), m.ncols), len(pivots), pivots


def det(m: Matrix):
    if m.nrows != m.ncols:
        raise ValueError("determinant of a non-square matrix")
    field, red = m.field, m.field.reduce
    rows = [list(r) for r in m.rows]
    n = len(rows)
    d = field(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if rows[i][c] != 0), None)
        if piv is None:
            return field(0)
        if piv != c:
            rows[c], rows[piv] = rows[piv], rows[c]
            d = red(-d)
        d = red(d * rows[c][c])
        inv = field.inv(rows[c][c])
        for i in range(c + 1, n):
            if rows[i][c] != 0:
                f = red(rows[i][c] * inv)
                rows[i] = [red(a - f * b) for a, b in zip(rows[i], rows[c])]
    return d


def inverse(m: Matrix) -> Matrix:
    n = m.nrows
    if n != m.ncols:
        raise ValueError("inverse of a non-square matrix")
    one, zero = m.field(1), m.field(0)
    aug = [list(r) + [one if i == j else zero for j in range(n)] for i, r in enumerate(m.rows)]
    rows, pivots = _rref_rows(m.field, aug, 2 * n)
    if pivots[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return Matrix(m.field, tuple(tuple(r[n:]) for r in rows), n)


@dataclass(frozen=True)
class Subspace:
    """A subspace of K^n stored by its reduced row-echelon basis.

    The RREF basis is unique, so ``==`` decides equality of subspaces.
    """

    field: Field
    n: int
    basis: Matrix

    @classmethod
    def span(cls, field: Field, n: int, vectors: Iterable[Sequence]) -> "Subspace":
        vecs = [list(field(x) for x in v) for v in vectors]
        if any(len(v) != n for v in vecs):
            raise ValueError(f"vectors must have length {n}")
        rows, pivots = _rref_rows(field, vecs, n)
        return cls(field, n, Matrix(field, tuple(tuple(r) for r in rows[: len(pivots)]), n))

    @classmethod
    def zero(cls, field: Field, n: int) -> "Subspace":
        return cls(field, n, Matrix(field, (), n))

    @classmethod
    def full(cls, field: Field, n: int) -> "Subspace":
        return cls(field, n, Matrix.identity(field, n))

    @property
    def dim(self) -> int:
        return self.basis.nrows

    @property
    def vectors(self) -> tuple[tuple, ...]:
        return self.basis.rows

    @property
    def pivots(self) -> list[int]:
        return [next(j for j, x in enumerate(r) if x != 0) for r in self.basis.rows]

    def contains(self, v: Sequence) -> bool:
        return Subspace.span(self.field, self.n, list(self.vectors) + [list(v)]).dim == self.dim

    def issubspace(self, other: "Subspace") -> bool:
        return all(other.contains(v) for v in self.vectors)

    def __repr__(self) -> str:
        return f"Subspace({self.field!r}, n={self.n}, dim={self.dim}, basis={self.basis.tolist()})"


def kernel_basis(m: Matrix) -> Subspace:
    """Right kernel {x : m x = 0} as a canonical subspace of K^cols."""
    field, n = m.field, m.ncols
    rows, pivots = _rref_rows(field, [list(r) for r in m.rows], n)
    free = [j for j in range(n) if j not in set(pivots)]
    vecs = []
    for f in free:
        v = [field(0)] * n
        v[f] = field(1)
        for i, pc in enumerate(pivots):
            v[pc] = field.neg(rows[i][f])
        vecs.append(v)
    return Subspace.span(field, n, vecs)


def span_intersect_and_sum(a: Subspace, b: Subspace) -> tuple[Subspace, Subspace]:
    """(a ∩ b, a + b) via the Zassenhaus block reduction."""
    if a.n != b.n:
        raise ValueError(f"ambient dimension mismatch: {a.n} vs {b.n}")
    if a.field != b.field:
        raise ValueError("field mismatch")
    field, n = a.field, a.n
    zero = field(0)
    block = [list(v) + list(v) for v in a.vectors] + [list(v) + [zero] * n for v in b.vectors]
    rows, pivots = _rref_rows(field, block, 2 * n)
    rows = rows[: len(pivots)]
    total = [r[:n] for r, pc in zip(rows, pivots) if pc < n]
    inter = [r[n:] for r, pc in zip(rows, pivots) if pc >= n]
    return Subspace.span(field, n, inter), Subspace.span(field, n, total)


def gaussian_binomial(n: int, r: int, q: int) -> int:
    """Number of r-dimensional subspaces of GF(q)^n."""
    if r < 0 or r > n:
        return 0
    num = den = 1
    for i in range(r):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def rref_matrices(q: int, n: int, r: int) -> np.ndarray:
    """Every r×n reduced row-echelon matrix of rank r over GF(q).

    Returned as an int64 array of shape (count, r, n), one per r-dim subspace.
    Ordered by pivot set (lexicographic), then free entries.
    """
    out = np.zeros((gaussian_binomial(n, r, q), r, n), dtype=np.int64)
    if r == 0:
        return out
    pos = 0
    for piv in itertools.combinations(range(n), r):
        pset = set(piv)
        free = [(i, j) for i in range(r) for j in range(piv[i] + 1, n) if j not in pset]
        cnt = q ** len(free)
        block = out[pos: pos + cnt]
        for i, pc in enumerate(piv):
            block[:, i, pc] = 1
        if free:
            digits = np.indices((q,) * len(free)).reshape(len(free), -1).T
            for t, (i, j) in enumerate(free):
                block[:, i, j] = digits[:, t]
        pos += cnt
    return out


def projective_points(q: int, n: int) -> Iterator[tuple[int, ...]]:
    """Projective representatives of GF(q)^n (first nonzero = 1).

    Grouped by the position of the leading 1 (e_1 first), tails in lexicographic order.
    """
    for lead in range(n):
        prefix = (0,) * lead + (1,)
        for tail in itertools.product(range(q), repeat=n - lead - 1):
            yield prefix + tail


def random_invertible(field: "PrimeField", n: int, seed) -> Matrix:
    """Uniformly random element of GL_n(GF(p)) by rejection; ``seed`` as for numpy's default_rng."""
    if not field.finite:
        raise ValueError("random matrices need a finite field")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    while True:
        m = Matrix.of(field, rng.integers(0, field.p, (n, n)).tolist(), n)
        if rref(m)[1] == n:
            return m
