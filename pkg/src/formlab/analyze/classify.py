"""Orbit classes of scalar 3-forms of rank at most six."""
from __future__ import annotations

import enum
import itertools

from ..exactlin import Matrix
from ..exterior import AltForm, contract, from_terms, sort_with_sign
from .core import radical, rank


class RankSixClass(enum.Enum):
    Rank0 = "Rank0"
    Rank3 = "Rank3"
    Rank5 = "Rank5"
    Rank6Split = "Rank6Split"
    Rank6Degenerate = "Rank6Degenerate"
    RankOther = "RankOther"


class ClassificationError(RuntimeError):
    """A computed invariant contradicts the known structure of 3-forms (a bug, never user error)."""


def _check_scalar_three_form(f: AltForm):
    if f.s != 3 or f.m != 1:
        raise ValueError(f"expected a scalar 3-form, got s={f.s}, m={f.m}")


def _wedge(a: AltForm, b: AltForm) -> dict:
    """Coefficients of a ∧ b on sorted multi-indices (scalar forms)."""
    field = a.field
    out: dict = {}
    for I, (x,) in a.terms:
        for J, (y,) in b.terms:
            sign, key = sort_with_sign(I + J)
            if sign:
                out[key] = field.reduce(out.get(key, field(0)) + sign * field.reduce(x * y))
    return out


def restrict_to_complement_of_radical(f: AltForm) -> AltForm:
    """The same form read on the coordinate subspace spanned by the non-pivot columns of the radical.

    Those coordinates complement the radical, so the result is nondegenerate of dimension rank(f).
    """
    rad = radical(f)
    keep = [j for j in range(f.n) if j not in set(rad.pivots)]
    pos = {j + 1: t + 1 for t, j in enumerate(keep)}
    terms = [(tuple(pos[i] for i in idx), v) for idx, v in f.terms if all(i in pos for i in idx)]
    return from_terms(f.s, len(keep), f.m, f.field, terms)


def hitchin_endomorphism(f: AltForm) -> Matrix:
    """K_f with K_f(v) the vector dual to (ι_v f) ∧ f in ⋀⁵K⁶ ≅ K⁶.

    The identification sends e¹∧..ê^j..∧e⁶ to (-1)^(j-1) e_j.
    """
    _check_scalar_three_form(f)
    if f.n != 6:
        raise ValueError("the quartic invariant is defined on 3-forms in six variables")
    field = f.field
    full = tuple(range(1, 7))
    cols = []
    for a in range(6):
        e = [0] * 6
        e[a] = 1
        w = _wedge(contract(f, e), f)
        col = []
        for j in range(1, 7):
            c = w.get(full[: j - 1] + full[j:], field(0))
            col.append(c if j % 2 == 1 else field.neg(c))
        cols.append(col)
    return Matrix.of(field, [[cols[a][i] for a in range(6)] for i in range(6)])


def quartic_invariant(f: AltForm):
    """λ(f), defined by K_f² = λ(f)·Id; λ(e¹²³ + e⁴⁵⁶) = 1."""
    K = hitchin_endomorphism(f)
    K2 = K @ K
    lam = K2[0, 0]
    for i, j in itertools.product(range(6), repeat=2):
        if K2[i, j] != (lam if i == j else 0):
            raise ClassificationError("K_f squared is not scalar")
    return lam


def classify_low_rank(f: AltForm) -> RankSixClass:
    _check_scalar_three_form(f)
    rk = rank(f)
    if rk in (1, 2, 4):
        raise ClassificationError(f"computed rank {rk}, which no 3-form has")
    if rk > 6:
        return RankSixClass.RankOther
    if rk < 6:
        return {0: RankSixClass.Rank0, 3: RankSixClass.Rank3, 5: RankSixClass.Rank5}[rk]
    g = restrict_to_complement_of_radical(f)
    if quartic_invariant(g) != 0:
        return RankSixClass.Rank6Split
    return RankSixClass.Rank6Degenerate
