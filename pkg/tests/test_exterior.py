import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from formlab.analyze import rank
from formlab.exactlin import GF, QQ, Matrix, random_invertible, rref
from formlab.exterior import (
    FormSyntaxError,
    a_matrix,
    contract,
    evaluate,
    from_terms,
    gl_act,
    monomial_form,
    parse,
    random_form,
    render,
)

E123 = monomial_form(3, QQ, (1, 2, 3))


def unit(n, i):
    return [int(j == i - 1) for j in range(n)]


def test_from_terms_examples():
    assert from_terms(3, 3, 1, QQ, [((1, 2, 3), 1)]) == E123
    f = from_terms(3, 3, 1, QQ, [((2, 1, 3), 1)])
    assert f.terms == (((1, 2, 3), (-1,)),)
    assert from_terms(3, 3, 1, QQ, [((1, 2, 3), 1), ((1, 2, 3), -1)]).is_zero()


@pytest.mark.parametrize("bad", [(1, 1, 2), (0, 1, 2), (1, 2, 4)])
def test_from_terms_rejects_bad_indices(bad):
    with pytest.raises(ValueError):
        from_terms(3, 3, 1, QQ, [(bad, 1)])


def test_evaluate_examples():
    e1, e2, e3 = unit(3, 1), unit(3, 2), unit(3, 3)
    assert evaluate(E123, e1, e2, e3) == (1,)
    assert evaluate(E123, e2, e1, e3) == (-1,)
    assert evaluate(E123, e1, e1, e3) == (0,)


def test_evaluate_is_multilinear_and_alternating():
    F = GF(5)
    rng = np.random.default_rng(11)
    for t in range(30):
        f = random_form(3, 5, 2, F, [11, t])
        x, y, z, w = (rng.integers(0, 5, 5).tolist() for _ in range(4))
        a, b = (int(v) for v in rng.integers(0, 5, 2))
        lin = [F.reduce(a * xi + b * wi) for xi, wi in zip(x, w)]
        lhs = evaluate(f, lin, y, z)
        rhs = tuple(F.reduce(a * u + b * v) for u, v in zip(evaluate(f, x, y, z), evaluate(f, w, y, z)))
        assert lhs == rhs
        assert evaluate(f, y, x, z) == tuple(F.neg(u) for u in evaluate(f, x, y, z))
        assert evaluate(f, x, y, x) == (0, 0)


def test_contract_examples():
    assert contract(E123, unit(3, 1)) == monomial_form(3, QQ, (2, 3))
    assert contract(monomial_form(4, QQ, (1, 2, 3)), unit(4, 4)).is_zero()
    with pytest.raises(ValueError):
        contract(from_terms(0, 2, 1, QQ, []), [1, 0])


def test_contract_agrees_with_evaluation():
    F = GF(5)
    rng = np.random.default_rng(5)
    for t in range(50):
        f = random_form(3, 5, 1, F, [5, t])
        v, a, b = (rng.integers(0, 5, 5).tolist() for _ in range(3))
        assert evaluate(contract(f, v), a, b) == evaluate(f, v, a, b)
        assert contract(contract(f, v), v).is_zero()


def test_a_matrix_example_and_properties():
    A = a_matrix(E123, unit(3, 1))
    assert A.tolist() == [[0, 0, 0], [0, 0, 1], [0, -1, 0]]
    F = GF(7)
    rng = np.random.default_rng(7)
    for t in range(100):
        n = 4 + t % 4
        f = random_form(3, n, 1, F, [7, t])
        v = rng.integers(0, 7, n).tolist()
        A = a_matrix(f, v)
        assert A.transpose() == Matrix.of(F, [[F.neg(x) for x in row] for row in A.rows])
        assert not any(A.apply(v))
        assert (n - rref(A)[1]) % 2 == n % 2
    with pytest.raises(ValueError):
        a_matrix(monomial_form(4, QQ, (1, 2)), [1, 0, 0, 0])


def test_gl_act_examples():
    F = GF(5)
    f = monomial_form(4, F, (1, 2, 3))
    assert gl_act(Matrix.identity(F, 4), f) == f
    swap = Matrix.of(F, [[0, 0, 0, 1], [0, 1, 0, 0], [0, 0, 1, 0], [1, 0, 0, 0]])
    assert gl_act(swap, f) == monomial_form(4, F, (2, 3, 4))
    with pytest.raises(ValueError):
        gl_act(Matrix.zeros(F, 4, 4), f)


def test_gl_act_is_an_action_and_preserves_rank():
    F = GF(5)
    for t in range(50):
        f = random_form(3, 5, 1, F, [1, t]) if t % 2 else monomial_form(5, F, (1, 2, 3), (1, 4, 5))
        g, h = random_invertible(F, 5, [2, t]), random_invertible(F, 5, [3, t])
        gf = gl_act(g, f)
        assert rank(gf) == rank(f)
        if t < 10:
            assert gl_act(g @ h, f) == gl_act(g, gl_act(h, f))


def test_random_form_deterministic_and_full_for_s_equal_n():
    F = GF(3)
    assert random_form(3, 6, 1, F, 42) == random_form(3, 6, 1, F, 42)
    assert len(random_form(4, 4, 1, GF(101), 1).terms) <= 1
    with pytest.raises(ValueError):
        random_form(3, 4, 1, QQ, 1)


def test_random_coefficients_are_uniform():
    F = GF(3)
    counts = np.zeros(3)
    for t in range(10000):
        f = random_form(3, 6, 1, F, [99, t])
        nonzero = {idx: v[0] for idx, v in f.terms}
        counts[nonzero.get((1, 2, 3), 0)] += 1
    expected = 10000 / 3
    chi2 = ((counts - expected) ** 2 / expected).sum()
    assert chi2 < 28.7  # the 5-sigma tail (p = 5.7e-7) of chi-square with 2 degrees of freedom


def test_render_canonical_document():
    assert render(E123) == "altform v1\nfield Q\narity 3\ndim 3\ncodim 1\nterm 1 2 3 1\n"


def test_round_trip_random_and_rational():
    for t in range(100):
        F = GF([3, 5, 7][t % 3])
        f = random_form(2 + t % 3, 5, 1 + t % 2, F, [8, t])
        assert parse(render(f)) == f
    g = from_terms(2, 3, 2, QQ, [((1, 2), (Fraction(1, 2), -3)), ((2, 3), (0, Fraction(-4, 6)))])
    assert "term 2 3 0 -2/3" in render(g)
    assert parse(render(g)) == g


@pytest.mark.parametrize(
    "text,line",
    [
        ("altform v1\nfield Q\narity 3\ndim 3\ncodim 1\nterm 0 1 2 1\n", 6),
        ("altform v1\nfield Q\narity 3\ndim 3\ncodim 1\nterm 1 2 3 1\nterm 1 1 2 1\n", 7),
        ("altform v1\nfield gf 4\narity 3\ndim 3\ncodim 1\n", 2),
        ("altform v2\n", 1),
        ("altform v1\nfield Q\narity x\ndim 3\ncodim 1\n", 3),
    ],
)
def test_parse_errors_name_the_line(text, line):
    with pytest.raises(FormSyntaxError) as exc:
        parse(text)
    assert exc.value.lineno == line


def test_parse_ignores_comments_and_orders_terms():
    f = parse("# note\naltform v1\nfield gf 5\narity 3\ndim 4\ncodim 1\n\nterm 2 3 4 1\nterm 2 1 3 1\n")
    assert f.terms == (((1, 2, 3), (4,)), ((2, 3, 4), (1,)))


@settings(max_examples=40, deadline=None)
@given(st.permutations([1, 2, 3, 4]), st.integers(1, 4))
def test_permuted_terms_pick_up_the_sign(perm, c):
    F = GF(7)
    f = from_terms(4, 4, 1, F, [(tuple(perm), c)])
    vecs = [unit(4, i) for i in perm]
    assert evaluate(f, *vecs) == (c,)
    assert all(evaluate(f, *p) in {(c,), (F.neg(c),)} for p in itertools.permutations(vecs))
