import json

import pytest

from conftest import canonical, embedded_canonicals
from formlab.analyze import (
    BudgetExceeded,
    OracleCapExceeded,
    RankSixClass,
    certify_rational,
    classify_low_rank,
    decide_nullity_geq,
    nullity_exact,
    oracle_nullity,
    projective_count,
    quartic_invariant,
    radical,
    rank,
    rational_witness,
    verify_certificate,
    verify_witness,
)
from formlab.exactlin import GF, QQ, Subspace, random_invertible
from formlab.exterior import from_terms, gl_act, monomial_form, random_form
from formlab.liealg import lie_triple_form

F3 = GF(3)


def span(field, n, *axes):
    return Subspace.span(field, n, [[int(j == a - 1) for j in range(n)] for a in axes])


def test_radical_examples():
    assert radical(monomial_form(4, QQ, (1, 2, 3))) == span(QQ, 4, 4)
    assert radical(from_terms(3, 5, 1, QQ, [])) == Subspace.full(QQ, 5)
    assert radical(canonical("rank6_split", 6, QQ)).dim == 0


def test_rank_examples():
    assert rank(canonical("rank3", 3, QQ)) == 3
    assert rank(canonical("rank6_split", 6, QQ)) == 6
    assert rank(canonical("rank5", 5, QQ)) == 5
    # e1^e2^e3 + e1^e2^e4 = e1^e2^(e3+e4) only has rank 3
    assert rank(monomial_form(4, QQ, (1, 2, 3), (1, 2, 4))) == 3


def test_verify_witness_examples():
    f = canonical("rank6_split", 6, QQ)
    assert verify_witness(f, 2, span(QQ, 6, 1, 4))
    assert not verify_witness(f, 2, span(QQ, 6, 1, 2))
    g = random_form(3, 6, 1, F3, 3).__add__(monomial_form(6, F3, (1, 2, 3)))
    assert verify_witness(g, 1, radical(g))
    with pytest.raises(ValueError):
        verify_witness(f, 4, span(QQ, 6, 1))


def test_decide_examples():
    e123 = canonical("rank3", 3, F3)
    ok, cert = decide_nullity_geq(e123, 2, 2)
    assert not ok and cert.kind == "Exhausted" and cert.stats["points"] == 13
    split = canonical("rank6_split", 6, F3)
    ok, cert = decide_nullity_geq(split, 2, 2)
    assert ok and cert.witness == span(F3, 6, 1, 4)
    assert decide_nullity_geq(split, 2, 3)[0] is False


def test_decide_rejects_infinite_fields_and_bad_arguments():
    with pytest.raises(ValueError):
        decide_nullity_geq(canonical("rank3", 3, QQ), 2, 1)
    with pytest.raises(ValueError):
        decide_nullity_geq(canonical("rank3", 3, F3), 4, 1)
    with pytest.raises(ValueError):
        decide_nullity_geq(canonical("rank3", 3, F3), 2, 4)


def test_budget_exceeded_is_not_a_no():
    f = canonical("rank6_split", 6, F3)
    with pytest.raises(BudgetExceeded):
        decide_nullity_geq(f, 2, 3, budget=10)
    # a witness inside the budget is still reported
    assert decide_nullity_geq(f, 2, 2, budget=1)[0]


def test_nullity_examples():
    assert nullity_exact(canonical("rank3", 3, F3), 2)[0] == 1
    value, proof = nullity_exact(canonical("rank6_split", 6, F3), 2)
    assert value == 2 and proof.lower.r == 2 and proof.upper.r == 3
    zero = from_terms(3, 4, 1, F3, [])
    assert [nullity_exact(zero, k)[0] for k in (1, 2, 3)] == [4, 4, 4]


def test_oracle_examples():
    assert oracle_nullity(from_terms(3, 4, 1, F3, []), 2) == 4
    assert oracle_nullity(monomial_form(4, GF(5), (1, 2, 3)), 2) == 2
    with pytest.raises(OracleCapExceeded):
        oracle_nullity(random_form(3, 9, 1, F3, 0), 2)


def test_other_depths_agree_with_oracle():
    for label, f in embedded_canonicals(F3, 5):
        for k in (1, 3):
            assert nullity_exact(f, k)[0] == oracle_nullity(f, k), (label, k)
    for t in range(10):
        f = random_form(3, 4 + t % 2, 1, F3, [21, t])
        for k in (1, 2, 3):
            assert nullity_exact(f, k)[0] == oracle_nullity(f, k)
    phi = random_form(2, 4, 3, GF(5), 4)
    assert nullity_exact(phi, 2)[0] == oracle_nullity(phi, 2)
    assert nullity_exact(phi, 1)[0] == oracle_nullity(phi, 1) == 4 - rank(phi)


def test_null1_equals_dimension_of_radical():
    for t in range(10):
        f = random_form(3, 5, 1, F3, [31, t]) + monomial_form(5, F3, s=3)
        assert nullity_exact(f, 1)[0] == radical(f).dim


def test_certificates_reverify_and_count_points():
    for t in range(8):
        f = random_form(3, 6, 1, F3, [41, t])
        value, proof = nullity_exact(f, 2)
        assert verify_certificate(f, proof.lower)
        assert proof.upper.stats["points"] == projective_count(3, 6)
        assert verify_certificate(f, proof.upper)


def test_monotone_in_r():
    for t in range(6):
        f = random_form(3, 5, 1, F3, [51, t])
        answers = [decide_nullity_geq(f, 2, r)[0] for r in range(1, 6)]
        assert answers == sorted(answers, reverse=True)


def test_nullity_is_gl_invariant():
    for t in range(6):
        f = random_form(3, 5, 1, F3, [61, t])
        g = random_invertible(F3, 5, [62, t])
        gf = gl_act(g, f)
        assert nullity_exact(gf, 2)[0] == nullity_exact(f, 2)[0]
        ok, cert = decide_nullity_geq(f, 2, 2)
        moved = Subspace.span(F3, 5, [g.apply(w) for w in cert.witness.vectors])
        assert verify_witness(gf, 2, moved)


def test_threads_do_not_change_certificates():
    f = random_form(3, 12, 1, F3, 8)
    one = decide_nullity_geq(f, 2, 3, threads=1)[1].to_json()
    four = decide_nullity_geq(f, 2, 3, threads=4)[1].to_json()
    assert json.dumps(one) == json.dumps(four)
    g = random_form(3, 11, 1, F3, 9)
    assert decide_nullity_geq(g, 2, 4, threads=1)[1] == decide_nullity_geq(g, 2, 4, threads=3)[1]


def test_certificate_json_key_order():
    cert = decide_nullity_geq(canonical("rank6_split", 6, F3), 2, 2)[1]
    assert list(cert.to_json()) == ["schema", "kind", "k", "r", "field", "witness", "stats"]
    assert cert.to_json()["witness"] == [[1, 0, 0, 0, 0, 0], [0, 0, 0, 1, 0, 0]]


def test_certify_su2():
    ct = lie_triple_form("A", 1)
    assert ct.form == monomial_form(3, QQ, (1, 2, 3)).scale(-16)
    cert = certify_rational(ct.form, [3, 5], witness=span(QQ, 3, 1))
    assert cert.value == 1 and cert.content == 16
    assert [s.null for s in cert.specializations] == [1, 1]


def test_certify_su3_skips_the_degenerate_prime():
    ct = lie_triple_form("A", 2)
    cert = certify_rational(ct.form, [3, 5], witness=ct.cartan_witness)
    assert (cert.lower, cert.upper, cert.value) == (2, 2, 2)
    p3, p5 = cert.specializations
    assert p3.skipped and "rank drops" in p3.reason and p5.null == 2
    out = cert.to_json()
    assert out["conclusion"] == {"lower": 2, "upper": 2, "value": 2}
    assert [s["p"] for s in out["specializations"]] == [3, 5]


def test_certify_zero_form_and_errors():
    zero = from_terms(3, 4, 1, QQ, [])
    cert = certify_rational(zero, [3], witness=Subspace.full(QQ, 4))
    assert cert.value == 4
    f = monomial_form(3, QQ, (1, 2, 3))
    with pytest.raises(ValueError):
        certify_rational(f, [3], witness=Subspace.full(QQ, 3))
    with pytest.raises(ValueError):
        certify_rational(f.scale(QQ(1) / 2), [3])
    with pytest.raises(ValueError):
        certify_rational(f.over(F3), [3])


def test_greedy_rational_witness():
    f = canonical("rank6_split", 6, QQ)
    W = rational_witness(f)
    assert W.dim == 2 and verify_witness(f, 2, W)


def test_classification_examples():
    assert classify_low_rank(canonical("rank6_split", 6, QQ)) is RankSixClass.Rank6Split
    assert classify_low_rank(canonical("rank6_degenerate", 6, QQ)) is RankSixClass.Rank6Degenerate
    assert classify_low_rank(canonical("rank5", 7, QQ)) is RankSixClass.Rank5
    assert classify_low_rank(from_terms(3, 4, 1, QQ, [])) is RankSixClass.Rank0
    assert classify_low_rank(random_form(3, 8, 1, GF(7), 1)) is RankSixClass.RankOther
    F7 = GF(7)
    for t in range(20):
        g = random_invertible(F7, 6, [71, t])
        assert classify_low_rank(gl_act(g, canonical("rank3", 6, F7))) is RankSixClass.Rank3


def test_quartic_invariant_golden_values():
    assert quartic_invariant(canonical("rank6_split", 6, QQ)) == 1
    assert quartic_invariant(canonical("rank6_degenerate", 6, QQ)) == 0
    assert quartic_invariant(canonical("rank5", 6, QQ)) == 0
    # scaling the form by c scales the quartic invariant by c^4
    assert quartic_invariant(canonical("rank6_split", 6, QQ).scale(2)) == 16


def test_split_class_is_recognised_after_a_rank_six_embedding():
    F5 = GF(5)
    f = canonical("rank6_split", 8, F5)
    g = random_invertible(F5, 8, 3)
    assert classify_low_rank(gl_act(g, f)) is RankSixClass.Rank6Split
