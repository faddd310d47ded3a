"""Acceptance criteria 1-9, each reported as a PASS/FAIL line in the terminal summary."""
from __future__ import annotations

import io
import json
from math import comb

import numpy as np
import pytest

from formlab.analyze import (
    classify_low_rank,
    decide_nullity_geq,
    nullity_exact,
    oracle_nullity,
    rank,
)
from formlab.cli import run
from formlab.exactlin import GF, Subspace, random_invertible
from formlab.exterior import evaluate, gl_act, random_form
from formlab.experiments import (
    ScanConfig,
    cut_bound_report,
    find_small_nullity,
    goodwillie_table,
    replay_exemplar,
    scan_random,
)
from formlab.grassmann import check_iff, iota_dim, iota_span
from formlab.liealg import lie_nullity_certificate, lie_triple_form

from conftest import CANONICAL, canonical, embedded_canonicals

# (type, rank, dimension, primes); larger primes are out of reach for A3 and G2
LIE_CASES = [
    ("A", 1, 3, (3, 5)),
    ("A", 2, 8, (3, 5)),
    ("B", 2, 10, (3, 5)),
    ("A", 3, 15, (3,)),
    ("G", 2, 14, (3,)),
]


def _alternating(form) -> bool:
    F, n = form.field, form.n
    e = np.eye(n, dtype=int).tolist()
    for i in range(n):
        for j in range(n):
            for k in range(n):
                a = evaluate(form, e[i], e[j], e[k])
                if any(F.reduce(x + y) != 0 for x, y in zip(a, evaluate(form, e[j], e[i], e[k]))):
                    return False
                if any(F.reduce(x + y) != 0 for x, y in zip(a, evaluate(form, e[i], e[k], e[j]))):
                    return False
    return True


@pytest.fixture(scope="module")
def lie_results():
    out = {}
    for t, r, dim, primes in LIE_CASES:
        ct = lie_triple_form(t, r)
        cert = lie_nullity_certificate(t, r, primes)
        out[f"{t}{r}"] = (ct, cert, dim, r)
    return out


@pytest.mark.slow
def test_criterion_1_lie_certification(lie_results, criterion):
    structural, closed, intervals = True, [], []
    for label, (ct, cert, dim, r) in lie_results.items():
        structural &= ct.form.n == dim and ct.form.is_integral() and _alternating(ct.form)
        structural &= cert.lower == r and cert.upper >= r
        if cert.value == r:
            closed.append(label)
        intervals.append(f"{label}:[{cert.lower},{cert.upper}]")
    su3, su3_cert = lie_results["A2"][:2]
    cut = cut_bound_report(su3.form, su3_cert.primes, witness=su3.cartan_witness).text()
    all_closed = len(closed) == len(lie_results)
    criterion(1, structural and all_closed,
              f"dims/integrality/alternation ok={structural}; null_Q closed for {','.join(closed)}; "
              f"intervals {' '.join(intervals)}; A2 {cut}")
    # everything that the prime sandwich can establish
    assert structural
    assert {"A1", "A2"} <= set(closed)
    assert cut == "b₁ = 8, cut number ≤ 2"


@pytest.mark.slow
@pytest.mark.xfail(strict=True, reason=(
    "mod-p reduction of the compact form is the split form, whose abelian subalgebras "
    "(Borel nilradical parts) exceed the rank for B2 and A3; G2 is degenerate mod 3"))
def test_criterion_1_full_closure(lie_results):
    for label in ("B2", "A3", "G2"):
        _, cert, _, r = lie_results[label]
        assert cert.value == r, f"{label}: [{cert.lower}, {cert.upper}]"


def test_criterion_2_even_universality(criterion):
    failures = 0
    for n in (4, 6, 8):
        for q in (3, 5):
            for t in range(100):
                f = random_form(3, n, 1, GF(q), [2, n, q, t])
                ok, _ = decide_nullity_geq(f, 2, 2)
                failures += not ok
    criterion(2, failures == 0, f"600 forms, {failures} without a 2-dim null subspace")
    assert failures == 0


@pytest.mark.slow
def test_criterion_3_small_nullity(criterion):
    found = {}
    for n in range(4, 10):
        for q in (3, 5):
            res = find_small_nullity(n, q, 2, seed=0)
            found[(n, q)] = res.value
            assert res.proof.upper is not None and res.proof.upper.kind == "Exhausted"
    ok = all(v == 2 for v in found.values())
    criterion(3, ok, f"null_2 = 2 certified for {sum(v == 2 for v in found.values())}/12 cells")
    assert ok


def test_criterion_4_oracle_equivalence(criterion):
    F = GF(3)
    cases = embedded_canonicals(F, 6)
    for t in range(50):
        n = 3 + t % 3
        cases.append((f"random/n={n}/t={t}", random_form(3, n, 1, F, [4, n, t])))
    mismatches = [label for label, f in cases if nullity_exact(f, 2)[0] != oracle_nullity(f, 2)]
    criterion(4, not mismatches, f"{len(cases)} forms, mismatches: {mismatches or 'none'}")
    assert not mismatches


@pytest.mark.slow
def test_criterion_5_iota_dimension(criterion):
    F, cases, bad = GF(5), 0, []
    for n in range(1, 9):
        for s in range(1, n + 1):
            if comb(n, s) > 70:
                continue
            for k in range(1, s + 1):
                for r in range(k, n + 1):
                    rng = np.random.default_rng([5, n, s, k, r])
                    for _ in range(5):
                        V = Subspace.span(F, n, rng.integers(0, 5, (r, n)).tolist())
                        while V.dim < r:
                            V = Subspace.span(F, n, rng.integers(0, 5, (r, n)).tolist())
                        try:
                            iota_span(V, k, s)
                        except AssertionError:
                            bad.append((n, s, k, r))
                    cases += 1
    closed = all(iota_dim(n, 3, 2, 3) == 3 * n - 8 for n in range(4, 13))
    criterion(5, not bad and closed, f"{cases} (n,s,k,r) cases x 5 subspaces, {len(bad)} mismatches; 3n-8 ok={closed}")
    assert not bad and closed


@pytest.mark.slow
def test_criterion_6_grassmann_criterion(criterion):
    F = GF(3)
    cases = embedded_canonicals(F, 6)
    for t in range(20):
        n = 4 + t % 3
        cases.append((f"random/n={n}/t={t}", random_form(3, n, 1, F, [6, n, t])))
    mismatches = [(label, r) for label, f in cases for r in (2, 3)
                  if check_iff(f, 2, r) != decide_nullity_geq(f, 2, r)[0]]
    criterion(6, not mismatches, f"{2 * len(cases)} (form, r) pairs, mismatches: {mismatches or 'none'}")
    assert not mismatches


def test_criterion_7_classification(criterion):
    F = GF(7)
    ranks, labels, drift = {}, {}, []
    for idx, name in enumerate(CANONICAL):
        f = canonical(name, 7, F)
        ranks[name], labels[name] = rank(f), classify_low_rank(f)
        for t in range(20):
            g = gl_act(random_invertible(F, 7, [7, idx, t]), f)
            if classify_low_rank(g) != labels[name] or rank(g) != ranks[name]:
                drift.append((name, t))
    ok = (list(ranks.values()) == [3, 5, 6, 6]
          and labels["rank6_split"] != labels["rank6_degenerate"] and not drift)
    criterion(7, ok, f"ranks {list(ranks.values())}, labels {[c.name for c in labels.values()]}, "
                     f"{len(drift)} label changes under 80 conjugations")
    assert ok


def test_criterion_8_goodwillie_existence(criterion):
    report = goodwillie_table(4, (3, 5, 7), trials=20, seed=8)
    hits = [c for c in report.cells if c.key["m"] == 5 and "null=1" in c.exemplars]
    ok = bool(hits) and all(replay_exemplar(c.exemplars["null=1"]) for c in hits) and report.ok
    where = ",".join(f"q={c.key['q']}" for c in hits) or "none"
    criterion(8, ok, f"n=4, m=5: null=1 form found at {where}")
    assert ok


def _cli(*argv) -> tuple[int, str]:
    out = io.StringIO()
    return run(list(argv), stdout=out, stderr=io.StringIO()), out.getvalue()


def test_criterion_9_replay(criterion, tmp_path):
    cfg = ScanConfig(n_values=(4, 5, 6), q_values=(3, 5), trials=10, seed=99)
    scan_same = scan_random(cfg).dumps() == scan_random(cfg, threads=4).dumps()
    good_same = (goodwillie_table(4, (3, 5), trials=6, seed=9).dumps()
                 == goodwillie_table(4, (3, 5), trials=6, seed=9, threads=3).dumps())
    code, first = _cli("scan", "--n", "4,5", "--q", "3", "--trials", "8", "--seed", "31", "--threads", "2")
    replay = json.loads(first)["invocation"][1:]
    cli_same = code == 0 and _cli(*replay)[1] == first
    code, g1 = _cli("goodwillie", "--trials", "5", "--seed", "4")
    cli_good = code == 0 and _cli(*json.loads(g1)["invocation"][1:], "--threads", "2")[1] == g1
    ok = scan_same and good_same and cli_same and cli_good
    criterion(9, ok, f"scan {scan_same}, goodwillie {good_same}, cli scan replay {cli_same}, "
                     f"cli goodwillie replay {cli_good}")
    assert ok
