import csv
import io
import json

import pytest

from formlab.exactlin import GF, QQ
from formlab.exterior import from_terms, monomial_form, parse
from formlab.experiments import (
    PreconditionError,
    ScanConfig,
    cut_bound_report,
    find_small_nullity,
    goodwillie_table,
    replay_exemplar,
    scan_random,
)
from formlab.liealg import lie_triple_form


def test_scan_small_grid():
    report = scan_random(ScanConfig(n_values=(4, 5, 6), q_values=(3,), trials=12, seed=3))
    assert report.ok, report.violations
    counts = {(c.key["n"], c.key["q"]): c.counts for c in report.cells}
    assert counts[(4, 3)]["null=1"] == 0
    assert all(sum(c.values()) == 12 for c in counts.values())
    for cell in report.cells:
        for ex in cell.exemplars.values():
            assert replay_exemplar(ex)


def test_scan_is_deterministic_and_serializes():
    cfg = ScanConfig(n_values=(4, 5), q_values=(3, 5), trials=6, seed=9)
    a, b = scan_random(cfg).dumps(), scan_random(cfg, threads=2).dumps()
    assert a == b
    rows = list(csv.DictReader(io.StringIO(scan_random(cfg).to_csv())))
    assert rows[0]["n"] == "4" and rows[0]["trials"] == "6"
    assert json.loads(a)["config"]["seed"] == 9


def test_scan_writes_exemplar_files(tmp_path):
    report = scan_random(ScanConfig(n_values=(5,), q_values=(3,), trials=4, seed=1))
    paths = report.write(tmp_path)
    forms = [p for p in paths if p.suffix == ".form"]
    assert forms and all(parse(p.read_text()).n == 5 for p in forms)
    assert (tmp_path / "table.csv").read_text().startswith("n,q,trials")


def test_scan_flags_missing_nullity_two():
    report = scan_random(ScanConfig(n_values=(3,), q_values=(3,), trials=3, seed=0))
    assert report.ok  # n = 3 is exempt
    assert report.cells[0].counts["null=2"] == 0


def test_scan_config_validation():
    with pytest.raises(ValueError):
        ScanConfig(q_values=(4,))
    with pytest.raises(ValueError):
        ScanConfig(trials=0)


def test_find_small_nullity_examples():
    six = find_small_nullity(6, 3, 2, seed=0)
    assert six.value == 2 and six.proof.upper.kind == "Exhausted"
    three = find_small_nullity(3, 3, 1, seed=0)
    assert three.value == 1
    with pytest.raises(PreconditionError):
        find_small_nullity(4, 3, 1, seed=0)


def test_find_small_nullity_fallback_for_six():
    res = find_small_nullity(6, 3, 2, seed=0, max_trials=0)
    assert res.fallback and res.form == monomial_form(6, GF(3), (1, 2, 3), (4, 5, 6))


def test_goodwillie_small_table():
    report = goodwillie_table(4, (3, 5, 7), trials=8, seed=1)
    assert report.ok, report.violations
    m1 = [c for c in report.cells if c.key["m"] == 1]
    assert all(c.counts["null=1"] == 0 for c in m1)
    edge = [c for c in report.cells if c.key["m"] == 5 and "null=1" in c.exemplars]
    assert edge and replay_exemplar(edge[0].exemplars["null=1"])
    assert report.dumps() == goodwillie_table(4, (3, 5, 7), trials=8, seed=1).dumps()


def test_cut_bound_examples():
    assert cut_bound_report(lie_triple_form("A", 2).form, [3, 5]).text() == "b₁ = 8, cut number ≤ 2"
    assert cut_bound_report(monomial_form(3, QQ, (1, 2, 3)), [3, 5]).text() == "b₁ = 3, cut number ≤ 1"
    assert cut_bound_report(from_terms(3, 4, 1, QQ, []), [3]).text() == "b₁ = 4, cut number ≤ 4"
    with pytest.raises(ValueError):
        cut_bound_report(monomial_form(3, GF(3), (1, 2, 3)), [3])
