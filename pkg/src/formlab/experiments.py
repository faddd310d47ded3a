"""Seeded experiment drivers: random scans of scalar 3-forms, small-nullity searches,
the vector-valued 2-form frequency table, and cut-number reporting.

Every random form is drawn from ``numpy.random.default_rng`` seeded with a tuple
that names its cell and trial, so any single trial can be replayed on its own and
reports do not depend on the order or parallelism in which cells are run.

Finite-field frequencies are only a proxy for statements about generic forms over
an algebraically closed field; reports carry these counts without thresholds.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .analyze import (
    DEFAULT_BUDGET,
    BudgetExceeded,
    NullityCertificate,
    NullityProof,
    RationalBoundCertificate,
    certify_rational,
    decide_nullity_geq,
    verify_certificate,
)
from .exactlin import GF, QQ, Subspace
from .exterior import AltForm, monomial_form, parse, random_form, render

SCHEMA = "formlab-report/1"


class PreconditionError(ValueError):
    """The request asks for something that is impossible for every form."""


class SearchFailed(RuntimeError):
    pass


def _is_odd_prime(q: int) -> bool:
    return q >= 3 and all(q % d for d in range(2, int(q**0.5) + 1))


@dataclass(frozen=True)
class ScanConfig:
    n_values: tuple[int, ...] = (4, 5, 6, 7, 8, 9)
    q_values: tuple[int, ...] = (3, 5)
    trials: int = 100
    seed: int = 0
    k: int = 2
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        bad = [q for q in self.q_values if not _is_odd_prime(q)]
        if bad:
            raise ValueError(f"not odd primes: {bad}")
        if any(n < 3 for n in self.n_values):
            raise ValueError("scalar 3-forms need n >= 3")

    def to_json(self) -> dict:
        return {
            "n_values": list(self.n_values),
            "q_values": list(self.q_values),
            "trials": self.trials,
            "seed": self.seed,
            "k": self.k,
            "budget": self.budget,
        }


@dataclass
class Exemplar:
    form: str  # rendered form file
    proof: dict  # NullityProof JSON

    def to_json(self) -> dict:
        return {"form": self.form, "proof": self.proof}


@dataclass
class Cell:
    """Outcome counts for one (n, q) or (n, m, q) cell."""

    key: dict
    counts: dict
    exemplars: dict = field(default_factory=dict)  # label -> Exemplar
    work: dict = field(default_factory=lambda: {"points": 0, "nodes": 0})

    def to_json(self) -> dict:
        return {
            **self.key,
            "counts": dict(self.counts),
            "work": dict(self.work),
            "exemplars": {k: v.to_json() for k, v in sorted(self.exemplars.items())},
        }


@dataclass
class ScanReport:
    kind: str
    config: dict
    cells: list[Cell]
    violations: list[str]
    notes: list[str] = field(default_factory=list)
    invocation: list[str] | None = None

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "kind": self.kind,
            "invocation": self.invocation,
            "config": self.config,
            "cells": [c.to_json() for c in self.cells],
            "violations": list(self.violations),
            "notes": list(self.notes),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=False) + "\n"

    def to_csv(self) -> str:
        if not self.cells:
            return ""
        keys = list(self.cells[0].key)
        labels = list(self.cells[0].counts)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(keys + ["trials"] + labels)
        for c in self.cells:
            w.writerow([c.key[k] for k in keys] + [sum(c.counts.values())] + [c.counts[x] for x in labels])
        return buf.getvalue()

    def write(self, outdir: str | Path) -> list[Path]:
        """report.json, table.csv and one form file per exemplar."""
        out = Path(outdir)
        out.mkdir(parents=True, exist_ok=True)
        paths = [out / "report.json", out / "table.csv"]
        paths[0].write_text(self.dumps())
        paths[1].write_text(self.to_csv())
        ex = out / "exemplars"
        for c in self.cells:
            for label, e in sorted(c.exemplars.items()):
                ex.mkdir(exist_ok=True)
                name = "_".join(f"{k}{v}" for k, v in c.key.items()) + f"_{label}.form"
                (ex / name).write_text(e.form)
                paths.append(ex / name)
        return paths


def _trial_seed(seed: int, *parts: int) -> list[int]:
    return [int(seed), *map(int, parts)]


def _null_label(v: int) -> str:
    return f"null={v}" if v <= 2 else "null>=3"


def _limited_nullity(f: AltForm, k: int, limit: int, budget: int, threads: int) -> tuple[int, NullityProof, int, int]:
    """Exact nullity when it is at most ``limit``; otherwise returns limit + 1 with only a witness.

    Also returns the work counters (points, nodes).
    """
    lower = decide_nullity_geq(f, k, 0)[1]
    points = nodes = 0
    for r in range(1, limit + 2):
        ok, cert = decide_nullity_geq(f, k, r, budget, threads)
        points += cert.stats["points"]
        nodes += cert.stats["nodes"]
        if not ok:
            return r - 1, NullityProof(r - 1, lower, cert), points, nodes
        lower = cert
    return limit + 1, NullityProof(limit + 1, lower, None), points, nodes


def replay_exemplar(ex: Exemplar) -> bool:
    """Re-verify an exemplar from its serialized form alone."""
    f = parse(ex.form)
    proof = ex.proof
    ok = True
    for part in ("lower", "upper"):
        cj = proof.get(part)
        if not cj:
            continue
        field = f.field
        witness = Subspace.span(field, f.n, cj["witness"]) if cj["witness"] is not None else None
        cert = NullityCertificate(cj["kind"], cj["k"], cj["r"], field, witness, cj["stats"])
        ok &= verify_certificate(f, cert)
    return ok


def scan_random(cfg: ScanConfig, threads: int = 1, invocation: Sequence[str] | None = None) -> ScanReport:
    """Nullity counts of random scalar 3-forms per (n, q) cell.

    Violations: an even n >= 4 form with nullity < 2, or a cell with n >= 4 and no nullity-2 exemplar.
    """
    cells, violations = [], []
    for n in cfg.n_values:
        for q in cfg.q_values:
            F = GF(q)
            cell = Cell({"n": n, "q": q}, {"null=1": 0, "null=2": 0, "null>=3": 0, "budget": 0})
            for t in range(cfg.trials):
                f = random_form(3, n, 1, F, _trial_seed(cfg.seed, n, q, t))
                try:
                    v, proof, pts, nds = _limited_nullity(f, cfg.k, 2, cfg.budget, threads)
                except BudgetExceeded:
                    cell.counts["budget"] += 1
                    continue
                cell.work["points"] += pts
                cell.work["nodes"] += nds
                label = _null_label(v)
                cell.counts[label] += 1
                if label not in cell.exemplars:
                    pj = {**proof.to_json(), "trial": t}
                    if v > 2:
                        pj.update(value=None, at_least=v)  # search stopped once nullity 3 was witnessed
                    cell.exemplars[label] = Exemplar(render(f), pj)
                if n >= 4 and n % 2 == 0 and v < 2:
                    violations.append(f"n={n} q={q} trial={t}: nullity {v} < 2 for even n")
            if n >= 4 and "null=2" not in cell.exemplars:
                violations.append(f"n={n} q={q}: no form with nullity 2 among {cfg.trials} trials")
            cells.append(cell)
    notes = [
        "Counts are over a finite field; they are evidence, not a statement about generic forms over the closure.",
        "Cells with n = 3 are exempt from the nullity-2 existence check: a nonzero 3-form on K^3 has nullity 1.",
    ]
    return ScanReport("scan", cfg.to_json(), cells, violations, notes, list(invocation) if invocation else None)


@dataclass(frozen=True)
class SmallNullity:
    form: AltForm
    proof: NullityProof
    trials: int
    fallback: bool = False

    @property
    def value(self) -> int:
        return self.proof.value


def find_small_nullity(
    n: int,
    q: int,
    target: int,
    seed: int,
    budget: int = DEFAULT_BUDGET,
    max_trials: int = 200,
    threads: int = 1,
) -> SmallNullity:
    """A scalar 3-form on GF(q)^n with certified nullity <= target (exact value in the proof)."""
    if not _is_odd_prime(q):
        raise ValueError(f"q={q} is not an odd prime")
    if target < 1 or n < 3:
        raise PreconditionError("nullity is at least 1 for every 3-form on K^n with n >= 1")
    if n >= 4 and n % 2 == 0 and target < 2:
        raise PreconditionError(f"every 3-form on K^{n} (n even) has nullity >= 2")
    F = GF(q)
    for t in range(max_trials):
        f = random_form(3, n, 1, F, _trial_seed(seed, n, q, t))
        try:
            v, proof, _, _ = _limited_nullity(f, 2, target, budget, threads)
        except BudgetExceeded:
            continue
        if v <= target:
            return SmallNullity(f, proof, t + 1)
    if n == 6 and target >= 2:
        f = monomial_form(6, F, (1, 2, 3), (4, 5, 6))
        v, proof, _, _ = _limited_nullity(f, 2, target, budget, threads)
        if v <= target:
            return SmallNullity(f, proof, max_trials, fallback=True)
    raise SearchFailed(f"no form with nullity <= {target} on GF({q})^{n} in {max_trials} trials")


def goodwillie_table(
    n: int,
    q_values: Iterable[int],
    trials: int,
    seed: int,
    budget: int = DEFAULT_BUDGET,
    extra_trials: int = 2000,
    threads: int = 1,
    invocation: Sequence[str] | None = None,
) -> ScanReport:
    """Frequency of null_2 >= 2 for random Φ: ⋀²K^n → K^m, m = 1 .. 2n-2.

    Violations: a skew form (m = 1) without a 2-dim isotropic subspace, or no Φ with
    nullity 1 at m = 2n-3 over any listed q (searched for up to ``extra_trials`` more draws).
    """
    qs = tuple(q_values)
    if n < 4:
        raise ValueError("the table starts at n = 4")
    if any(not _is_odd_prime(q) for q in qs):
        raise ValueError("q must be odd primes")
    cells, violations = [], []
    edge = 2 * n - 3
    edge_found = False
    for m in range(1, 2 * n - 1):
        for q in qs:
            F = GF(q)
            cell = Cell({"n": n, "m": m, "q": q}, {"null=1": 0, "null>=2": 0, "budget": 0})
            draws = trials + (extra_trials if m == edge else 0)
            for t in range(draws):
                if t >= trials and "null=1" in cell.exemplars:
                    break
                phi = random_form(2, n, m, F, _trial_seed(seed, n, m, q, t))
                try:
                    ok, cert = decide_nullity_geq(phi, 2, 2, budget, threads)
                except BudgetExceeded:
                    if t < trials:
                        cell.counts["budget"] += 1
                    continue
                if t < trials:
                    cell.work["points"] += cert.stats["points"]
                    cell.work["nodes"] += cert.stats["nodes"]
                    cell.counts["null>=2" if ok else "null=1"] += 1
                if not ok and "null=1" not in cell.exemplars:
                    lower = decide_nullity_geq(phi, 2, 1)[1]
                    cell.exemplars["null=1"] = Exemplar(
                        render(phi), {**NullityProof(1, lower, cert).to_json(), "trial": t}
                    )
                if m == 1 and ok is False:
                    violations.append(f"m=1 q={q} trial={t}: a skew form on K^{n} without an isotropic plane")
            if m == edge and "null=1" in cell.exemplars:
                edge_found = True
            cells.append(cell)
    if not edge_found:
        violations.append(f"no form with nullity 1 found at m={edge} over q in {list(qs)}")
    config = {"n": n, "q_values": list(qs), "trials": trials, "seed": seed, "budget": budget,
              "extra_trials": extra_trials}
    notes = [
        f"Counts for m <= {2 * n - 4} are informational; only m = 1 is universal over every field.",
        f"At m = {edge} the trial loop continues past 'trials' until a nullity-1 form is found; "
        "extra draws are not added to the counts.",
    ]
    return ScanReport("goodwillie", config, cells, violations, notes, list(invocation) if invocation else None)


@dataclass(frozen=True)
class CutBound:
    b1: int
    certificate: RationalBoundCertificate

    @property
    def bound(self) -> int:
        return self.certificate.upper

    def text(self) -> str:
        return f"b₁ = {self.b1}, cut number ≤ {self.bound}"

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "kind": "cut-bound",
            "b1": self.b1,
            "cut_number_at_most": self.bound,
            "statement": (
                "any closed oriented 3-manifold with this cup form has cut number "
                f"<= {self.bound}; b1 = {self.b1}"
            ),
            "certificate": self.certificate.to_json(),
        }


def cut_bound_report(
    f: AltForm, primes: Iterable[int], budget: int = DEFAULT_BUDGET, threads: int = 1, witness=None
) -> CutBound:
    if f.s != 3 or f.m != 1:
        raise ValueError("cut-number bounds need a scalar 3-form")
    if f.field != QQ:
        raise ValueError("cut-number bounds need a form over Q")
    cert = certify_rational(f, primes, witness=witness, k=2, budget=budget, threads=threads)
    return CutBound(f.n, cert)
