"""``formlab`` command line.

Exit codes: 0 success, 1 a decision answered "no" (``nullity --assert-leq``) or an
experiment recorded violations, 2 usage or input errors, 3 budget exhausted.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from math import comb
from pathlib import Path
from typing import Sequence

import numpy as np

from . import analyze, experiments, grassmann, liealg
from .exactlin import GF, QQ, PrimeField, Subspace, parse_field
from .exterior import AltForm, FormSyntaxError, parse

EXIT_OK, EXIT_NO, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


# -- argument helpers --------------------------------------------------------------

def _int_list(text: str) -> list[int]:
    """'3,5' -> [3, 5];  '4-9' -> [4, ..., 9]; mixtures like '3,5-7' allowed."""
    out = []
    try:
        for part in text.split(","):
            if "-" in part:
                a, b = part.split("-")
                out.extend(range(int(a), int(b) + 1))
            elif part:
                out.append(int(part))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers like '3,5' or '4-9', got {text!r}") from None
    if not out:
        raise argparse.ArgumentTypeError("empty list")
    return out


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _threads(args) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("FORMLAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"FORMLAB_THREADS must be an integer, got {env!r}") from None
    return 1


def _load_form(path: str) -> AltForm:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return parse(text)
    except FormSyntaxError as exc:
        raise UsageError(f"{path}: {exc}") from None
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _over(f: AltForm, field_text: str | None) -> AltForm:
    """The form over the requested finite field (integral forms over Q are reduced mod p)."""
    if field_text is None:
        if not isinstance(f.field, PrimeField):
            raise UsageError("this form is over Q; pass --field gf:p to reduce it")
        return f
    try:
        field = parse_field(field_text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if field == f.field:
        return f
    if f.field != QQ or not f.is_integral():
        raise UsageError(f"cannot move a form over {f.field.label} to {field.label}")
    return f.over(field)


def _replay_argv(argv: Sequence[str]) -> list[str]:
    """The invocation minus flags that must not influence output."""
    out, skip = [], False
    for a in argv:
        if skip:
            skip = False
            continue
        if a == "--threads":
            skip = True
            continue
        if a.startswith("--threads=") or a == "--pretty":
            continue
        out.append(a)
    return out


# -- commands ------------------------------------------------------------------------

def cmd_rank(args, ctx):
    f = _load_form(args.form)
    rad = analyze.radical(f)
    res = {"n": f.n, "rank": f.n - rad.dim, "radical": [[str(x) for x in v] for v in rad.vectors]}
    return EXIT_OK, res, str(res["rank"])


def cmd_nullity(args, ctx):
    f = _over(_load_form(args.form), args.field)
    threads, budget = ctx["threads"], args.budget
    if args.assert_leq is not None:
        r = args.assert_leq + 1
        ok, cert = analyze.decide_nullity_geq(f, args.k, r, budget, threads)
        res = {"assert_leq": args.assert_leq, "holds": not ok, "certificate": cert.to_json()}
        human = f"null_{args.k} <= {args.assert_leq}: {'yes' if not ok else 'no'}"
        return (EXIT_NO if ok else EXIT_OK), res, human
    if args.r is not None:
        ok, cert = analyze.decide_nullity_geq(f, args.k, args.r, budget, threads)
        return EXIT_OK, {"geq": args.r, "answer": ok, "certificate": cert.to_json()}, \
            f"null_{args.k} >= {args.r}: {'yes' if ok else 'no'}"
    value, proof = analyze.nullity_exact(f, args.k, budget, threads)
    return EXIT_OK, proof.to_json(), f"null_{args.k} = {value} over {f.field.label}"


def _load_witness(path: str | None, n: int) -> Subspace | None:
    if path is None:
        return None
    try:
        rows = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read witness {path}: {exc}") from None
    if isinstance(rows, dict):
        rows = rows.get("cartan_witness") or rows.get("witness")
    try:
        return Subspace.span(QQ, n, rows)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad witness in {path}: {exc}") from None


def _bound_human(cert) -> str:
    parts = []
    for s in cert.specializations:
        parts.append(f"  p={s.p}: " + (f"skipped ({s.reason})" if s.skipped else f"null = {s.null}"))
    concl = f"null_Q = {cert.value}" if cert.value is not None else f"{cert.lower} <= null_Q <= {cert.upper}"
    return "\n".join([concl] + parts)


def cmd_certify(args, ctx):
    f = _load_form(args.form)
    w = _load_witness(args.witness, f.n)
    try:
        cert = analyze.certify_rational(f, args.primes, witness=w, k=args.k, budget=args.budget,
                                        threads=ctx["threads"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return EXIT_OK, cert.to_json(), _bound_human(cert)


def cmd_lie(args, ctx):
    try:
        label, r = liealg.parse_type(args.type)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    ct = liealg.lie_triple_form(label, r)
    res = {"algebra": f"{label}{r}", "n": ct.n, "rank": r, "content": ct.form.content()}
    if args.out:
        form_text, sidecar = liealg.export(ct)
        Path(args.out).write_text(form_text)
        Path(args.out + ".json").write_text(sidecar)
        res["files"] = [args.out, args.out + ".json"]
    human = f"{label}{r}: n = {ct.n}"
    if args.primes:
        cert = analyze.certify_rational(ct.form, args.primes, witness=ct.cartan_witness, k=2,
                                        budget=args.budget, threads=ctx["threads"])
        res["certificate"] = cert.to_json(include_form=False)
        human += "\n" + _bound_human(cert)
    return EXIT_OK, res, human


def cmd_classify(args, ctx):
    f = _load_form(args.form)
    try:
        label = analyze.classify_low_rank(f)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    res = {"class": label.value, "rank": analyze.rank(f)}
    if label in (analyze.RankSixClass.Rank6Split, analyze.RankSixClass.Rank6Degenerate):
        lam = analyze.quartic_invariant(analyze.restrict_to_complement_of_radical(f))
        res["lambda"] = str(lam)
    return EXIT_OK, res, label.value


def _finish_report(report, args):
    if args.outdir:
        report.write(args.outdir)
    code = EXIT_OK if report.ok else EXIT_NO
    human = report.to_csv() + ("" if report.ok else "violations:\n  " + "\n  ".join(report.violations))
    return code, report.to_json(), human.rstrip("\n")


def cmd_scan(args, ctx):
    try:
        cfg = experiments.ScanConfig(tuple(args.n), tuple(args.q), args.trials, args.seed, 2, args.budget)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report = experiments.scan_random(cfg, ctx["threads"], invocation=ctx["invocation"])
    return _finish_report(report, args)


def cmd_goodwillie(args, ctx):
    try:
        report = experiments.goodwillie_table(
            args.n, args.q, args.trials, args.seed, args.budget, threads=ctx["threads"],
            invocation=ctx["invocation"],
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return _finish_report(report, args)


def _iota_batch(n_max: int, samples: int, seed: int, q: int) -> dict:
    F = GF(q)
    rows, mismatches = [], 0
    for n in range(1, n_max + 1):
        for s in range(1, n + 1):
            if comb(n, s) > 70:
                continue
            for k in range(1, s + 1):
                for r in range(k, n + 1):
                    expected = grassmann.iota_dim(n, s, k, r)
                    rng = np.random.default_rng([seed, n, s, k, r])
                    seen = []
                    while len(seen) < samples:
                        V = Subspace.span(F, n, rng.integers(0, q, (r, n)).tolist())
                        if V.dim == r:
                            seen.append(Subspace.span(F, comb(n, s), grassmann.iota_generators(V, k, s)).dim)
                    bad = sum(d != expected for d in seen)
                    mismatches += bad
                    rows.append({"n": n, "s": s, "k": k, "r": r, "iota_dim": expected, "computed": seen})
    return {"q": q, "samples": samples, "seed": seed, "cases": len(rows), "mismatches": mismatches, "rows": rows}


def cmd_grass_check(args, ctx):
    res: dict = {}
    lines = []
    code = EXIT_OK
    if args.form:
        f = _over(_load_form(args.form), args.field)
        rs = args.r or [2, 3]
        checks = []
        for r in rs:
            try:
                lhs = grassmann.check_iff(f, args.k, r)
            except grassmann.EnumerationCapExceeded as exc:
                raise UsageError(str(exc)) from None
            rhs = analyze.decide_nullity_geq(f, args.k, r, args.budget, ctx["threads"])[0]
            checks.append({"k": args.k, "r": r, "criterion": lhs, "search": rhs, "agree": lhs == rhs})
            lines.append(f"k={args.k} r={r}: criterion {lhs}, search {rhs}")
            if lhs != rhs:
                code = EXIT_NO
        res["checks"] = checks
    if args.iota_batch:
        if args.seed is None:
            raise UsageError("--iota-batch draws random subspaces and needs --seed")
        batch = _iota_batch(args.n_max, args.samples, args.seed, args.q)
        res["iota_batch"] = batch
        lines.append(f"iota batch: {batch['cases']} cases, {batch['mismatches']} mismatches")
        if batch["mismatches"]:
            code = EXIT_NO
    if not res:
        raise UsageError("give a form file and/or --iota-batch")
    return code, res, "\n".join(lines)


def cmd_cut_bound(args, ctx):
    f = _load_form(args.form)
    w = _load_witness(args.witness, f.n)
    try:
        cb = experiments.cut_bound_report(f, args.primes, args.budget, ctx["threads"], witness=w)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return EXIT_OK, cb.to_json(), cb.text()


# -- parser ----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=_positive, default=None,
                        help="worker threads (default: $FORMLAB_THREADS or 1); never changes output")
    common.add_argument("--budget", type=_positive, default=analyze.DEFAULT_BUDGET,
                        help="maximum projective points per search (default 10^8)")
    common.add_argument("--pretty", action="store_true", help="human-readable output instead of JSON")

    p = argparse.ArgumentParser(prog="formlab", description="Exact rank and k-nullity of alternating forms.")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, func, help_text):
        sp = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        sp.set_defaults(func=func)
        return sp

    sp = add("rank", cmd_rank, "rank of a form (n minus the dimension of its radical)")
    sp.add_argument("form", help="form file, or - for stdin")

    sp = add("nullity", cmd_nullity, "exact k-nullity over a finite field, with certificates")
    sp.add_argument("form")
    sp.add_argument("--k", type=_positive, default=2)
    sp.add_argument("--field", help="finite field such as gf:3 (forms over Q are reduced)")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--r", type=int, help="only decide whether null_k >= R")
    g.add_argument("--assert-leq", type=int, metavar="N", help="exit 0 iff null_k <= N, else 1")

    sp = add("certify", cmd_certify, "bracket the nullity over Q by reduction modulo primes")
    sp.add_argument("form")
    sp.add_argument("--primes", type=_int_list, required=True)
    sp.add_argument("--k", type=_positive, default=2)
    sp.add_argument("--witness", help="JSON file with witness rows over Q (default: greedy search)")

    sp = add("lie", cmd_lie, "triple form of a compact simple Lie algebra, optionally certified")
    sp.add_argument("--type", required=True, help="A1, A2, B2, G2, ...")
    sp.add_argument("--primes", type=_int_list, help="certify null_Q with these primes")
    sp.add_argument("--out", help="write the form here, and basis labels to OUT.json")

    sp = add("classify", cmd_classify, "orbit class of a scalar 3-form of rank at most six")
    sp.add_argument("form")

    sp = add("scan", cmd_scan, "nullity statistics of random scalar 3-forms")
    sp.add_argument("--n", type=_int_list, default=[4, 5, 6, 7, 8, 9])
    sp.add_argument("--q", type=_int_list, default=[3, 5])
    sp.add_argument("--trials", type=_positive, default=100)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--outdir", help="write report.json, table.csv and exemplar forms here")

    sp = add("goodwillie", cmd_goodwillie, "nullity frequencies of random vector-valued 2-forms")
    sp.add_argument("--n", type=int, default=4)
    sp.add_argument("--q", type=_int_list, default=[3, 5, 7])
    sp.add_argument("--trials", type=_positive, default=50)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--outdir")

    sp = add("grass-check", cmd_grass_check, "Grassmannian criterion versus search; ι(V) dimension batch")
    sp.add_argument("form", nargs="?")
    sp.add_argument("--k", type=_positive, default=2)
    sp.add_argument("--r", type=_int_list, help="dimensions to test (default 2,3)")
    sp.add_argument("--field")
    sp.add_argument("--iota-batch", action="store_true", help="check dim ι(V) against the closed form")
    sp.add_argument("--n-max", type=_positive, default=8)
    sp.add_argument("--samples", type=_positive, default=5)
    sp.add_argument("--q", type=int, default=5)
    sp.add_argument("--seed", type=int)

    sp = add("cut-bound", cmd_cut_bound, "cut-number bound implied by a cup form over Q")
    sp.add_argument("form")
    sp.add_argument("--primes", type=_int_list, required=True)
    sp.add_argument("--witness")
    return p


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        ctx = {"threads": _threads(args), "invocation": ["formlab", *_replay_argv(argv)]}
        code, res, human = args.func(args, ctx)
    except UsageError as exc:
        print(f"formlab: error: {exc}", file=stderr)
        return EXIT_USAGE
    except analyze.BudgetExceeded as exc:
        print(f"formlab: {exc}", file=stderr)
        return EXIT_BUDGET
    except experiments.PreconditionError as exc:
        print(f"formlab: error: {exc}", file=stderr)
        return EXIT_USAGE
    if args.pretty:
        print(human, file=stdout)
    else:
        if "invocation" not in res:
            res = {"invocation": ctx["invocation"], **res}
        print(json.dumps(res, indent=2), file=stdout)
    return code


def main() -> None:
    sys.exit(run())
