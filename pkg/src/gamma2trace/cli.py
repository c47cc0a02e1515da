"""Command-line entry point.

Exit codes: 0 success, 1 verification failure, 2 usage error or aborted run.
Machine output goes to stdout (or --output); diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import time
from typing import Sequence

from . import __version__
from .certificate import SCHEMA_VERSION, full_certificate
from .matrices import CONSTANTS, IntMatrix2, compute_F, p_k, trace_comb
from .polynomial import MultilinearPoly, SignSequence
from .verify import goodness, numeric_oracle, oracle_trials, sweep, verify_comb_good, verify_theorem

log = logging.getLogger("gamma2trace")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
MAX_VERIFY_K = 6
MAX_DEPTH = 10
JOBS_ENV = "GAMMA2TRACE_JOBS"


class UsageError(Exception):
    pass


def _default_jobs() -> int:
    try:
        return max(1, int(os.environ.get(JOBS_ENV, "1")))
    except ValueError:
        return 1


def _emit(args, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2)


def _csv(rows: list[list]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def _sigma(args, k: int) -> SignSequence | None:
    if args.sigma is None:
        return None
    try:
        sigma = SignSequence.from_string(args.sigma)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if sigma.k != k:
        raise UsageError(f"--sigma needs exactly {2 * k} signs, got {len(args.sigma)}")
    return sigma


def _matrix(text: str | None) -> IntMatrix2 | None:
    if text is None:
        return None
    try:
        return IntMatrix2.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


# commands -----------------------------------------------------------------


def cmd_compute(args) -> int:
    k = args.k
    if k < 0:
        raise UsageError("--k must be >= 0")
    F = compute_F(k)
    sigma = _sigma(args, k)
    if sigma is not None:
        F = F.substitute_signs(sigma)
    suffix = "^σ" if sigma is not None else ""
    entries = dict(zip("fhtg", F.entries()))
    entries["p"] = F.trace()
    if args.format == "text":
        _emit(args, "\n".join(f"{name}{suffix} = {poly.to_text()}" for name, poly in entries.items()))
    elif args.format == "json":
        obj = {
            "schema_version": SCHEMA_VERSION,
            "k": k,
            "sigma": str(sigma) if sigma is not None else None,
            "entries": {name: poly.to_json_obj() for name, poly in entries.items()},
        }
        _emit(args, _dump(obj))
    else:
        rows = [["entry", "mask", "coeff"]]
        for name, poly in entries.items():
            rows.extend([name, m, c] for m, c in poly)
        _emit(args, _csv(rows))
    return EXIT_OK


def _report_rows(label: str, rep) -> list[list]:
    c = rep.counterexample or {}
    return [[label, rep.k, rep.all_good, rep.sign_formula_holds, c.get("sigma", "")]]


def _emit_goodness(args, reports: dict) -> None:
    if args.format == "json":
        obj = {"schema_version": SCHEMA_VERSION}
        obj.update({name: rep.to_json_obj(args.per_sigma) for name, rep in reports.items()})
        _emit(args, _dump(obj))
    elif args.format == "csv":
        rows = [["check", "k", "all_good", "sign_formula_holds", "counterexample_sigma"]]
        for name, rep in reports.items():
            rows += _report_rows(name, rep)
        _emit(args, _csv(rows))
    else:
        lines = []
        for name, rep in reports.items():
            lines.append(
                f"{name}: k={rep.k} good={rep.all_good} sign_formula={rep.sign_formula_holds} counts={rep.counts}"
            )
            if rep.counterexample:
                cx = rep.counterexample
                lines.append(
                    f"  counterexample sigma={cx['sigma']}: "
                    f"{cx['positive']['coeff']}*{cx['positive']['monomial']} vs "
                    f"{cx['negative']['coeff']}*{cx['negative']['monomial']}"
                )
        _emit(args, "\n".join(lines))


def cmd_goodness(args) -> int:
    if args.poly is not None:
        try:
            poly = MultilinearPoly.from_text(args.poly, k=args.k)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    else:
        M = _matrix(args.matrix)
        if M is None or args.k is None:
            raise UsageError("goodness needs --poly, or --k with --matrix")
        poly = trace_comb(compute_F(args.k), M)
    if poly.k > MAX_VERIFY_K and not args.unsafe_large:
        raise UsageError(f"k={poly.k} exceeds the default cap {MAX_VERIFY_K}; pass --unsafe-large")
    rep = goodness(poly, jobs=args.jobs, keep_per_sigma=args.per_sigma)
    _emit_goodness(args, {"goodness": rep})
    return EXIT_OK if rep.all_good else EXIT_FAIL


def cmd_verify(args) -> int:
    k = args.k
    if k is None or k < 1:
        raise UsageError("verify needs --k >= 1")
    if k > MAX_VERIFY_K and not args.unsafe_large:
        raise UsageError(f"k={k} exceeds the default cap {MAX_VERIFY_K}; pass --unsafe-large")
    reports = {"theorem": verify_theorem(k, jobs=args.jobs, keep_per_sigma=args.per_sigma)}
    M = _matrix(args.matrix)
    if M is not None:
        reports["combination"] = verify_comb_good(k, M, jobs=args.jobs, keep_per_sigma=args.per_sigma)
    _emit_goodness(args, reports)
    return EXIT_OK if all(rep.ok for rep in reports.values()) else EXIT_FAIL


def _parse_constants(items: Sequence[str]) -> dict[str, IntMatrix2] | None:
    if not items:
        return None
    consts = dict(CONSTANTS)
    for item in items:
        name, sep, literal = item.partition("=")
        if not sep or name not in consts:
            raise UsageError(f"--constant expects NAME=[[a,c],[b,d]] with NAME in {sorted(consts)}")
        consts[name] = _matrix(literal)
    return consts


def cmd_certify(args) -> int:
    depth = args.depth
    if depth < 1:
        raise UsageError("--depth must be >= 1")
    if depth > MAX_DEPTH and not args.unsafe_large:
        raise UsageError(f"depth {depth} exceeds the default cap {MAX_DEPTH}; pass --unsafe-large")
    k_max = 4 if args.k is None else args.k
    if k_max < 1:
        raise UsageError("--k must be >= 1 for certify")
    consts = _parse_constants(args.constant)
    rep = full_certificate(depth, k_max, sample_M=args.samples, seed=args.seed, consts=consts)
    if args.format == "json":
        _emit(args, _dump(rep.to_json_obj()))
    elif args.format == "csv":
        rows = [["check", "ok", "instances"]] + [list(r) for r in rep.rows()]
        _emit(args, _csv(rows))
    else:
        lines = [f"{name}: {'PASS' if ok else 'FAIL'} ({n} instances)" for name, ok, n in rep.rows()]
        lines += [f"  failure: {json.dumps(f.to_json_obj())}" for f in rep.failures]
        _emit(args, "\n".join(lines))
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_oracle(args) -> int:
    k = args.k
    if k is None or k < 1:
        raise UsageError("oracle needs --k >= 1")
    if args.point is not None:
        try:
            point = [int(v) for v in args.point.split(",")]
        except ValueError as exc:
            raise UsageError(f"bad --point {args.point!r}") from exc
        if len(point) != 2 * k:
            raise UsageError(f"--point needs {2 * k} integers")
        oracle = numeric_oracle(k, point)
        value = p_k(k).evaluate(point)
        obj = {"k": k, "point": point, "oracle": str(oracle), "polynomial": str(value), "agree": oracle == value}
        if args.format == "text":
            _emit(args, f"oracle = {oracle}\npolynomial = {value}")
        elif args.format == "csv":
            _emit(args, _csv([["point", "oracle", "polynomial"], [args.point, oracle, value]]))
        else:
            _emit(args, _dump(obj))
        return EXIT_OK if oracle == value else EXIT_FAIL
    rep = oracle_trials(k, trials=args.trials, seed=args.seed)
    if args.format == "text":
        _emit(args, f"k={k} seed={args.seed}: {rep.agree}/{rep.trials} agree")
    elif args.format == "csv":
        _emit(args, _csv([["k", "seed", "trials", "agree"], [k, args.seed, rep.trials, rep.agree]]))
    else:
        _emit(args, _dump(rep.to_json_obj()))
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_bench(args) -> int:
    k_top = 6 if args.k is None else args.k
    if k_top < 1:
        raise UsageError("--k must be >= 1")
    if k_top > MAX_VERIFY_K and not args.unsafe_large:
        raise UsageError(f"k={k_top} exceeds the default cap {MAX_VERIFY_K}; pass --unsafe-large")
    try:
        job_counts = [int(v) for v in str(args.bench_jobs or args.jobs).split(",")]
    except ValueError as exc:
        raise UsageError("--jobs expects a comma-separated list of worker counts") from exc
    compute_F.cache_clear()
    per_k = []
    for k in range(1, k_top + 1):
        t0 = time.perf_counter()
        poly = compute_F(k).trace()
        per_k.append({"k": k, "terms": len(poly), "compute_seconds": time.perf_counter() - t0})
    sweeps = []
    poly = p_k(k_top)
    for jobs in job_counts:
        t0 = time.perf_counter()
        sweep(poly, jobs=jobs)
        sweeps.append({"jobs": jobs, "seconds": time.perf_counter() - t0})
    base = sweeps[0]["seconds"]
    for row in sweeps:
        row["speedup"] = base / row["seconds"] if row["seconds"] else None
    obj = {
        "schema_version": SCHEMA_VERSION,
        "version": __version__,
        "cpu_count": os.cpu_count(),
        "compute": per_k,
        "sweep": {"k": k_top, "n_sigma": 4**k_top, "runs": sweeps},
    }
    if args.format == "json":
        _emit(args, _dump(obj))
    elif args.format == "csv":
        rows = [["kind", "k", "jobs", "terms", "seconds"]]
        rows += [["compute", r["k"], 1, r["terms"], f"{r['compute_seconds']:.6f}"] for r in per_k]
        rows += [["sweep", k_top, r["jobs"], len(poly), f"{r['seconds']:.6f}"] for r in sweeps]
        _emit(args, _csv(rows))
    else:
        lines = [f"k={r['k']}: {r['terms']} terms, compute {r['compute_seconds']:.4f}s" for r in per_k]
        lines += [f"sweep k={k_top} jobs={r['jobs']}: {r['seconds']:.3f}s (x{r['speedup']:.2f})" for r in sweeps]
        _emit(args, "\n".join(lines))
    return EXIT_OK


COMMANDS = {
    "compute": cmd_compute,
    "goodness": cmd_goodness,
    "verify": cmd_verify,
    "certify": cmd_certify,
    "oracle": cmd_oracle,
    "bench": cmd_bench,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--k", type=int, default=None, help="number of variable pairs")
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--output", "-o", default=None, help="write output here instead of stdout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--unsafe-large", action="store_true", help="lift the default size caps")
    common.add_argument("-v", "--verbose", action="store_true")

    def jobs_flag(p):
        p.add_argument("--jobs", type=int, default=_default_jobs(), help=f"worker processes (env {JOBS_ENV})")

    parser = argparse.ArgumentParser(prog="gamma2trace", description="Trace polynomials of words in Gamma(2).")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", parents=[common], help="emit f_k, h_k, t_k, g_k and p_k")
    p.add_argument("--sigma", help="sign string such as '+-+-' (length 2k)")
    p.set_defaults(k=1)

    p = sub.add_parser("goodness", parents=[common], help="goodness of a polynomial or trace combination")
    p.add_argument("--poly", help="polynomial text, e.g. '1 + 4*x1*y1 - 2*x1'")
    p.add_argument("--matrix", help="row-major [[a,c],[b,d]]")
    p.add_argument("--per-sigma", action="store_true", help="include one row per sign sequence")
    jobs_flag(p)

    p = sub.add_parser("verify", parents=[common], help="exhaustively verify sign coherence of p_k")
    p.add_argument("--matrix", help="also check a f_k + b h_k + c t_k + d g_k for [[a,c],[b,d]]")
    p.add_argument("--per-sigma", action="store_true", help="include one row per sign sequence")
    jobs_flag(p)

    p = sub.add_parser("certify", parents=[common], help="check the finite facts behind the proof")
    p.add_argument("--depth", type=int, default=8, help="maximum word length in the certificate set")
    p.add_argument("--samples", type=int, default=50, help="random matrices for the recursion check")
    p.add_argument("--constant", action="append", default=[], metavar="NAME=[[a,c],[b,d]]",
                   help="override a named constant (negative controls)")

    p = sub.add_parser("oracle", parents=[common], help="compare p_k with integer matrix products")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--point", help="comma-separated exponents m1,n1,...,mk,nk")

    p = sub.add_parser("bench", parents=[common], help="timing and term-count statistics")
    p.add_argument("--jobs", dest="bench_jobs", default=None, help="comma-separated worker counts, e.g. 1,8")
    p.set_defaults(jobs=_default_jobs())
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
    t0 = time.perf_counter()
    try:
        code = COMMANDS[args.command](args)
        log.info("%s finished in %.3fs with exit code %d", args.command, time.perf_counter() - t0, code)
        return code
    except UsageError as exc:
        print(f"gamma2trace {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (MemoryError, OverflowError) as exc:
        print(f"gamma2trace {args.command}: aborted: {exc!r}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
