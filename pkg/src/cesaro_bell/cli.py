"""Command-line front end: ``bell``, ``verify`` and ``dump`` subcommands.

Exit codes: 0 success, 1 bad arguments or I/O error, 2 uncertified Cesaro
estimate, 3 at least one verification failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from typing import List, Sequence

import gmpy2

from . import exact, formulas, mpreal, verify
from .exceptions import BellError
from .integrand import BlockKernel, CesaroComplex, PowerKernel, SineProduct, evaluate_at

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_UNCERTIFIED = 2
EXIT_FAILED = 3

METHODS = ("triangle", "stirling-sum", "inclusion-exclusion", "cesaro", "dobinski")
KINDS = ("cesaro", "power", "block", "sines")

DUMP_BITS = 113
DUMP_DIGITS = 17
HUMAN_DIGITS = 25


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 by default; 2 is reserved for "uncertified"
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cesaro-bell", description="Bell numbers by several independent routes.")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("bell", help="compute B_n")
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--method", choices=METHODS, default="triangle")
    b.add_argument("--bits", type=int, default=None,
                   help="working precision (dobinski) or precision floor (cesaro)")
    b.add_argument("--guard", type=int, default=32, help="guard bits for the cesaro plan")
    b.add_argument("--tol", type=float, default=verify.DOBINSKI_REL_TOL,
                   help="relative tolerance for dobinski")
    b.add_argument("--real-form", action="store_true", help="cesaro: use the all-real integrand")
    b.add_argument("--format", choices=("human", "json", "csv"), default="human")

    v = sub.add_parser("verify", help="run the identity checks")
    v.add_argument("--max-n", type=int, default=6)
    v.add_argument("--only", action="append", default=None, metavar="IDENTITY",
                   help=f"restrict to one identity (repeatable): {', '.join(verify.IDENTITIES)}")
    v.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    v.add_argument("--timings", action="store_true", help="include wall_time in output")
    v.add_argument("--format", choices=("human", "json", "csv"), default="human")

    d = sub.add_parser("dump", help="sample an integrand on [0, pi] as CSV")
    d.add_argument("--kind", choices=KINDS, required=True)
    d.add_argument("--n", type=int, required=True)
    d.add_argument("--j", type=int, default=None)
    d.add_argument("--k", type=int, default=None)
    d.add_argument("--m", type=int, default=None)
    d.add_argument("--samples", type=int, default=100)
    d.add_argument("--out", default="-", help="output path, '-' for stdout")
    return parser


def _document(command: str, params: dict, results: List[dict]) -> str:
    return json.dumps({"command": command, "params": params, "results": results}, indent=2) + "\n"


def _csv_text(rows: List[dict]) -> str:
    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: json.dumps(v) if isinstance(v, list) else v for k, v in row.items()})
    return buf.getvalue()


# -- bell --------------------------------------------------------------------


def cmd_bell(args) -> int:
    n = args.n
    if n < 0:
        raise UsageError("--n must be >= 0")
    params = {"n": n, "method": args.method}
    code = EXIT_OK
    if args.method == "triangle":
        result = {"value": str(exact.bell_exact(n))}
    elif args.method == "stirling-sum":
        result = {"value": str(exact.stirling_row(n).total())}
    elif args.method == "inclusion-exclusion":
        result = {"value": str(sum(exact.stirling_incl_excl(n, k) for k in range(n + 1)))}
    elif args.method == "cesaro":
        if n < 1:
            raise UsageError("the cesaro method needs n >= 1")
        params.update(guard=args.guard, bits=args.bits, real_form=args.real_form)
        est = formulas.bell_cesaro(n, args.guard, real_form=args.real_form, min_bits=args.bits)
        q = est.quadrature
        result = {
            "value": str(est.rounded),
            "estimate": mpreal.to_decimal(est.estimate),
            "rounded": str(est.rounded),
            "certified": est.certified,
            "error_estimate": mpreal.to_decimal(q.error_estimate),
            "nodes_used": q.nodes_used,
            "working_bits": q.working_bits,
        }
        if not est.certified:
            code = EXIT_UNCERTIFIED
    else:
        if args.tol <= 0:
            raise UsageError("--tol must be positive")
        params.update(tol=args.tol, bits=args.bits)
        est = formulas.bell_dobinski(n, args.tol, args.bits)
        with mpreal.working_precision(est.estimate.precision):
            nearest = int(gmpy2.rint(est.estimate))
        result = {
            "value": str(nearest),
            "estimate": mpreal.to_decimal(est.estimate),
            "terms_used": est.terms_used,
            "tail_bound": mpreal.to_decimal(est.tail_bound),
            "working_bits": est.estimate.precision,
        }
        logging.getLogger(__name__).info("dobinski n=%d used %d terms", n, est.terms_used)

    if args.format == "json":
        sys.stdout.write(_document("bell", params, [result]))
    elif args.format == "csv":
        sys.stdout.write(_csv_text([dict(n=n, method=args.method, **result)]))
    elif len(result) == 1:
        print(result["value"])
    else:
        print(result["value"])
        for key, value in result.items():
            if key != "value":
                print(f"  {key}: {str(value).lower() if isinstance(value, bool) else value}")
    return code


# -- verify ------------------------------------------------------------------


def _human_table(reports: Sequence[verify.VerificationReport]) -> str:
    lines = [f"{'identity':<16} {'params':<10} {'pass':<5} {'abs_residual':<27} tolerance"]
    for r in reports:
        res = r.abs_residual
        tol = r.tolerance
        if "e" in res and len(res) > HUMAN_DIGITS + 6:
            res = mpreal.to_decimal(gmpy2.mpfr(res, max(r.working_bits, 53)), HUMAN_DIGITS)
        if "e" in tol and len(tol) > HUMAN_DIGITS + 6:
            tol = mpreal.to_decimal(gmpy2.mpfr(tol, max(r.working_bits, 53)), HUMAN_DIGITS)
        params = ",".join(map(str, r.parameters))
        line = f"{r.identity:<16} {params:<10} {'ok' if r.passed else 'FAIL':<5} {res:<27} {tol}"
        if r.reason:
            line += f"  ({r.reason})"
        lines.append(line)
    failed = sum(not r.passed for r in reports)
    lines.append(f"{len(reports)} checks, {failed} failed")
    return "\n".join(lines) + "\n"


def cmd_verify(args) -> int:
    if args.max_n < 1:
        raise UsageError("--max-n must be >= 1")
    if args.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    try:
        tasks = verify.build_tasks(args.max_n, args.only)
    except BellError as exc:
        raise UsageError(str(exc)) from exc
    reports = verify.run_tasks(tasks, args.jobs)
    rows = [r.to_dict(timings=args.timings) for r in reports]
    params = {"max_n": args.max_n, "only": args.only}
    if args.format == "json":
        sys.stdout.write(_document("verify", params, rows))
    elif args.format == "csv":
        sys.stdout.write(_csv_text(rows))
    else:
        sys.stdout.write(_human_table(reports))
    return EXIT_OK if verify.all_passed(reports) else EXIT_FAILED


# -- dump --------------------------------------------------------------------


def _dump_kind(args):
    given = {name: getattr(args, name) for name in ("j", "k", "m") if getattr(args, name) is not None}
    needed = {"cesaro": set(), "power": {"j"}, "block": {"k"}, "sines": {"m"}}[args.kind]
    if set(given) != needed:
        want = ", ".join(f"--{x}" for x in sorted(needed)) or "no extra parameter"
        raise UsageError(f"--kind {args.kind} takes {want}")
    if args.kind == "cesaro":
        return CesaroComplex(args.n)
    if args.kind == "power":
        return PowerKernel(args.j, args.n)
    if args.kind == "block":
        return BlockKernel(args.k, args.n)
    return SineProduct(args.m, args.n)


def dump_rows(kind, samples: int, p: int = DUMP_BITS) -> List[tuple]:
    """(theta, value) string pairs at theta = i pi / samples, i = 0..samples."""
    rows = []
    with mpreal.working_precision(p):
        pi = gmpy2.const_pi()
        for i in range(samples + 1):
            theta = pi * i / samples
            value = evaluate_at(kind, theta)
            rows.append((format(theta, f".{DUMP_DIGITS}g"), format(value, f".{DUMP_DIGITS}g")))
    return rows


def cmd_dump(args) -> int:
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    kind = _dump_kind(args)
    rows = dump_rows(kind, args.samples)
    text = "theta,value\n" + "".join(f"{t},{v}\n" for t, v in rows)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        try:
            with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            raise UsageError(f"cannot write {args.out}: {exc}") from exc
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    handler = {"bell": cmd_bell, "verify": cmd_verify, "dump": cmd_dump}[args.command]
    try:
        return handler(args)
    except (UsageError, BellError) as exc:
        print(f"cesaro-bell {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
