"""Command-line interface.

Exit codes: 0 success, 1 usage or input error, 2 internal consistency
failure (failed exact division, oracle mismatch, broken invariant).

Negative vectors must be attached with ``=``, e.g. ``--a=-1,1``.
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import logging
import os
import sys
from typing import Sequence

from . import kernel
from .dr import ForgottenSpec, dr_genus, dr_integral, forgotten_integral_direct, forgotten_series
from .errors import InvariantError, PsiPointError
from .kernel import pn_eval, pn_series, pn_symbolic
from .npoint import genus_of, intersection_number, npoint_series
from .oracle import dvv_number, oracle_selfcheck

log = logging.getLogger("psi_point")

ENV_PARALLELISM = "PSI_POINT_PARALLELISM"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", metavar="PATH", help="write the document here instead of stdout")
    common.add_argument("--parallelism", type=int, default=None, metavar="K",
                        help=f"worker processes, 0 = one per CPU (fallback: ${ENV_PARALLELISM})")

    parser = _Parser(prog="psi-point", description="psi-class intersection numbers via DR-cycle kernels")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("npoint", parents=[common], help="coefficients of the n-point function")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--check", choices=("none", "oracle"), default="none")

    p = sub.add_parser("intersect", parents=[common], help="one intersection number")
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--d", type=_int_list, required=True)
    p.add_argument("--check", choices=("none", "oracle"), default="none")

    p = sub.add_parser("dr", parents=[common], help="psi-integral over a DR cycle")
    p.add_argument("--a", type=_int_list, required=True)
    p.add_argument("--d", type=_int_list, required=True)

    p = sub.add_parser("drpush", parents=[common], help="psi-integral over a pushed-forward DR cycle")
    p.add_argument("--a", type=_int_list, required=True, help="kept weights")
    p.add_argument("--b", type=_int_list, required=True, help="forgotten weights")
    p.add_argument("--d", type=_int_list, required=True)

    p = sub.add_parser("pn", parents=[common], help="raw kernel coefficients")
    p.add_argument("--a", type=_int_list, help="numeric weights (omit for symbolic output)")
    p.add_argument("--n", type=int, help="point count for symbolic output")
    p.add_argument("--order", type=int, required=True)

    p = sub.add_parser("selftest", parents=[common], help="run the verification suite")
    p.add_argument("--level", choices=("quick", "full"), default="quick")
    return parser


def _resolve_parallelism(flag: int | None) -> int:
    if flag is None:
        env = os.environ.get(ENV_PARALLELISM)
        if env is None:
            return 0
        try:
            flag = int(env)
        except ValueError:
            raise UsageError(f"{ENV_PARALLELISM} must be an integer, got {env!r}")
    if flag < 0:
        raise UsageError("parallelism must be non-negative")
    return flag


# --- document rendering -------------------------------------------------------


def _render(doc: dict, fmt: str, rows_key: str = "entries", columns: Sequence[str] | None = None) -> str:
    if fmt == "json":
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    rows = doc.get(rows_key)
    if rows is None:
        rows = [doc]
    columns = list(columns or rows[0].keys() if rows else columns or [])
    writer.writerow(columns)
    for row in rows:
        writer.writerow([row[c] for c in columns])
    return buf.getvalue()


def _entries_csv(doc: dict, width: int) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    head = ["g"] if doc["entries"] and "g" in doc["entries"][0] else []
    writer.writerow(head + [f"d{i + 1}" for i in range(width)] + ["value"])
    for entry in doc["entries"]:
        writer.writerow(([entry["g"]] if head else []) + list(entry["d"]) + [entry["value"]])
    return buf.getvalue()


def _vec(values) -> str:
    return ",".join(str(v) for v in values)


# --- commands -----------------------------------------------------------------


def cmd_npoint(args) -> tuple[dict, str]:
    if args.n < 1 or args.order < 0:
        raise UsageError("--n must be >= 1 and --order >= 0")
    series = npoint_series(args.n, args.order)
    entries = []
    for degree in range(args.order + 1):
        for d in itertools.product(range(degree + 1), repeat=args.n):
            if sum(d) != degree:
                continue
            g = genus_of(d)
            value = series.coefficient(d)
            if g is None:
                if value:
                    raise InvariantError(f"coefficient {value} at x^{d} violates the dimension constraint")
                continue
            entries.append({"g": g, "d": list(d), "value": str(value)})
    entries.sort(key=lambda e: (e["g"], e["d"]))
    doc = {"n": args.n, "order": args.order, "entries": entries}
    if args.check == "oracle":
        _require_oracle()
        bad = [e for e in entries if str(dvv_number(e["g"], e["d"])) != e["value"]]
        doc["check"] = "ok" if not bad else "mismatch"
        if bad:
            raise InvariantError(f"oracle disagrees on {len(bad)} entries, first {bad[0]}")
    text = _render(doc, "json") if args.format == "json" else _entries_csv(doc, args.n)
    return doc, text


def _require_oracle() -> None:
    report = oracle_selfcheck()
    if not report.ok:
        raise InvariantError(f"oracle self-check failed: {report.mismatches[:3]}")


def cmd_intersect(args) -> tuple[dict, str]:
    if not args.d or min(args.d) < 0 or args.g < 0:
        raise UsageError("need --g >= 0 and non-negative --d")
    value = intersection_number(args.g, args.d)
    doc = {"g": args.g, "d": list(args.d), "value": str(value)}
    if args.check == "oracle":
        _require_oracle()
        want = dvv_number(args.g, args.d)
        doc["oracle"] = str(want)
        doc["check"] = "ok" if want == value else "mismatch"
        if want != value:
            raise InvariantError(f"kernel route gives {value}, oracle gives {want}")
    if args.format == "csv":
        return doc, _entries_csv({"entries": [doc]}, len(args.d))
    return doc, _render(doc, "json")


def cmd_dr(args) -> tuple[dict, str]:
    if len(args.a) != len(args.d) or len(args.a) < 2:
        raise UsageError("--a and --d need the same length (at least 2)")
    if sum(args.a) != 0:
        raise UsageError(f"DR weights must sum to zero, got {args.a}")
    if min(args.d) < 0:
        raise UsageError("--d must be non-negative")
    value = dr_integral(args.a, args.d)
    doc = {"a": list(args.a), "d": list(args.d), "g": dr_genus(len(args.d), sum(args.d)), "value": str(value)}
    if args.format == "csv":
        return doc, _render({**doc, "a": _vec(args.a), "d": _vec(args.d)}, "csv")
    return doc, _render(doc, "json")


def cmd_drpush(args) -> tuple[dict, str]:
    try:
        spec = ForgottenSpec(tuple(args.a), tuple(args.b))
    except ValueError as exc:
        raise UsageError(str(exc))
    if len(args.d) != spec.n or min(args.d) < 0:
        raise UsageError(f"--d needs {spec.n} non-negative entries")
    series_value = forgotten_series(spec, sum(args.d)).coefficient(args.d)
    twice = sum(args.d) - spec.n - spec.m + 3
    if twice < 0 or twice % 2:
        direct_value = None
        g = None
    else:
        direct_value = forgotten_integral_direct(spec, args.d)
        g = twice // 2
    doc = {
        "a": list(spec.a),
        "b": list(spec.b),
        "d": list(args.d),
        "g": g,
        "series_value": str(series_value),
        "direct_value": None if direct_value is None else str(direct_value),
    }
    agree = series_value == (direct_value if direct_value is not None else 0)
    doc["check"] = "ok" if agree else "mismatch"
    if not agree:
        raise InvariantError(f"generating series gives {series_value}, signed sum gives {direct_value}")
    if args.format == "csv":
        flat = {k: (_vec(v) if isinstance(v, list) else ("" if v is None else v)) for k, v in doc.items()}
        return doc, _render(flat, "csv")
    return doc, _render(doc, "json")


def cmd_pn(args) -> tuple[dict, str]:
    if args.order < 0:
        raise UsageError("--order must be >= 0")
    if args.a:
        if len(args.a) < 2:
            raise UsageError("--a needs at least two entries")
        series = pn_series(args.a, args.order)
        entries = [{"d": list(e), "value": str(c)} for e, c in sorted(series.terms.items(), key=lambda t: (sum(t[0]), t[0]))]
        doc = {"n": len(args.a), "order": args.order, "a": list(args.a), "entries": entries}
        width = len(args.a)
    elif args.n:
        if args.n < 2:
            raise UsageError("--n must be at least 2")
        sym = pn_symbolic(args.n, args.order)
        entries = [{"d": list(e), "value": str(p)} for e, p in sorted(sym.coeffs.items(), key=lambda t: (sum(t[0]), t[0]))]
        doc = {"n": args.n, "order": args.order, "entries": entries}
        width = args.n
    else:
        raise UsageError("pn needs --a or --n")
    text = _render(doc, "json") if args.format == "json" else _entries_csv(doc, width)
    return doc, text


def cmd_selftest(args) -> tuple[dict, str]:
    from .verify import run_suite

    results = run_suite(args.level)
    for r in results:
        print(r.line(), file=sys.stderr)
    checks = [{"name": r.name, "passed": r.passed, "detail": r.detail, "seconds": round(r.seconds, 3)} for r in results]
    doc = {"level": args.level, "passed": sum(r.passed for r in results), "failed": sum(not r.passed for r in results),
           "checks": checks}
    if args.format == "csv":
        return doc, _render({"entries": checks}, "csv")
    return doc, _render(doc, "json")


COMMANDS = {
    "npoint": cmd_npoint,
    "intersect": cmd_intersect,
    "dr": cmd_dr,
    "drpush": cmd_drpush,
    "pn": cmd_pn,
    "selftest": cmd_selftest,
}


def run_cli(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        args = build_parser().parse_args(argv)
        kernel.set_parallelism(_resolve_parallelism(args.parallelism))
        doc, text = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"psi-point: error: {exc}", file=sys.stderr)
        return 1
    except InvariantError as exc:
        print(f"psi-point: internal consistency failure: {exc}", file=sys.stderr)
        return 2
    except (PsiPointError, ValueError) as exc:
        print(f"psi-point: error: {exc}", file=sys.stderr)
        return 1
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.command == "selftest" and doc["failed"]:
        return 2
    return 0


def main() -> None:
    sys.exit(run_cli())
