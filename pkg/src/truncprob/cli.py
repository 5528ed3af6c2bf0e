"""Command-line front end.

    truncprob prob     --dist binomial:n=100,p=0.5 --range 0:100 --eta 0.01 --method massart
    truncprob truncate --spec query.json
    truncprob verify   --dist poisson_sum:n=5,lambda=2 --range 0:inf --eta 1e-6
    truncprob bench    queries.ndjson --repeat 5

``prob``, ``truncate`` and ``verify`` print one JSON document. ``bench``
prints CSV. Exit codes: 0 success, 1 bracket not containing the oracle
(``verify`` only), 2 invalid input, 3 term cap exceeded.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import statistics
import sys
import time
from pathlib import Path

from .distributions import (
    BinomialCount,
    BoxQuery,
    Dimension,
    PoissonSum,
    full_sum_oracle,
)
from .engine import box_probability, verify_against_oracle, work_estimate
from .errors import DomainError, ResourceError
from .truncation import Method, truncate_box

EXIT_OK = 0
EXIT_NOT_CONTAINED = 1
EXIT_INVALID = 2
EXIT_RESOURCE = 3

BENCH_COLUMNS = [
    "query_id", "method", "terms_summed", "terms_full",
    "wall_ns_truncated", "wall_ns_oracle", "speedup",
]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


# --- query parsing -----------------------------------------------------------


def _number(value, field, kind=float):
    if isinstance(value, bool):
        raise DomainError(f"{field} must be a number, got {value!r}", field)
    try:
        out = kind(value)
    except (TypeError, ValueError):
        raise DomainError(f"{field} must be a number, got {value!r}", field) from None
    if kind is int and isinstance(value, float) and value != out:
        raise DomainError(f"{field} must be an integer, got {value!r}", field)
    return out


def _bound(value, field):
    if isinstance(value, str) and value.strip().lower() in ("inf", "+inf", "infinity"):
        return math.inf
    return _number(value, field, int)


def dimension_from_dict(obj):
    """Build a :class:`Dimension` from the QuerySpec dimension schema."""
    if not isinstance(obj, dict):
        raise DomainError("each dimension must be an object", "dimensions")
    family = obj.get("family")
    if family not in ("binomial", "poisson_sum"):
        raise DomainError(f"family must be 'binomial' or 'poisson_sum', got {family!r}", "family")
    for key in ("n", "a", "b"):
        if key not in obj:
            raise DomainError(f"missing field {key!r}", key)
    n = _number(obj["n"], "n", int)
    if family == "binomial":
        if "p" not in obj:
            raise DomainError("missing field 'p'", "p")
        dist = BinomialCount(n, _number(obj["p"], "p"))
    else:
        if "lambda" not in obj:
            raise DomainError("missing field 'lambda'", "lambda")
        dist = PoissonSum(n, _number(obj["lambda"], "lambda"))
    a = _number(obj["a"], "a", int)
    return Dimension(dist, a, _bound(obj["b"], "b"))


def query_from_dict(obj):
    """Parse a QuerySpec object into ``(BoxQuery, Method)``."""
    if not isinstance(obj, dict):
        raise DomainError("query spec must be a JSON object", "spec")
    dims = obj.get("dimensions")
    if not isinstance(dims, list) or not dims:
        raise DomainError("dimensions must be a non-empty list", "dimensions")
    if "eta" not in obj:
        raise DomainError("missing field 'eta'", "eta")
    query = BoxQuery(tuple(dimension_from_dict(d) for d in dims), _number(obj["eta"], "eta"))
    return query, Method.parse(obj.get("method", "best"))


def parse_dist_flag(text):
    """``binomial:n=100,p=0.5`` or ``poisson_sum:n=5,lambda=2`` to a dict."""
    family, _, params = text.partition(":")
    out = {"family": family.strip()}
    for item in filter(None, params.split(",")):
        key, sep, value = item.partition("=")
        if not sep:
            raise DomainError(f"malformed distribution parameter {item!r}", "dist")
        out[key.strip()] = value.strip()
    return out


def parse_range_flag(text):
    a, sep, b = text.partition(":")
    if not sep:
        raise DomainError(f"range must look like a:b, got {text!r}", "range")
    return a.strip(), b.strip()


def _query_from_args(args):
    if args.spec:
        obj = _load_json(args.spec)
        if args.eta is not None:
            obj["eta"] = args.eta
        if args.method is not None:
            obj["method"] = args.method
        return query_from_dict(obj)
    if not args.dist:
        raise DomainError("give --dist/--range or --spec", "dist")
    if len(args.range) != len(args.dist):
        raise DomainError("need one --range per --dist", "range")
    dims = []
    for d, r in zip(args.dist, args.range):
        obj = parse_dist_flag(d)
        obj["a"], obj["b"] = parse_range_flag(r)
        dims.append(obj)
    if args.eta is None:
        raise DomainError("missing --eta", "eta")
    return query_from_dict({"dimensions": dims, "eta": args.eta,
                            "method": args.method or "best"})


def _load_json(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DomainError(f"cannot read spec file {path}: {exc.strerror}", "spec") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DomainError(f"spec file {path} is not valid JSON: {exc.msg}", "spec") from None


# --- JSON output ---------------------------------------------------------------


def _encode(obj):
    """JSON text with every float written to 17 significant digits."""
    if obj is None or (isinstance(obj, float) and not math.isfinite(obj)):
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        text = format(obj, ".17g")
        if not any(c in text for c in ".en"):
            text += ".0"
        return text
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(k)}: {_encode(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj):
    return _encode(obj)


def _per_dim(results):
    rows = []
    for r in results:
        iv = r.count_interval
        rows.append({
            "u": r.u,
            "v": r.v,
            "k_lo": None if iv.is_empty else iv.k_lo,
            "k_hi": None if iv.is_empty else iv.k_hi,
            "lower_certificate": r.lower_certificate,
            "upper_certificate": r.upper_certificate,
            "method": r.method.value,
        })
    return rows


def bracket_document(bracket):
    return {
        "p_lower": bracket.p_lower,
        "p_upper": bracket.p_upper,
        "eta": bracket.eta,
        "method": bracket.method.value,
        "per_dim": _per_dim(bracket.per_dim),
        "terms_summed": bracket.terms_summed,
        "terms_full": bracket.terms_full,
    }


# --- commands ------------------------------------------------------------------


def cmd_prob(args, out):
    query, method = _query_from_args(args)
    out.write(dumps(bracket_document(box_probability(query, method))) + "\n")
    return EXIT_OK


def cmd_truncate(args, out):
    query, method = _query_from_args(args)
    results = truncate_box(query, method)
    summed, full = work_estimate(query, method)
    doc = {
        "eta": query.eta,
        "method": method.value,
        "per_dim": _per_dim(results),
        "terms_summed": summed,
        "terms_full": full,
    }
    out.write(dumps(doc) + "\n")
    return EXIT_OK


def cmd_verify(args, out):
    query, method = _query_from_args(args)
    report = verify_against_oracle(query, method)
    doc = bracket_document(report.bracket)
    doc.update(p_oracle=report.p_oracle, contained=report.contained, slack=report.slack)
    out.write(dumps(doc) + "\n")
    return EXIT_OK if report.contained else EXIT_NOT_CONTAINED


def _median_ns(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter_ns()
        fn()
        times.append(time.perf_counter_ns() - t0)
    return int(statistics.median(times))


def read_bench_file(path):
    """Queries from a newline-delimited JSON file, as ``(id, query, method)``."""
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise DomainError(f"cannot read spec file {path}: {exc.strerror}", "spec") from None
    queries = []
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DomainError(f"line {lineno}: invalid JSON: {exc.msg}", "spec") from None
        query, method = query_from_dict(obj)
        queries.append((str(obj.get("id", lineno)), query, method))
    return queries


def bench_rows(queries, repeat):
    for qid, query, method in queries:
        bracket = box_probability(query, method)
        t_trunc = _median_ns(lambda: box_probability(query, method), repeat)
        t_oracle = _median_ns(lambda: full_sum_oracle(query), repeat)
        yield {
            "query_id": qid,
            "method": method.value,
            "terms_summed": bracket.terms_summed,
            "terms_full": bracket.terms_full,
            "wall_ns_truncated": t_trunc,
            "wall_ns_oracle": t_oracle,
            "speedup": format(t_oracle / max(t_trunc, 1), ".6g"),
        }


def cmd_bench(args, out):
    if args.repeat < 1:
        raise DomainError("--repeat must be at least 1", "repeat")
    queries = read_bench_file(args.spec)
    writer = csv.DictWriter(out, fieldnames=BENCH_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in bench_rows(queries, args.repeat):
        writer.writerow(row)
        out.flush()
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="truncprob",
                     description="Box probabilities with a guaranteed truncation error.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def query_opts(p):
        p.add_argument("--dist", action="append", default=[],
                       help="binomial:n=N,p=P or poisson_sum:n=N,lambda=L (repeat per dimension)")
        p.add_argument("--range", action="append", default=[],
                       help="closed count bounds a:b, b may be inf (repeat per dimension)")
        p.add_argument("--eta", type=float, help="total error budget in (0, 1)")
        p.add_argument("--method", choices=["chernoff", "massart", "best"])
        p.add_argument("--spec", help="JSON file holding one query")

    for name, fn, help_ in (
        ("prob", cmd_prob, "truncated probability and its bracket"),
        ("truncate", cmd_truncate, "truncation intervals only"),
        ("verify", cmd_verify, "compare the bracket with full summation"),
    ):
        p = sub.add_parser(name, help=help_)
        query_opts(p)
        p.set_defaults(func=fn)

    p = sub.add_parser("bench", help="time truncated vs full summation")
    p.add_argument("spec", help="newline-delimited JSON, one query per line")
    p.add_argument("--repeat", type=int, default=5)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except DomainError as exc:
        msg = str(exc).replace("\n", " ")
        if exc.field and exc.field not in msg:
            msg = f"{exc.field}: {msg}"
        print(f"truncprob: error: {msg}", file=sys.stderr)
        return EXIT_INVALID
    except ResourceError as exc:
        print(f"truncprob: resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
