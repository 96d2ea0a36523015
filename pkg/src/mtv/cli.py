"""Command-line frontend: ``mtv <command> ...``.

Exit codes: 0 success, 1 internal error, 2 usage or parameter error,
3 a theorem-status check failed.  Conjecture reports never change the code.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import mpmath

from . import relations
from .indices import (
    dual,
    format_index,
    format_signed_index,
    parse_index,
    parse_signed_index,
    shuffle_indices,
    stuffle,
)
from .lindep import (
    FAMILY_ALIASES,
    dims_union_intersection,
    find_integer_relation,
    relation_lattice_rank,
)
from .series_eval import BigReal, constants, precision_for
from .values import (
    altZ_value,
    genfun_lhs,
    genfun_rhs,
    set_cache_dir,
    t_value,
    T_value,
    zeta_value,
)

EXIT_OK, EXIT_INTERNAL, EXIT_USAGE, EXIT_THEOREM = 0, 1, 2, 3
DEFAULT_DIGITS = 60
MIN_DIGITS = 15

log = logging.getLogger("mtv")


class UsageError(ValueError):
    pass


# ------------------------------------------------------------- parsing

def parse_range(text: str) -> list[int]:
    """``"2..8"`` -> [2, ..., 8]; also accepts a single integer or a comma list."""
    m = re.fullmatch(r"\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*", text)
    if m:
        lo, hi = int(m.group(1)), int(m.group(2))
        if lo > hi:
            raise UsageError(f"empty range {text!r}")
        return list(range(lo, hi + 1))
    try:
        return [int(p) for p in text.split(",")]
    except ValueError:
        raise UsageError(f"cannot parse range {text!r}") from None


def parse_triple(text: str) -> tuple[int, int, int]:
    ix = parse_index(text)
    if len(ix) != 3:
        raise UsageError(f"expected three integers, got {text!r}")
    return ix


def parse_point(text: str) -> tuple[Fraction, Fraction]:
    try:
        x, y = (Fraction(p) for p in text.split(","))
    except ValueError:
        raise UsageError(f"expected X,Y, got {text!r}") from None
    return x, y


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)(?:\((?P<arg>[^()]*)\))?|(?P<op>[*^]))")


def parse_expression(text: str, digits: int, terms: int | None = None) -> BigReal:
    """Evaluate the small constant language: products of powers of atoms.

    Atoms are integer literals, ``pi``, ``log2``, ``T(..)``, ``t(..)`` and
    ``zeta(..)``; ``a^n`` raises to a non-negative integer power.
    """
    prec = precision_for(digits)
    pos, factors = 0, []
    expect_atom = True
    while pos < len(text.rstrip()):
        m = _TOKEN.match(text, pos)
        if not m:
            raise UsageError(f"cannot parse {text!r} at position {pos}")
        pos = m.end()
        if expect_atom:
            if m.group("num"):
                factors.append(BigReal.exact(int(m.group("num")), prec))
            elif m.group("name"):
                factors.append(_atom(m.group("name"), m.group("arg"), digits, terms, prec))
            else:
                raise UsageError(f"unexpected {m.group('op')!r} in {text!r}")
            expect_atom = False
        elif m.group("op") == "*":
            expect_atom = True
        elif m.group("op") == "^":
            e = _TOKEN.match(text, pos)
            if not e or not e.group("num"):
                raise UsageError(f"exponent must be an integer in {text!r}")
            pos = e.end()
            factors[-1] = factors[-1] ** int(e.group("num"))
        else:
            raise UsageError(f"missing '*' in {text!r}")
    if expect_atom:
        raise UsageError(f"incomplete expression {text!r}")
    out = factors[0]
    for f in factors[1:]:
        out = out * f
    return out


def _atom(name: str, arg: str | None, digits: int, terms, prec: int) -> BigReal:
    if arg is None:
        consts = {"pi": "pi_const", "log2": "log2_const"}
        if name not in consts:
            raise UsageError(f"unknown constant {name!r}")
        return constants(prec)[consts[name]]
    fn = {"T": T_value, "t": t_value, "zeta": zeta_value}.get(name)
    if fn is None:
        raise UsageError(f"unknown function {name!r}")
    return fn(parse_index(arg), digits, terms)


# ------------------------------------------------------------ rendering

def _flatten(d: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, list):
            out[key] = ";".join(str(x) for x in v)
        else:
            out[key] = v
    return out


def render(records: list[dict], fmt: str, table_lines: list[str]) -> str:
    if fmt == "json":
        return json.dumps(records, indent=2, sort_keys=True, default=str) + "\n"
    if fmt == "csv":
        flat = [_flatten(r) for r in records]
        fields: list[str] = []
        for r in flat:
            fields.extend(k for k in r if k not in fields)
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        w.writerows(flat)
        return buf.getvalue()
    return "".join(line + "\n" for line in table_lines)


def _short(x) -> str:
    return mpmath.nstr(x, 3)


# ------------------------------------------------------------- commands

def cmd_eval(args) -> tuple[list[dict], list[str], int]:
    digits = args.digits or DEFAULT_DIGITS
    fam = args.family
    if fam == "altZ":
        z = parse_signed_index(args.index)
        v = altZ_value(z, digits, args.terms)
        label = f"Z({format_signed_index(z)})"
    else:
        fn = {"T": T_value, "t": t_value, "zeta": zeta_value}[fam]
        ix = parse_index(args.index)
        v = fn(ix, digits, args.terms)
        label = f"{fam}({format_index(ix)})"
    rec = {"family": fam, "index": args.index, "digits": digits,
           "value": v.to_decimal(digits), "error": _short(v.err)}
    return [rec], [f"{label} = {rec['value']}", f"error estimate {rec['error']}"], EXIT_OK


def cmd_dual(args):
    ix = parse_index(args.index)
    d = dual(ix)
    return [{"index": format_index(ix), "dual": format_index(d)}], [format_index(d)], EXIT_OK


def _product(args, name: str):
    a, b = parse_index(args.a), parse_index(args.b)
    combo = shuffle_indices(a, b) if name == "shuffle" else stuffle(a, b)
    rec = {"a": format_index(a), "b": format_index(b), "product": name,
           "terms": [{"index": format_index(ix), "coefficient": str(c)} for ix, c in combo.items()]}
    return [rec], [str(combo)], EXIT_OK


def cmd_shuffle(args):
    return _product(args, "shuffle")


def cmd_stuffle(args):
    return _product(args, "stuffle")


VERIFY_NAMES = ("duality", "sum2", "sum3", "interm", "dzv", "parity", "shuffleTT",
                "genfun", "weight6", "stuffle-t", "machide", "binomial-sum", "parity3", "inZ", "all")
_DEFAULT_RANGES = {
    "duality": "2..8", "sum2": "3..12", "sum3": "4..10", "interm": "3..10", "dzv": "3..10",
    "parity": "3..11", "shuffleTT": "4..10", "machide": "4..8",
}
_DEFAULT_TRIPLES = {"binomial-sum": ["1,2,1", "2,2,2", "1,3,2"], "parity3": ["1,1,1"]}
_DEFAULT_POINTS = ["1/8,-1/8", "1/16,-1/16"]


def verify_tasks(name: str, args) -> list[tuple]:
    """Independent units of work as ``(function name, positional args, digits)``."""
    d = args.digits
    if name == "all":
        out = []
        for n in ("duality", "sum2", "sum3", "interm", "dzv", "parity", "shuffleTT", "genfun", "weight6"):
            out.extend(verify_tasks(n, argparse.Namespace(**{**vars(args), "weight": None, "k": None})))
        return out
    rng = args.weight if name == "duality" else args.k
    ks = parse_range(rng or _DEFAULT_RANGES.get(name, "0..0"))
    if name == "duality":
        return [("check_duality", (w,), d) for w in ks if w >= 2]
    simple = {"sum2": "check_sum_formula_depth2", "sum3": "check_sum_formula_depth3",
              "interm": "check_intermediate_sum", "dzv": "check_weighted_dzv",
              "machide": "check_machide_conjecture"}
    if name in simple:
        return [(simple[name], (k,), d) for k in ks]
    if name == "parity":
        return [("check_parity_depth2", (p, k - p), d) for k in ks if k % 2
                for p in range(1, k - 1)]
    if name == "shuffleTT":
        return [("check_shuffle_TT_expansion", (j, k), None) for k in ks for j in range(2, k - 1)]
    if name == "genfun":
        return [("check_genfun", parse_point(p), d or 30) for p in (args.point or _DEFAULT_POINTS)]
    if name == "weight6":
        return [("reduce_weight_le6", (), d)]
    if name in ("binomial-sum", "parity3"):
        fn = "check_binomial_sum" if name == "binomial-sum" else "parity_triple_span"
        return [(fn, parse_triple(t), d or 100) for t in (args.triple or _DEFAULT_TRIPLES[name])]
    if name == "inZ":
        if not args.index:
            raise UsageError("inZ needs at least one --index")
        return [("check_membership", (parse_index(ix),), d or 100) for ix in args.index]
    if name == "stuffle-t":
        if not args.index or len(args.index) != 2:
            raise UsageError("stuffle-t needs exactly two --index values")
        return [("t_stuffle_check", tuple(parse_index(ix) for ix in args.index), d)]
    raise UsageError(f"unknown identity {name!r}")


def run_task(task: tuple) -> list[dict]:
    fn_name, params, digits = task
    fn = getattr(relations, fn_name)
    out = fn(*params) if digits is None else fn(*params, digits=digits)
    return [r.to_dict() for r in (out if isinstance(out, list) else [out])]


def _parallel_map(fn, items: list, jobs: int) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        # map keeps input order, so output does not depend on completion order
        return list(pool.map(fn, items))


def cmd_verify(args):
    tasks = verify_tasks(args.identity, args)
    records = [r for batch in _parallel_map(run_task, tasks, args.jobs) for r in batch]
    lines = []
    failed = False
    for r in records:
        if not args.timings:
            r.pop("wall_time", None)
        params = " ".join(f"{k}={v}" for k, v in r["params"].items())
        lines.append(f"{r['verdict'].upper():4}  {r['name']:<18} {params:<40} "
                     f"residual={r['residual']} tol={r['tolerance']} [{r['status']}]")
        failed |= r["status"] == relations.THEOREM and r["verdict"] != "pass"
    n_thm = sum(r["status"] == relations.THEOREM for r in records)
    n_ok = sum(r["status"] == relations.THEOREM and r["verdict"] == "pass" for r in records)
    lines.append(f"theorem checks passed: {n_ok}/{n_thm}; conjecture reports: {len(records) - n_thm}")
    return records, lines, EXIT_THEOREM if failed else EXIT_OK


def dims_task(task: tuple) -> list[dict]:
    family, k, digits = task
    if family in ("union", "intersection"):
        return [r.to_dict() for r in dims_union_intersection(k, digits)]
    return [relation_lattice_rank(family, k, digits).to_dict()]


def cmd_dims(args):
    family = FAMILY_ALIASES.get(args.family)
    if family is None:
        raise UsageError(f"unknown family {args.family!r}")
    ks = parse_range(args.k)
    if any(k < 2 for k in ks):
        raise UsageError("weights start at 2")
    batches = _parallel_map(dims_task, [(family, k, args.digits) for k in ks], args.jobs)
    records = [r for batch in batches for r in batch]
    shown = ["union", "intersection"] if family == "union" else [family]
    records = [r for r in records if r["family"] in shown]

    def cell(r):
        return str(r["dimension"]) + ("?" if r["status"] != "ok" else "")

    lines = ["k: " + " ".join(str(k) for k in ks)]
    for fam in shown:
        lines.append(f"{fam}: " + " ".join(cell(r) for r in records if r["family"] == fam))
    if any(r["status"] != "ok" for r in records):
        lines.append("? = inconclusive at this precision")
    lines.append("numeric ranks (conjectural), digits: "
                 + " ".join(str(r["digits"]) for r in records if r["family"] == records[0]["family"]))
    return records, lines, EXIT_OK


def cmd_lindep(args):
    digits = args.digits or DEFAULT_DIGITS
    xs = [parse_expression(e, digits, args.terms) for e in args.values]
    res = find_integer_relation(xs, digits=digits)
    rec = {"values": args.values, "digits": digits}
    if res is None:
        rec.update({"status": "none", "coefficients": [], "residual": None})
        return [rec], ["no relation found"], EXIT_OK
    rec.update({"status": res.status, "coefficients": res.coefficients,
                "residual": _short(res.residual)})
    return [rec], [str(res), f"residual {rec['residual']} ({res.status})"], EXIT_OK


def cmd_genfun(args):
    digits = args.digits or 30
    X, Y = Fraction(args.X), Fraction(args.Y)
    lhs = genfun_lhs(X, Y, digits, args.terms)
    rhs = genfun_rhs(X, Y, digits)
    res = lhs - rhs
    ok = abs(res.value) < 10 * res.err
    rec = {"X": str(X), "Y": str(Y), "digits": digits, "lhs": lhs.to_decimal(digits),
           "rhs": rhs.to_decimal(digits), "residual": _short(abs(res.value)),
           "tolerance": _short(10 * res.err), "verdict": "pass" if ok else "fail"}
    lines = [f"LHS      {rec['lhs']}", f"RHS      {rec['rhs']}",
             f"residual {rec['residual']} (tolerance {rec['tolerance']}, {rec['verdict']})"]
    return [rec], lines, EXIT_OK if ok else EXIT_THEOREM


# --------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--digits", type=int, default=None,
                        help="decimal digits (default 60; dims picks a per-weight value)")
    common.add_argument("--terms", type=int, default=None, help="override the series truncation order")
    common.add_argument("--cache-dir", default=None, help="value cache directory (default $MTV_CACHE_DIR)")
    common.add_argument("--format", choices=("table", "json", "csv"), default="table")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for batch commands")

    ap = argparse.ArgumentParser(prog="mtv", description="Multiple T-values: evaluation, algebra and relations.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate one value")
    p.add_argument("family", choices=("T", "t", "zeta", "altZ"))
    p.add_argument("index", help='e.g. "1,3"; altZ takes "1,2;+,-"')
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("dual", parents=[common], help="dual index")
    p.add_argument("index")
    p.set_defaults(func=cmd_dual)

    for name, fn in (("shuffle", cmd_shuffle), ("stuffle", cmd_stuffle)):
        p = sub.add_parser(name, parents=[common], help=f"{name} product of two indices")
        p.add_argument("a")
        p.add_argument("b")
        p.set_defaults(func=fn)

    p = sub.add_parser("verify", parents=[common], help="check an identity over a parameter range")
    p.add_argument("identity", choices=VERIFY_NAMES)
    p.add_argument("--weight", help="weight range for duality, e.g. 2..8")
    p.add_argument("--k", help="weight range, e.g. 3..12")
    p.add_argument("--point", action="append", help="X,Y for genfun (repeatable)")
    p.add_argument("--triple", action="append", help="p,q,m for binomial-sum or p,q,r for parity3 (repeatable)")
    p.add_argument("--index", action="append", help="index for inZ / stuffle-t (repeatable)")
    p.add_argument("--timings", action="store_true", help="include wall times (output no longer reproducible)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("dims", parents=[common], help="numeric dimension table")
    p.add_argument("family", help="T, t, zeta, union or intersection")
    p.add_argument("--k", default="2..8", help="weight range (default 2..8)")
    p.set_defaults(func=cmd_dims)

    p = sub.add_parser("lindep", parents=[common], help="integer relation among values")
    p.add_argument("values", nargs="+", help='expressions such as "T(3,2)", "zeta(2)", "pi^2", "3"')
    p.set_defaults(func=cmd_lindep)

    p = sub.add_parser("genfun", parents=[common], help="height-one generating series check")
    p.add_argument("X")
    p.add_argument("Y")
    p.set_defaults(func=cmd_genfun)
    # let "-1/8" through as a positional value
    p._negative_number_matcher = re.compile(r"^-\d+(/\d+)?$|^-\d*\.\d+$")
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.digits is not None and args.digits < MIN_DIGITS:
        ap.error(f"--digits must be at least {MIN_DIGITS}")
    if args.jobs < 1:
        ap.error("--jobs must be at least 1")
    if args.cache_dir:
        set_cache_dir(args.cache_dir)
    try:
        records, lines, code = args.func(args)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as e:  # noqa: BLE001
        log.exception("internal error")
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    sys.stdout.write(render(records, args.format, lines))
    return code


if __name__ == "__main__":
    raise SystemExit(main())
