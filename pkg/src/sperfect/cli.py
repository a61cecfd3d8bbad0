"""Command-line entry point: ``sperfect <subcommand> ...``.

Exit codes for ``check``: 0 when n is S-perfect (witness printed), 1 when it
is certified not to be, 2 on exhaustion or any error.  Other subcommands
exit 0 on success and 2 on error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import experiments
from .errors import CacheFormatError, DomainError, EnumerationError, ResourceError, SearchExhausted, StructuralError
from .presentation import CoefficientSet, Kind, SearchConfig, Status, solve
from .sequences import EnumerationJob, default_cache_path, enumerate_members, format_row
from .structure import adhoc_coefficient_set

_UNITS = {"k": 1 << 10, "m": 1 << 20, "g": 1 << 30}


def _size(text: str) -> int:
    t = text.strip().lower().rstrip("ib").rstrip("b")
    mult = 1
    if t and t[-1] in _UNITS:
        mult, t = _UNITS[t[-1]], t[:-1]
    try:
        value = int(t) * mult
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size {text!r}") from None
    if value <= 0:
        raise argparse.ArgumentTypeError("size must be positive")
    return value


def _coefficient_set(text: str) -> CoefficientSet:
    try:
        return CoefficientSet.parse(text)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("bound must be positive")
    return value


def _add_caps(p):
    p.add_argument("--max-memory", type=_size, default=1 << 30, help="bitset memory cap (default 1G)")
    p.add_argument("--max-nodes", type=_size, default=10**9, help="DFS node budget (default 1e9)")


def _add_set(p, required=True):
    p.add_argument("--set", dest="set", type=_coefficient_set, required=required,
                   help="comma-separated coefficients, e.g. --set=-1,1")
    p.add_argument("--kind", choices=[k.value for k in Kind], default=Kind.FIRST.value)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sperfect", description="Decide, witness and enumerate S-perfect numbers.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="decide one n and print a witness")
    p.add_argument("n", type=_positive)
    _add_set(p)
    p.add_argument("--negative", action="store_true", help="test -n instead of n")
    p.add_argument("--format", choices=["json", "text"], default="json")
    _add_caps(p)

    p = sub.add_parser("enumerate", help="stream members of P(S) in a range")
    _add_set(p)
    p.add_argument("--min", dest="lo", type=_positive, default=2)
    p.add_argument("--max", dest="hi", type=_positive, required=True)
    p.add_argument("--format", choices=["json", "csv", "text"], default="text")
    p.add_argument("--cache", type=Path, help="resumable cache file (default: $SPERFECT_CACHE_DIR)")
    p.add_argument("--workers", type=_positive, default=1)
    _add_caps(p)

    p = sub.add_parser("density", help="count abundant numbers up to N")
    p.add_argument("--max", dest="N", type=_positive, required=True)
    p.add_argument("--format", choices=["json", "csv", "text"], default="json")
    _add_caps(p)

    p = sub.add_parser("conjectures", help="run the {-1,1} conjecture scans")
    p.add_argument("--max", dest="N", type=_positive, required=True)
    p.add_argument("--which", choices=["1", "2", "both"], default="both")
    p.add_argument("--format", choices=["json", "csv", "text"], default="json")
    _add_caps(p)

    p = sub.add_parser("crosscheck", help="test the 2^k p results against the solver")
    p.add_argument("--m-max", type=_positive, default=6)
    p.add_argument("--k-max", type=_positive, default=12)
    p.add_argument("--p-max", type=_positive, default=200)
    p.add_argument("--construct", type=_positive, default=5)
    p.add_argument("--format", choices=["json", "csv", "text"], default="json")
    _add_caps(p)

    p = sub.add_parser("adhoc-set", help="find some S making n S-perfect")
    p.add_argument("n", type=int)
    p.add_argument("--format", choices=["json", "text"], default="json")
    return parser


def _config(args) -> SearchConfig:
    return SearchConfig(memory_cap_bytes=args.max_memory, node_budget=args.max_nodes)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _cmd_check(args, out) -> int:
    n = -args.n if args.negative else args.n
    if abs(n) < 2:
        raise DomainError("n must satisfy |n| > 1")
    res = solve(n, args.set, args.kind, _config(args))
    if res.status is Status.EXHAUSTED:
        print(f"exhausted: could not decide {n} within the configured caps", file=sys.stderr)
        return 2
    if args.format == "json":
        if res.is_perfect:
            print(_dump(res.witness.to_dict()), file=out)
        else:
            print(_dump({"n": n, "kind": args.kind, "set": list(args.set), "perfect": False}), file=out)
    elif res.is_perfect:
        w = res.witness
        head = "1" if w.kind is Kind.FIRST else f"({w.lambda0})"
        terms = " + ".join(f"({c})*{d}" for c, d in zip(w.coefficients, w.divisors))
        print(f"{n} = {head}" + (f" + {terms}" if terms else ""), file=out)
    else:
        print(f"{n} is not {args.set}-perfect ({args.kind} kind)", file=out)
    return 0 if res.is_perfect else 1


def _cmd_enumerate(args, out) -> int:
    cache = args.cache or default_cache_path(args.set, args.kind, args.lo)
    job = EnumerationJob(args.set, args.kind, args.lo, args.hi, _config(args), cache, args.workers)
    for n, w in enumerate_members(job):
        if args.format == "json":
            print(_dump(w.to_dict()), file=out)
        elif args.format == "csv":
            print(format_row(w), file=out)
        else:
            print(n, file=out)
        out.flush()
    return 0


def _emit(report, args, out, text_lines):
    if args.format == "json":
        print(experiments.report_json(report, _config(args)), file=out)
    elif args.format == "csv":
        out.write(experiments.report_csv(report))
    else:
        for line in text_lines:
            print(line, file=out)


def _cmd_density(args, out) -> int:
    r = experiments.abundant_density(args.N, args.max_memory)
    _emit(r, args, out, [
        f"N={r.N} abundant(>=)={r.abundant_count} ({float(r.abundant_density):.6f})",
        f"N={r.N} abundant(>)={r.strict_abundant_count}",
    ])
    return 0


def _cmd_conjectures(args, out) -> int:
    config = _config(args)
    if args.which in ("1", "both"):
        r = experiments.conjecture1_report(args.N, config)
        d = r.density
        _emit(r, args, out, [
            f"N={d.N} abundant={d.abundant_count} P(-1,1)={d.sperfect_count} difference={r.difference_count}",
            "difference begins: " + ", ".join(map(str, r.difference)),
        ])
    if args.which in ("2", "both"):
        r = experiments.conjecture2_scan(args.N, config)
        _emit(r, args, out, [
            f"N={r.N} odd abundant nonsquares checked={r.checked_count} violations={r.violations}",
            "odd abundant squares: " + ", ".join(f"{n}:{st}" for n, st in r.squares),
        ])
    return 0


def _cmd_crosscheck(args, out) -> int:
    r = experiments.theorem_crosscheck(range(1, args.m_max + 1), args.k_max, args.p_max,
                                       _config(args), args.construct)
    _emit(r, args, out, [
        f"double memberships={len(r.double_memberships)} congruence violations={len(r.congruence_violations)}",
        f"constructions={len(r.constructions)} failures={len(r.construction_failures)}",
    ])
    return 0 if r.ok else 1


def _cmd_adhoc(args, out) -> int:
    s, w = adhoc_coefficient_set(args.n)
    if args.format == "json":
        print(_dump(w.to_dict()), file=out)
    else:
        print(f"{args.n} is {s}-perfect: coefficients {list(w.coefficients)}", file=out)
    return 0


_COMMANDS = {
    "check": _cmd_check,
    "enumerate": _cmd_enumerate,
    "density": _cmd_density,
    "conjectures": _cmd_conjectures,
    "crosscheck": _cmd_crosscheck,
    "adhoc-set": _cmd_adhoc,
}


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args, out)
    except (DomainError, StructuralError, ResourceError, SearchExhausted,
            EnumerationError, CacheFormatError) as exc:
        print(f"sperfect: error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
