"""Command-line entry point.

Exit codes: 0 success, 1 invalid input, 2 unknown subcommand, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from decimal import Decimal
from typing import Optional, Sequence

from .asymptotics import bound_convergence, default_bound_schedule, secretary_convergence
from .errors import BudgetExceededError, InvalidInputError
from .lambda_solver import lower_bound, solve_lambda_dp
from .numerics import as_rational, decimal_to_string, rat_to_decimal, rat_to_string
from .optimizer import METHODS, optimal
from .oracle import monte_carlo_win_probability, verify_suite
from .patterns import KINDS, enumerate_patterns, xi_count
from .strategy import load_sequence, parse_thresholds, win_probability

COMMANDS = ("lambda", "xi", "winprob", "optimal", "secretary", "bound", "simulate", "verify")
FORMATS = ("table", "json", "csv")
WRAP = 60

EXIT_OK, EXIT_INPUT, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _wrap(text: str, width: int = WRAP) -> list:
    return [text[i:i + width] for i in range(0, len(text), width)] or [""]


def _num(x) -> str:
    """Exact form of a lambda-table entry: ``num/den`` or the decimal itself."""
    if isinstance(x, Decimal):
        return f"{x:f}"
    return rat_to_string(x)


def _dec(x, digits: int) -> str:
    if isinstance(x, Decimal):
        return decimal_to_string(x, digits)
    return rat_to_decimal(x, digits)


def _csv(rows: list) -> str:
    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    return buf.getvalue()


def _table(header: Sequence[str], rows: list) -> str:
    cells = [list(header)] + [[str(c) for c in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = []
    for r in cells:
        lines.append("  ".join(_align(c, w) for c, w in zip(r, widths)).rstrip())
    return "\n".join(lines)


def _align(cell: str, width: int) -> str:
    # Numbers right-aligned, text left-aligned.
    try:
        float(cell)
    except ValueError:
        return cell.ljust(width)
    return cell.rjust(width)


def _wrapped_column(label: str, rows: list) -> list:
    """Rows ``(k, decimal, exact)``; long exact values continue on following lines."""
    out = [label]
    k_width = max(len(str(r[0])) for r in rows)
    d_width = max(len(r[1]) for r in rows)
    out.append(f"{'k'.rjust(k_width)}  {'decimal'.ljust(d_width)}  exact")
    for k, dec, exact in rows:
        pieces = _wrap(exact)
        out.append(f"{str(k).rjust(k_width)}  {dec.ljust(d_width)}  {pieces[0]}")
        pad = " " * (k_width + d_width + 4)
        out.extend(pad + p for p in pieces[1:])
    return out


def cmd_lambda(args) -> str:
    sol = solve_lambda_dp(args.m, precision=args.precision)
    lb = lower_bound(sol, args.decimals)
    terms = lb.term_strings
    if args.format == "json":
        return json.dumps(
            {
                "m": sol.m,
                "lambda": [_num(x) for x in sol.lam],
                "cumsum": [_num(x) for x in sol.cumsum],
                "bound_terms": terms,
                "bound": lb.total_string,
                "lambda_decimal": [_dec(x, args.decimals) for x in sol.lam],
                "cumsum_decimal": [_dec(x, args.decimals) for x in sol.cumsum],
            },
            indent=2,
        )
    if args.format == "csv":
        rows = [
            {
                "k": k,
                "lambda": _num(sol.lam[k - 1]),
                "lambda_decimal": _dec(sol.lam[k - 1], args.decimals),
                "cumsum": _num(sol.cumsum[k - 1]),
                "cumsum_decimal": _dec(sol.cumsum[k - 1], args.decimals),
                "bound_term": terms[k - 1],
            }
            for k in range(1, sol.m + 1)
        ]
        rows.append({"k": "total", "lambda": "", "lambda_decimal": "", "cumsum": "",
                     "cumsum_decimal": "", "bound_term": lb.total_string})
        return _csv(rows).rstrip("\n")
    ks = range(1, sol.m + 1)
    lines = _wrapped_column(
        "lambda_k", [(k, _dec(sol.lam[k - 1], args.decimals), _num(sol.lam[k - 1])) for k in ks]
    )
    lines.append("")
    lines += _wrapped_column(
        "lambda_1 + ... + lambda_k",
        [(k, _dec(sol.cumsum[k - 1], args.decimals), _num(sol.cumsum[k - 1])) for k in ks],
    )
    lines.append("")
    lines.append("lower bound: sum of exp(-(lambda_1 + ... + lambda_k))")
    lines.append(_table(("k", "term", "partial bound"), _partial_rows(lb, args.decimals)))
    lines.append(f"bound = {lb.total_string}")
    return "\n".join(lines)


def _partial_rows(lb, digits: int) -> list:
    rows = []
    acc = Decimal(0)
    for k, term in enumerate(lb.terms, start=1):
        acc += term
        rows.append((k, decimal_to_string(term, digits, "floor"), decimal_to_string(acc, digits, "floor")))
    return rows


def cmd_xi(args) -> str:
    if args.count_only:
        count = xi_count(args.k) if args.kind == "xi" else len(enumerate_patterns(args.k, args.kind))
        if args.format == "json":
            return json.dumps({"k": args.k, "kind": args.kind, "count": count})
        if args.format == "csv":
            return f"k,kind,count\n{args.k},{args.kind},{count}"
        return str(count)
    ps = enumerate_patterns(args.k, args.kind)
    if args.format == "json":
        return ps.to_json()
    if args.format == "csv":
        header = ",".join(f"b{j}" for j in range(args.k, 0, -1))
        return "\n".join([header] + [",".join(map(str, v)) for v in ps.vectors])
    lines = ["(" + ",".join(map(str, v)) + ")" for v in ps.vectors]
    lines.append(f"count = {len(ps)}")
    return "\n".join(lines)


def cmd_winprob(args) -> str:
    seq = load_sequence(args.sequence)
    t = parse_thresholds(args.thresholds)
    value = win_probability(seq, t)
    exact, dec = rat_to_string(value), rat_to_decimal(value, args.decimals)
    if args.format == "json":
        return json.dumps({"thresholds": list(t), "value": exact, "decimal": dec})
    if args.format == "csv":
        return f"thresholds,value,decimal\n\"{t}\",{exact},{dec}"
    return f"{exact}\n{dec}"


def cmd_optimal(args) -> str:
    seq = load_sequence(args.sequence)
    res = optimal(seq, args.m, args.method)
    exact, dec = rat_to_string(res.value), rat_to_decimal(res.value, args.decimals)
    t = "" if res.thresholds is None else str(res.thresholds)
    if args.format == "json":
        return json.dumps(
            {
                "method": res.method,
                "m": args.m,
                "value": exact,
                "decimal": dec,
                "thresholds": None if res.thresholds is None else list(res.thresholds),
            }
        )
    if args.format == "csv":
        return f"method,m,value,decimal,thresholds\n{res.method},{args.m},{exact},{dec},\"{t}\""
    lines = [f"method      {res.method}", f"value       {exact}", f"decimal     {dec}"]
    if res.thresholds is not None:
        lines.append(f"thresholds  {t}")
    return "\n".join(lines)


def _report_output(report, fmt: str, digits: int) -> str:
    if fmt == "json":
        return report.to_json(digits)
    if fmt == "csv":
        return report.to_csv(digits).rstrip("\n")
    records = report.records(digits)
    header = list(records[0]) if records else []
    lines = [
        f"target bound = {decimal_to_string(report.bound, digits, 'floor')}",
        "",
        _table(header, [list(r.values()) for r in records]),
    ]
    return "\n".join(lines)


def cmd_secretary(args) -> str:
    report = secretary_convergence(args.m, args.n, exact=args.exact)
    return _report_output(report, args.format, args.decimals)


def _load_schedule(path: str) -> list:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"schedule file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, list):
        raise InvalidInputError("schedule must be a JSON list of {\"L\": int, \"r\": \"a/b\"} entries")
    out = []
    for entry in data:
        try:
            out.append((int(entry["L"]), as_rational(entry["r"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"malformed schedule entry {entry!r}") from exc
    return out


def cmd_bound(args) -> str:
    schedule = _load_schedule(args.schedule) if args.schedule else default_bound_schedule(args.m)
    report = bound_convergence(args.m, schedule)
    return _report_output(report, args.format, args.decimals)


def cmd_simulate(args) -> str:
    seq = load_sequence(args.sequence)
    t = parse_thresholds(args.thresholds)
    res = monte_carlo_win_probability(seq, t, args.trials, args.seed, workers=args.workers)
    est = f"{res.estimate:.{args.decimals}f}"
    se = f"{res.standard_error:.{args.decimals}f}"
    if args.format == "json":
        return json.dumps(
            {"thresholds": list(t), "trials": res.trials, "wins": res.wins,
             "estimate": est, "standard_error": se, "seed": args.seed}
        )
    if args.format == "csv":
        return f"thresholds,trials,wins,estimate,standard_error,seed\n\"{t}\",{res.trials},{res.wins},{est},{se},{args.seed}"
    return "\n".join(
        [f"trials          {res.trials}", f"wins            {res.wins}",
         f"estimate        {est}", f"standard error  {se}"]
    )


def cmd_verify(args) -> str:
    report = verify_suite(args.max_n, args.m, args.cases, args.seed)
    rows = report.rows()
    if args.format == "json":
        out = json.dumps({"cases": report.cases, "ok": report.ok, "checks": rows,
                          "failures": report.failures}, indent=2)
    elif args.format == "csv":
        out = _csv(rows).rstrip("\n")
    else:
        out = _table(("check", "passed", "failed"), [list(r.values()) for r in rows])
        out += "\n" + ("all checks passed" if report.ok else f"{len(report.failures)} failures")
        for f in report.failures:
            out += "\n  " + f
    args._failed = not report.ok
    return out


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _nonneg_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="multistop", description="Multiple-stopping odds problem toolkit.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--format", choices=FORMATS, default="table")
        p.add_argument("--decimals", type=_positive_int, default=10,
                       help="fractional digits in decimal output")
        p.set_defaults(func=func)
        return p

    p = add("lambda", cmd_lambda, "lambda constants, cumulative sums and the lower bound")
    p.add_argument("--m", type=_positive_int, required=True)
    p.add_argument("--precision", type=_positive_int, default=None,
                   help="significant digits; solve in decimal instead of exact arithmetic")

    p = add("xi", cmd_xi, "winning-pattern sets")
    p.add_argument("--k", type=_positive_int, required=True)
    p.add_argument("--kind", choices=KINDS, default="xi")
    p.add_argument("--count-only", action="store_true")

    p = add("winprob", cmd_winprob, "exact win probability of a threshold strategy")
    p.add_argument("--sequence", required=True)
    p.add_argument("--thresholds", required=True, help="comma list, outermost first")

    p = add("optimal", cmd_optimal, "optimal strategy value and thresholds")
    p.add_argument("--sequence", required=True)
    p.add_argument("--m", type=_positive_int, required=True)
    p.add_argument("--method", choices=METHODS, default="ola")

    p = add("secretary", cmd_secretary, "secretary-sequence convergence report")
    p.add_argument("--n", type=_positive_int, nargs="+", required=True)
    p.add_argument("--m", type=_positive_int, required=True)
    p.add_argument("--exact", action="store_true", help="exact arithmetic instead of floats")

    p = add("bound", cmd_bound, "IID convergence toward the lower bound")
    p.add_argument("--m", type=_positive_int, required=True)
    p.add_argument("--schedule", default=None, help="JSON list of {\"L\": int, \"r\": \"a/b\"}")

    p = add("simulate", cmd_simulate, "seeded Monte Carlo win probability")
    p.add_argument("--sequence", required=True)
    p.add_argument("--thresholds", required=True)
    p.add_argument("--trials", type=_positive_int, default=100_000)
    p.add_argument("--seed", type=_nonneg_int, default=0)
    p.add_argument("--workers", type=_positive_int, default=1)

    p = add("verify", cmd_verify, "randomized cross-checks between modules")
    p.add_argument("--max-n", type=_positive_int, default=8)
    p.add_argument("--m", type=_positive_int, default=3)
    p.add_argument("--cases", type=_nonneg_int, default=50)
    p.add_argument("--seed", type=_nonneg_int, default=0)
    return parser


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    if argv and argv[0] in ("-h", "--help"):
        parser.print_help(out)
        return EXIT_OK
    if not argv or argv[0] not in COMMANDS:
        given = argv[0] if argv else "(none)"
        print(f"error: unknown subcommand {given}; expected one of {', '.join(COMMANDS)}", file=err)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_INPUT
    except SystemExit as exc:  # --help inside a subcommand
        return int(exc.code or 0)
    try:
        text = args.func(args)
    except BudgetExceededError as exc:
        print(f"error: budget exceeded: {exc}", file=err)
        return EXIT_BUDGET
    except (InvalidInputError, OSError) as exc:
        print(f"error: invalid input: {exc}", file=err)
        return EXIT_INPUT
    print(text, file=out)
    return EXIT_INPUT if getattr(args, "_failed", False) else EXIT_OK


def main() -> None:
    sys.exit(run())
