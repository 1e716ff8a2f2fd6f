"""ffmoments command line.

Exit codes: 0 when every requested check passes, 1 when a check fails,
2 for usage errors, 3 when the work estimate exceeds ``--budget``.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from .asymptotics import DEFAULT_CUTOFF
from .ensemble import DEFAULT_BUDGET, BudgetExceeded, EnsembleSpec, compare, estimate_cost
from .poly import is_prime
from . import report, verify

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def parse_range(text: str) -> list[int]:
    """'3', '2..5' or '1,3,4' as a non-empty list of ints."""
    try:
        if ".." in text:
            lo, hi = (int(x) for x in text.split(".."))
            values = list(range(lo, hi + 1))
        else:
            values = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}; use N, A..B or A,B,C") from None
    if not values:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return values


def _odd_prime(text: str) -> int:
    try:
        q = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"q must be an integer, got {text!r}") from None
    if q < 3 or not is_prime(q):
        raise argparse.ArgumentTypeError(f"q must be an odd prime, got {q}")
    return q


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--q", type=_odd_prime, default=3, help="odd prime field size (default 3)")
    common.add_argument("--workers", type=_positive, default=None,
                        help="worker processes (default: FFMOMENTS_WORKERS or CPU count)")
    common.add_argument("--out", default=None, help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--budget", type=float, default=DEFAULT_BUDGET,
                        help="maximum estimated character evaluations (default 5e9)")

    p = _Parser(prog="ffmoments", description="Exact ensemble averages of derivatives of "
                "quadratic L-functions over F_q[t] at s = 1/2, compared with their main terms.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", parents=[common], help="run the exact-identity suites")
    v.add_argument("--g-max", type=_positive, default=3)
    v.add_argument("--mu-max", type=int, default=3)
    v.add_argument("--cutoff", type=int, default=DEFAULT_CUTOFF)

    m = sub.add_parser("moments", parents=[common], help="ensemble moments against the main terms")
    m.add_argument("--parity", choices=("odd", "even", "both"), default="odd")
    m.add_argument("--g", type=parse_range, default=[2, 3, 4])
    m.add_argument("--mu", type=parse_range, default=[1])
    m.add_argument("--cutoff", type=int, default=DEFAULT_CUTOFF)
    m.add_argument("--timing", action="store_true",
                   help="record wall-clock runtime_ms (otherwise 0, keeping output reproducible)")

    c = sub.add_parser("components", parents=[common], help="S/T/M/N sums against their main terms")
    c.add_argument("--parity", choices=("odd", "even", "both"), default="both")
    c.add_argument("--g", type=parse_range, default=[1, 2, 3, 4])
    c.add_argument("--mu-max", type=int, default=2, help="largest m in the n^m weights")
    c.add_argument("--cutoff", type=int, default=DEFAULT_CUTOFF)

    gv = sub.add_parser("gvalues", parents=[common], help="truncated G^(m)(1)/(-ln q)^m with tail bounds")
    gv.add_argument("--m", type=parse_range, default=[0, 1, 2, 3])
    gv.add_argument("--cutoff", type=parse_range, default=list(range(4, DEFAULT_CUTOFF + 1)))

    z = sub.add_parser("zeros", parents=[common], help="root moduli of every L-polynomial in an ensemble")
    z.add_argument("--parity", choices=("odd", "even", "both"), default="both")
    z.add_argument("--g", type=parse_range, default=[1, 2])
    z.add_argument("--tol", type=float, default=1e-8)
    return p


def _parities(choice: str) -> list[str]:
    return ["odd", "even"] if choice == "both" else [choice]


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def _report_checks(checks: Sequence[tuple[str, bool]]) -> int:
    for label, ok in checks:
        _log(f"{'PASS' if ok else 'FAIL'}  {label}")
    return EXIT_OK if all(ok for _, ok in checks) else EXIT_FAIL


def _check_cutoff(cutoff: int) -> None:
    if cutoff < 4:
        raise UsageError(f"--cutoff must be >= 4, got {cutoff}")


def _guard(q: int, degree: int, nmax: int, budget: float) -> None:
    est = estimate_cost(q, degree, nmax)
    if est > budget:
        raise BudgetExceeded(est, int(budget))


def cmd_verify(args) -> int:
    _check_cutoff(args.cutoff)
    if args.mu_max < 0:
        raise UsageError("--mu-max must be >= 0")
    _guard(args.q, 2 * args.g_max + 1, 2 * args.g_max, args.budget)
    results = verify.run_all(args.q, args.g_max, args.mu_max, args.cutoff, args.workers)
    for r in results:
        print(r.line())
    if args.out:
        rows = [{"suite": r.name, "passed": r.passed, "detail": r.detail} for r in results]
        _emit(report.render(rows, report.VERIFY_COLUMNS, args.format), args.out)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def cmd_moments(args) -> int:
    _check_cutoff(args.cutoff)
    specs = []
    for parity in _parities(args.parity):
        for g in args.g:
            for mu in args.mu:
                if g < 1 or mu < 1:
                    raise UsageError("moments need g >= 1 and mu >= 1")
                specs.append(EnsembleSpec(args.q, parity, g, mu))
    for s in specs:
        _guard(s.q, s.degree, s.g, args.budget)
    reports = [compare(s, args.cutoff, args.workers, int(args.budget)) for s in specs]
    rows = report.moment_rows(reports, timing=args.timing)
    meta = {
        "normalization": {p: report.NORMALIZATION[p] for p in _parities(args.parity)},
        "normalized_dev": [r.normalized_dev for r in reports],
        "flags": [r.flag for r in reports],
        "cutoff": args.cutoff,
    }
    _emit(report.render(rows, report.MOMENT_COLUMNS, args.format, meta), args.out)
    for r in reports:
        tag = f"  [{r.flag}]" if r.flag else ""
        _log(f"{r.spec.parity} g={r.spec.g} mu={r.spec.mu}: rel_dev={r.rel_dev:.3e} "
             f"normalized_dev={r.normalized_dev:.3e} (normalized by {report.NORMALIZATION[r.spec.parity]}){tag}")
    return _report_checks(report.moment_checks(reports))


def cmd_components(args) -> int:
    _check_cutoff(args.cutoff)
    if args.mu_max < 0:
        raise UsageError("--mu-max must be >= 0")
    parities = _parities(args.parity)
    for parity in parities:
        for g in args.g:
            EnsembleSpec(args.q, parity, g)
            _guard(args.q, 2 * g + (1 if parity == "odd" else 2), g, args.budget)
    rows = report.component_rows(args.q, parities, args.g, args.mu_max, args.cutoff, args.workers)
    _emit(report.render(rows, report.COMPONENT_COLUMNS, args.format), args.out)
    return _report_checks(report.component_checks(rows))


def cmd_gvalues(args) -> int:
    if min(args.m) < 0 or min(args.cutoff) < 0:
        raise UsageError("--m and --cutoff must be >= 0")
    rows = report.gvalue_rows(args.q, args.m, args.cutoff)
    _emit(report.render(rows, report.GVALUE_COLUMNS, args.format), args.out)
    return EXIT_OK


def cmd_zeros(args) -> int:
    parities = _parities(args.parity)
    for parity in parities:
        for g in args.g:
            EnsembleSpec(args.q, parity, g)
            n = 2 * g + (1 if parity == "odd" else 2)
            _guard(args.q, n, n - 1, args.budget)
    rows = report.zero_rows(args.q, parities, args.g, args.tol)
    _emit(report.render(rows, report.ZERO_COLUMNS, args.format), args.out)
    worst = max((r["max_deviation"] for r in rows), default=0.0)
    return _report_checks([(f"{len(rows)} L-polynomials, max root-modulus deviation {worst:.2e}",
                            all(r["ok"] for r in rows))])


COMMANDS = {
    "verify": cmd_verify,
    "moments": cmd_moments,
    "components": cmd_components,
    "gvalues": cmd_gvalues,
    "zeros": cmd_zeros,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        msg = str(exc)
        print(msg if ": error: " in msg else f"ffmoments: error: {msg}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"ffmoments: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ValueError as exc:
        print(f"ffmoments: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
