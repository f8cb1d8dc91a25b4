"""Command-line interface.

Exit codes: 0 pass, 1 verification failure, 2 accuracy error, 3 usage error.
Global flags may also come from LPRIME_PRECISION, LPRIME_THREADS,
LPRIME_SEED and LPRIME_OUT; an explicit flag wins over the environment.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from fractions import Fraction

from . import __version__
from .characters import enumerate_characters, get_character
from .errors import (
    AccuracyError,
    ConfigMismatch,
    DomainError,
    LPrimeError,
    PathThroughZero,
    ScanIncomplete,
    StoreError,
)
from .evaluator import EvalConfig, f_factor, g1_value, l_value
from .store import (
    emit_report,
    format_plotdata,
    format_reports,
    load_scan,
    plot_rows,
    read_reports,
    resume_scan,
)
from .theorems import (
    check_left_halfplane,
    check_zero_free_right,
    verify_counting,
    verify_n,
    verify_offset_sum,
)
from .zerofinder import count_detail, scan_zeros

EXIT_PASS, EXIT_FAIL, EXIT_ACCURACY, EXIT_USAGE = 0, 1, 2, 3
ENV_PREFIX = "LPRIME_"
DEFAULT_SEED = 0
CRASH_ENV = ENV_PREFIX + "CRASH_AT"  # test hook: "<stage>:<t_lo>"

log = logging.getLogger("lprime")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _complex_arg(text: str) -> complex:
    try:
        re_, im_ = (float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected <re>,<im>, got {text!r}") from None
    return complex(re_, im_)


def _grid_arg(text: str) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty grid")
    return vals


def _globals_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    # SUPPRESS so a flag given before the subcommand is not reset by the subparser
    g.add_argument("--precision", type=float, default=argparse.SUPPRESS,
                   help="target absolute error of evaluations (default 1e-10)")
    g.add_argument("--threads", type=int, default=argparse.SUPPRESS,
                   help="worker processes for band scans (default 1)")
    g.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                   help="seed for boundary jitter (default 0)")
    g.add_argument("--out", default=argparse.SUPPRESS, help="output path")
    g.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _globals_parent()
    parser = _Parser(prog="lprime", parents=[common],
                     description="Dirichlet L-functions, zeros of L', and their counting statistics.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    chars = sub.add_parser("characters", help="character tables")
    chars_sub = chars.add_subparsers(dest="action", required=True, parser_class=_Parser)
    cl = chars_sub.add_parser("list", parents=[common], help="CSV of all characters mod q")
    cl.add_argument("--q", type=int, required=True)

    ev = sub.add_parser("eval", parents=[common], help="evaluate L, G1 or F at one point")
    ev.add_argument("--q", type=int, required=True)
    ev.add_argument("--chi", type=int, required=True)
    ev.add_argument("--s", type=_complex_arg, required=True, help="<re>,<im>")
    ev.add_argument("--deriv", type=int, choices=(0, 1, 2), default=0)
    ev.add_argument("--fn", choices=("L", "G1", "F"), default="L")

    zs = sub.add_parser("zeros", help="zero scans and counts")
    zs_sub = zs.add_subparsers(dest="action", required=True, parser_class=_Parser)
    scan = zs_sub.add_parser("scan", parents=[common], help="resumable banded scan to JSONL")
    cnt = zs_sub.add_parser("count", parents=[common], help="print N (fn=L) or N1 (fn=Lprime)")
    for p in (scan, cnt):
        p.add_argument("--q", type=int, required=True)
        p.add_argument("--chi", type=int, required=True)
        p.add_argument("--T", type=float, required=True)
        p.add_argument("--fn", choices=("L", "Lprime"), default="Lprime")

    ver = sub.add_parser("verify", parents=[common],
                         help="compare a statistic with its main term; 'verify regions' for zero-free checks")
    ver.add_argument("mode", nargs="?", choices=("regions",))
    ver.add_argument("--q", type=int, required=True)
    ver.add_argument("--chi", type=int, required=True)
    ver.add_argument("--T", type=float)
    ver.add_argument("--stat", choices=("N1", "sum", "N"), default="N1")
    ver.add_argument("--C", type=float, default=5.0)
    ver.add_argument("--window", type=float, default=30.0)
    ver.add_argument("--zeros", help="JSONL zero file from 'zeros scan' (else scanned in memory)")

    rep = sub.add_parser("report", parents=[common], help="ResidualReports over a T grid, CSV or JSONL")
    rep.add_argument("--q", type=int)
    rep.add_argument("--chi", type=int)
    rep.add_argument("--T-grid", dest="grid", type=_grid_arg)
    rep.add_argument("--stat", default="N1,sum", help="comma list of N1, sum, N")
    rep.add_argument("--C", type=float, default=5.0)
    rep.add_argument("--zeros", help="JSONL zero file (else scanned in memory)")
    rep.add_argument("--from", dest="inputs", nargs="+", help="re-emit existing report files")
    rep.add_argument("--format", choices=("csv", "jsonl"), default="csv")

    pl = sub.add_parser("plotdata", parents=[common], help="CSV of T, measured, main, residual")
    pl.add_argument("--q", type=int, required=True)
    pl.add_argument("--chi", type=int, required=True)
    pl.add_argument("--stat", choices=("N1", "sum", "N"), default="N1")
    pl.add_argument("--T-grid", dest="grid", type=_grid_arg, required=True)
    pl.add_argument("--zeros", help="JSONL zero file (else scanned in memory)")
    return parser


def _resolve_globals(args) -> None:
    env = os.environ
    specs = {"precision": (float, 1e-10), "threads": (int, 1), "seed": (int, DEFAULT_SEED),
             "out": (str, None), "verbose": (bool, False)}
    for name, (kind, default) in specs.items():
        if hasattr(args, name):
            continue
        raw = env.get(ENV_PREFIX + name.upper())
        if raw is None:
            setattr(args, name, default)
            continue
        try:
            setattr(args, name, raw.lower() in ("1", "true", "yes") if kind is bool else kind(raw))
        except ValueError:
            raise UsageError(f"bad value for {ENV_PREFIX}{name.upper()}: {raw!r}") from None
    if args.threads < 1:
        raise UsageError("--threads must be >= 1")


def _cfg(args) -> EvalConfig:
    try:
        return EvalConfig(target_abs_error=args.precision)
    except DomainError as exc:
        raise UsageError(str(exc)) from None


def _write(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _exponent_cell(k: int, order: int) -> str:
    if k < 0:
        return "-"
    fr = Fraction(k, order)
    return str(fr.numerator) if fr.denominator == 1 else f"{fr.numerator}/{fr.denominator}"


def cmd_characters(args) -> int:
    chars = enumerate_characters(args.q)
    q = args.q
    lines = ["index,conductor,primitive,kappa," + ",".join(f"chi_{n}" for n in range(1, q + 1))]
    for c in chars:
        cells = [_exponent_cell(c.exponent_at(n), c.root_order) for n in range(1, q + 1)]
        lines.append(f"{c.index},{c.conductor},{str(c.primitive).lower()},{c.kappa}," + ",".join(cells))
    _write(args, "\n".join(lines) + "\n")
    return EXIT_PASS


def cmd_eval(args) -> int:
    chi = get_character(args.q, args.chi)
    cfg = _cfg(args)
    if args.fn == "L":
        v = l_value(chi, args.s, args.deriv, cfg)
    elif args.deriv:
        raise UsageError("--deriv is only supported for --fn L")
    elif args.fn == "G1":
        v = g1_value(chi, args.s, cfg)
    else:
        v = f_factor(chi, args.s)
    _write(args, f"{v.re:.17g} {v.im:.17g} {v.abs_error_bound:.17g}\n")
    return EXIT_PASS


def _crash_hook():
    spec = os.environ.get(CRASH_ENV)
    if not spec:
        return None
    stage, t_lo = spec.split(":")

    def hook(st, band):
        if st == stage and abs(band.t_lo - float(t_lo)) < 1e-9:
            os._exit(137)

    return hook


def cmd_zeros(args) -> int:
    chi = get_character(args.q, args.chi)
    cfg = _cfg(args)
    if args.action == "count":
        res = count_detail(chi, args.T, args.fn, cfg)
        if res.t_upper != args.T or res.t_lower != -args.T:
            print(f"note: edges moved to t={res.t_lower:.10g}, {res.t_upper:.10g}", file=sys.stderr)
        _write(args, f"{res.count}\n")
        return EXIT_PASS
    if not args.out:
        raise UsageError("zeros scan needs --out <path>")
    m, new = resume_scan(args.out, chi, args.fn, args.T, cfg, args.seed, args.threads, _crash_hook())
    failed = [b for b in m.bands if b[2] != "done"]
    print(f"q={m.q} chi={m.chi_index} fn={m.fn} T_done={m.T_done:g} new_zeros={len(new)}"
          + (f" failed_bands={[(b[0], b[1]) for b in failed]}" if failed else ""))
    return EXIT_PASS if m.T_done >= args.T - 1e-12 else EXIT_FAIL


def _scan_for(args, chi, fn: str, T: float):
    if getattr(args, "zeros", None):
        scan = load_scan(args.zeros)
        if (scan.q, scan.chi_index) != (chi.q, chi.index):
            raise UsageError(f"{args.zeros} holds q={scan.q} chi={scan.chi_index}")
        return scan
    return scan_zeros(chi, T, fn, _cfg(args), args.seed, args.threads)


def _reports(args, chi, stats: list[str], grid: list[float]):
    cfg = _cfg(args)
    out = []
    need_lprime = any(s in ("N1", "sum") for s in stats)
    top = max(grid)
    lp = _scan_for(args, chi, "Lprime", top) if need_lprime else None
    for stat in stats:
        for T in grid:
            if stat == "N1":
                out.append(verify_counting(chi, T, lp, args.C))
            elif stat == "sum":
                out.append(verify_offset_sum(chi, T, lp, args.C))
            else:
                db = load_scan(args.zeros) if getattr(args, "zeros", None) and not need_lprime else None
                out.append(verify_n(chi, T, db, cfg))
    return out


def cmd_verify(args) -> int:
    chi = get_character(args.q, args.chi)
    if args.mode == "regions":
        cfg = _cfg(args)
        left = check_left_halfplane(chi, args.window, cfg)
        scan = _scan_for(args, chi, "Lprime", args.window)
        right = check_zero_free_right(chi, scan.zeros)
        print(left.summary())
        print(f"{'PASS' if right else 'FAIL'} zero-free-right q={chi.q} chi={chi.index} "
              f"zeros_checked={len(scan.zeros)}")
        return EXIT_PASS if left.passed and right else EXIT_FAIL
    if args.T is None:
        raise UsageError("verify needs --T")
    (rep,) = _reports(args, chi, [args.stat], [args.T])
    print(rep.summary())
    if args.out:
        emit_report([rep], "csv", args.out)
    return EXIT_PASS if rep.passed else EXIT_FAIL


def cmd_report(args) -> int:
    if args.inputs:
        reps = [r for path in args.inputs for r in read_reports(path)]
    else:
        if args.q is None or args.chi is None or not args.grid:
            raise UsageError("report needs --q, --chi and --T-grid (or --from files)")
        stats = [s.strip() for s in args.stat.split(",") if s.strip()]
        bad = [s for s in stats if s not in ("N1", "sum", "N")]
        if bad or not stats:
            raise UsageError(f"unknown statistic(s) {bad}")
        reps = _reports(args, get_character(args.q, args.chi), stats, args.grid)
    _write(args, format_reports(reps, args.format))
    return EXIT_PASS if all(r.passed for r in reps) else EXIT_FAIL


def cmd_plotdata(args) -> int:
    chi = get_character(args.q, args.chi)
    stat = {"N1": "N1", "sum": "offset_sum", "N": "N"}[args.stat]
    fn = "L" if stat == "N" else "Lprime"
    scan = _scan_for(args, chi, fn, max(args.grid))
    _write(args, format_plotdata(plot_rows(scan, stat, args.grid, chi)))
    return EXIT_PASS


COMMANDS = {"characters": cmd_characters, "eval": cmd_eval, "zeros": cmd_zeros,
            "verify": cmd_verify, "report": cmd_report, "plotdata": cmd_plotdata}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help, --version, or a usage error (code 3)
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        _resolve_globals(args)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        return COMMANDS[args.command](args)
    except (UsageError, ConfigMismatch) as exc:
        print(f"lprime: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (AccuracyError, PathThroughZero) as exc:
        print(f"lprime: accuracy error: {exc}", file=sys.stderr)
        return EXIT_ACCURACY
    except DomainError as exc:
        print(f"lprime: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ScanIncomplete, StoreError, LPrimeError, OSError) as exc:
        print(f"lprime: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
