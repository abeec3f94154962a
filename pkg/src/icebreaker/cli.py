"""Command-line entry point: ``icebreaker <command> [options]``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import analyses
from .errors import IcebreakerError
from .ingest import read_series, window
from .report import ReportConfig, resolve_path, run_report
from .sim import parse_scenario

log = logging.getLogger("icebreaker")


def _input_args(p, season_default="raw"):
    p.add_argument("--input", required=True, help="series file (absolute, relative, or under $ICEBREAKER_DATA_DIR)")
    p.add_argument("--format", choices=["fixedwidth", "csv"], help="input layout (default: by suffix)")
    p.add_argument("--season", choices=["summer", "winter", "raw"], default=season_default)
    p.add_argument("--from", dest="from_year", type=int)
    p.add_argument("--to", dest="to_year", type=int)
    p.add_argument("--name", help="series label (default: file stem)")


def _common(p):
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--seed", type=int, default=0)


def _windows(text):
    out = []
    for part in text.split(","):
        lo, _, hi = part.partition(":")
        out.append((int(lo), int(hi)))
    return out


def build_parser():
    parser = argparse.ArgumentParser(prog="icebreaker", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse an input file and write year,value CSV")
    _input_args(p)
    _common(p)

    p = sub.add_parser("describe", help="summary statistics and autocorrelations")
    _input_args(p)
    _common(p)

    p = sub.add_parser("anova", help="hierarchical one-way ANOVA by blocks of years")
    _input_args(p)
    _common(p)
    p.add_argument("--block-len", type=int, default=50)
    p.add_argument("--iterations", type=int, default=10000)
    p.add_argument("--burnin", type=int, default=2500)
    p.add_argument("--chains", type=int, default=3)

    p = sub.add_parser("breaks", help="Bai-Perron, circular binary segmentation and Barry-Hartigan")
    _input_args(p)
    _common(p)
    p.add_argument("--min-seg", type=float, default=0.15)
    p.add_argument("--kmax", type=int, default=5)
    p.add_argument("--alpha", type=float, default=0.01)
    p.add_argument("--nperm", type=int, default=1000)
    p.add_argument("--iterations", type=int, default=550)
    p.add_argument("--burnin", type=int, default=50)
    p.add_argument("--p0", type=float, default=0.2)
    p.add_argument("--w0", type=float, default=0.2)
    p.add_argument("--bh-threshold", type=float, default=0.5,
                   help="list years whose change probability reaches this value")

    p = sub.add_parser("mds", help="martingale difference tests")
    _input_args(p)
    _common(p)
    p.add_argument("--windows", type=_windows, help="comma list of FROM:TO windows")
    p.add_argument("--paper-windows", action="store_true",
                   help="use 1701-1900, 1701-end, start-1700 and start-1900")
    p.add_argument("--bootstrap", type=int, default=500)
    p.add_argument("--max-lag", type=int)
    p.add_argument("--nonlin", action="store_true", help="add the nonlinearity test")
    p.add_argument("--recheck", action="store_true", help="also test AR(1) residuals")
    p.add_argument("--multiplier", choices=["normal", "mammen"], default="normal",
                   help="wild-bootstrap weight distribution")

    p = sub.add_parser("ar1", help="first-order autoregression with trend")
    _input_args(p)
    _common(p)

    p = sub.add_parser("smooth", help="moving averages and loess")
    _input_args(p)
    _common(p)
    p.add_argument("--ma", type=int, action="append", help="moving-average window (repeatable)")
    p.add_argument("--span", type=float, default=1 / 3)

    p = sub.add_parser("slutsky", help="smoothing demonstration on white noise")
    _common(p)
    p.set_defaults(seed=123)
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--ma", type=int, action="append", help="moving-average window (repeatable)")
    p.add_argument("--span", type=float, default=1 / 3)

    p = sub.add_parser("power", help="Monte Carlo detection rates")
    _common(p)
    p.set_defaults(seed=2014)
    p.add_argument("--scenario", action="append", help="scenario file (repeatable)")
    p.add_argument("--replicates", type=int, default=1000, help="for the built-in designs")

    p = sub.add_parser("report", help="run a JSON report configuration")
    p.add_argument("config")
    return parser


def _load(args):
    path = resolve_path(args.input)
    s = read_series(path, args.format, args.season, name=args.name)
    if args.from_year is not None or args.to_year is not None:
        s = window(s, args.from_year or s.first_year, args.to_year or s.last_year)
    return s


def _write(out_dir, files):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (out / name).write_text(text, encoding="utf-8", newline="\n")
        log.info("wrote %s", out / name)


def dispatch(args):
    cmd = args.command
    if cmd == "report":
        cfg = ReportConfig.load(args.config)
        ok, manifest = run_report(cfg)
        for f in manifest["failures"]:
            print(f"failed: {f['analysis']} {f['dataset'] or ''}: {f['error']}", file=sys.stderr)
        return 0 if ok else 1
    if cmd == "slutsky":
        files = analyses.run_slutsky(n=args.n, seed=args.seed,
                                     windows=tuple(args.ma or (10, 25)), span=args.span)
    elif cmd == "power":
        if args.scenario:
            scs = []
            for path in args.scenario:
                sc = parse_scenario(Path(path).read_text(encoding="utf-8"))
                scs.append((Path(path).stem, sc, None))
            files = analyses.run_power_table(scs)
        else:
            files = analyses.run_power_table(replicates=args.replicates, seed=args.seed)
    else:
        s = _load(args)
        if cmd == "ingest":
            files = analyses.run_ingest(s)
        elif cmd == "describe":
            files = analyses.run_describe(s)
        elif cmd == "anova":
            files = analyses.run_anova(s, block_len=args.block_len, iterations=args.iterations,
                                       burnin=args.burnin, seed=args.seed, chains=args.chains)
        elif cmd == "breaks":
            files = analyses.run_breaks(
                s, min_seg=args.min_seg, kmax=args.kmax, alpha=args.alpha, nperm=args.nperm,
                seed=args.seed, iterations=args.iterations, burnin=args.burnin,
                p0=args.p0, w0=args.w0, bh_threshold=args.bh_threshold,
            )
        elif cmd == "mds":
            wins = args.windows
            if args.paper_windows:
                wins = analyses.paper_windows(s)
            if wins:
                for lo, hi in wins:
                    window(s, lo, hi)  # validate before any work
            files = analyses.run_mds(s, windows=wins, bootstrap=args.bootstrap, seed=args.seed,
                                     nonlin=args.nonlin, max_lag=args.max_lag, recheck=args.recheck,
                                     multiplier=args.multiplier)
        elif cmd == "ar1":
            files = analyses.run_ar1(s)
        elif cmd == "smooth":
            files = analyses.run_smooth(s, windows=tuple(args.ma or (30,)), span=args.span)
        else:  # pragma: no cover - argparse restricts choices
            raise IcebreakerError(f"unknown command {cmd}")
    _write(args.out, files)
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return dispatch(args)
    except (IcebreakerError, OSError) as exc:
        print(f"icebreaker {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
