"""Command-line front end.

Exit codes: 0 optimal (or benchmark finished), 2 limit reached, 64 usage
error, 65 data error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .benchmark import LARGE_LIMIT, SMALL_LIMIT, format_table, run_benchmark
from .lp_model import InvalidProblemError, NumericalBreakdownError
from .mps_io import read_mps, write_solution
from .solver import HIGH_ACCURACY, ConfigError, load_config, solve

EXIT_OK = 0
EXIT_LIMIT = 2
EXIT_USAGE = 64
EXIT_DATA = 65


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="halpern-lp", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="solve one MPS file")
    s.add_argument("file")
    acc = s.add_mutually_exclusive_group()
    acc.add_argument("--eps", type=float, help="relative KKT tolerance (default 1e-4)")
    acc.add_argument("--high-accuracy", action="store_true", help="use eps = 1e-8")
    s.add_argument("--time-limit", type=float, metavar="S")
    s.add_argument("--iteration-limit", type=int, metavar="N")
    s.add_argument("--no-scaling", action="store_true")
    s.add_argument("--gamma", type=float, help="reflection parameter in [0, 1]")
    s.add_argument("--out", metavar="PATH", help="write the JSON solution report here")
    s.add_argument("--vectors", action="store_true", help="include x, y, r in the report")
    s.add_argument("--config", metavar="PATH")
    s.add_argument("--fixed", action="store_true", help="parse as fixed-format MPS")

    b = sub.add_parser("bench", help="solve every MPS file in a directory")
    b.add_argument("directory")
    acc = b.add_mutually_exclusive_group()
    acc.add_argument("--eps", type=float)
    acc.add_argument("--high-accuracy", action="store_true")
    b.add_argument("--small-limit", type=float, default=SMALL_LIMIT,
                   help="time limit for small and medium instances")
    b.add_argument("--large-limit", type=float, default=LARGE_LIMIT)
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--out", metavar="DIR", help="directory for benchmark.json/.txt")
    b.add_argument("--config", metavar="PATH")
    return parser


def _config(args):
    cfg = load_config(args.config)
    changes = {}
    if args.high_accuracy:
        changes["epsilon"] = HIGH_ACCURACY
    elif args.eps is not None:
        changes["epsilon"] = args.eps
    if args.verbose:
        changes["verbosity"] = args.verbose
    for attr, key in (("time_limit", "time_limit"), ("iteration_limit", "iteration_limit"),
                      ("gamma", "gamma")):
        if getattr(args, attr, None) is not None:
            changes[key] = getattr(args, attr)
    if getattr(args, "no_scaling", False):
        changes["scaling"] = False
    return cfg.replace(**changes)


def _solve(args) -> int:
    cfg = _config(args)
    problem = read_mps(args.file, fmt="fixed" if args.fixed else "free")
    report = solve(problem, cfg)
    out = args.out or cfg.output_path
    if out:
        write_solution(report, out, include_vectors=args.vectors or cfg.output_vectors)
    res = report.residuals
    print(f"status      {report.status}")
    print(f"objective   {report.objective:.12g}")
    print(f"iterations  {report.iterations}  restarts {report.restarts}")
    print(f"time        {report.solve_seconds:.3f}s")
    if res is not None:
        print(f"rel. gap    {res.gap_rel:.3e}  primal {res.primal_rel:.3e}  "
              f"dual {res.dual_eq_rel:.3e}")
    return EXIT_OK if report.status == "optimal" else EXIT_LIMIT


def _bench(args) -> int:
    cfg = _config(args)
    if args.workers < 1:
        raise ConfigError("--workers must be >= 1")
    report = run_benchmark(args.directory, cfg, args.small_limit, args.large_limit,
                           args.workers, args.out)
    for rec in report["records"]:
        print(f"{rec['name']:<32} {rec['status']:<16} {rec['solve_seconds']:10.3f}s")
    print(format_table(report["summary"], f"eps={cfg.epsilon:g}"))
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "solve":
            return _solve(args)
        return _bench(args)
    except InvalidProblemError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ConfigError, ValueError, NotADirectoryError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, NumericalBreakdownError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
