"""Command line interface.

    lovasz-dist [--threads T] SUBCOMMAND CAPACITY.json [options]

Output is CSV on stdout with 12 significant digits.  Errors go to stderr as
``error:<category>:<message>``; exit code 1 for invalid input or a failed
check, 2 for unparseable arguments or capacity files.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import distribution as dist
from .capacity import (
    CapacityError,
    CapacityParseError,
    classify,
    moebius_transform,
    read_capacity,
)
from .lovasz import eval_moebius, eval_sorted
from .oracle import ks_statistic, ks_threshold, sample

EXIT_OK, EXIT_INVALID, EXIT_PARSE = 0, 1, 2


class CliError(Exception):
    def __init__(self, category: str, message: str, code: int):
        super().__init__(message)
        self.category = category
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError("usage", message, EXIT_PARSE)


def fmt(x) -> str:
    return f"{float(x):.12g}"


def _float_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("capacity", help="capacity JSON file")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS,
                        help="worker threads (default: all cores); never changes output")

    parser = _Parser(prog="lovasz-dist", description=__doc__.splitlines()[0])
    parser.add_argument("--threads", type=int, default=None)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("classify", parents=[common], help="subclass flags")
    p = sub.add_parser("eval", parents=[common], help="evaluate h at a point")
    p.add_argument("--point", type=_float_list, required=True)
    p = sub.add_parser("cdf", parents=[common], help="P(Y <= y)")
    p.add_argument("--at", type=float, required=True)
    p = sub.add_parser("pdf", parents=[common], help="density at y")
    p.add_argument("--at", type=float, required=True)
    p = sub.add_parser("grid", parents=[common], help="CSV of y,cdf,pdf,knot")
    p.add_argument("--lo", type=float, required=True)
    p.add_argument("--hi", type=float, required=True)
    p.add_argument("--points", type=int, required=True)
    p = sub.add_parser("moments", parents=[common], help="raw and central moments")
    p.add_argument("--order", type=int, required=True)
    p = sub.add_parser("quantile", parents=[common], help="inverse CDF by bisection")
    p.add_argument("--p", type=float, required=True)
    p = sub.add_parser("sample", parents=[common], help="Monte Carlo realizations")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p = sub.add_parser("check", parents=[common], help="KS test of exact CDF against samples")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    return parser


def _run(args, out, err) -> int:
    try:
        v = read_capacity(args.capacity)
    except CapacityParseError as exc:
        raise CliError("parse", str(exc), EXIT_PARSE) from None
    except CapacityError as exc:
        raise CliError("capacity", str(exc), EXIT_INVALID) from None
    except OSError as exc:
        raise CliError("io", str(exc), EXIT_INVALID) from None
    threads = args.threads if args.threads is not None else os.cpu_count()
    cmd = args.command

    if cmd == "classify":
        report = classify(v)
        out.write("flag,value\n")
        for name in ("is_monotone", "is_lattice_polynomial", "is_cardinality_based", "is_additive"):
            out.write(f"{name},{str(getattr(report, name)).lower()}\n")
    elif cmd == "eval":
        x = np.array(args.point)
        out.write(f"sorted,{fmt(eval_sorted(v, x))}\n")
        out.write(f"moebius,{fmt(eval_moebius(moebius_transform(v), x))}\n")
    elif cmd == "cdf":
        out.write(fmt(dist.cdf(v, args.at, threads=threads)) + "\n")
    elif cmd == "pdf":
        out.write(fmt(dist.pdf(v, args.at, threads=threads)) + "\n")
    elif cmd == "grid":
        g = dist.distribution_grid(v, args.lo, args.hi, args.points, threads=threads)
        if g.degenerate:
            err.write(f"warning:degenerate:point mass {g.atom_mass:.12g} is not part of the pdf column\n")
        out.write("y,cdf,pdf,knot\n")
        for y, F, f, k in zip(g.grid, g.cdf, g.pdf, g.at_knot):
            out.write(f"{fmt(y)},{fmt(F)},{fmt(f)},{int(k)}\n")
    elif cmd == "moments":
        table = dist.moment_table(v, args.order)
        out.write("r,raw,central\n")
        for r in range(1, table.order + 1):
            out.write(f"{r},{fmt(table.raw[r])},{fmt(table.central[r])}\n")
        out.write(f"mean,{fmt(table.mean)}\n")
        if table.order >= 2:
            out.write(f"std,{fmt(table.std)}\n")
    elif cmd == "quantile":
        out.write(fmt(dist.quantile(v, args.p)) + "\n")
    elif cmd == "sample":
        batch = sample(v, args.count, args.seed, threads=threads)
        out.write("y\n")
        out.writelines(fmt(y) + "\n" for y in batch.values)
    elif cmd == "check":
        if args.count < 1:
            raise CliError("value", "count must be positive", EXIT_INVALID)
        batch = sample(v, args.count, args.seed, threads=threads)
        d = ks_statistic(batch, v)
        limit = ks_threshold(args.count)
        passed = d < limit
        out.write(f"ks,{fmt(d)}\nthreshold,{fmt(limit)}\nresult,{'pass' if passed else 'fail'}\n")
        return EXIT_OK if passed else EXIT_INVALID
    return EXIT_OK


def main(argv=None, out=None, err=None) -> int:
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return _run(args, out, err)
    except CliError as exc:
        err.write(f"error:{exc.category}:{exc}\n")
        return exc.code
    except dist.PlayerCapError as exc:
        err.write(f"error:cap:{exc}\n")
        return EXIT_INVALID
    except ValueError as exc:
        err.write(f"error:value:{exc}\n")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
