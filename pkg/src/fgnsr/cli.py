"""Command line entry point: ``fgnsr {generate,unmix,sweep,project}``.

Exit codes: 0 success, 2 bad input (arguments, files), 3 solver failure.
Diagnostics go to standard error; data goes to files (or stdout with ``-``).
"""

import argparse
import csv
import logging
import os
import sys

import numpy as np

from . import benchmark
from .io import MatrixFormatError, format_float, read_matrix, read_vector, write_json, write_matrix
from .preselect import read_labels
from .projection import project_row_info
from .solver import SolverError
from .synthgen import gen_middlepoint, gen_scaled_middlepoint

log = logging.getLogger("fgnsr")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_SOLVER = 3


class InputError(Exception):
    pass


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def _name_list(text):
    return [v.strip() for v in text.split(",") if v.strip()]


def cmd_generate(args):
    if args.kind == "middlepoint":
        inst = gen_middlepoint(args.m, args.r, args.eps, args.seed)
    else:
        inst = gen_scaled_middlepoint(args.m, args.r, args.eps, args.alpha, args.seed)
    try:
        write_matrix(args.out, inst.M)
        with open(args.out + ".meta.json", "w", encoding="utf-8", newline="\n") as fh:
            fh.write(inst.metadata_json())
    except OSError as exc:
        raise InputError(f"cannot write {args.out}: {exc}") from None
    log.info("wrote %dx%d matrix to %s", *inst.M.shape, args.out)
    return EXIT_OK


def cmd_unmix(args):
    M = read_matrix(args.input)
    labels = None
    if args.labels:
        labels = read_labels(args.labels)
        if labels.labels.size != M.shape[1]:
            raise InputError(f"{args.labels}: {labels.labels.size} labels for {M.shape[1]} columns")
    if args.r < 1:
        raise InputError("--r must be >= 1")
    postprocess = args.postprocess
    if postprocess is None:
        postprocess = "spa_rows" if (labels is not None or args.preselect_C) else "topdiag"
    result = benchmark.unmix(
        M, args.algorithm, args.r, preselect_C=args.preselect_C, labels=labels,
        seed=args.seed, maxiter=args.maxiter, mu_mode=args.mu_mode, mu=args.mu,
        eps_target=args.eps, postprocess=postprocess)
    write_json(args.out, result)
    log.info("selected %s (rel. error %.4g%%)", result["indices"], result["rel_error_pct"])
    return EXIT_OK


def cmd_sweep(args):
    for a in args.algorithms:
        if a not in benchmark.ALGORITHMS:
            raise InputError(f"unknown algorithm {a!r}")

    def progress(ei, t):
        log.debug("eps #%d trial %d done", ei, t)

    rows = benchmark.run_sweep(args.kind, args.m, args.r, args.eps, args.trials, args.algorithms,
                               alpha=args.alpha, base_seed=args.seed, maxiter=args.maxiter,
                               progress=progress)
    fh = sys.stdout if args.out == "-" else open(args.out, "w", encoding="ascii", newline="")
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(benchmark.SWEEP_FIELDS)
        for row in rows:
            writer.writerow([
                row["algorithm"], format_float(row["eps"]), row["trial_seed"],
                format_float(row["index_recovery"]), format_float(row["mrsa_mean"]),
                format_float(row["rel_measure"]), f"{row['runtime_seconds']:.6f}",
            ])
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def cmd_project(args):
    x = read_vector(args.row)
    w = read_vector(args.weights)
    if x.size != w.size:
        raise InputError(f"row has length {x.size} but weights have length {w.size}")
    if not 0 <= args.pivot < x.size:
        raise InputError(f"pivot {args.pivot} out of range")
    if np.any(w < 0):
        raise InputError("weights must be nonnegative")
    info = project_row_info(x, w, args.pivot, method=args.method)
    write_json(args.out, {
        "z": [float(v) for v in info.z],
        "t_star": info.t,
        "z_pivot": float(info.z[args.pivot]),
        "active_set_size": info.n_active,
        "active": [int(j) for j in np.flatnonzero(info.active)],
    })
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="fgnsr", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic middle-point matrix")
    g.add_argument("--kind", choices=("middlepoint", "scaled"), default="middlepoint")
    g.add_argument("--m", type=int, default=50)
    g.add_argument("--r", type=int, default=10)
    g.add_argument("--eps", type=float, default=0.0)
    g.add_argument("--alpha", type=float, default=4.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True, help="matrix path (.csv for text, else binary)")
    g.set_defaults(func=cmd_generate)

    u = sub.add_parser("unmix", help="select r columns of a matrix file")
    u.add_argument("input")
    u.add_argument("--algorithm", choices=benchmark.ALGORITHMS, default="fgnsr")
    u.add_argument("--r", type=int, required=True)
    u.add_argument("--mu-mode", choices=("heuristic", "fixed", "dynamic"), default="heuristic")
    u.add_argument("--mu", type=float, default=None)
    u.add_argument("--eps", type=float, default=None, help="target residual for dynamic mu")
    u.add_argument("--maxiter", type=int, default=1000)
    u.add_argument("--postprocess", choices=("topdiag", "spa_rows"), default=None)
    u.add_argument("--preselect-C", type=int, default=None, dest="preselect_C")
    u.add_argument("--labels", default=None, help="cluster id per column, one per line")
    u.add_argument("--seed", type=int, default=0)
    u.add_argument("--out", default="-")
    u.set_defaults(func=cmd_unmix)

    s = sub.add_parser("sweep", help="noise robustness sweep to CSV")
    s.add_argument("--kind", choices=("middlepoint", "scaled"), default="middlepoint")
    s.add_argument("--m", type=int, default=50)
    s.add_argument("--r", type=int, default=10)
    s.add_argument("--eps", type=_float_list, required=True, help="comma-separated noise levels")
    s.add_argument("--trials", type=int, default=25)
    s.add_argument("--algorithms", type=_name_list, default=["fgnsr", "spa", "snpa", "xray"])
    s.add_argument("--alpha", type=float, default=4.0)
    s.add_argument("--maxiter", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_sweep)

    p = sub.add_parser("project", help="project one row onto the weighted polyhedron")
    p.add_argument("--row", required=True)
    p.add_argument("--weights", required=True)
    p.add_argument("--pivot", type=int, required=True)
    p.add_argument("--method", choices=("heap", "sort"), default="heap")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_project)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (InputError, MatrixFormatError, FileNotFoundError, IsADirectoryError,
            PermissionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (SolverError, ValueError, ArithmeticError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
