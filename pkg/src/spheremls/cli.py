"""Command line front end.

Subcommands: ``grid`` (Fibonacci grid characteristics), ``approx``
(approximate a sampled field at evaluation points), ``sweep`` (the full
convergence / conditioning benchmark), ``taylor`` (exact unimodularity
check of the parity-basis Taylor matrix) and ``lebesgue`` (stability
constants over random centers).

Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from .bases import ANSATZ_KINDS, AnsatzSpec, UnsupportedAnsatzError
from .benchmark import (RAD2DEG, SWEEP_COLUMNS, SweepConfig,
                        default_test_function, estimate_order,
                        random_uniform_sphere, run_sweep, stable_records)
from .nodes import NodeSet, fibonacci_grid
from .solver import (MlsConfig, MlsError, MultipleOfFill,
                     backus_gilbert_coefficients, evaluate_field_diagnostics,
                     lebesgue_constant)

__all__ = ["main", "build_parser"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_IO = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors; this interface
    # reserves 2 for numerical failures and uses 1 for usage.
    def error(self, message):
        raise _UsageError(message)


def _fmt(x) -> str:
    return format(x, ".17g")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="spheremls",
                     description="Moving least squares approximation on "
                                 "the unit sphere.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_grid = sub.add_parser("grid", help="Fibonacci grid characteristics")
    group = p_grid.add_mutually_exclusive_group(required=True)
    group.add_argument("--n", type=_positive_int,
                       help="grid parameter; the grid has N = 2n+1 nodes")
    group.add_argument("--k", type=_positive_int,
                       help="family exponent, shorthand for n = 5 * 2^k")
    p_grid.add_argument("--out", default="-",
                        help="output CSV path ('-' for stdout)")
    p_grid.add_argument("--fill-samples", type=_positive_int, default=20_000)
    p_grid.add_argument("--seed", type=int, default=0)
    p_grid.set_defaults(func=_cmd_grid)

    p_approx = sub.add_parser("approx",
                              help="approximate a sampled field at "
                                   "evaluation points")
    p_approx.add_argument("--nodes", required=True, help="node file")
    p_approx.add_argument("--values", required=True,
                          help="file with one sample value per node")
    p_approx.add_argument("--ansatz", required=True, choices=ANSATZ_KINDS)
    p_approx.add_argument("--L", type=int, required=True, dest="degree")
    p_approx.add_argument("--R", type=float, required=True, dest="r_factor",
                          help="support radius as a multiple of the fill "
                               "distance")
    p_approx.add_argument("--eval", required=True, dest="eval_points",
                          help="file with evaluation points")
    p_approx.add_argument("--out", required=True)
    p_approx.add_argument("--threads", type=_positive_int, default=1)
    p_approx.add_argument("--fill-samples", type=_positive_int, default=20_000)
    p_approx.add_argument("--seed", type=int, default=0)
    p_approx.set_defaults(func=_cmd_approx)

    p_sweep = sub.add_parser("sweep", help="convergence / conditioning sweep "
                                           "over the Fibonacci family")
    p_sweep.add_argument("--kmin", type=_positive_int, required=True)
    p_sweep.add_argument("--kmax", type=_positive_int, required=True)
    p_sweep.add_argument("--ansatz-set", default=",".join(SWEEP_COLUMNS),
                         help="comma separated ansatz kinds "
                              f"(default: {','.join(SWEEP_COLUMNS)})")
    p_sweep.add_argument("--seed", type=int, default=0)
    p_sweep.add_argument("--outdir", required=True)
    p_sweep.add_argument("--test-size", type=_positive_int, default=10_000)
    p_sweep.add_argument("--L", type=int, default=3, dest="degree")
    p_sweep.add_argument("--threads", type=_positive_int, default=1)
    p_sweep.add_argument("--fill-samples", type=_positive_int, default=20_000)
    p_sweep.add_argument("--use-ni-exponent", action="store_true",
                         help="raise each test function term to its stored "
                              "integer exponent")
    p_sweep.add_argument("--slope-window", default="0.3,10",
                         help="h window in degrees for the printed order "
                              "estimates (lo,hi)")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_taylor = sub.add_parser("taylor", help="exact unimodularity check of "
                                             "the parity-basis Taylor matrix")
    p_taylor.add_argument("--L", type=int, required=True, dest="degree")
    p_taylor.add_argument("--d", type=int, required=True, dest="dim")
    p_taylor.set_defaults(func=_cmd_taylor)

    p_leb = sub.add_parser("lebesgue", help="Lebesgue constants over random "
                                            "centers")
    group = p_leb.add_mutually_exclusive_group(required=True)
    group.add_argument("--n", type=_positive_int)
    group.add_argument("--k", type=_positive_int)
    p_leb.add_argument("--ansatz", required=True, choices=ANSATZ_KINDS)
    p_leb.add_argument("--L", type=int, default=3, dest="degree")
    p_leb.add_argument("--R", type=float, default=3.5, dest="r_factor")
    p_leb.add_argument("--centers", type=_positive_int, default=1000)
    p_leb.add_argument("--seed", type=int, default=0)
    p_leb.add_argument("--out", default=None,
                       help="optional CSV with one constant per center")
    p_leb.add_argument("--fill-samples", type=_positive_int, default=20_000)
    p_leb.set_defaults(func=_cmd_lebesgue)

    return parser


def _load_values(path) -> np.ndarray:
    values = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            values.append(float(stripped))
    return np.asarray(values)


def _grid_rows(nodes: NodeSet, fill_samples: int, seed: int) -> list[str]:
    h = nodes.fill_distance_estimate(samples=fill_samples, seed=seed)
    q = nodes.separation_distance
    return [str(nodes.n), _fmt(h * RAD2DEG), _fmt(q * RAD2DEG), _fmt(h / q)]


def _cmd_grid(args) -> int:
    n = args.n if args.n is not None else 5 * 2 ** args.k
    nodes = fibonacci_grid(n)
    row = _grid_rows(nodes, args.fill_samples, args.seed)
    lines = ["N,fill_deg,sep_deg,uniformity", ",".join(row)]
    if args.out == "-":
        print("\n".join(lines))
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write("\n".join(lines) + "\n")
    return EXIT_OK


def _cmd_approx(args) -> int:
    nodes = NodeSet.from_file(args.nodes)
    values = _load_values(args.values)
    if values.shape[0] != nodes.n:
        raise _UsageError(
            f"{args.values}: {values.shape[0]} values for {nodes.n} nodes")
    eval_nodes = NodeSet.from_file(args.eval_points)
    config = MlsConfig(
        ansatz=AnsatzSpec(args.ansatz, args.degree, dim=nodes.dim),
        delta_rule=MultipleOfFill(args.r_factor),
        on_error="skip",
    )
    h = nodes.fill_distance_estimate(samples=args.fill_samples,
                                     seed=args.seed)
    diag = evaluate_field_diagnostics(config, nodes, values,
                                      eval_nodes.points, h=h,
                                      n_jobs=args.threads, collect=False)
    reasons = {i: kind for i, kind, _ in diag.failures}
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["value", "error"])
        for i, v in enumerate(diag.values):
            if np.isnan(v):
                writer.writerow(["", reasons.get(i, "SolveFailed")])
            else:
                writer.writerow([_fmt(v), ""])
    if diag.n_failed == diag.values.size:
        counts = {}
        for _, kind, _ in diag.failures:
            counts[kind] = counts.get(kind, 0) + 1
        summary = ", ".join(f"{v}x {k}" for k, v in sorted(counts.items()))
        print(f"error: all {diag.values.size} evaluation points failed "
              f"({summary})", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def _cmd_sweep(args) -> int:
    kinds = tuple(k.strip() for k in args.ansatz_set.split(",") if k.strip())
    for kind in kinds:
        if kind not in ANSATZ_KINDS:
            raise _UsageError(f"unknown ansatz kind {kind!r}")
    if args.kmax < args.kmin:
        raise _UsageError("--kmax must be >= --kmin")
    outdir = Path(args.outdir)
    if not outdir.is_dir():
        raise FileNotFoundError(f"output directory {outdir} does not exist")
    config = SweepConfig(
        grid_exponents=list(range(args.kmin, args.kmax + 1)),
        ansatz_kinds=kinds,
        degree=args.degree,
        test_set_size=args.test_size,
        seed=args.seed,
        outdir=outdir,
        fill_samples=args.fill_samples,
        n_jobs=args.threads,
        params=default_test_function(use_term_exponents=args.use_ni_exponent),
    )
    try:
        lo, hi = (float(x) for x in args.slope_window.split(","))
    except ValueError:
        raise _UsageError(
            f"--slope-window must be 'lo,hi' in degrees, "
            f"got {args.slope_window!r}") from None
    records = run_sweep(config, progress=lambda msg: print(msg, flush=True))
    for kind in kinds:
        try:
            est = estimate_order(records, kind, (lo, hi))
        except ValueError as exc:
            print(f"order({kind}): not available ({exc})")
            continue
        print(f"order({kind}): slope {est.slope:.3f} over {est.n_used} grids "
              f"(h in [{lo:g}, {hi:g}] deg, rms residual {est.residual:.3f})")
        stable = stable_records(records, kind)
        if stable:
            lebs = [r.results[kind].max_lebesgue for r in stable]
            print(f"lebesgue({kind}): max {max(lebs):.3f} across "
                  f"{len(stable)} stable grids")
    return EXIT_OK


def _cmd_taylor(args) -> int:
    from .taylor import taylor_matrix

    if args.degree < 0 or args.dim < 2:
        raise _UsageError("need --L >= 0 and --d >= 2")
    matrix = taylor_matrix(args.degree, args.dim)
    det = matrix.determinant()
    print(f"size: {matrix.size} x {matrix.size}")
    print(f"unit lower triangular after pairing: "
          f"{matrix.is_unit_lower_triangular_after_pairing()}")
    print(f"determinant: {det}")
    return EXIT_OK


def _cmd_lebesgue(args) -> int:
    n = args.n if args.n is not None else 5 * 2 ** args.k
    nodes = fibonacci_grid(n)
    h = nodes.fill_distance_estimate(samples=args.fill_samples,
                                     seed=args.seed)
    delta = args.r_factor * h
    config = MlsConfig(ansatz=AnsatzSpec(args.ansatz, args.degree),
                       delta_rule=MultipleOfFill(args.r_factor))
    centers = random_uniform_sphere(args.centers, args.seed)
    constants = np.empty(args.centers)
    for i, center in enumerate(centers):
        constants[i] = lebesgue_constant(
            backus_gilbert_coefficients(config, nodes, center, delta))
    print(f"N={nodes.n} h={h * RAD2DEG:.4f} deg delta={delta:.6g} rad")
    print(f"lebesgue: max {constants.max():.6f}  mean {constants.mean():.6f} "
          f"over {args.centers} centers")
    if args.out is not None:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["lebesgue"])
            for value in constants:
                writer.writerow([_fmt(value)])
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MlsError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (UnsupportedAnsatzError, ValueError) as exc:
        # bad flag combinations or unparsable / invalid input files
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
