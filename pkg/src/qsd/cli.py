"""Command-line entry point: ``qsd <command> [options]``.

Commands
--------
diff         one derivative estimate, with its relative error
sweep-h      error against step size for several backends
sweep-angle  error over a (theta, phi) grid of step directions
grid-log     derivative of ln on a square window around the origin
lemma-check  2x2 trace formula vs. imaginary-step central difference

Exit codes: 0 success, 1 evaluation failure, 2 invalid arguments.
"""

from __future__ import annotations

import argparse
import contextlib
import math
import os
import sys

from . import experiments as ex
from .clifford import from_angles
from .engine import Backend, DiffRequest, differentiate, estimate, lookup
from .errors import (
    EvaluationError,
    NonInvertibleError,
    NotInSubalgebraError,
    UndefinedReferenceError,
)
from .matrix import lemma_equivalence_check

LEMMA_TOLERANCE = 1e-10


def _positive_float(text):
    value = float(text)
    if not value > 0 or not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return value


def _count(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {text!r}")
    return value


def _common(p, z_default=ex.DEFAULT_Z, fn_default="lyness"):
    p.add_argument("--fn", default=fn_default, help="function tag, e.g. lyness, ln, poly:0,0,1")
    p.add_argument("--z-re", type=float, default=z_default.real)
    p.add_argument("--z-im", type=float, default=z_default.imag)
    p.add_argument("--h", type=_positive_float, default=1e-20)
    p.add_argument("--theta", type=float, default=ex.HALF_PI)
    p.add_argument("--phi", type=float, default=ex.HALF_PI)
    p.add_argument("--order", type=_count, default=1, help="central difference order")


def _output(p):
    p.add_argument("--out", default="-", help="output path ('-' for stdout)")
    p.add_argument("--format", dest="fmt", choices=("csv", "jsonl"), default="csv")


def build_parser():
    parser = argparse.ArgumentParser(prog="qsd", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("diff", help="single derivative estimate")
    _common(p)
    p.add_argument("--backend", default="bicomplex")

    p = sub.add_parser("sweep-h", help="error vs. step size")
    _common(p)
    p.add_argument("--h-start", type=_positive_float, default=1e-1)
    p.add_argument("--h-stop", type=_positive_float, default=1e-20)
    p.add_argument("--h-points", type=_count, default=20)
    p.add_argument(
        "--backend",
        default="bicomplex,multivector,pauli2:j,pauli2:k,real4,central",
        help="comma list; a ':i', ':j' or ':k' suffix fixes the step axis",
    )
    _output(p)

    p = sub.add_parser("sweep-angle", help="error over step directions")
    _common(p)
    p.add_argument("--theta-points", type=_count, default=20)
    p.add_argument("--phi-points", type=_count, default=20)
    p.add_argument("--backend", default="real4,pauli2")
    _output(p)

    p = sub.add_parser("grid-log", help="derivative of ln near the origin")
    _common(p, z_default=0j, fn_default="ln")
    p.add_argument("--window", type=_positive_float, default=1e-15)
    p.add_argument("--grid-points", type=_count, default=41)
    p.add_argument("--backend", default="bicomplex")
    _output(p)

    p = sub.add_parser("lemma-check", help="trace formula vs. central difference")
    _common(p, z_default=complex(0.5, 0.2), fn_default="exp")
    p.set_defaults(h=1e-3)
    return parser


def _variants(args):
    tokens = [t for t in args.backend.split(",") if t.strip()]
    return tuple(ex.Variant.parse(t, args.theta, args.phi, args.order) for t in tokens)


def _check_angles(parser, theta, phi):
    try:
        from_angles(theta, phi)
    except ValueError as exc:
        parser.error(str(exc))


@contextlib.contextmanager
def _open_out(path):
    if path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _cmd_diff(args, parser):
    variant = _variants(args)
    if len(variant) != 1:
        parser.error("diff takes exactly one backend")
    v = variant[0]
    _check_angles(parser, v.theta, v.phi)
    z = complex(args.z_re, args.z_im)
    try:
        request = DiffRequest(args.fn, z, args.h, from_angles(v.theta, v.phi), v.backend, v.order)
    except ValueError as exc:
        parser.error(str(exc))
    try:
        result = differentiate(request)
    except UndefinedReferenceError as exc:
        try:
            est = estimate(request)
        except (ArithmeticError, NotInSubalgebraError) as inner:
            print(f"error: {inner}", file=sys.stderr)
            return 1
        print(f"est_re={est.real!r}\nest_im={est.imag!r}")
        print(f"warning: {exc}", file=sys.stderr)
        return 0
    except (NonInvertibleError, EvaluationError, NotInSubalgebraError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    est = result.estimate
    print(f"est_re={est.real!r}\nest_im={est.imag!r}")
    if result.reference is not None:
        ref = result.reference
        print(f"ref_re={ref.real!r}\nref_im={ref.imag!r}\nrel_err={result.rel_err!r}")
    return 0


def _run_sweep(args, parser, runner, config):
    try:
        config.validate()
        if any(v.backend is Backend.CSD for v in config.variants) and args.command != "sweep-h":
            raise ValueError("the csd backend needs real evaluation points")
        if any(v.backend is Backend.CSD for v in config.variants) and config.z.imag != 0:
            raise ValueError("the csd backend needs a real evaluation point")
    except ValueError as exc:
        parser.error(str(exc))
    records = runner(config)
    with _open_out(args.out) as fh:
        try:
            ex.write_records(records, fh, args.fmt)
        except BrokenPipeError:
            # reader went away (e.g. piped into head); silence the flush at exit
            os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
    return 0


def _config(args, variants, **kw):
    return ex.ExperimentConfig(
        experiment=args.command,
        fn=args.fn,
        variants=variants,
        z=complex(args.z_re, args.z_im),
        h=args.h,
        theta=args.theta,
        phi=args.phi,
        out=args.out,
        fmt=args.fmt,
        **kw,
    )


def _cmd_lemma(args, parser):
    z = complex(args.z_re, args.z_im)
    try:
        lhs, rhs = lemma_equivalence_check(args.fn, z, args.h, args.theta, args.phi)
    except ValueError as exc:
        parser.error(str(exc))
    except ArithmeticError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    discrepancy = abs(lhs - rhs) / abs(rhs) if rhs != 0 else abs(lhs - rhs)
    print(f"lhs_re={lhs.real!r}\nlhs_im={lhs.imag!r}")
    print(f"rhs_re={rhs.real!r}\nrhs_im={rhs.imag!r}")
    print(f"discrepancy={discrepancy!r}")
    return 0 if discrepancy <= LEMMA_TOLERANCE else 1


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        lookup(args.fn)
    except ValueError as exc:
        parser.error(str(exc))
    if args.command == "lemma-check":
        return _cmd_lemma(args, parser)
    try:
        variants = _variants(args)
    except ValueError as exc:
        parser.error(str(exc))
    for v in variants:
        if args.command != "sweep-angle":
            _check_angles(parser, v.theta, v.phi)
    if args.command == "diff":
        return _cmd_diff(args, parser)
    if args.command == "sweep-h":
        config = _config(
            args, variants, h_start=args.h_start, h_stop=args.h_stop, h_points=args.h_points
        )
        return _run_sweep(args, parser, ex.run_sweep_h, config)
    if args.command == "sweep-angle":
        config = _config(
            args, variants, theta_points=args.theta_points, phi_points=args.phi_points
        )
        return _run_sweep(args, parser, ex.run_sweep_angle, config)
    config = _config(args, variants, window=args.window, grid_points=args.grid_points)
    return _run_sweep(args, parser, ex.run_grid_log, config)


if __name__ == "__main__":
    sys.exit(main())
