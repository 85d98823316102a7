"""Command-line entry point.

Subcommands write CSV (``#`` comment lines carry metadata) or, for
``validate``, ``key=value`` lines::

    gammatelegraph density  --alpha 0.5 --beta 0.5 --t 1
    gammatelegraph mean     --alpha 0.5 --beta 0.5 --t-start 0 --t-end 5 --t-step 0.01
    gammatelegraph simulate --alpha 1.5 --beta 1.5 --t 3 --samples 1000000 --bins 100
    gammatelegraph validate --alpha 1 --beta 1 --t 1

Exit codes: 0 success, 1 parameter error, 2 convergence or quadrature
failure, 3 validation failure.
"""

import argparse
import contextlib
import logging
import math
import sys

import numpy as np

from .errors import ConvergenceError, DomainError, QuadratureError
from .harness import bin_masses, validate
from .law import InitialVelocity, MotionParams, SeriesControl, atom_probability, density
from .moments import SymmetricGammaParams, erlang_mean_closed_form, mean_conditional
from .simulate import ensemble

EXIT_OK = 0
EXIT_PARAM = 1
EXIT_NUMERIC = 2
EXIT_VALIDATION = 3

logger = logging.getLogger(__name__)


class ParameterError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARAM, f"{self.prog}: error: {message}\n")


def _positive(name):
    def convert(text):
        try:
            value = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"--{name} expects a number, got {text!r}") from None
        if not (value > 0 and math.isfinite(value)):
            raise argparse.ArgumentTypeError(f"--{name} must be positive, got {text!r}")
        return value

    convert.__name__ = name
    return convert


def _count(name, minimum):
    def convert(text):
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"--{name} expects an integer, got {text!r}") from None
        if value < minimum:
            raise argparse.ArgumentTypeError(f"--{name} must be at least {minimum}, got {value}")
        return value

    convert.__name__ = name
    return convert


def _non_negative(name):
    def convert(text):
        try:
            value = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"--{name} expects a number, got {text!r}") from None
        if not (value >= 0 and math.isfinite(value)):
            raise argparse.ArgumentTypeError(f"--{name} must be non-negative, got {text!r}")
        return value

    convert.__name__ = name
    return convert


def _add_motion_flags(p):
    p.add_argument("--c", type=_positive("c"), default=1.0, help="forward speed")
    p.add_argument("--v", type=_positive("v"), default=1.0, help="backward speed")
    p.add_argument("--lambda", dest="lam", type=_positive("lambda"), default=1.0, help="forward sojourn rate")
    p.add_argument("--alpha", type=_positive("alpha"), default=1.0, help="forward sojourn shape")
    p.add_argument("--mu", type=_positive("mu"), default=1.0, help="backward sojourn rate")
    p.add_argument("--beta", type=_positive("beta"), default=1.0, help="backward sojourn shape")
    p.add_argument("--v0", choices=["forward", "backward"], default="forward", help="initial direction")
    p.add_argument("--rel-tol", type=_positive("rel-tol"), default=1e-12, help="series truncation tolerance")
    p.add_argument("--out", default=None, help="output file (default: stdout)")


def build_parser():
    parser = _Parser(prog="gammatelegraph", description="Telegraph motion with gamma-distributed alternating sojourns")
    parser.add_argument("--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("density", help="f, b and p over a grid of positions at time t")
    _add_motion_flags(p)
    p.add_argument("--t", type=_positive("t"), required=True)
    p.add_argument("--grid-points", type=_count("grid-points", 1), default=201)

    p = sub.add_parser("mean", help="E[X_t | V_0] over a time grid (identical sojourn laws only)")
    _add_motion_flags(p)
    p.add_argument("--t-start", type=_non_negative("t-start"), default=0.0)
    p.add_argument("--t-end", type=_non_negative("t-end"), default=5.0)
    p.add_argument("--t-step", type=_positive("t-step"), default=0.01)

    p = sub.add_parser("simulate", help="Monte Carlo histogram next to the analytic density")
    _add_motion_flags(p)
    p.add_argument("--t", type=_positive("t"), required=True)
    p.add_argument("--samples", type=_count("samples", 1), default=100_000)
    p.add_argument("--bins", type=_count("bins", 1), default=100)
    p.add_argument("--seed", type=_count("seed", 0), default=0)
    p.add_argument("--workers", type=_count("workers", 1), default=1)

    p = sub.add_parser("validate", help="full analytic versus Monte Carlo report")
    _add_motion_flags(p)
    p.add_argument("--t", type=_positive("t"), required=True)
    p.add_argument("--samples", type=_count("samples", 0), default=100_000)
    p.add_argument("--bins", type=_count("bins", 1), default=100)
    p.add_argument("--seed", type=_count("seed", 0), default=0)
    p.add_argument("--workers", type=_count("workers", 1), default=1)
    return parser


def _params(args):
    return MotionParams(args.c, args.v, args.lam, args.alpha, args.mu, args.beta)


def _fmt(x):
    return repr(float(x))


def cmd_density(args, out):
    params = _params(args)
    ctl = SeriesControl(rel_tol=args.rel_tol)
    t = args.t
    lo, hi = -params.v * t, params.c * t
    delta = 1e-6 * (params.c + params.v) * t
    if args.grid_points == 1:
        xs = np.array([(lo + hi) / 2])
    else:
        xs = np.linspace(lo + delta, hi - delta, args.grid_points)
    out.write("x,f,b,p\n")
    max_f = max_b = 0
    for x in xs:
        law = density(params, float(x), t, args.v0, ctl)
        max_f = max(max_f, law.truncation_index_f)
        max_b = max(max_b, law.truncation_index_b)
        out.write(f"{_fmt(x)},{_fmt(law.forward_density)},{_fmt(law.backward_density)},{_fmt(law.total_density)}\n")
    out.write(f"# atom_probability={_fmt(atom_probability(params, t, args.v0))} "
              f"truncation_index_f={max_f} truncation_index_b={max_b}\n")
    return EXIT_OK


def cmd_mean(args, out):
    params = _params(args)
    if not params.symmetric_sojourns:
        raise ParameterError(
            "mean: the series holds only when forward and backward sojourns are identically "
            "gamma distributed; pass --lambda equal to --mu and --alpha equal to --beta"
        )
    if args.t_end < args.t_start:
        raise ParameterError("mean: --t-end must not be smaller than --t-start")
    sym = SymmetricGammaParams.from_motion(params)
    ctl = SeriesControl(rel_tol=args.rel_tol)
    steps = int(math.floor((args.t_end - args.t_start) / args.t_step + 1e-9))
    times = [args.t_start + i * args.t_step for i in range(steps + 1)]
    erlang = float(params.alpha) if params.alpha in (1.0, 2.0, 3.0, 4.0) else None
    out.write("t,mean,closed_form\n" if erlang else "t,mean\n")
    for t in times:
        m = mean_conditional(sym, t, args.v0, ctl)
        if erlang:
            closed = erlang_mean_closed_form(int(erlang), sym, t, args.v0)
            out.write(f"{_fmt(t)},{_fmt(m)},{_fmt(closed)}\n")
        else:
            out.write(f"{_fmt(t)},{_fmt(m)}\n")
    return EXIT_OK


def cmd_simulate(args, out):
    params = _params(args)
    ctl = SeriesControl(rel_tol=args.rel_tol)
    emp = ensemble(params, args.t, args.v0, args.samples, args.bins, args.seed, workers=args.workers)
    widths = np.diff(emp.bin_edges)
    analytic = bin_masses(params, args.t, args.v0, emp.bin_edges, ctl=ctl) / widths
    out.write("bin_center,empirical_density,analytic_density\n")
    for center, e, a in zip(emp.bin_centers, emp.densities, analytic):
        out.write(f"{_fmt(center)},{_fmt(e)},{_fmt(a)}\n")
    atom = atom_probability(params, args.t, args.v0)
    out.write(f"# samples={emp.sample_count} atom_count={emp.atom_count} interior_count={int(emp.bin_counts.sum())} "
              f"atom_frequency={_fmt(emp.atom_frequency)} atom_probability={_fmt(atom)}\n")
    return EXIT_OK


def cmd_validate(args, out):
    params = _params(args)
    ctl = SeriesControl(rel_tol=args.rel_tol)
    report = validate(params, args.t, args.v0, n_samples=args.samples, seed=args.seed,
                      n_bins=args.bins, ctl=ctl, workers=args.workers)
    out.write(report.to_key_value())
    return EXIT_OK if report.passed else EXIT_VALIDATION


COMMANDS = {"density": cmd_density, "mean": cmd_mean, "simulate": cmd_simulate, "validate": cmd_validate}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        with contextlib.ExitStack() as stack:
            if args.out:
                out = stack.enter_context(open(args.out, "w", encoding="utf-8", newline=""))
            else:
                out = sys.stdout
            return COMMANDS[args.command](args, out)
    except (ParameterError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except (ConvergenceError, QuadratureError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
