"""Command-line entry point: ``oia-lab <experiment-id> [options]``.

Exit status is 0 on success, 1 for an invalid specification and 2 for a
numerical failure (the failing operation is named on stderr).
"""

import argparse
import math
import os
import sys

import numpy as np

from . import __version__
from .channel import Dimensions
from .errors import InvalidSpecError, NumericalError
from .experiments import EXPERIMENTS, default_spec, run, plot_script

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NUMERICAL = 2


class _Parser(argparse.ArgumentParser):
    """Argument errors are specification errors, so they exit with status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def build_parser():
    p = _Parser(prog="oia-lab", description="Opportunistic interference alignment experiments")
    p.add_argument("experiment", choices=EXPERIMENTS)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    dims = p.add_argument_group("antenna counts")
    for name in ("n1", "m1", "n2", "m2"):
        dims.add_argument(f"--{name}", type=int)
    ratios = p.add_argument_group("antenna ratios")
    for name in ("alpha11", "alpha12", "alpha21", "alpha22"):
        ratios.add_argument(f"--{name}", type=float)
    ratios.add_argument("--n-ref", type=int, help="reference size N1 used with the ratios")
    p.add_argument("--sizes", type=int, nargs="+", help="sizes swept by asymptote-convergence")
    p.add_argument("--snr-min", type=float, help="dB, default 0")
    p.add_argument("--snr-max", type=float, help="dB, default 40")
    p.add_argument("--snr-step", type=float, help="dB, default 2")
    p.add_argument("--snr", type=float, nargs="+", help="explicit SNR grid in dB (overrides min/max/step)")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=None, help="defaults to $OIA_SEED, then 0")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--emit-plot-script", action="store_true")
    return p


def _or(value, default):
    return default if value is None else value


def snr_grid(lo, hi, step):
    if step <= 0:
        raise InvalidSpecError(f"--snr-step must be > 0, got {step}")
    if hi < lo:
        raise InvalidSpecError(f"--snr-max ({hi}) is below --snr-min ({lo})")
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return tuple(float(x) for x in np.round(lo + step * np.arange(n), 12))


def resolve_seed(flag, environ=None):
    environ = os.environ if environ is None else environ
    if flag is not None:
        return flag
    raw = environ.get("OIA_SEED")
    if raw is None or raw.strip() == "":
        return 0
    try:
        return int(raw)
    except ValueError:
        raise InvalidSpecError(f"OIA_SEED must be an integer, got {raw!r}") from None


def spec_from_args(args, environ=None):
    """Translate parsed arguments into an ``ExperimentSpec``."""
    kw = {"seed": resolve_seed(args.seed, environ)}
    if args.trials is not None:
        kw["trials"] = args.trials
    if args.snr:
        kw["snr_db"] = tuple(args.snr)
    elif any(v is not None for v in (args.snr_min, args.snr_max, args.snr_step)):
        kw["snr_db"] = snr_grid(_or(args.snr_min, 0.0), _or(args.snr_max, 40.0),
                                _or(args.snr_step, 2.0))

    counts = [args.n1, args.m1, args.n2, args.m2]
    ratios = [args.alpha11, args.alpha12, args.alpha21, args.alpha22]
    have_counts = any(v is not None for v in counts)
    have_ratios = any(v is not None for v in ratios) or args.n_ref is not None
    if have_counts and have_ratios:
        raise InvalidSpecError("give either antenna counts or ratios, not both")

    exp = args.experiment
    if exp == "to-fraction":
        if have_counts:
            if args.n1 is None or args.m1 is None:
                raise InvalidSpecError("to-fraction needs --n1 and --m1")
            kw["configs"] = (Dimensions(args.n1, args.m1, 1, 1),)
        else:
            if args.alpha11 is not None:
                kw["alpha11_grid"] = (args.alpha11,)
            if args.n_ref is not None:
                kw["n_ref"] = args.n_ref
    elif exp == "asymptote-convergence":
        if have_counts:
            raise InvalidSpecError("asymptote-convergence takes ratios and --sizes, not antenna counts")
        for name, v in zip(("alpha11", "alpha12", "alpha21", "alpha22"), ratios):
            if v is not None:
                if not v > 0:
                    raise InvalidSpecError(f"--{name} must be > 0")
                kw[name] = v
        if args.sizes:
            kw["sizes"] = tuple(args.sizes)
        elif args.n_ref is not None:
            kw["sizes"] = (args.n_ref,)
    else:
        if have_counts:
            if any(v is None for v in counts):
                raise InvalidSpecError("antenna counts need all of --n1 --m1 --n2 --m2")
            kw["configs"] = (Dimensions(*counts),)
        elif have_ratios:
            if args.n_ref is None or any(v is None for v in ratios):
                raise InvalidSpecError("ratios need --n-ref and all four --alphaXY")
            n1 = args.n_ref
            m1 = round(args.alpha11 * n1)
            m2 = round(args.alpha12 * n1)
            n2 = round(m2 / args.alpha22)
            if not math.isclose(m1 / n2, args.alpha21, rel_tol=0.05):
                raise InvalidSpecError("ratios are inconsistent: alpha21 != alpha11*alpha22/alpha12")
            kw["configs"] = (Dimensions(n1, max(m1, 1), max(n2, 1), max(m2, 1)),)
    return default_spec(exp, **kw)


def main(argv=None, environ=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        spec = spec_from_args(args, environ)
        if args.workers < 1:
            raise InvalidSpecError("--workers must be >= 1")
        table = run(spec, workers=args.workers)
    except InvalidSpecError as exc:
        print(f"oia-lab: invalid specification: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"oia-lab: numerical failure in {exc.operation}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    try:
        os.makedirs(args.out, exist_ok=True)
        csv_name = f"{spec.experiment}.csv"
        table.write_csv(os.path.join(args.out, csv_name))
        if args.emit_plot_script:
            with open(os.path.join(args.out, f"{spec.experiment}.gp"), "w") as fh:
                fh.write(plot_script(table, csv_name))
    except OSError as exc:
        print(f"oia-lab: {exc}", file=sys.stderr)
        return EXIT_INVALID
    bad = {k: v for k, v in table.violations.items() if v}
    print(f"wrote {os.path.join(args.out, csv_name)} ({len(table.rows)} rows)")
    if bad:
        print(f"oia-lab: structural violations: {bad}", file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
