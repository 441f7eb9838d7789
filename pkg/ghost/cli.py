#!/usr/bin/env python3
"""
Command line frontend of the ghost scaling suite.

    python -m ghost.cli sweep --phase quadratic --r-lo 1e-8 --r-hi 1e-3 -o results/quadratic.csv
    python -m ghost.cli fit results/quadratic.csv
    python -m ghost.cli scan --alphas 0.5,1,2
    python -m ghost.cli pendulum --a 2 --omega 1.01 --mode bottleneck
    python -m ghost.cli table
    python -m ghost.cli curves --figure 3

Data goes to stdout or --output, diagnostics to stderr. Exit codes: 0 success,
2 invalid arguments or input files, 3 computation errors.
"""

import argparse
import contextlib
import logging
import math
import sys
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from config.ghost_config import DEFAULT_POINTS, DEFAULT_R_HI, DEFAULT_R_LO, LOG_FORMAT
from ghost.errors import DomainViolation, GhostError
from ghost.fields import (
    Identity,
    PendulumWave,
    PowerPhase,
    VectorField1D,
    format_number,
    parse_param,
    parse_phase,
)
from ghost.passage import DEFAULT_IV, Engine, Interval
from ghost.pendulum import (
    BOTTLENECK_IV,
    PendulumParams,
    bottleneck_limit,
    bottleneck_time,
    rotation_period,
    sweep_bottleneck,
)
from ghost.results import (
    dumps_json,
    fit_record,
    passage_record,
    read_samples_csv,
    save_results_to_csv,
    write_rows_csv,
    write_samples_csv,
)
from ghost.scaling import (
    ScalingModel,
    SweepSpec,
    fit_constant,
    fit_log,
    fit_power,
    fit_samples,
    regime_scan,
    sweep,
)

logger = logging.getLogger("ghost.cli")

COMMANDS = ("sweep", "fit", "scan", "pendulum", "table", "curves")
TRUE_WORDS = {"true", "yes", "on"}
FALSE_WORDS = {"false", "no", "off"}

# (label, phase exponent) of the three classic examples, one-sided on [0, 1]
TABLE_EXAMPLES = [("sqrt(x)", 0.5), ("x", 1.0), ("x^2", 2.0)]
FIGURE1_LEVELS = (-0.5, 0.0, 0.5)


# --- Argument types ---

def float_list(text):
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"comma-separated numbers expected, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("at least one number expected")
    return values


def read_config_file(path):
    """key = value lines turned into long-option tokens; flags given on the command line come later and win."""
    tokens = []
    with open(path) as handle:
        for number, raw in enumerate(handle, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep or not key.strip():
                raise DomainViolation(f"{path}:{number}: expected 'key = value', got {raw.strip()!r}")
            key = key.strip().lstrip("-").replace("_", "-")
            value = value.strip()
            if key == "config":
                raise DomainViolation(f"{path}:{number}: config files cannot include other config files")
            if value.lower() in TRUE_WORDS:
                tokens.append(f"--{key}")
            elif value.lower() not in FALSE_WORDS:
                tokens.append(f"--{key}={value}")
    return tokens


def apply_config(argv):
    pre = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return argv
    tokens = read_config_file(known.config)
    logger.debug("config %s -> %s", known.config, " ".join(tokens))
    for index, token in enumerate(argv):
        if token in COMMANDS:
            return argv[:index + 1] + tokens + argv[index + 1:]
    return argv


# --- Parser ---

def _add_sweep_options(parser, interval_default, interval_help):
    parser.add_argument("--r-lo", type=float, default=DEFAULT_R_LO, help="Smallest r of the sweep")
    parser.add_argument("--r-hi", type=float, default=DEFAULT_R_HI, help="Largest r of the sweep")
    parser.add_argument("--points", type=int, default=DEFAULT_POINTS, help="Log-spaced sweep points (>= 3)")
    parser.add_argument("--engine", choices=[Engine.QUADRATURE.value, Engine.ODE.value],
                        default=Engine.QUADRATURE.value, help="Passage time engine")
    parser.add_argument("--interval", type=Interval.parse, default=interval_default, help=interval_help)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="File of 'key = value' lines used as option defaults")
    common.add_argument("-v", "--verbose", action="store_true", help="Debug logging on stderr")
    common.add_argument("--threads", type=int, default=None,
                        help="Sweep workers (0 = all cores; default from GHOST_THREADS, else 1)")
    common.add_argument("-o", "--output", help="Write data to this file instead of stdout")

    parser = argparse.ArgumentParser(prog="ghost", description="Passage-time scaling near saddle-node bifurcations")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, handler, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text, allow_abbrev=False)
        p.set_defaults(handler=handler)
        return p

    p = command("sweep", cmd_sweep, "Passage times over a log-spaced r grid, as CSV")
    p.add_argument("--phase", type=parse_phase, required=True,
                   help="quadratic | power:<alpha> | monomial:<m> | pendulum:<a>")
    p.add_argument("--param", type=parse_param, default=Identity(), help="identity | evenpower:<k> | invsqexp")
    _add_sweep_options(p, DEFAULT_IV, "Transit interval 'lo,hi' (use --interval=-1,1 for negative lo)")

    p = command("fit", cmd_fit, "Fit and select the scaling law of a sweep CSV, as JSON")
    p.add_argument("csv", help="Sweep CSV file, '-' for stdin")
    p.add_argument("--candidates", action="store_true", help="Also report all three candidate fits")

    p = command("scan", cmd_scan, "Regime map alpha -> scaling class for x' = r + |x|^alpha, as JSON")
    p.add_argument("--alphas", type=float_list, required=True, help="Increasing exponents, e.g. 0.5,1,2")
    _add_sweep_options(p, DEFAULT_IV, "Transit interval 'lo,hi'")

    p = command("pendulum", cmd_pendulum, "Overdamped pendulum with angle-dependent length")
    p.add_argument("--a", type=float, required=True, help="Wave exponent a > 0")
    p.add_argument("--omega", type=float, help="Drive omega (bottleneck and rotation modes)")
    p.add_argument("--mode", choices=["bottleneck", "rotation", "limit", "sweep"], default="bottleneck")
    _add_sweep_options(p, BOTTLENECK_IV,
                       "Bottleneck interval inside [0, pi], default [pi/4, 3pi/4]; "
                       "it changes the prefactor, never the exponent")

    p = command("table", cmd_table, "Recompute the three classic examples and print their scaling classes")
    p.add_argument("--points", type=int, default=DEFAULT_POINTS, help="Sweep points per example")

    p = command("curves", cmd_curves, "Field values for the figure families, as CSV")
    p.add_argument("--figure", type=int, choices=[1, 3], required=True,
                   help="1: r + |x|^a for r = -1/2, 0, 1/2; 3: the pendulum wave F_a")
    p.add_argument("--exponents", type=float_list, default=[0.5, 1.0, 2.0], help="Exponents a")
    p.add_argument("--samples", type=int, default=201, help="Grid points per curve")
    return parser


# --- Output ---

@contextlib.contextmanager
def open_output(args):
    if args.output:
        with open(args.output, "w", newline="") as handle:
            yield handle
        logger.info("results saved to %s", args.output)
    else:
        yield sys.stdout


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


@dataclass(frozen=True)
class RunConfig:
    """Settings of one sweeping command, validated before any computation starts."""

    field: str
    spec: SweepSpec
    output: Optional[str] = None
    fmt: OutputFormat = OutputFormat.CSV

    @classmethod
    def from_args(cls, args, field, fmt=OutputFormat.CSV):
        spec = SweepSpec(args.r_lo, args.r_hi, args.points, engine=args.engine, interval=args.interval)
        run = cls(field, spec, args.output, OutputFormat(fmt))
        logger.debug("run %s", run)
        return run


def _emit_samples(run, samples, phase, param):
    if run.output:
        save_results_to_csv(samples, run.output, run.spec.engine, phase, param)
    else:
        write_samples_csv(sys.stdout, samples, run.spec.engine, phase, param)


# --- Commands ---

def cmd_sweep(args):
    field = VectorField1D(args.phase, args.param)
    run = RunConfig.from_args(args, f"{field.phase.spec}/{field.param.spec}")
    samples = sweep(field, run.spec, args.threads)
    _emit_samples(run, samples, field.phase.spec, field.param.spec)
    return 0


def cmd_fit(args):
    samples, labels = read_samples_csv(sys.stdin if args.csv == "-" else args.csv)
    logger.info("fitting %d samples (%s)", len(samples),
                ", ".join(f"{key}={value}" for key, value in labels.items()))
    payload = fit_record(fit_samples(samples))
    if args.candidates:
        payload = {
            "selected": payload,
            "candidates": [fit_record(fit(samples)) for fit in (fit_constant, fit_log, fit_power)],
        }
    with open_output(args) as out:
        out.write(dumps_json(payload))
    return 0


def cmd_scan(args):
    run = RunConfig.from_args(args, "power:*/identity", OutputFormat.JSON)
    regime = regime_scan(args.alphas, run.spec, args.threads)
    with open_output(args) as out:
        out.write(dumps_json(regime.to_list()))
    return 0


def cmd_pendulum(args):
    if args.mode == "sweep":
        phase = f"pendulum:{format_number(args.a)}"
        run = RunConfig.from_args(args, phase)
        samples = sweep_bottleneck(args.a, run.spec, args.interval, args.threads)
        _emit_samples(run, samples, phase, "omega-1")
        return 0

    if args.mode == "limit":
        payload = {"a": args.a, "limit": bottleneck_limit(args.a, args.interval)}
    else:
        if args.omega is None:
            raise DomainViolation(f"--omega is required in {args.mode} mode")
        p = PendulumParams(args.a, args.omega)
        if args.mode == "bottleneck":
            payload = passage_record(bottleneck_time(p, args.interval, args.engine), a=p.a, omega=p.omega)
        else:
            payload = {"a": p.a, "omega": p.omega, "period": rotation_period(p)}
    with open_output(args) as out:
        out.write(dumps_json(payload))
    return 0


def class_label(fit):
    if fit.model is ScalingModel.POWER and abs(fit.exponent - 0.5) <= 0.02:
        return "square-root"
    return fit.model.value


def _law_text(fit):
    if fit.model is ScalingModel.CONSTANT:
        return f"t = {fit.prefactor:.4f}"
    if fit.model is ScalingModel.LOGARITHMIC:
        return f"t = {fit.prefactor:.4f} ln(1/r) {fit.intercept:+.4f}"
    return f"t ~ {fit.prefactor:.4f} r^-{fit.exponent:.4f} {fit.intercept:+.4f}"


def cmd_table(args):
    spec = SweepSpec(points=args.points, interval=Interval(0.0, 1.0))
    rows = []
    for label, alpha in TABLE_EXAMPLES:
        fit = fit_samples(sweep(VectorField1D(PowerPhase(alpha), Identity()), spec, args.threads))
        rows.append((label, class_label(fit), _law_text(fit)))

    with open_output(args) as out:
        out.write("=" * 60 + "\n")
        out.write("SCALING LAWS FOR THREE EXAMPLES\n")
        out.write("=" * 60 + "\n")
        out.write(f"x' = r + f(x) on [0, 1], r in [{spec.r_lo:g}, {spec.r_hi:g}], {spec.points} points\n\n")
        out.write(f"{'f(x)':>8} | {'scaling':<12} | fit\n")
        out.write("-" * 60 + "\n")
        for label, scaling, law in rows:
            out.write(f"{label:>8} | {scaling:<12} | {law}\n")
    return 0


def cmd_curves(args):
    if args.samples < 2:
        raise DomainViolation(f"--samples must be at least 2, got {args.samples}")
    rows = []
    if args.figure == 1:
        xs = np.linspace(-1.0, 1.0, args.samples)
        for a in args.exponents:
            field = VectorField1D(PowerPhase(a), Identity())
            for level in FIGURE1_LEVELS:
                rows.extend({"x": float(x), "a": a, "r": level, "f": float(field.rate(level, x))} for x in xs)
        fieldnames = ["x", "a", "r", "f"]
    else:
        thetas = np.linspace(-math.pi, math.pi, args.samples)
        for a in args.exponents:
            values = PendulumWave(a)(thetas)
            rows.extend({"theta": float(theta), "a": a, "F": float(value),
                         "one_minus_F": float(1.0 - value), "one_plus_F": float(1.0 + value)}
                        for theta, value in zip(thetas, values))
        fieldnames = ["theta", "a", "F", "one_minus_F", "one_plus_F"]
    with open_output(args) as out:
        write_rows_csv(out, fieldnames, rows)
    return 0


# --- Entry point ---

def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    logging.basicConfig(level=logging.INFO, format=LOG_FORMAT, stream=sys.stderr, force=True)

    try:
        argv = apply_config(argv)
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code
    except (OSError, GhostError) as exc:
        logger.error("%s", exc)
        return 2

    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)

    try:
        return args.handler(args)
    except GhostError as exc:
        logger.error("%s", exc)
        return 2 if isinstance(exc, ValueError) else 3
    except OSError as exc:
        logger.error("%s", exc)
        return 2


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        print("\n\nInterrupted by user.", file=sys.stderr)
        sys.exit(1)
