"""
Command-line entry point: ``entprod <command> [options]``.

Exit codes: 0 success, 2 validation failure, 3 numeric or domain failure.
Data goes to stdout (or ``--out``); diagnostics go to stderr.
"""
import argparse
import logging
import sys
from typing import Sequence

import numpy as np

from entprod.config import Config, LogBase
from entprod.decoherence import EvolutionMode, limit_measures, measure_trajectory
from entprod.errors import NumericError, ValidationError, ZeroTraceError
from entprod.gibbs_register import Coupling, sweep, sweep_columns
from entprod.hilbert import validate_density
from entprod.measure import entanglement_production
from entprod.spinor import (
    SpinHalfState,
    brute_force_particle_measure,
    particle_measure,
    particle_table,
    spin_spatial_table,
)
from entprod.states import NamedState, StateKind, build, closed_form_measure

from .formatting import error_dict, format_csv, format_json, format_value
from .parsing import parse_fraction, parse_numbers, parse_partition, parse_range, parse_reals
from .state_files import StateFile, load_decoherence_spec, load_state_file

# Set up logging
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERIC = 3


def _emit(text: str, args: argparse.Namespace) -> None:
    if args.out:
        with open(args.out, "w") as f:
            f.write(text if text.endswith("\n") else text + "\n")
        logger.info(f"wrote {args.out}")
    else:
        print(text, end="" if text.endswith("\n") else "\n")


# --- measure ---

def cmd_measure(args: argparse.Namespace) -> int:
    op, file_partition = load_state_file(args.state)
    partition = parse_partition(args.partition) if args.partition else file_partition
    if partition is None:
        raise ValidationError("no partition given (use --partition or a state file partition)", invariant="partition")
    partition.validate_for(op.layout)

    trace = op.trace()
    if abs(trace) <= Config.TRACE_ZERO_TOL:
        raise ZeroTraceError(trace)

    flags = validate_density(op)
    if not args.operator:
        for invariant in ("hermitian", "trace", "psd"):
            if not flags[invariant]:
                raise ValidationError(f"not a density operator: {invariant} check failed", invariant=invariant)

    report = entanglement_production(op, partition, args.log_base)
    _emit(format_json({**report.to_dict(), "validation": flags}), args)
    return EXIT_OK


# --- states ---

def _named_state(args: argparse.Namespace) -> NamedState:
    kind = StateKind(args.kind)
    coeffs = tuple(parse_numbers(args.coeffs)) if args.coeffs else ()
    weights = tuple(parse_reals(args.weights)) if args.weights else ()

    if kind is StateKind.MULTICAT and not coeffs:
        raise ValidationError("multicat needs --coeffs c1,c2", invariant="normalization")
    if kind is StateKind.MULTIMODE:
        if not coeffs:
            if args.m is None:
                raise ValidationError("multimode needs --m or --coeffs", invariant="normalization")
            return NamedState.uniform_multimode(args.n, args.m)
        if args.m is not None and args.m != len(coeffs):
            raise ValidationError(f"--m {args.m} disagrees with {len(coeffs)} coefficients", invariant="normalization")
    if kind is StateKind.SEPARABLE and not weights:
        raise ValidationError("separable needs --weights p1,p2,...", invariant="normalization")
    return NamedState(kind, args.n, sign=args.sign, coeffs=coeffs, weights=weights)


def cmd_states(args: argparse.Namespace) -> int:
    spec = _named_state(args)
    rho, partition = build(spec)
    summary = format_json({
        "kind": spec.kind.value,
        "n_parties": spec.n_parties,
        "dims": list(rho.layout.dims),
        "partition": [list(block) for block in partition.blocks],
        "epsilon": closed_form_measure(spec, args.log_base),
        "log_base": args.log_base.value,
    })
    state_json = StateFile.from_operator(rho.op, partition).to_json()
    if args.out:
        _emit(state_json, args)
        print(summary)
    else:
        print(state_json)
        print(summary, file=sys.stderr)
    return EXIT_OK


# --- gibbs2q ---

def cmd_gibbs2q(args: argparse.Namespace) -> int:
    coupling = Coupling(args.coupling)
    rows = sweep(parse_range(args.t_range), parse_range(args.h_range), coupling, args.asymptotics, args.log_base)

    def cells(row):
        extra = [None if v is None else args.log_base.convert(v) for v in row.asymptotics]
        return [row.temperature, row.field, row.epsilon, *extra]

    _emit(format_csv(sweep_columns(coupling, args.asymptotics), (cells(r) for r in rows)), args)
    return EXIT_OK


# --- decohere ---

def cmd_decohere(args: argparse.Namespace) -> int:
    if args.steps < 1 or args.t_max < 0:
        raise ValidationError("need --steps >= 1 and --t-max >= 0", invariant="range")
    spec, damping = load_decoherence_spec(args.spec)
    mode = EvolutionMode(args.mode)
    times = np.linspace(0.0, args.t_max, args.steps + 1)

    trajectory = measure_trajectory(spec, times, mode, damping, args.log_base)
    limits = limit_measures(spec, args.log_base)
    trailer = f"eps0={format_value(limits.eps0)},eps_inf={format_value(limits.eps_inf)}"
    _emit(format_csv(["t", "epsilon"], ([p.t, p.epsilon] for p in trajectory), trailer=trailer), args)
    return EXIT_OK


# --- spinor ---

def cmd_spinor(args: argparse.Namespace) -> int:
    if args.spinor_command == "spin-spatial":
        rows = spin_spatial_table(args.n, args.asymptotic, args.log_base)
        columns = ["N", "S", "epsilon_spin_spatial"] + (["epsilon_asymptotic"] if args.asymptotic else [])
        cells = ([r.n, r.s, r.epsilon] + ([r.asymptotic] if args.asymptotic else []) for r in rows)
        _emit(format_csv(columns, cells), args)
        return EXIT_OK

    if args.oracle and args.n > Config.CLI_ORACLE_MAX_PARTICLES:
        raise ValidationError(
            f"--oracle supports N <= {Config.CLI_ORACLE_MAX_PARTICLES}, got {args.n}", invariant="oracle"
        )
    columns = ["N", "S", "Sz", "Iz", "epsilon_particle"] + (["oracle_epsilon"] if args.oracle else [])

    if args.table:
        table = particle_table(args.n, args.oracle, args.log_base)
        cells = ([r.n, r.s, r.s_z, r.i_z, r.epsilon] + ([r.oracle] if args.oracle else []) for r in table)
        _emit(format_csv(columns, cells), args)
        return EXIT_OK

    if args.s is None:
        raise ValidationError("particle needs --s (or --table)", invariant="quantum_numbers")
    state = SpinHalfState(args.n, parse_fraction(args.s), parse_fraction(args.sz), parse_fraction(args.iz))
    row = [state.n_particles, state.total_spin, state.s_z, state.i_z, particle_measure(state, args.log_base)]
    if args.oracle:
        row.append(brute_force_particle_measure(state, args.log_base))
    _emit(format_csv(columns, [row]), args)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="entprod", description="Entanglement production measure toolkit")
    parser.add_argument("--log-base", type=LogBase, choices=list(LogBase), default=Config.LOG_BASE,
                        help="logarithm base for every reported log quantity (default: e)")
    parser.add_argument("--out", default=None, help="write data to this file instead of stdout")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for info, -vv for debug logs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("measure", help="epsilon of an operator stored in a state file")
    p.add_argument("state", help="state file (JSON)")
    p.add_argument("--partition", default=None, help='blocks such as "0|1,2"')
    p.add_argument("--operator", action="store_true", help="accept general (non-density) operators")
    p.set_defaults(handler=cmd_measure)

    p = sub.add_parser("states", help="write a named state file")
    p.add_argument("--kind", required=True, choices=[k.value for k in StateKind])
    p.add_argument("--n", type=int, default=2, help="number of parties")
    p.add_argument("--m", type=int, default=None, help="modes per party (multimode)")
    p.add_argument("--coeffs", default=None, help='comma-separated coefficients, e.g. "1/sqrt(2),1/sqrt(2)"')
    p.add_argument("--weights", default=None, help="comma-separated separable weights")
    p.add_argument("--sign", type=int, choices=[1, -1], default=1)
    p.set_defaults(handler=cmd_states)

    p = sub.add_parser("gibbs2q", help="two-qubit register sweep as CSV")
    p.add_argument("--coupling", required=True, choices=[c.value for c in Coupling])
    p.add_argument("--t-range", required=True, help="start:stop:steps, steps counting intervals")
    p.add_argument("--h-range", required=True, help="start:stop:steps, steps counting intervals")
    p.add_argument("--asymptotics", action="store_true", help="append one column per asymptotic regime")
    p.set_defaults(handler=cmd_gibbs2q)

    p = sub.add_parser("decohere", help="epsilon trajectory of a bipartite spec as CSV")
    p.add_argument("spec", help="decoherence spec file (JSON)")
    p.add_argument("--t-max", type=float, required=True)
    p.add_argument("--steps", type=int, required=True, help="number of intervals in [0, t-max]")
    p.add_argument("--mode", choices=[m.value for m in EvolutionMode], default=EvolutionMode.EXACT.value)
    p.set_defaults(handler=cmd_decohere)

    p = sub.add_parser("spinor", help="spinor tables as CSV")
    spinor_sub = p.add_subparsers(dest="spinor_command", required=True)
    s = spinor_sub.add_parser("spin-spatial")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--asymptotic", action="store_true", help="append the large-N form")
    s.set_defaults(handler=cmd_spinor)
    s = spinor_sub.add_parser("particle")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--s", default=None)
    s.add_argument("--sz", default="0")
    s.add_argument("--iz", default="0")
    s.add_argument("--table", action="store_true", help="every valid (S, Sz, Iz)")
    s.add_argument("--oracle", action="store_true", help="append the brute-force oracle value")
    s.set_defaults(handler=cmd_spinor)
    return parser


def _configure_logging(verbosity: int) -> None:
    level = {0: Config.LOG_LEVEL, 1: "INFO"}.get(verbosity, "DEBUG")
    logging.basicConfig(level=level, format=Config.LOG_FORMAT, stream=sys.stderr)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)

    try:
        return args.handler(args)
    except ValidationError as e:
        logger.error(f"validation failed ({e.invariant}): {e}")
        print(format_json(error_dict(EXIT_VALIDATION, str(e))), file=sys.stderr)
        return EXIT_VALIDATION
    except NumericError as e:
        logger.error(f"numeric failure: {e}")
        print(format_json(error_dict(EXIT_NUMERIC, str(e))), file=sys.stderr)
        return EXIT_NUMERIC
    except Exception as e:
        logger.error(f"{args.command} failed: {e}", exc_info=True)
        print(format_json(error_dict(EXIT_NUMERIC, str(e))), file=sys.stderr)
        return EXIT_NUMERIC
