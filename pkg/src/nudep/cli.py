"""Command-line front end.

Subcommands: ``coeff`` (dependence coefficients from a CSV), ``ford``
(forward variable selection), ``test`` (independence tests), ``permdist``
(permutation discrepancies), and ``simulate`` (Monte Carlo studies).

Output is a single JSON object on stdout with a documented, stable key
order, so identical invocations are byte-identical.  Exit codes: 0 on
success, 2 for usage errors, 3 for data errors, 4 for numerical or
degenerate-input errors.  Seeds default to a fixed constant (override with
--seed, NUDEP_SEED, or --entropy-seed for a fresh one).
"""

from __future__ import annotations

import argparse
import json
import os
import secrets
import sys

from . import __version__
from .coefficient import nu_1dim, nu_general, xi_coefficient
from .dataio import load_dataset
from .errors import (
    DataError,
    DegenerateResponseError,
    InsufficientSampleError,
    InvalidInputError,
    NumericalError,
)
from .inference import asymptotic_test, permutation_test
from .permdist import CLASSICAL_METRICS, classical_metric, d_nu, d_nu_symmetric
from .sample import Sample
from .selection import ford_select
from .simulation import (
    FIG1_MODEL_NAMES,
    POWER_MODEL_NAMES,
    SELECTION_MODEL_NAMES,
    figure1_study,
    null_moment_study,
    power_study,
    selection_study,
)
from .util import DEFAULT_SEED, standardize_columns

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4


class UsageError(Exception):
    pass


def _env_int(name: str, fallback: int) -> int:
    raw = os.environ.get(name)
    if raw is None:
        return fallback
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"environment variable {name} must be an integer, got {raw!r}")


def _resolve_seed(args) -> int:
    if getattr(args, "entropy_seed", False):
        return secrets.randbits(32)
    if args.seed is not None:
        return args.seed
    return _env_int("NUDEP_SEED", DEFAULT_SEED)


def _resolve_threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    return max(1, _env_int("NUDEP_THREADS", 1))


def _emit(payload: dict) -> int:
    print(json.dumps(payload))
    return EXIT_OK


def _split_csv_list(raw: str) -> list[str]:
    items = [item.strip() for item in raw.split(",") if item.strip()]
    if not items:
        raise UsageError("expected a non-empty comma-separated list")
    return items


def _parse_permutation_arg(raw: str, name: str) -> list[int]:
    try:
        return [int(tok) for tok in _split_csv_list(raw)]
    except ValueError:
        raise DataError(f"{name} must be a comma-separated list of integers")


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------

def _load(args):
    dataset = load_dataset(args.file, args.y, _split_csv_list(args.x), args.drop_rows)
    return dataset


def cmd_coeff(args) -> int:
    seed = _resolve_seed(args)
    dataset = _load(args)
    if args.method in ("nu1d", "xi") and len(dataset.x_cols) != 1:
        raise UsageError(f"method {args.method} requires exactly one x column")
    standardize = args.standardize if args.standardize is not None else args.method == "nu"
    x = standardize_columns(dataset.x) if standardize else dataset.x
    if args.method == "nu":
        result = nu_general(Sample(dataset.y, x), seed, tie_replicates=args.replicate_ties)
    elif args.method == "nu1d":
        result = nu_1dim(dataset.y, x[:, 0], seed, tie_replicates=args.replicate_ties)
    else:
        result = xi_coefficient(dataset.y, x[:, 0], seed, tie_replicates=args.replicate_ties)
    if result.value < 0:
        print("note: value below 0; small-sample estimates may leave [0, 1]", file=sys.stderr)
    payload = {
        "value": result.value,
        "method": result.method,
        "n": result.n,
        "n0": result.n0,
        "seed": result.seed,
    }
    if args.drop_rows:
        payload["rows_dropped"] = dataset.n_dropped
    return _emit(payload)


def cmd_ford(args) -> int:
    seed = _resolve_seed(args)
    dataset = _load(args)
    standardize = args.standardize if args.standardize is not None else True
    sample = Sample(dataset.y, dataset.x, dataset.x_cols)
    path = ford_select(sample, seed, max_steps=args.max_steps, standardize=standardize)
    payload = {
        "chosen": list(path.chosen),
        "chosen_columns": [dataset.x_cols[j] for j in path.chosen],
        "scores": list(path.scores),
        "stop_reason": path.stop_reason,
        "seed": path.seed,
    }
    if args.drop_rows:
        payload["rows_dropped"] = dataset.n_dropped
    return _emit(payload)


def cmd_test(args) -> int:
    seed = _resolve_seed(args)
    dataset = _load(args)
    if args.method in ("nu1d", "xi") and len(dataset.x_cols) != 1:
        raise UsageError(f"method {args.method} requires exactly one x column")
    if args.mode == "asymptotic":
        if args.method != "nu1d":
            raise UsageError("mode=asymptotic is only defined for method=nu1d")
        result = asymptotic_test(dataset.y, dataset.x[:, 0], seed)
    else:
        if args.permutations < 1:
            raise UsageError("--permutations must be >= 1")
        x = dataset.x if args.method == "nu" else dataset.x[:, 0]
        result = permutation_test(dataset.y, x, args.method, args.permutations, seed)
    payload = {
        "statistic": result.statistic,
        "method": result.method,
        "p_value": result.p_value,
        "permutations": result.permutations,
        "seed": result.seed,
        "null_mean_theoretical": result.null_mean_theoretical,
        "mode": result.mode,
    }
    return _emit(payload)


def cmd_permdist(args) -> int:
    a = _parse_permutation_arg(args.a, "--a")
    b = _parse_permutation_arg(args.b, "--b")
    if args.metric == "d_nu":
        value = d_nu(a, b)
    elif args.metric == "d_nu_sym":
        value = d_nu_symmetric(a, b)
    else:
        value = classical_metric(args.metric, a, b)
    return _emit({"metric": args.metric, "value": value})


def cmd_simulate(args) -> int:
    seed = _resolve_seed(args)
    workers = _resolve_threads(args)
    if args.study == "null":
        report = null_moment_study(args.n, args.reps, seed, bins=args.bins)
    elif args.study == "power":
        models = _split_csv_list(args.models) if args.models else list(POWER_MODEL_NAMES)
        lambdas = [float(v) for v in _split_csv_list(args.lambdas)]
        methods = _split_csv_list(args.methods)
        report = power_study(
            models, lambdas, args.n, args.reps, args.permutations,
            args.alpha, methods, seed, workers=workers,
        )
    elif args.study == "selection":
        models = _split_csv_list(args.models) if args.models else list(SELECTION_MODEL_NAMES)
        n_list = [int(v) for v in _split_csv_list(args.n_list)]
        report = selection_study(models, n_list, args.p, args.reps, seed, workers=workers)
    else:  # figure1
        noise = [float(v) for v in _split_csv_list(args.noise_levels)]
        report = figure1_study(args.n, args.reps, noise, seed)
    if args.format == "csv":
        report.to_csv(args.out)
    else:
        report.to_json_lines(args.out)
    return _emit({"study": args.study, "rows": len(report.rows), "out": args.out})


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_common(sub, with_data: bool = True):
    if with_data:
        sub.add_argument("--file", required=True, help="input CSV (header row required)")
        sub.add_argument("--y", required=True, help="response column name")
        sub.add_argument("--x", required=True, help="comma-separated covariate column names")
        sub.add_argument(
            "--drop-rows", action="store_true",
            help="listwise-delete rows with missing designated values instead of failing",
        )
    sub.add_argument("--seed", type=int, default=None,
                     help=f"integer seed (default {DEFAULT_SEED}, or NUDEP_SEED)")
    sub.add_argument("--entropy-seed", action="store_true",
                     help="draw the seed from system entropy instead of the fixed default")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nudep",
        description="Dependence coefficients, model-free variable selection, "
                    "independence tests, and permutation discrepancies.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    coeff = commands.add_parser("coeff", help="compute a dependence coefficient from a CSV")
    _add_common(coeff)
    coeff.add_argument("--method", choices=("nu", "nu1d", "xi"), default="nu")
    coeff.add_argument("--standardize", action=argparse.BooleanOptionalAction, default=None,
                       help="z-score covariates (default: on for nu, off otherwise)")
    coeff.add_argument("--replicate-ties", type=int, default=1, metavar="M",
                       help="average M runs seeded seed..seed+M-1 over tie-break draws")
    coeff.set_defaults(handler=cmd_coeff)

    ford = commands.add_parser("ford", help="forward variable selection by dependence")
    _add_common(ford)
    ford.add_argument("--standardize", action=argparse.BooleanOptionalAction, default=None,
                      help="z-score covariates before selection (default: on)")
    ford.add_argument("--max-steps", type=int, default=None,
                      help="budget cap on the number of accepted variables")
    ford.set_defaults(handler=cmd_ford)

    test = commands.add_parser("test", help="independence test")
    _add_common(test)
    test.add_argument("--method", choices=("nu", "nu1d", "xi"), default="nu1d")
    test.add_argument("--mode", choices=("perm", "asymptotic"), default="perm")
    test.add_argument("--permutations", "-B", type=int, default=1000)
    test.set_defaults(handler=cmd_test)

    permdist = commands.add_parser("permdist", help="distance between two permutations")
    permdist.add_argument("--a", required=True, help="first permutation, e.g. 2,1,3")
    permdist.add_argument("--b", required=True, help="second permutation")
    permdist.add_argument("--metric", default="d_nu",
                          choices=("d_nu", "d_nu_sym") + CLASSICAL_METRICS)
    permdist.set_defaults(handler=cmd_permdist)

    simulate = commands.add_parser("simulate", help="run a Monte Carlo study")
    _add_common(simulate, with_data=False)
    simulate.add_argument("--study", required=True,
                          choices=("null", "power", "selection", "figure1"))
    simulate.add_argument("--out", required=True, help="report output path")
    simulate.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    simulate.add_argument("--n", type=int, default=1000)
    simulate.add_argument("--reps", type=int, default=1000)
    simulate.add_argument("--bins", type=int, default=40)
    simulate.add_argument("--models", default=None, help="comma-separated model names")
    simulate.add_argument("--lambdas", default="0,0.2,0.4,0.6,0.8,1")
    simulate.add_argument("--methods", default="nu,nu1d,xi")
    simulate.add_argument("--permutations", "-B", type=int, default=1000)
    simulate.add_argument("--alpha", type=float, default=0.05)
    simulate.add_argument("--n-list", default="100,500,1000")
    simulate.add_argument("--p", type=int, default=100)
    simulate.add_argument("--noise-levels", default="0,0.2,0.6")
    simulate.add_argument("--threads", type=int, default=None,
                          help="worker processes for replications (or NUDEP_THREADS)")
    simulate.set_defaults(handler=cmd_simulate)
    return parser


def _emit_error(kind: str, message: str) -> None:
    print(json.dumps({"error": {"type": kind, "message": message}}), file=sys.stderr)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse prints its own message; keep its code
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.handler(args)
    except UsageError as exc:
        _emit_error("usage", str(exc))
        return EXIT_USAGE
    except DataError as exc:
        _emit_error("data", str(exc))
        return EXIT_DATA
    except (DegenerateResponseError, NumericalError) as exc:
        _emit_error("degenerate" if isinstance(exc, DegenerateResponseError) else "numerical", str(exc))
        return EXIT_NUMERIC
    except (InsufficientSampleError, InvalidInputError) as exc:
        _emit_error("data", str(exc))
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
