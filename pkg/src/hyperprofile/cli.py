"""Command-line front end wiring the pipeline end to end.

Subcommands: ``gen-data`` (synthetic traces), ``fit`` (model fitting and
persistence), ``query`` (node selection for a fleet and task),
``experiment`` (the dual-metric mismatch study), and ``prop-check`` (bulk
verification of the balance property).

Exit codes: 0 success, 1 validation error, 2 I/O error, 3 internal error.
Machine-readable output goes to stdout or ``--out`` files; diagnostics go
to stderr.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .errors import ValidationError
from .experiment import (
    DEFAULT_BANDWIDTH_RANGE_KBPS,
    DEFAULT_DATA_SIZE_RANGE_BYTES,
    DEFAULT_K_VALUES,
    DEFAULT_PROFILE_SIZES,
    DEFAULT_TRIALS_PER_SIZE,
    ExperimentConfig,
    run_balance_property_check,
    run_mismatch_experiment,
    write_mismatch_csv,
)
from .knn import Metric, knn_query
from .profiles import TaskSpec, build_hyperprofile, read_fleet_csv
from .regression import fit_multistep, load_model, save_model
from .traces import (
    DEFAULT_BANDWIDTH_GRID_KBPS,
    GeneratorConfig,
    default_data_size_grid,
    gen_traces,
    ingest_traces,
    write_traces,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_INTERNAL = 3

NS_PER_SECOND = 1e9


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that reports usage problems with exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_VALIDATION)


def _float_list(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("list must be nonempty")
    return values


def _int_list(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of integers: {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("list must be nonempty")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hyperprofile", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("gen-data", help="generate synthetic trace data")
    gen.add_argument("--out", required=True, help="output trace CSV path")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--noise", type=float, default=0.0, help="relative noise std dev")
    gen.add_argument("--bandwidths", type=_float_list, default=None, help="comma list of Kbps values")
    gen.add_argument("--data-sizes", type=_float_list, default=None, help="comma list of byte sizes")
    gen.add_argument("--include-distance", action="store_true")
    gen.add_argument("--distance-range", type=float, nargs=2, default=(10.0, 100.0), metavar=("LO", "HI"))

    fit = sub.add_parser("fit", help="fit the multistep cost model from traces")
    fit.add_argument("--traces", required=True, help="input trace CSV path")
    fit.add_argument("--out", required=True, help="output model JSON path")
    fit.add_argument("--folds", type=int, default=10, help="cross-validation folds")
    fit.add_argument("--cv-seed", type=int, default=0)

    query = sub.add_parser("query", help="select nodes for a task from a fleet")
    query.add_argument("--model", required=True, help="model JSON path")
    query.add_argument("--fleet", required=True, help="fleet CSV path")
    query.add_argument("--data-size", type=float, required=True, help="task payload in bytes")
    query.add_argument("--k", type=int, required=True, help="number of nodes to select")
    query.add_argument("--metric", choices=[m.value for m in Metric], required=True)

    exp = sub.add_parser("experiment", help="run the dual-metric mismatch study")
    exp.add_argument("--model", required=True, help="model JSON path")
    exp.add_argument("--out", required=True, help="output results CSV path")
    exp.add_argument("--sizes", type=_int_list, default=DEFAULT_PROFILE_SIZES)
    exp.add_argument("--k", type=_int_list, default=DEFAULT_K_VALUES, dest="k_values")
    exp.add_argument("--trials", type=int, default=DEFAULT_TRIALS_PER_SIZE)
    exp.add_argument("--seed", type=int, default=0)
    exp.add_argument(
        "--bandwidth-range", type=float, nargs=2, default=DEFAULT_BANDWIDTH_RANGE_KBPS, metavar=("LO", "HI")
    )
    exp.add_argument(
        "--data-size-range", type=float, nargs=2, default=DEFAULT_DATA_SIZE_RANGE_BYTES, metavar=("LO", "HI")
    )
    exp.add_argument("--normalize", choices=["max", "none"], default="max")
    exp.add_argument("--counting", choices=["ordered", "set"], default="ordered")

    prop = sub.add_parser("prop-check", help="bulk-check the balance property")
    prop.add_argument("--pairs", type=int, required=True, help="number of random pairs to sample")
    prop.add_argument("--seed", type=int, default=0)

    return parser


def _cmd_gen_data(args) -> int:
    config = GeneratorConfig(
        bandwidth_grid_kbps=args.bandwidths if args.bandwidths else DEFAULT_BANDWIDTH_GRID_KBPS,
        data_size_grid_bytes=args.data_sizes if args.data_sizes else default_data_size_grid(),
        noise_rel_sigma=args.noise,
        seed=args.seed,
        include_distance=args.include_distance,
        distance_range_m=tuple(args.distance_range),
    )
    records = gen_traces(config)
    write_traces(records, args.out)
    print(f"wrote {len(records)} trace records to {args.out}", file=sys.stderr)
    return EXIT_OK


def _cmd_fit(args) -> int:
    traces = ingest_traces(args.traces)
    model = fit_multistep(traces, cv_folds=args.folds, cv_seed=args.cv_seed)
    save_model(model, args.out)
    print(
        f"energy_slope a={model.energy_slope.coefficient:.12g} "
        f"p={model.energy_slope.exponent:.12g} r2={model.energy_slope.r_squared:.12g}"
    )
    print(f"time_slope K={model.time_slope.numerator:.12g} r2={model.time_slope.r_squared:.12g}")
    print(
        f"time_intercept A={model.time_intercept.amplitude:.12g} "
        f"B={model.time_intercept.rate:.12g} r2={model.time_intercept.r_squared:.12g}"
    )
    print(f"cv energy={model.cv_energy:.12g} time={model.cv_time:.12g}")
    return EXIT_OK


def _cmd_query(args) -> int:
    model = load_model(args.model)
    fleet = read_fleet_csv(args.fleet)
    task = TaskSpec(data_size_bytes=args.data_size)
    profile = build_hyperprofile(fleet, task, model)
    if args.k > len(profile):
        print(
            f"warning: k={args.k} exceeds fleet size {len(profile)}, returning the whole fleet",
            file=sys.stderr,
        )
    result = knn_query(profile, np.zeros(2), args.k, args.metric)
    for node_id, dist in result.hits:
        print(f"{node_id}\t{dist:.9g}")
    best_id = result.hits[0][0]
    energy_j, time_ns = profile.coords[profile.node_ids.index(best_id)]
    # Human-facing summary: time in seconds, 6 significant digits.
    print(
        f"best node {best_id}: predicted energy {energy_j:.6g} J, "
        f"predicted time {time_ns / NS_PER_SECOND:.6g} s",
        file=sys.stderr,
    )
    return EXIT_OK


def _cmd_experiment(args) -> int:
    model = load_model(args.model)
    config = ExperimentConfig(
        model=model,
        profile_sizes=args.sizes,
        k_values=args.k_values,
        bandwidth_range_kbps=tuple(args.bandwidth_range),
        data_size_range_bytes=tuple(args.data_size_range),
        trials_per_size=args.trials,
        seed=args.seed,
        normalize=args.normalize,
        counting=args.counting,
    )
    stats = run_mismatch_experiment(config)
    write_mismatch_csv(stats, args.out)
    print(f"wrote {len(stats)} rows to {args.out}", file=sys.stderr)
    return EXIT_OK


def _cmd_prop_check(args) -> int:
    summary = run_balance_property_check(args.pairs, seed=args.seed)
    print(
        f"{summary.violations} counterexamples / {summary.pairs_satisfying} "
        f"precondition-satisfying pairs ({summary.pairs_sampled} sampled)"
    )
    return EXIT_OK if summary.violations == 0 else EXIT_INTERNAL


_COMMANDS = {
    "gen-data": _cmd_gen_data,
    "fit": _cmd_fit,
    "query": _cmd_query,
    "experiment": _cmd_experiment,
    "prop-check": _cmd_prop_check,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits on --help (0) and, via _Parser.error, on bad usage (1)
        return exc.code if isinstance(exc.code, int) else EXIT_VALIDATION
    try:
        return _COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    raise SystemExit(main())
