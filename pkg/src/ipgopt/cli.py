"""Command-line harness.

Subcommands:
  bench            run a benchmark experiment from flags and/or a JSON config
  prepare-state    shortcut for the GHZ / W state-preparation experiments
  compile-unitary  shortcut for the QFT full-matrix experiments
  export-qasm      write the optimized circuit from a record.json as OpenQASM

Exit codes: 0 success, 1 configuration error, 2 numerical abort.  The
default output directory is taken from $IPGOPT_OUT when --out is absent.
"""

import argparse
import json
import os
import sys

import numpy as np

from .ansatz import CircuitTemplate
from .experiments import (ConfigError, EXPERIMENT_KINDS, default_output_dir,
                          experiment_config, load_config, run_experiment,
                          run_with_layer_growth)
from .qasm import export_qasm


def _add_common_options(parser):
    parser.add_argument("--optimizer", action="append", dest="optimizers",
                        metavar="NAME",
                        help="optimizer to run (gd, adam, lbfgs, ipg); repeatable")
    parser.add_argument("--qubits", type=int, dest="num_qubits")
    parser.add_argument("--layers", type=int, dest="num_layers")
    parser.add_argument("--iters", type=int, dest="iterations")
    parser.add_argument("--runs", type=int, dest="n_runs")
    parser.add_argument("--seed", type=int, dest="base_seed")
    parser.add_argument("--entangler", choices=("every", "between"))
    parser.add_argument("--shared-init", action=argparse.BooleanOptionalAction,
                        default=None,
                        help="same initial angles for every optimizer (default on)")
    parser.add_argument("--histogram-samples", type=int)
    parser.add_argument("--out", dest="output_dir",
                        help="output directory (default $IPGOPT_OUT or ./results)")


def _collect_overrides(args) -> dict:
    keys = ("num_qubits", "num_layers", "iterations", "n_runs", "base_seed",
            "entangler", "shared_init", "histogram_samples", "output_dir")
    return {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}


def _run(config, args) -> int:
    if args.grow_layers:
        record = run_with_layer_growth(config, args.grow_threshold,
                                       args.max_layers)
    else:
        record = run_experiment(config)
    for name, outcome in record.outcomes.items():
        status = " (aborted)" if outcome.best.aborted else ""
        print(f"{name}: best final cost {outcome.best.final_cost:.6e} "
              f"(seed {outcome.best.seed}){status}")
    print(f"outputs written to {record.config.output_dir}")
    return 2 if record.failed else 0


def _add_growth_options(parser):
    parser.add_argument("--grow-layers", action="store_true",
                        help="add 2 layers and re-run while the best cost "
                             "stays above --grow-threshold")
    parser.add_argument("--grow-threshold", type=float, default=1e-4)
    parser.add_argument("--max-layers", type=int, default=11)


def _bench(args) -> int:
    overrides = _collect_overrides(args)
    overrides.setdefault("output_dir", default_output_dir())
    if args.config:
        if args.optimizers:
            overrides["optimizers"] = list(args.optimizers)
        if args.experiment:
            overrides["kind"] = args.experiment
        config = load_config(args.config, **overrides)
    else:
        if not args.experiment:
            raise ConfigError("bench needs --experiment or --config")
        config = experiment_config(args.experiment, optimizers=args.optimizers,
                                   **overrides)
    return _run(config, args)


def _prepare_state(args) -> int:
    overrides = _collect_overrides(args)
    overrides.setdefault("output_dir", default_output_dir())
    if args.target == "ghz":
        overrides["ghz_sign"] = +1 if args.sign == "plus" else -1
    config = experiment_config(args.target, optimizers=args.optimizers,
                               **overrides)
    return _run(config, args)


def _compile_unitary(args) -> int:
    overrides = _collect_overrides(args)
    overrides.setdefault("output_dir", default_output_dir())
    kind = f"qft-{args.cost}"
    config = experiment_config(kind, optimizers=args.optimizers, **overrides)
    return _run(config, args)


def _export_qasm(args) -> int:
    try:
        with open(args.record) as handle:
            record = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read record {args.record}: {exc}") from exc
    results = record.get("results", {})
    if not results:
        raise ConfigError("record holds no optimizer results")
    name = args.optimizer or sorted(results)[0]
    if name not in results:
        raise ConfigError(f"no optimizer {name!r} in record; "
                          f"available: {sorted(results)}")
    config = record["config"]
    template = CircuitTemplate(config["num_qubits"], config["num_layers"],
                               config.get("entangler", "every"))
    params = np.asarray(results[name]["best"]["final_params"], dtype=float)
    export_qasm(template, params, args.out)
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ipgopt",
        description="Optimize parameterized quantum circuits with IPG and "
                    "baseline optimizers on an exact statevector simulator.")
    sub = parser.add_subparsers(dest="command", required=True)

    bench = sub.add_parser("bench", help="run a benchmark experiment")
    bench.add_argument("--config", help="JSON experiment config")
    bench.add_argument("--experiment", choices=EXPERIMENT_KINDS)
    _add_common_options(bench)
    _add_growth_options(bench)
    bench.set_defaults(func=_bench)

    prep = sub.add_parser("prepare-state", help="optimize a state-preparation circuit")
    prep.add_argument("--target", choices=("ghz", "w"), required=True)
    prep.add_argument("--sign", choices=("plus", "minus"), default="minus",
                      help="GHZ superposition sign (default minus)")
    _add_common_options(prep)
    _add_growth_options(prep)
    prep.set_defaults(func=_prepare_state)

    comp = sub.add_parser("compile-unitary", help="optimize a full circuit matrix")
    comp.add_argument("--target", choices=("qft",), default="qft")
    comp.add_argument("--cost", choices=("distance", "frobenius"),
                      default="frobenius")
    _add_common_options(comp)
    _add_growth_options(comp)
    comp.set_defaults(func=_compile_unitary)

    qasm = sub.add_parser("export-qasm", help="export a circuit from a record")
    qasm.add_argument("--record", required=True, help="path to record.json")
    qasm.add_argument("--optimizer", help="which optimizer's best circuit")
    qasm.add_argument("--out", required=True, help="output .qasm path")
    qasm.set_defaults(func=_export_qasm)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
