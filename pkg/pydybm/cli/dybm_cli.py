# coding: utf-8

import argparse
import logging
import os
import sys
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from pydybm import __version__
from pydybm.cli.dybm_config import (
    build_experiment_config,
    configure_logging,
    get_config_variable,
    load_config_file,
    resolve_settings,
)
from pydybm.cli.dybm_csv import (
    read_series_csv,
    write_curve_csv,
    write_step_csv,
    write_summary_csv,
    write_timing_csv,
)
from pydybm.cli.dybm_snapshot import load_snapshot, save_snapshot
from pydybm.experiment.dybm_experiment import (
    ExperimentConfig,
    NoisySineSpec,
    RunRecord,
    fit_runtime_trend,
    noisy_sine_series,
    run_experiment,
    run_online,
    run_stream,
    run_sweep,
    summarize_records,
)
from pydybm.utils.constants import ExitCode, ModelKind
from pydybm.utils.exceptions import (
    ConfigError,
    DyBMError,
    NumericDivergenceError,
    SnapshotError,
)

# setting key -> argparse destination, for flags shared by several commands
OVERRIDES = {
    "model": "model",
    "d": "d",
    "mu": "mu",
    "mus": "mus",
    "ds": "ds",
    "lambdas": "lambdas",
    "eta0": "eta0",
    "steps": "steps",
    "runs": "runs",
    "mse_window": "mse_window",
    "seed": "seed",
    "rule": "rule",
    "optimizer": "optimizer",
    "period": "period",
    "amplitude": "amplitude",
    "noise_std": "noise_std",
    "out": "out",
    "summary": "summary",
    "directory": "out_dir",
    "threads": "threads",
    "log_level": "log_level",
}


def _add_common_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="YAML config file")
    parser.add_argument("--log-level", dest="log_level", help="debug, info, warning or error")
    parser.add_argument("--threads", type=int, help="worker processes (DYBM_THREADS)")


def _add_experiment_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--model", choices=[kind.value for kind in ModelKind])
    parser.add_argument("--d", type=int, help="conduction delay")
    parser.add_argument("--mu", type=float, help="decay rate of the trace")
    parser.add_argument("--lambdas", help="comma-separated decay rates of extra traces")
    parser.add_argument("--steps", type=int)
    parser.add_argument("--runs", type=int)
    parser.add_argument("--eta0", type=float, help="initial learning rate")
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--mse-window", dest="mse_window", type=int)
    parser.add_argument("--rule", choices=["natural", "sgd"])
    parser.add_argument("--optimizer", choices=["adagrad", "constant"])
    parser.add_argument("--period", type=float)
    parser.add_argument("--amplitude", type=float)
    parser.add_argument("--noise-std", dest="noise_std", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pydybm",
        description="Online time-series learning with dynamic Boltzmann machines",
    )
    parser.add_argument("--version", action="version", version="%(prog)s " + __version__)
    commands = parser.add_subparsers(dest="command")
    commands.required = True

    train = commands.add_parser("train", help="train on the noisy sine or a CSV stream")
    _add_common_arguments(train)
    _add_experiment_arguments(train)
    train.add_argument("--out", help="per-step CSV")
    train.add_argument("--summary", help="summary CSV")
    train.add_argument("--data", help="CSV stream with one column per unit")
    train.add_argument(
        "--omit-timing",
        dest="omit_timing",
        action="store_true",
        help="leave seconds_per_1000_steps empty",
    )
    train.set_defaults(handler=cmd_train)

    sweep = commands.add_parser("sweep", help="grid of decay rates and delays")
    _add_common_arguments(sweep)
    _add_experiment_arguments(sweep)
    sweep.add_argument("--mus", help="comma-separated decay rates")
    sweep.add_argument("--ds", help="comma-separated delays")
    sweep.add_argument("--out-dir", dest="out_dir", help="directory of the output files")
    sweep.add_argument("--omit-timing", dest="omit_timing", action="store_true")
    sweep.set_defaults(handler=cmd_sweep)

    snapshot = commands.add_parser("snapshot", help="save or resume a model")
    actions = snapshot.add_subparsers(dest="action")
    actions.required = True
    save = actions.add_parser("save", help="train one run and save the model")
    save.add_argument("path")
    _add_common_arguments(save)
    _add_experiment_arguments(save)
    save.add_argument("--out", help="per-step CSV of the training run")
    save.add_argument("--data", help="CSV stream with one column per unit")
    save.set_defaults(handler=cmd_snapshot)
    load = actions.add_parser("load", help="resume a saved model on the rest of its stream")
    load.add_argument("path")
    _add_common_arguments(load)
    load.add_argument("--steps", type=int, help="steps to continue for")
    load.add_argument("--out", help="per-step CSV of the resumed run")
    load.add_argument("--data", help="CSV stream to continue on")
    load.add_argument(
        "--freeze", action="store_true", help="predict without updating the parameters"
    )
    load.set_defaults(handler=cmd_snapshot)
    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    return {key: getattr(args, dest, None) for key, dest in OVERRIDES.items()}


def _configure(args: argparse.Namespace) -> Dict[str, Any]:
    config = load_config_file(args.config)
    log_level = args.log_level or get_config_variable(
        "DYBM_LOG_LEVEL", ["runtime", "log_level"], config
    )
    configure_logging(log_level or "info")
    return config


def _setup(args: argparse.Namespace, required: Sequence[str] = ()) -> Dict[str, Any]:
    return resolve_settings(_configure(args), _overrides(args), required)


def run_path(out: str, run: int) -> str:
    """CSV path of a run: ``out`` itself for run 0, ``{stem}.run{k}{suffix}`` after"""

    if run == 0:
        return out
    stem, suffix = os.path.splitext(out)
    return stem + ".run" + str(run) + suffix


def _summary_path(settings: Dict[str, Any]) -> str:
    if settings["summary"] is not None:
        return settings["summary"]
    stem, suffix = os.path.splitext(settings["out"])
    return stem + ".summary" + (suffix or ".csv")


def _train_records(
    config: ExperimentConfig, settings: Dict[str, Any], data: Optional[str]
) -> List[RunRecord]:
    if data is None:
        return run_experiment(config, settings["threads"])
    series = read_series_csv(data)
    if series.shape[0] < config.mse_window:
        raise ConfigError("Data file holds fewer steps than the MSE window")
    if config.runs > 1:
        logging.warning("A data file gives one stream, running a single run")
    return [run_online(config, 0, series)]


def cmd_train(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    """train, write one per-step CSV per run and a one-row summary"""

    settings = _setup(args)
    if settings["d"] is None:
        parser.print_usage(sys.stderr)
        raise ConfigError("The conduction delay is required (--d or experiment.d)")
    config = build_experiment_config(settings)
    records = _train_records(config, settings, args.data)
    for record in records:
        write_step_csv(run_path(settings["out"], record.run), record, config.mse_window)
    cell = summarize_records(config, records)
    if config.model == ModelKind.VAR:
        cell.improvement_vs_var = 0.0
    write_summary_csv(_summary_path(settings), [cell], with_timing=not args.omit_timing)
    logging.info(
        "Converged MSE "
        + "{:.4f}".format(cell.converged_mse)
        + " +/- "
        + "{:.4f}".format(cell.converged_stderr)
        + " over "
        + str(cell.runs)
        + " runs"
    )
    return ExitCode.OK


def _label(value: float) -> str:
    return "{:g}".format(value)


def cmd_sweep(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    """curve per (mu, d) cell, timing table and summary table"""

    settings = _setup(args)
    base = build_experiment_config(settings)
    directory = settings["directory"]
    os.makedirs(directory, exist_ok=True)
    cells = run_sweep(base, settings["mus"], settings["ds"], settings["threads"])
    for cell in cells:
        name = "curve_mu" + _label(cell.mu) + "_d" + str(cell.d) + ".csv"
        write_curve_csv(os.path.join(directory, name), cell, base.mse_window)
    dybm_cells = [cell for cell in cells if cell.model == ModelKind.GAUSSIAN_DYBM]
    write_timing_csv(os.path.join(directory, "timing.csv"), dybm_cells or cells)
    write_summary_csv(
        os.path.join(directory, "summary.csv"), cells, with_timing=not args.omit_timing
    )
    for kind in ModelKind:
        timed = [cell for cell in cells if cell.model == kind]
        if len(set(cell.d for cell in timed)) > 1:
            slope, intercept, r2 = fit_runtime_trend(
                [cell.d for cell in timed], [cell.seconds_per_1000_steps for cell in timed]
            )
            logging.info(
                "Runtime of "
                + kind.value
                + ": "
                + "{:.3g}".format(slope)
                + " s per unit of d per 1000 steps, R2="
                + "{:.3f}".format(r2)
            )
    return ExitCode.OK


def _source_series(source: Optional[Dict[str, Any]], steps: int, data: Optional[str]) -> np.ndarray:
    if data is not None:
        return read_series_csv(data)[:steps]
    if source is None:
        raise SnapshotError("Snapshot records no data source, pass --data")
    offset = int(source.get("offset", 0))
    if source.get("kind") == "csv":
        series = read_series_csv(source["path"])
        return series[offset : offset + steps]
    if source.get("kind") != "noisy-sine":
        raise SnapshotError("Unknown data source in snapshot: " + str(source.get("kind")))
    spec = NoisySineSpec(
        float(source["period"]),
        float(source["amplitude"]),
        float(source["noise_std"]),
        int(source["seed"]),
    )
    return noisy_sine_series(spec, offset + steps)[offset:]


def _snapshot_save(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    settings = _setup(args)
    if settings["d"] is None:
        parser.print_usage(sys.stderr)
        raise ConfigError("The conduction delay is required (--d or experiment.d)")
    config = build_experiment_config(settings, runs=1)
    if args.data is not None:
        series = read_series_csv(args.data)
        model = config.build_model(series.shape[1])
        record = run_online(config, 0, series, model)
        source = {"kind": "csv", "path": os.path.abspath(args.data), "offset": record.steps}
    else:
        model = config.build_model()
        record = run_online(config, 0, model=model)
        source = {
            "kind": "noisy-sine",
            "period": config.noise.period,
            "amplitude": config.noise.amplitude,
            "noise_std": config.noise.noise_std,
            "seed": record.seed,
            "offset": record.steps,
        }
    if args.out is not None:
        write_step_csv(args.out, record, config.mse_window)
    save_snapshot(model, args.path, config.model, source)
    return ExitCode.OK


def _snapshot_load(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    _configure(args)
    model, model_kind, source = load_snapshot(args.path)
    steps = args.steps if args.steps is not None else 1000
    if steps < 1:
        raise ConfigError("--steps must be >= 1")
    series = _source_series(source, steps, args.data)
    if series.shape[0] == 0:
        raise SnapshotError(
            "No data left to resume on after step " + str(model.step) + ", pass --data"
        )
    first_step = model.step + 1
    record = run_stream(model, series, learn=not args.freeze)
    logging.info(
        "Resumed "
        + model_kind.value
        + " for "
        + str(record.steps)
        + " steps, MSE "
        + "{:.4f}".format(float(np.mean(record.squared_errors)))
    )
    if args.out is not None:
        write_step_csv(args.out, record, first_step=first_step)
    return ExitCode.OK


def cmd_snapshot(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    """``save`` trains one run and writes the model, ``load`` resumes it"""

    if args.action == "save":
        return _snapshot_save(args, parser)
    return _snapshot_load(args, parser)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return int(args.handler(args, parser))
    except ConfigError as e:
        logging.error("Configuration error: " + str(e))
        return ExitCode.CONFIG
    except NumericDivergenceError as e:
        logging.error("Numeric divergence: " + str(e))
        return ExitCode.NUMERIC
    except SnapshotError as e:
        logging.error("Snapshot error: " + str(e))
        return ExitCode.SNAPSHOT
    except DyBMError as e:
        logging.error("Invalid input: " + str(e))
        return ExitCode.CONFIG


if __name__ == "__main__":
    sys.exit(main())
