# coding: utf-8

import csv
import logging
from typing import Iterable, List, Optional, Sequence

import numpy as np

from pydybm.experiment.dybm_experiment import RunRecord, SweepCell, rolling_mse_curve
from pydybm.utils.constants import (
    CURVE_COLUMNS,
    STEP_COLUMNS,
    SUMMARY_COLUMNS,
    TIMING_COLUMNS,
)
from pydybm.utils.exceptions import ConfigError


def format_float(value) -> str:
    """17 significant digits, exact for 64-bit floats; empty for None"""

    if value is None:
        return ""
    return "{:.17g}".format(float(value))


def _format_pattern(values: np.ndarray) -> str:
    return " ".join(format_float(value) for value in np.atleast_1d(values))


def _write_rows(path: str, header: Sequence[str], rows: Iterable[Sequence[str]]) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_step_csv(path: str, record: RunRecord, window: int = 100, first_step: int = 1) -> None:
    """one row per step: step, target, prediction, sq_error, rolling_mse

    ``rolling_mse`` is empty where the centered window does not fit. With
    several units, targets and predictions are space-separated.
    """

    rolling: List[Optional[float]] = [None] * record.steps
    if record.steps >= window:
        curve = rolling_mse_curve(record, window)
        for k, value in enumerate(curve):
            rolling[k + window // 2] = value
    rows = (
        [
            str(first_step + k),
            _format_pattern(record.targets[k]),
            _format_pattern(record.predictions[k]),
            format_float(record.squared_errors[k]),
            format_float(rolling[k]),
        ]
        for k in range(record.steps)
    )
    _write_rows(path, STEP_COLUMNS, rows)
    logging.info("Wrote " + str(record.steps) + " steps to " + path)


def summary_row(cell: SweepCell, with_timing: bool = True) -> List[str]:
    return [
        cell.model.value,
        str(cell.d),
        format_float(cell.mu),
        str(cell.runs),
        str(cell.steps),
        format_float(cell.converged_mse),
        format_float(cell.improvement_vs_var),
        format_float(cell.seconds_per_1000_steps) if with_timing else "",
    ]


def write_summary_csv(path: str, cells: Sequence[SweepCell], with_timing: bool = True) -> None:
    _write_rows(path, SUMMARY_COLUMNS, [summary_row(cell, with_timing) for cell in cells])
    logging.info("Wrote summary of " + str(len(cells)) + " cells to " + path)


def write_curve_csv(path: str, cell: SweepCell, window: int = 100) -> None:
    """averaged rolling MSE, indexed by the 1-based center step"""

    offset = window // 2 + 1
    rows = ([str(offset + k), format_float(value)] for k, value in enumerate(cell.curve))
    _write_rows(path, CURVE_COLUMNS, rows)


def write_timing_csv(path: str, cells: Sequence[SweepCell]) -> None:
    rows = [
        [cell.model.value, str(cell.d), format_float(cell.mu), format_float(cell.seconds_per_1000_steps)]
        for cell in cells
    ]
    _write_rows(path, TIMING_COLUMNS, rows)


def read_series_csv(path: str) -> np.ndarray:
    """read a one-column-per-unit CSV with a header row into a (T, N) array

    :raises ConfigError: if the file cannot be read as numbers
    """

    try:
        series = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2, dtype=np.float64)
    except (OSError, ValueError) as e:
        raise ConfigError("Unable to read data file " + str(path) + ": " + str(e))
    if series.shape[0] == 0:
        raise ConfigError("Data file " + str(path) + " has no rows")
    return series
