# coding: utf-8

import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import repeat
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from pydybm.models.dybm_gaussian import GaussianDyBM
from pydybm.optimizers.dybm_adagrad import build_optimizer
from pydybm.utils.constants import (
    CONVERGED_FRACTION,
    DEFAULT_ETA0,
    ModelKind,
    OptimizerKind,
    TraceMode,
    UpdateRule,
)
from pydybm.utils.exceptions import (
    BoundaryError,
    DimensionError,
    InvalidParameterError,
    NumericDivergenceError,
)


@dataclass
class NoisySineSpec:
    """``x[t] = amplitude * sin(2 pi t / period) + noise_std * eps[t]``

    :param period: period of the sine, > 0
    :param amplitude: amplitude of the sine
    :param noise_std: standard deviation of the Gaussian noise, >= 0
    :param seed: seed of the noise stream
    """

    period: float = 100.0
    amplitude: float = 1.0
    noise_std: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.period <= 0:
            raise InvalidParameterError("Sine period must be > 0")
        if self.noise_std < 0:
            raise InvalidParameterError("Noise standard deviation must be >= 0")


def noisy_sine_series(spec: NoisySineSpec, steps: int) -> np.ndarray:
    """values at t = 1..steps; element ``t-1`` is the value at time t"""

    t = np.arange(1, int(steps) + 1, dtype=np.float64)
    noise = np.random.default_rng(spec.seed).standard_normal(int(steps))
    return spec.amplitude * np.sin(2.0 * np.pi * t / spec.period) + spec.noise_std * noise


def generate_noisy_sine(spec: NoisySineSpec, t: int) -> float:
    """value of the seeded noisy sine at time ``t`` (t >= 1)"""

    if int(t) < 1:
        raise InvalidParameterError("Time index starts at 1, got " + str(t))
    return float(noisy_sine_series(spec, int(t))[-1])


@dataclass
class ExperimentConfig:
    """Configuration of the online noisy-sine experiment

    ``lambdas`` lists decay rates of extra traces; the trace with decay
    ``mu`` is always the first one. A VAR model ignores ``mu`` and uses 0.
    """

    model: ModelKind = ModelKind.GAUSSIAN_DYBM
    d: int = 1
    mu: float = 0.9
    lambdas: Tuple[float, ...] = ()
    eta0: float = DEFAULT_ETA0
    steps: int = 10000
    runs: int = 100
    mse_window: int = 100
    seed: int = 0
    rule: UpdateRule = UpdateRule.NATURAL
    optimizer: OptimizerKind = OptimizerKind.ADAGRAD
    noise: NoisySineSpec = field(default_factory=NoisySineSpec)

    def __post_init__(self):
        self.model = ModelKind(self.model)
        self.rule = UpdateRule(self.rule)
        self.optimizer = OptimizerKind(self.optimizer)
        self.lambdas = tuple(float(decay) for decay in self.lambdas)
        if self.model == ModelKind.VAR:
            self.mu = 0.0
        if int(self.d) < 1:
            raise InvalidParameterError("Conduction delay must be >= 1")
        if not 0.0 <= self.mu < 1.0:
            raise InvalidParameterError("Decay rate mu must lie in [0, 1)")
        if int(self.runs) < 1:
            raise InvalidParameterError("At least one run is required")
        if int(self.steps) <= int(self.mse_window):
            raise InvalidParameterError("steps must exceed the MSE window")
        if self.eta0 < 0:
            raise InvalidParameterError("eta0 must be >= 0")

    @property
    def decays(self) -> Tuple[float, ...]:
        return (self.mu,) + self.lambdas

    def build_model(self, n_units: int = 1) -> GaussianDyBM:
        return GaussianDyBM(
            n_units,
            self.d,
            self.decays,
            mode=TraceMode.LAGGED,
            rule=self.rule,
            optimizer=build_optimizer(self.optimizer, self.eta0),
        )


@dataclass
class RunRecord:
    """Per-step outcome of one online run

    ``predictions[k]`` is the prediction of ``targets[k]`` made before it
    was observed. ``targets`` and ``predictions`` are (steps, N) arrays and
    ``squared_errors`` sums the error over units.
    """

    run: int
    seed: int
    targets: np.ndarray
    predictions: np.ndarray
    squared_errors: np.ndarray
    seconds: float

    @property
    def steps(self) -> int:
        return self.squared_errors.shape[0]


def run_seeds(master_seed: int, runs: int) -> List[int]:
    """independent run seeds split from the master seed"""

    children = np.random.SeedSequence(int(master_seed)).spawn(int(runs))
    return [int(child.generate_state(1)[0]) for child in children]


def run_stream(
    model: GaussianDyBM,
    series,
    run: int = 0,
    seed: int = 0,
    learn: bool = True,
) -> RunRecord:
    """feed a stream to a model one pattern at a time

    For every step the model predicts, sees the pattern, and updates its
    parameters and state. The reported time is the CPU time of the calling
    thread over this loop only, so concurrent runs do not inflate it.

    :param model: model to train, mutated in place
    :type model: GaussianDyBM
    :param series: (steps, N) or (steps,) stream
    :type series: numpy.ndarray
    :param run: index of the run, used in diagnostics
    :type run: int, optional
    :param seed: seed of the stream, stored in the record
    :type seed: int, optional
    :param learn: update the parameters; when False the model only predicts
    :type learn: bool, optional
    :raises NumericDivergenceError: if a prediction becomes non-finite
    :return: the record of the run
    :rtype: RunRecord
    """

    series = np.asarray(series, dtype=np.float64)
    if series.ndim == 1:
        series = series[:, None]
    if series.shape[1] != model.n_units:
        raise DimensionError("Series has " + str(series.shape[1]) + " columns")

    predictions = np.zeros_like(series)
    logging.debug("Starting run " + str(run) + " with seed " + str(seed))
    start = time.thread_time()
    for k in range(series.shape[0]):
        try:
            if learn:
                predictions[k] = model.learn(series[k])
            else:
                predictions[k] = model.predict()
                if not np.all(np.isfinite(predictions[k])):
                    raise NumericDivergenceError("Prediction is not finite")
                model.observe(series[k])
        except NumericDivergenceError as e:
            logging.error("Run " + str(run) + " diverged at step " + str(k + 1))
            raise NumericDivergenceError("Run diverged", run=run, step=k + 1) from e
    seconds = time.thread_time() - start
    squared_errors = np.sum((predictions - series) ** 2, axis=1)
    logging.debug(
        "Run " + str(run) + " finished in " + "{:.3f}".format(seconds) + " seconds"
    )
    return RunRecord(run, seed, series, predictions, squared_errors, seconds)


def run_online(
    config: ExperimentConfig,
    run: int = 0,
    series: Optional[np.ndarray] = None,
    model: Optional[GaussianDyBM] = None,
    learn: bool = True,
) -> RunRecord:
    """one online run of the experiment

    The noisy sine of the run is generated from its own seed unless
    ``series`` is given; generation is not timed.

    :param config: experiment configuration
    :type config: ExperimentConfig
    :param run: index of the run, selects the run seed
    :type run: int, optional
    :param series: (steps, N) or (steps,) data to use instead of the noisy sine
    :type series: numpy.ndarray, optional
    :param model: model to continue training, built from ``config`` otherwise
    :type model: GaussianDyBM, optional
    :param learn: update the parameters; when False the model only predicts
    :type learn: bool, optional
    :raises NumericDivergenceError: if a prediction becomes non-finite
    :return: the record of the run
    :rtype: RunRecord
    """

    seed = run_seeds(config.seed, run + 1)[run]
    if series is None:
        series = noisy_sine_series(replace(config.noise, seed=seed), config.steps)
    series = np.asarray(series, dtype=np.float64)
    if series.ndim == 1:
        series = series[:, None]
    if model is None:
        model = config.build_model(series.shape[1])
    return run_stream(model, series, run, seed, learn)


def _squared_errors(record: Union[RunRecord, np.ndarray]) -> np.ndarray:
    if isinstance(record, RunRecord):
        return record.squared_errors
    return np.asarray(record, dtype=np.float64)


def rolling_mse(record, t: int, window: int = 100) -> float:
    """mean squared error over the window of ``window`` steps centered on t

    With the default window, steps t-50 .. t+49 (0-based) are averaged.

    :raises BoundaryError: if the window leaves the stream
    """

    errors = _squared_errors(record)
    first = int(t) - window // 2
    last = first + window
    if first < 0 or last > errors.shape[0]:
        raise BoundaryError(
            "Window around step " + str(t) + " leaves a stream of " + str(errors.shape[0])
        )
    return float(np.mean(errors[first:last]))


def rolling_mse_curve(record, window: int = 100) -> np.ndarray:
    """rolling MSE at every step where the centered window fits

    Element k corresponds to step ``k + window // 2``.
    """

    errors = _squared_errors(record)
    if errors.shape[0] < window:
        raise BoundaryError("Stream is shorter than the MSE window")
    return np.lib.stride_tricks.sliding_window_view(errors, window).mean(axis=1)


def average_curves(curves: Sequence[np.ndarray]) -> np.ndarray:
    """pointwise mean of equally long curves"""

    if len(curves) == 0:
        raise DimensionError("At least one curve is required")
    length = len(curves[0])
    for curve in curves:
        if len(curve) != length:
            raise DimensionError("Curves of different lengths cannot be averaged")
    return np.mean(np.stack(curves), axis=0)


def average_runs(records: Sequence[RunRecord], window: int = 100) -> np.ndarray:
    """rolling MSE curve averaged over runs"""

    if len(records) == 0:
        raise DimensionError("At least one run record is required")
    lengths = set(record.steps for record in records)
    if len(lengths) > 1:
        raise DimensionError("Run records have different lengths: " + str(sorted(lengths)))
    return average_curves([rolling_mse_curve(record, window) for record in records])


def converged_mse(curve: np.ndarray, fraction: float = CONVERGED_FRACTION) -> float:
    """mean of the last ``fraction`` of a rolling MSE curve"""

    curve = np.asarray(curve, dtype=np.float64)
    tail = max(1, int(round(len(curve) * fraction)))
    return float(np.mean(curve[-tail:]))


def converged_mse_stats(
    records: Sequence[RunRecord], window: int = 100
) -> Tuple[float, float]:
    """converged MSE averaged over runs and its standard error"""

    values = np.array([converged_mse(rolling_mse_curve(record, window)) for record in records])
    if len(values) < 2:
        return float(values.mean()), 0.0
    return float(values.mean()), float(values.std(ddof=1) / np.sqrt(len(values)))


def default_threads() -> int:
    return os.cpu_count() or 1


def run_experiment(config: ExperimentConfig, threads: Optional[int] = None) -> List[RunRecord]:
    """all runs of a configuration, in parallel, ordered by run index

    Runs are spread over worker processes; with one worker they run in the
    calling process. Every run draws its data from its own seed, so the
    records do not depend on the worker count.

    :param config: experiment configuration
    :type config: ExperimentConfig
    :param threads: worker count (``runtime.threads``), machine parallelism by default
    :type threads: int, optional
    :return: one record per run
    :rtype: list
    """

    threads = max(1, min(int(threads or default_threads()), config.runs))
    logging.info(
        "Running "
        + str(config.runs)
        + " runs of "
        + config.model.value
        + " (d="
        + str(config.d)
        + ", mu="
        + str(config.mu)
        + ") on "
        + str(threads)
        + " workers"
    )
    if threads == 1:
        return [run_online(config, run) for run in range(config.runs)]
    with ProcessPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(run_online, repeat(config), range(config.runs)))


def time_per_run(config: ExperimentConfig) -> float:
    """CPU seconds of one run, excluding data generation

    :raises InvalidParameterError: if the configuration has fewer than 1000 steps
    """

    if config.steps < 1000:
        raise InvalidParameterError("Timing needs at least 1000 steps")
    return run_online(config, 0).seconds


def fit_runtime_trend(delays: Sequence[float], seconds: Sequence[float]) -> Tuple[float, float, float]:
    """least-squares line through (d, seconds)

    :return: slope, intercept and coefficient of determination
    :rtype: tuple
    """

    delays = np.asarray(delays, dtype=np.float64)
    seconds = np.asarray(seconds, dtype=np.float64)
    slope, intercept = np.polyfit(delays, seconds, 1)
    fitted = slope * delays + intercept
    total = np.sum((seconds - seconds.mean()) ** 2)
    r2 = 1.0 - np.sum((seconds - fitted) ** 2) / total if total > 0 else 1.0
    return float(slope), float(intercept), float(r2)


@dataclass
class SweepCell:
    """Outcome of one (mu, d) cell of a sweep"""

    model: ModelKind
    d: int
    mu: float
    runs: int
    steps: int
    curve: np.ndarray
    converged_mse: float
    converged_stderr: float
    seconds_per_1000_steps: float
    improvement_vs_var: Optional[float] = None


def summarize_records(config: ExperimentConfig, records: Sequence[RunRecord]) -> SweepCell:
    """averaged curve, converged MSE and timing of the runs of one configuration"""

    curve = average_runs(records, config.mse_window)
    mean, stderr = converged_mse_stats(records, config.mse_window)
    seconds = float(np.mean([record.seconds for record in records])) * 1000.0 / records[0].steps
    return SweepCell(
        config.model, config.d, config.mu, len(records), records[0].steps, curve, mean, stderr, seconds
    )


def run_cell(config: ExperimentConfig, threads: Optional[int] = None) -> SweepCell:
    return summarize_records(config, run_experiment(config, threads))


def run_sweep(
    base: ExperimentConfig,
    mus: Sequence[float],
    delays: Sequence[int],
    threads: Optional[int] = None,
) -> List[SweepCell]:
    """every (mu, d) cell plus a VAR baseline for each d

    A cell with ``mu=0`` is the VAR baseline. Every DyBM cell reports
    ``1 - MSE_DyBM / MSE_VAR`` against the baseline with the same d.

    :return: cells ordered by d, then by mu with the VAR cell first
    :rtype: list
    """

    cells = []
    for d in delays:
        baseline = run_cell(replace(base, model=ModelKind.VAR, d=int(d), mu=0.0), threads)
        baseline.improvement_vs_var = 0.0
        cells.append(baseline)
        for mu in mus:
            if float(mu) == 0.0:
                continue
            cell = run_cell(
                replace(base, model=ModelKind.GAUSSIAN_DYBM, d=int(d), mu=float(mu)), threads
            )
            cell.improvement_vs_var = 1.0 - cell.converged_mse / baseline.converged_mse
            logging.info(
                "Cell d="
                + str(d)
                + " mu="
                + str(mu)
                + ": converged MSE "
                + "{:.4f}".format(cell.converged_mse)
                + ", improvement vs VAR "
                + "{:.2%}".format(cell.improvement_vs_var)
            )
            cells.append(cell)
    return cells
