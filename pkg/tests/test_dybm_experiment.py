# coding: utf-8
from dataclasses import replace

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from pydybm.experiment.dybm_experiment import (
    ExperimentConfig,
    NoisySineSpec,
    RunRecord,
    average_curves,
    average_runs,
    converged_mse,
    converged_mse_stats,
    fit_runtime_trend,
    generate_noisy_sine,
    noisy_sine_series,
    rolling_mse,
    rolling_mse_curve,
    run_cell,
    run_experiment,
    run_online,
    run_seeds,
    run_stream,
    run_sweep,
    time_per_run,
)
from pydybm.models.dybm_gaussian import planted_long_delay_model
from pydybm.utils.constants import ModelKind
from pydybm.utils.exceptions import (
    BoundaryError,
    DimensionError,
    InvalidParameterError,
    NumericDivergenceError,
)


def record_of(errors):
    errors = np.asarray(errors, dtype=float)
    zeros = np.zeros((errors.shape[0], 1))
    return RunRecord(0, 0, zeros, zeros, errors, 0.0)


def small_config(**changes):
    config = ExperimentConfig(d=2, mu=0.5, steps=600, runs=3, seed=11, eta0=0.01)
    return replace(config, **changes)


def test_clean_sine_values():
    spec = NoisySineSpec(noise_std=0.0)
    assert generate_noisy_sine(spec, 25) == 1.0
    assert abs(generate_noisy_sine(spec, 50)) < 1e-12
    with pytest.raises(InvalidParameterError):
        generate_noisy_sine(spec, 0)


def test_series_matches_pointwise_generation():
    spec = NoisySineSpec(seed=5)
    series = noisy_sine_series(spec, 200)
    for t in (1, 17, 200):
        assert series[t - 1] == generate_noisy_sine(spec, t)


def test_noise_mean_at_fixed_time():
    values = np.array([generate_noisy_sine(NoisySineSpec(seed=seed), 10) for seed in range(10000)])
    assert abs(values.mean() - np.sin(2 * np.pi * 10 / 100)) < 0.05
    assert abs(values.std() - 1.0) < 0.05


@pytest.mark.slow
def test_noise_mean_over_a_million_draws():
    values = np.array(
        [generate_noisy_sine(NoisySineSpec(seed=seed), 3) for seed in range(1000000)]
    )
    assert abs(values.mean() - np.sin(2 * np.pi * 3 / 100)) < 0.005


def test_sine_spec_validation():
    with pytest.raises(InvalidParameterError):
        NoisySineSpec(period=0)
    with pytest.raises(InvalidParameterError):
        NoisySineSpec(noise_std=-1)


def test_config_validation():
    with pytest.raises(InvalidParameterError):
        ExperimentConfig(runs=0)
    with pytest.raises(InvalidParameterError):
        ExperimentConfig(steps=100, mse_window=100)
    with pytest.raises(InvalidParameterError):
        ExperimentConfig(d=0)
    assert ExperimentConfig(model="var", mu=0.9).mu == 0.0
    assert ExperimentConfig(mu=0.9, lambdas=[0.2]).decays == (0.9, 0.2)


def test_frozen_model_predicts_zero():
    config = small_config(eta0=0.0, runs=1)
    record = run_online(config)
    assert_array_equal(record.predictions, np.zeros_like(record.predictions))
    assert_allclose(record.squared_errors.mean(), np.mean(record.targets[:, 0] ** 2))
    assert record.steps == 600
    assert record.seconds > 0


def test_var_error_decreases_on_clean_sine():
    config = ExperimentConfig(
        model="var", d=1, steps=5000, runs=1, eta0=0.01, noise=NoisySineSpec(noise_std=0.0)
    )
    record = run_online(config)
    assert record.squared_errors[:500].mean() > record.squared_errors[-500:].mean()


def test_run_stream_without_learning_keeps_parameters(rng):
    model = planted_long_delay_model(64).to_model()
    before = model.params.copy()
    record = run_stream(model, rng.normal(size=300), learn=False)
    assert_array_equal(model.params.W, before.W)
    assert model.step == 300
    assert record.steps == 300


def test_run_stream_checks_columns(rng):
    model = small_config().build_model(2)
    with pytest.raises(DimensionError):
        run_stream(model, rng.normal(size=(10, 3)))


def test_divergence_names_run_and_step():
    config = small_config(runs=1, steps=200)
    series = np.ones(200)
    series[5] = np.inf
    with pytest.raises(NumericDivergenceError) as e:
        run_online(config, 0, series)
    assert e.value.run == 0
    assert e.value.step == 6
    assert "step 6" in str(e.value)


def test_rolling_mse_values(rng):
    assert rolling_mse(record_of(np.zeros(300)), 150) == 0.0
    assert rolling_mse(record_of(np.ones(300)), 150) == 1.0
    errors = rng.random(300)
    assert_allclose(rolling_mse(errors, 120), np.mean(errors[70:170]), rtol=1e-12)


def test_rolling_mse_boundaries():
    errors = np.ones(300)
    rolling_mse(errors, 50)
    rolling_mse(errors, 250)
    with pytest.raises(BoundaryError):
        rolling_mse(errors, 49)
    with pytest.raises(BoundaryError):
        rolling_mse(errors, 251)


def test_rolling_curve_matches_pointwise(rng):
    errors = rng.random(400)
    curve = rolling_mse_curve(errors)
    assert curve.shape == (301,)
    for k in (0, 100, 300):
        assert_allclose(curve[k], rolling_mse(errors, k + 50), rtol=1e-12)


def test_average_of_one_run_is_identity(rng):
    record = record_of(rng.random(300))
    assert_allclose(average_runs([record]), rolling_mse_curve(record), rtol=1e-15)


def test_average_of_symmetric_curves():
    curve = np.linspace(0.0, 2.0, 50)
    assert_allclose(average_curves([curve, 2.0 - curve]), np.ones(50))


def test_average_runs_matches_transpose_oracle(rng):
    records = [record_of(rng.random(250)) for _ in range(100)]
    curves = np.array([rolling_mse_curve(record) for record in records])
    assert_allclose(average_runs(records), curves.T.mean(axis=1), rtol=1e-12)


def test_average_runs_rejects_mismatched_lengths(rng):
    with pytest.raises(DimensionError):
        average_runs([record_of(rng.random(200)), record_of(rng.random(300))])
    with pytest.raises(DimensionError):
        average_runs([])


def test_converged_mse_uses_the_tail():
    curve = np.concatenate([np.full(90, 5.0), np.full(10, 1.0)])
    assert converged_mse(curve) == 1.0


def test_run_seeds_are_distinct_and_stable():
    seeds = run_seeds(3, 50)
    assert len(set(seeds)) == 50
    assert run_seeds(3, 10) == seeds[:10]


def test_runs_are_deterministic_across_worker_counts():
    config = small_config(runs=4)
    serial = run_experiment(config, threads=1)
    parallel = run_experiment(config, threads=4)
    for a, b in zip(serial, parallel):
        assert a.run == b.run
        assert_array_equal(a.targets, b.targets)
        assert_array_equal(a.predictions, b.predictions)
        assert_array_equal(a.squared_errors, b.squared_errors)
    assert not np.array_equal(serial[0].targets, serial[1].targets)


def test_run_timing_does_not_depend_on_worker_count():
    config = ExperimentConfig(d=16, mu=0.5, steps=2000, runs=4)
    serial = run_cell(config, threads=1).seconds_per_1000_steps
    parallel = run_cell(config, threads=4).seconds_per_1000_steps
    assert 0.5 < parallel / serial < 2.0


def test_time_per_run():
    config = ExperimentConfig(d=1, steps=1000, runs=1)
    assert time_per_run(config) > 0
    with pytest.raises(InvalidParameterError):
        time_per_run(replace(config, steps=999))


def test_runtime_trend_of_a_line():
    slope, intercept, r2 = fit_runtime_trend([1, 16, 32, 64], [0.5 + 0.01 * d for d in (1, 16, 32, 64)])
    assert_allclose(slope, 0.01)
    assert_allclose(intercept, 0.5)
    assert_allclose(r2, 1.0)


def test_sweep_reports_improvement_against_var():
    base = small_config(runs=2)
    cells = run_sweep(base, [0.0, 0.9], [1, 2], threads=2)
    assert [(cell.model, cell.d) for cell in cells] == [
        (ModelKind.VAR, 1),
        (ModelKind.GAUSSIAN_DYBM, 1),
        (ModelKind.VAR, 2),
        (ModelKind.GAUSSIAN_DYBM, 2),
    ]
    for var, dybm in (cells[0:2], cells[2:4]):
        assert var.improvement_vs_var == 0.0
        assert_allclose(dybm.improvement_vs_var, 1.0 - dybm.converged_mse / var.converged_mse)
        assert dybm.curve.shape == (501,)


def test_converged_stats_of_identical_runs():
    records = [record_of(np.ones(300)) for _ in range(3)]
    mean, stderr = converged_mse_stats(records)
    assert mean == 1.0
    assert stderr == 0.0


@pytest.mark.slow
def test_dybm_beats_var_on_noisy_sine():
    base = ExperimentConfig(d=1, steps=10000, runs=100, seed=0)
    cells = run_sweep(base, [0.1, 0.3, 0.5, 0.7, 0.9], [1])
    var = cells[0]
    best = min(cells[1:], key=lambda cell: cell.converged_mse)
    assert best.converged_mse <= 0.9 * var.converged_mse
    for cell in cells:
        assert cell.converged_mse >= 1.0 - 3.0 * cell.converged_stderr


@pytest.mark.slow
def test_long_delay_makes_the_task_trivial():
    base = ExperimentConfig(d=64, steps=10000, runs=100, seed=1)
    cells = run_sweep(base, [0.5, 0.9], [64])
    var = cells[0]
    for cell in cells[1:]:
        assert abs(cell.converged_mse - var.converged_mse) / var.converged_mse < 0.05


@pytest.mark.slow
def test_planted_half_period_model_error():
    config = ExperimentConfig(model="var", d=64, steps=10000, runs=100, seed=2)
    values = []
    for run in range(config.runs):
        model = planted_long_delay_model(64).to_model()
        record = run_online(config, run, model=model, learn=False)
        values.append(converged_mse(rolling_mse_curve(record)))
    assert abs(np.mean(values) - 2.0) / 2.0 < 0.02


@pytest.mark.slow
def test_runtime_grows_linearly_with_delay():
    delays = [1, 16, 32, 64]
    seconds = {}
    for model in ("gaussian-dybm", "var"):
        seconds[model] = [
            np.median(
                [time_per_run(ExperimentConfig(model=model, d=d, steps=1000, runs=1)) for _ in range(5)]
            )
            for d in delays
        ]
    slope, _, r2 = fit_runtime_trend(delays, seconds["gaussian-dybm"])
    assert slope > 0
    assert r2 > 0.9
    for dybm, var in zip(seconds["gaussian-dybm"], seconds["var"]):
        assert abs(dybm - var) / var < 0.15
