# coding: utf-8
import numpy as np
import pytest


def pytest_addoption(parser):
    parser.addoption(
        "--runslow", action="store_true", default=False, help="run slow acceptance tests"
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(20160128)


def synaptic_closed_form(stream, decay, delay):
    """alpha after the last pattern of ``stream`` by direct summation

    The trace is fed x at t-d+1, so x[s] carries ``decay**(t-d+2-s)``.
    """

    stream = np.atleast_2d(np.asarray(stream, dtype=np.float64).T).T
    t = stream.shape[0]
    total = np.zeros(stream.shape[1])
    for s in range(1, t - delay + 2):
        total += decay ** (t - delay + 2 - s) * stream[s - 1]
    return total


def neural_closed_form(stream, decay):
    """gamma after the last pattern: ``sum_{s<=t} decay**(t-s+1) x[s]``"""

    stream = np.atleast_2d(np.asarray(stream, dtype=np.float64).T).T
    t = stream.shape[0]
    total = np.zeros(stream.shape[1])
    for s in range(1, t + 1):
        total += decay ** (t - s + 1) * stream[s - 1]
    return total


def lagged_closed_form(stream, decay, delay):
    """``sum_{s<=t-d+1} decay**(t-d+1-s) x[s]``, with ``0**0 = 1``"""

    stream = np.atleast_2d(np.asarray(stream, dtype=np.float64).T).T
    t = stream.shape[0]
    total = np.zeros(stream.shape[1])
    for s in range(1, t - delay + 2):
        total += decay ** (t - delay + 1 - s) * stream[s - 1]
    return total


def reference_ar_predictions(series, intercept, coefficients):
    """one-step AR predictions ``c + sum_k a[k] x[t-k-1]`` with a zero history"""

    series = np.asarray(series, dtype=np.float64)
    order = len(coefficients)
    padded = np.concatenate([np.zeros(order), series])
    predictions = np.zeros(series.shape[0])
    for t in range(series.shape[0]):
        history = padded[t : t + order][::-1]
        predictions[t] = intercept + np.dot(coefficients, history)
    return predictions


def finite_difference(function, array, index, h):
    """central difference of ``function()`` w.r.t. ``array[index]``, restored after"""

    original = array[index]
    array[index] = original + h
    plus = function()
    array[index] = original - h
    minus = function()
    array[index] = original
    return (plus - minus) / (2.0 * h)


@pytest.fixture
def clean_environment(monkeypatch):
    """unset every DYBM_* setting the CLI reads"""

    from pydybm.cli.dybm_config import CONFIG_SCHEMA

    for keys in CONFIG_SCHEMA.values():
        for env_var, _, _ in keys.values():
            monkeypatch.delenv(env_var, raising=False)
