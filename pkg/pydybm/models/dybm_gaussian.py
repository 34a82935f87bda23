# coding: utf-8

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Union

import numpy as np

from pydybm.models.dybm_binary import BinaryDyBMGeneralParams, compute_mean_general
from pydybm.models.dybm_trace import DelayLine, DyBMState, _as_pattern
from pydybm.optimizers.dybm_adagrad import AdaGrad, ConstantRate
from pydybm.utils.constants import VARIANCE_FLOOR, TraceMode, UpdateRule
from pydybm.utils.exceptions import (
    DimensionError,
    InvalidParameterError,
    NumericDivergenceError,
)

LOG_2PI = np.log(2.0 * np.pi)

# Index of the coefficient on x at t-50 in the lag stack (delta = 50)
HALF_PERIOD_LAG = 50


@dataclass
class GaussianDyBMParams(BinaryDyBMGeneralParams):
    """Parameters of a Gaussian DyBM

    The mean has the same linear form as the relaxed binary DyBM; each unit
    also carries a variance.

    :param b: bias (length N)
    :param W: stack of d-1 lag matrices
    :param U: stack of L trace matrices
    :param lambdas: L decay rates
    :param sigma2: variances (length N), floored at ``VARIANCE_FLOOR``
    """

    sigma2: np.ndarray = None

    def __post_init__(self):
        super().__post_init__()
        if self.sigma2 is None:
            self.sigma2 = np.ones(self.n_units)
        self.sigma2 = np.array(self.sigma2, dtype=np.float64).reshape(-1)
        if self.sigma2.shape != (self.n_units,):
            raise DimensionError("sigma2 must have one variance per unit")
        if np.any(~np.isfinite(self.sigma2)) or np.any(self.sigma2 <= 0):
            raise InvalidParameterError("Variances must be positive and finite")
        self.sigma2 = np.maximum(self.sigma2, VARIANCE_FLOOR)

    @classmethod
    def zeros(cls, size: int, delay: int, lambdas: Sequence[float]):
        base = BinaryDyBMGeneralParams.zeros(size, delay, lambdas)
        return cls(base.b, base.W, base.U, base.lambdas, np.ones(size))

    def copy(self):
        return GaussianDyBMParams(
            self.b.copy(), self.W.copy(), self.U.copy(), self.lambdas.copy(), self.sigma2.copy()
        )


def predict(params: GaussianDyBMParams, line: DelayLine, traces) -> np.ndarray:
    """maximum-likelihood prediction of the next pattern (the mean ``m``)

    :param params: Gaussian DyBM parameters
    :param line: delay line at t-1
    :param traces: traces at t-1
    :return: m at t
    :rtype: numpy.ndarray
    """

    return compute_mean_general(params, line, traces)


def log_density(params, x_t, m_t) -> float:
    """log of the Gaussian conditional density of ``x_t`` around ``m_t``

    ``sum_j -(x_j - m_j)**2 / (2 sigma2_j) - log(sigma2_j) / 2 - log(2 pi) / 2``

    :param params: Gaussian DyBM parameters, or the variance vector itself
    :raises InvalidParameterError: if a variance is not positive
    """

    sigma2 = np.asarray(getattr(params, "sigma2", params), dtype=np.float64).reshape(-1)
    if np.any(sigma2 <= 0):
        raise InvalidParameterError("Variances must be positive")
    x_t = _as_pattern(x_t, sigma2.shape[0])
    m_t = _as_pattern(m_t, sigma2.shape[0], "mean")
    residual = x_t - m_t
    return float(np.sum(-(residual ** 2) / (2.0 * sigma2) - 0.5 * np.log(sigma2) - 0.5 * LOG_2PI))


def _features(state: DyBMState, factor: np.ndarray) -> Dict[str, np.ndarray]:
    return {
        "W": state.line.slots[:, :, None] * factor[None, None, :],
        "U": state.trace_matrix()[:, :, None] * factor[None, None, :],
    }


def _sgd_from_residual(params, state: DyBMState, residual: np.ndarray) -> Dict[str, np.ndarray]:
    sigma = np.sqrt(params.sigma2)
    scaled = residual / params.sigma2
    direction = {"b": scaled, "sigma": (residual ** 2 / params.sigma2 - 1.0) / sigma}
    direction.update(_features(state, scaled))
    return direction


def _natural_from_residual(params, state: DyBMState, residual: np.ndarray) -> Dict[str, np.ndarray]:
    direction = {"b": residual, "sigma2": residual ** 2 - params.sigma2}
    direction.update(_features(state, residual))
    return direction


def sgd_direction(
    params: GaussianDyBMParams, state: DyBMState, x_t, m_t=None
) -> Dict[str, np.ndarray]:
    """gradient of the log density w.r.t. b, sigma, W and U

    The variance enters through the standard deviation ``sigma``.
    """

    x_t = _as_pattern(x_t, params.n_units)
    if m_t is None:
        m_t = predict(params, state.line, state.traces)
    return _sgd_from_residual(params, state, x_t - m_t)


def natural_direction(
    params: GaussianDyBMParams, state: DyBMState, x_t, m_t=None
) -> Dict[str, np.ndarray]:
    """natural gradient w.r.t. b, sigma2, W and U

    Per unit the inverse Fisher matrix of (mean, variance) is
    ``diag(sigma2, 2 sigma2**2)``, so the variance drops out of the mean
    directions.
    """

    x_t = _as_pattern(x_t, params.n_units)
    if m_t is None:
        m_t = predict(params, state.line, state.traces)
    return _natural_from_residual(params, state, x_t - m_t)


def apply_update(params: GaussianDyBMParams, update: Dict[str, np.ndarray]) -> GaussianDyBMParams:
    """add already-scaled updates to a copy of ``params``

    A ``sigma`` entry moves the standard deviation, a ``sigma2`` entry the
    variance. Variances are floored afterwards.
    """

    updated = params.copy()
    _apply_inplace(updated, update)
    return updated


def _apply_inplace(params: GaussianDyBMParams, update: Dict[str, np.ndarray]) -> None:
    params.b += update["b"]
    if params.W.shape[0] > 0:
        params.W += update["W"]
    if params.U.shape[0] > 0:
        params.U += update["U"]
    if "sigma" in update:
        sigma2 = (np.sqrt(params.sigma2) + update["sigma"]) ** 2
    else:
        sigma2 = params.sigma2 + update["sigma2"]
    np.maximum(sigma2, VARIANCE_FLOOR, out=params.sigma2)


def sgd_step(params: GaussianDyBMParams, state: DyBMState, x_t, eta: float) -> GaussianDyBMParams:
    """one stochastic-gradient step with learning rate ``eta``"""

    direction = sgd_direction(params, state, x_t)
    return apply_update(params, {name: eta * value for name, value in direction.items()})


def natural_gradient_step(
    params: GaussianDyBMParams, state: DyBMState, x_t, eta: float
) -> GaussianDyBMParams:
    """one natural-gradient step with learning rate ``eta``"""

    direction = natural_direction(params, state, x_t)
    return apply_update(params, {name: eta * value for name, value in direction.items()})


def gamma_experiment_update(gamma, mu: float, x_lag_d):
    """``gamma <- mu * gamma + x[t-d]``, the recursive form of
    ``sum_{s>=d} mu**(s-d) x[t-s]``"""

    return mu * gamma + x_lag_d


class GaussianDyBM:
    """Gaussian DyBM trained online

    :param n_units: number of units N
    :type n_units: int
    :param delay: conduction delay d
    :type delay: int
    :param lambdas: decay rates of the L traces
    :type lambdas: list, optional
    :param mode: how traces are fed
    :type mode: TraceMode, optional
    :param rule: natural gradient or plain gradient
    :type rule: UpdateRule, optional
    :param optimizer: scales the raw directions, AdaGrad by default
    :type optimizer: AdaGrad or ConstantRate, optional
    :param params: initial parameters, zero with unit variance by default
    :type params: GaussianDyBMParams, optional
    """

    def __init__(
        self,
        n_units: int,
        delay: int,
        lambdas: Sequence[float] = (),
        mode: Union[TraceMode, str] = TraceMode.SYNAPTIC,
        rule: Union[UpdateRule, str] = UpdateRule.NATURAL,
        optimizer: Optional[Union[AdaGrad, ConstantRate]] = None,
        params: Optional[GaussianDyBMParams] = None,
    ):
        self.params = (
            params.copy()
            if params is not None
            else GaussianDyBMParams.zeros(n_units, delay, lambdas)
        )
        self.state = DyBMState.zeros(
            self.params.n_units, self.params.delay, self.params.lambdas, mode
        )
        self.rule = UpdateRule(rule)
        self.optimizer = optimizer if optimizer is not None else AdaGrad()
        self.step = 0

    @property
    def n_units(self) -> int:
        return self.params.n_units

    @property
    def delay(self) -> int:
        return self.params.delay

    def predict(self) -> np.ndarray:
        """prediction of the next pattern

        Same value as :func:`predict`, computed on flattened lag and trace
        stacks without re-checking the state against the parameters.
        """

        params = self.params
        size = params.b.shape[0]
        m = params.b.copy()
        slots = self.state.line.slots
        if slots.shape[0] > 0:
            m += slots.reshape(-1) @ params.W.reshape(-1, size)
        if params.U.shape[0] > 0:
            m += self.state.trace_matrix().reshape(-1) @ params.U.reshape(-1, size)
        return m

    def log_density(self, x) -> float:
        return log_density(self.params, x, self.predict())

    def observe(self, x) -> None:
        self.state.advance_inplace(_as_pattern(x, self.n_units))
        self.step += 1

    def learn(self, x) -> np.ndarray:
        """update the parameters on ``x`` and advance the state

        The prediction made before seeing ``x`` serves both as the returned
        value and as the source of the residual.

        :param x: observed pattern
        :type x: array-like
        :raises NumericDivergenceError: if the prediction is not finite
        :return: the prediction made before the update
        :rtype: numpy.ndarray
        """

        x = _as_pattern(x, self.n_units)
        m = self.predict()
        if not np.all(np.isfinite(m)):
            raise NumericDivergenceError("Prediction is not finite", step=self.step + 1)
        if self.rule == UpdateRule.NATURAL:
            direction = _natural_from_residual(self.params, self.state, x - m)
        else:
            direction = _sgd_from_residual(self.params, self.state, x - m)
        _apply_inplace(self.params, self.optimizer.scale(direction))
        self.state.advance_inplace(x)
        self.step += 1
        return m

    def copy(self) -> "GaussianDyBM":
        other = GaussianDyBM.__new__(GaussianDyBM)
        other.params = self.params.copy()
        other.state = self.state.copy()
        other.rule = self.rule
        other.optimizer = self.optimizer.copy()
        other.step = self.step
        return other


@dataclass
class Scalar1DModel:
    """One-unit Gaussian DyBM with lag coefficients and one lagged trace

    ``m = b + sum_delta w[delta] x[t-delta] + v gamma[t-1]`` with
    ``gamma <- mu * gamma + x[t-d]``. With ``mu=0`` the trace is the lag-d
    value and the model is an AR model of order d.

    :param b: bias
    :param w: d-1 lag coefficients, ``w[delta-1]`` multiplies x at t-delta
    :param v: trace coefficient
    :param mu: trace decay rate in [0, 1)
    :param delay: conduction delay d
    """

    b: float = 0.0
    w: np.ndarray = field(default_factory=lambda: np.zeros(0))
    v: float = 0.0
    mu: float = 0.0
    delay: int = 1
    sigma2: float = 1.0

    def __post_init__(self):
        self.delay = int(self.delay)
        if self.delay < 1:
            raise InvalidParameterError("Conduction delay must be >= 1, got " + str(self.delay))
        if not 0.0 <= self.mu < 1.0:
            raise InvalidParameterError("Decay rate must lie in [0, 1)")
        self.w = np.array(self.w, dtype=np.float64).reshape(-1)
        if self.w.shape != (self.delay - 1,):
            raise DimensionError("Expected " + str(self.delay - 1) + " lag coefficients")

    def to_params(self) -> GaussianDyBMParams:
        return GaussianDyBMParams(
            [self.b],
            self.w.reshape(-1, 1, 1),
            [[[self.v]]],
            [self.mu],
            [self.sigma2],
        )

    @classmethod
    def from_params(cls, params: GaussianDyBMParams) -> "Scalar1DModel":
        if params.n_units != 1 or params.n_traces != 1:
            raise DimensionError("A scalar model has one unit and one trace")
        return cls(
            float(params.b[0]),
            params.W.reshape(-1).copy(),
            float(params.U[0, 0, 0]),
            float(params.lambdas[0]),
            params.delay,
            float(params.sigma2[0]),
        )

    def to_model(self, rule=UpdateRule.NATURAL, optimizer=None) -> GaussianDyBM:
        return GaussianDyBM(
            1,
            self.delay,
            mode=TraceMode.LAGGED,
            rule=rule,
            optimizer=optimizer,
            params=self.to_params(),
        )


def var_baseline(d: int) -> Scalar1DModel:
    """zero-initialized AR(d) model as a scalar DyBM with ``mu=0``

    :raises InvalidParameterError: if d < 1
    """

    if int(d) < 1:
        raise InvalidParameterError("A VAR baseline needs d >= 1, got " + str(d))
    return Scalar1DModel(0.0, np.zeros(int(d) - 1), 0.0, 0.0, int(d))


def var_baseline_params(d: int, n_units: int) -> GaussianDyBMParams:
    """zero-initialized VAR(d) on N units: d-1 lag matrices plus one lagged
    trace with decay 0 that carries x at t-d"""

    if int(d) < 1:
        raise InvalidParameterError("A VAR baseline needs d >= 1, got " + str(d))
    return GaussianDyBMParams.zeros(n_units, int(d), [0.0])


def planted_long_delay_model(d: int = 64) -> Scalar1DModel:
    """scalar model predicting ``-x[t-50]``, exact for a sine of period 100

    :raises InvalidParameterError: if d <= 50
    """

    if int(d) <= HALF_PERIOD_LAG:
        raise InvalidParameterError(
            "Planting the half-period lag needs d > " + str(HALF_PERIOD_LAG)
        )
    w = np.zeros(int(d) - 1)
    w[HALF_PERIOD_LAG - 1] = -1.0
    logging.debug("Planted w[50]=-1 in a model with d=" + str(d))
    return Scalar1DModel(0.0, w, 0.0, 0.0, int(d))
