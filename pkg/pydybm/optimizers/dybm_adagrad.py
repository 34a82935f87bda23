# coding: utf-8

from dataclasses import dataclass, field
from typing import Dict, Mapping, Tuple

import numpy as np

from pydybm.utils.constants import ADAGRAD_EPSILON, DEFAULT_ETA0, OptimizerKind
from pydybm.utils.exceptions import InvalidParameterError, NumericDivergenceError


def _check_finite(raw: Mapping[str, np.ndarray]) -> Dict[str, np.ndarray]:
    checked = {}
    for name, value in raw.items():
        value = np.asarray(value, dtype=np.float64)
        if not np.all(np.isfinite(value)):
            raise NumericDivergenceError("Non-finite update direction for " + name)
        checked[name] = value
    return checked


@dataclass
class AdaGradState:
    """Per-scalar AdaGrad accumulators

    :param eta0: initial learning rate
    :param epsilon: denominator stabilizer
    :param accum: running sum of squared raw updates, one array per parameter
    """

    eta0: float = DEFAULT_ETA0
    epsilon: float = ADAGRAD_EPSILON
    accum: Dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if self.eta0 < 0:
            raise InvalidParameterError("Initial learning rate must be >= 0")
        if self.epsilon <= 0:
            raise InvalidParameterError("AdaGrad epsilon must be > 0")

    def effective_rate(self, name: str) -> np.ndarray:
        """learning rate currently applied to each scalar of ``name``"""

        return self.eta0 / (np.sqrt(self.accum[name]) + self.epsilon)

    def copy(self) -> "AdaGradState":
        return AdaGradState(
            self.eta0,
            self.epsilon,
            {name: value.copy() for name, value in self.accum.items()},
        )


def adagrad_scale(
    state: AdaGradState, raw: Mapping[str, np.ndarray]
) -> Tuple[AdaGradState, Dict[str, np.ndarray]]:
    """scale raw update directions with AdaGrad

    ``accum += raw**2`` then ``scaled = eta0 * raw / (sqrt(accum) + epsilon)``,
    elementwise for every named parameter.

    :param state: accumulators before the call
    :type state: AdaGradState
    :param raw: raw update direction per parameter
    :type raw: dict
    :raises NumericDivergenceError: if a raw value is not finite
    :return: the new state and the scaled updates
    :rtype: tuple
    """

    raw = _check_finite(raw)
    accum = dict(state.accum)
    scaled = {}
    for name, value in raw.items():
        previous = accum.get(name)
        if previous is None:
            previous = np.zeros_like(value)
        elif previous.shape != value.shape:
            raise InvalidParameterError(
                "Accumulator for " + name + " has shape " + str(previous.shape)
            )
        total = previous + value * value
        accum[name] = total
        scaled[name] = state.eta0 * value / (np.sqrt(total) + state.epsilon)
    return AdaGradState(state.eta0, state.epsilon, accum), scaled


class AdaGrad:
    """Stateful AdaGrad owned by one model

    :param eta0: initial learning rate
    :type eta0: float, optional
    :param epsilon: denominator stabilizer
    :type epsilon: float, optional
    """

    kind = OptimizerKind.ADAGRAD

    def __init__(self, eta0: float = DEFAULT_ETA0, epsilon: float = ADAGRAD_EPSILON):
        self.state = AdaGradState(eta0, epsilon)

    @property
    def eta0(self) -> float:
        return self.state.eta0

    def scale(self, raw: Mapping[str, np.ndarray]) -> Dict[str, np.ndarray]:
        """:func:`adagrad_scale` with the accumulators updated in place"""

        state = self.state
        scaled = {}
        for name, value in _check_finite(raw).items():
            accum = state.accum.get(name)
            if accum is None:
                accum = state.accum[name] = np.zeros_like(value)
            elif accum.shape != value.shape:
                raise InvalidParameterError(
                    "Accumulator for " + name + " has shape " + str(accum.shape)
                )
            accum += value * value
            scaled[name] = state.eta0 * value / (np.sqrt(accum) + state.epsilon)
        return scaled

    def copy(self) -> "AdaGrad":
        other = AdaGrad(self.state.eta0, self.state.epsilon)
        other.state = self.state.copy()
        return other


class ConstantRate:
    """Plain stochastic gradient: ``scaled = eta0 * raw``

    :param eta0: learning rate
    :type eta0: float
    """

    kind = OptimizerKind.CONSTANT

    def __init__(self, eta0: float = DEFAULT_ETA0):
        if eta0 < 0:
            raise InvalidParameterError("Learning rate must be >= 0")
        self.eta0 = float(eta0)

    def scale(self, raw: Mapping[str, np.ndarray]) -> Dict[str, np.ndarray]:
        return {name: self.eta0 * value for name, value in _check_finite(raw).items()}

    def copy(self) -> "ConstantRate":
        return ConstantRate(self.eta0)


def build_optimizer(kind, eta0: float = DEFAULT_ETA0):
    """optimizer instance for an :class:`OptimizerKind`"""

    kind = OptimizerKind(kind)
    if kind == OptimizerKind.ADAGRAD:
        return AdaGrad(eta0)
    return ConstantRate(eta0)
