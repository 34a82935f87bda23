# coding: utf-8

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from pydybm.models.dybm_trace import (
    DelayLine,
    DyBMState,
    TraceVector,
    advance_state,
    compute_beta,
    push_delay_line,
    update_neural_trace,
    update_synaptic_trace,
    _as_pattern,
    _check_decay,
)
from pydybm.utils.constants import TraceMode
from pydybm.utils.exceptions import DimensionError, DomainError, InvalidParameterError


def sigmoid(m) -> np.ndarray:
    """logistic function evaluated in log-space (no overflow for large ``|m|``)"""

    return np.exp(-np.logaddexp(0.0, -np.asarray(m, dtype=np.float64)))


def check_binary(x, size: int) -> np.ndarray:
    x = _as_pattern(x, size)
    if not np.all((x == 0.0) | (x == 1.0)):
        raise DomainError("Binary DyBM patterns must be 0/1 vectors, got " + str(x))
    return x


def _check_square(matrix, size: int, name: str) -> np.ndarray:
    matrix = np.array(matrix, dtype=np.float64)
    if matrix.shape != (size, size):
        raise DimensionError(
            name + " must have shape " + str((size, size)) + ", got " + str(matrix.shape)
        )
    return matrix


def _check_stack(stack, count: int, size: int, name: str) -> np.ndarray:
    stack = np.array(stack, dtype=np.float64)
    if count == 0 and stack.size == 0:
        return np.zeros((0, size, size))
    if stack.shape != (count, size, size):
        raise DimensionError(
            name
            + " must hold "
            + str(count)
            + " matrices of shape "
            + str((size, size))
            + ", got "
            + str(stack.shape)
        )
    return stack


@dataclass
class BinaryDyBMOriginalParams:
    """Parameters of the original DyBM energy (bias, LTP and LTD weights)

    :param b: bias (length N)
    :param U: LTP weights, ``U[i, j]`` from pre-synaptic i to post-synaptic j
    :param V: LTD weights
    :param lam: decay rate of the synaptic trace alpha
    :param mu: decay rate of the neural trace gamma and of beta
    :param delay: conduction delay d >= 1
    """

    b: np.ndarray
    U: np.ndarray
    V: np.ndarray
    lam: float
    mu: float
    delay: int

    def __post_init__(self):
        self.b = np.array(self.b, dtype=np.float64).reshape(-1)
        size = self.b.shape[0]
        self.U = _check_square(self.U, size, "U")
        self.V = _check_square(self.V, size, "V")
        self.lam = _check_decay(self.lam)
        self.mu = _check_decay(self.mu)
        self.delay = int(self.delay)
        if self.delay < 1:
            raise InvalidParameterError("Conduction delay must be >= 1")
        for name in ("b", "U", "V"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise InvalidParameterError(name + " contains non-finite weights")

    @classmethod
    def zeros(cls, size: int, delay: int, lam: float, mu: float):
        return cls(np.zeros(size), np.zeros((size, size)), np.zeros((size, size)), lam, mu, delay)

    @property
    def n_units(self) -> int:
        return self.b.shape[0]

    def copy(self):
        return BinaryDyBMOriginalParams(
            self.b.copy(), self.U.copy(), self.V.copy(), self.lam, self.mu, self.delay
        )


@dataclass
class BinaryDyBMGeneralParams:
    """Parameters of the relaxed DyBM energy

    :param b: bias (length N)
    :param W: stack of d-1 lag matrices, ``W[delta-1]`` multiplies x at t-delta
    :param U: stack of L trace matrices
    :param lambdas: L decay rates, one per trace matrix
    """

    b: np.ndarray
    W: np.ndarray
    U: np.ndarray
    lambdas: np.ndarray

    def __post_init__(self):
        self.b = np.array(self.b, dtype=np.float64).reshape(-1)
        size = self.b.shape[0]
        self.lambdas = np.array(
            [_check_decay(decay) for decay in np.asarray(self.lambdas, dtype=np.float64).reshape(-1)]
        )
        W = np.asarray(self.W, dtype=np.float64)
        self.W = _check_stack(W, W.shape[0] if W.ndim == 3 else 0, size, "W")
        self.U = _check_stack(self.U, self.lambdas.shape[0], size, "U")

    @classmethod
    def zeros(cls, size: int, delay: int, lambdas: Sequence[float]):
        if int(delay) < 1:
            raise InvalidParameterError("Conduction delay must be >= 1")
        lambdas = list(lambdas)
        return cls(
            np.zeros(size),
            np.zeros((int(delay) - 1, size, size)),
            np.zeros((len(lambdas), size, size)),
            lambdas,
        )

    @property
    def n_units(self) -> int:
        return self.b.shape[0]

    @property
    def delay(self) -> int:
        return self.W.shape[0] + 1

    @property
    def n_traces(self) -> int:
        return self.U.shape[0]

    def copy(self):
        return BinaryDyBMGeneralParams(
            self.b.copy(), self.W.copy(), self.U.copy(), self.lambdas.copy()
        )


def compute_mean_general(params, line: DelayLine, traces: Sequence[TraceVector]) -> np.ndarray:
    """negative energy ``m`` of every unit under the relaxed energy

    ``m = b + sum_delta x[t-delta] W[delta] + sum_l alpha_l U_l``. Any
    parameter object exposing ``b``, ``W``, ``U`` and ``lambdas`` is accepted.

    :param params: relaxed parameters
    :param line: delay line at t-1
    :type line: DelayLine
    :param traces: L traces at t-1, ``traces[l]`` with decay ``lambdas[l]``
    :type traces: list
    :return: m at t
    :rtype: numpy.ndarray
    """

    size = params.b.shape[0]
    if line.size != size or line.capacity != params.W.shape[0]:
        raise DimensionError(
            "Delay line of shape "
            + str(line.slots.shape)
            + " does not match "
            + str(params.W.shape[0])
            + " lag matrices for "
            + str(size)
            + " units"
        )
    if len(traces) != params.U.shape[0]:
        raise DimensionError(
            "Expected " + str(params.U.shape[0]) + " traces, got " + str(len(traces))
        )
    for trace, decay in zip(traces, params.lambdas):
        if trace.size != size:
            raise DimensionError("Trace length does not match the number of units")
        if trace.decay != decay:
            raise InvalidParameterError(
                "Trace decay " + str(trace.decay) + " does not match " + str(decay)
            )
    m = params.b.copy()
    if line.capacity > 0:
        m += np.einsum("kn,knm->m", line.slots, params.W)
    if len(traces) > 0:
        alphas = np.stack([trace.values for trace in traces])
        m += np.einsum("ln,lnm->m", alphas, params.U)
    return m


def energy_general(params: BinaryDyBMGeneralParams, x_t, line: DelayLine, traces) -> float:
    """total energy ``-m . x`` under the relaxed form"""

    x_t = _as_pattern(x_t, params.n_units)
    return float(-compute_mean_general(params, line, traces) @ x_t)


def _beta_values(params: BinaryDyBMOriginalParams, line: DelayLine) -> np.ndarray:
    if line.capacity == 0:
        return np.zeros(line.size)
    return compute_beta(line, params.mu).values


def compute_mean_original(
    params: BinaryDyBMOriginalParams, line: DelayLine, alpha: TraceVector, gamma: TraceVector
) -> np.ndarray:
    """negative energy ``m`` under the original energy

    ``m_j = b_j + sum_i u_ij alpha_i - sum_i v_ij beta_i - sum_k v_jk gamma_k``
    """

    size = params.n_units
    if line.size != size or line.capacity != params.delay - 1:
        raise DimensionError("Delay line does not match the model")
    if alpha.size != size or gamma.size != size:
        raise DimensionError("Trace length does not match the number of units")
    beta = _beta_values(params, line)
    return params.b + alpha.values @ params.U - beta @ params.V - params.V @ gamma.values


def energy_original(
    params: BinaryDyBMOriginalParams,
    x_t,
    line: DelayLine,
    alpha: TraceVector,
    gamma: TraceVector,
) -> float:
    """total energy of the original DyBM

    ``E = -b.x - alpha' U x + beta' V x + x' V gamma``

    :raises DomainError: if ``x_t`` is not binary
    """

    x_t = check_binary(x_t, params.n_units)
    beta = _beta_values(params, line)
    return float(
        -params.b @ x_t
        - alpha.values @ params.U @ x_t
        + beta @ params.V @ x_t
        + x_t @ params.V @ gamma.values
    )


def reduce_original_to_general(params: BinaryDyBMOriginalParams) -> BinaryDyBMGeneralParams:
    """map original parameters to the relaxed form with L=2

    ``W[delta] = -mu**-delta V - mu**delta V'``, ``U_1 = U`` with decay lambda,
    ``U_2 = -mu**d V'`` with decay mu. Both traces are lagged traces,
    ``alpha = sum_{s<=t-d} decay**(t-s-d) x[s]``.

    :raises InvalidParameterError: if mu is 0
    """

    mu = params.mu
    if mu <= 0.0:
        raise InvalidParameterError("Reduction requires mu > 0")
    deltas = np.arange(1, params.delay, dtype=np.float64)
    W = (
        -(mu ** -deltas)[:, None, None] * params.V[None, :, :]
        - (mu ** deltas)[:, None, None] * params.V.T[None, :, :]
    )
    if params.delay == 1:
        W = np.zeros((0, params.n_units, params.n_units))
    U = np.stack([params.U, -(mu ** params.delay) * params.V.T])
    return BinaryDyBMGeneralParams(params.b.copy(), W, U, [params.lam, mu])


def firing_probability(m, x) -> np.ndarray:
    """probability of each unit taking the value in ``x`` given ``m``

    ``P_j(x_j) = exp(m_j x_j) / (1 + exp(m_j))``
    """

    m = np.asarray(m, dtype=np.float64)
    x = check_binary(x, m.shape[0])
    p1 = sigmoid(m)
    return np.where(x == 1.0, p1, 1.0 - p1)


def log_likelihood(m, x) -> float:
    """sum of the per-unit log probabilities ``m_j x_j - log(1 + exp(m_j))``"""

    m = np.asarray(m, dtype=np.float64)
    x = check_binary(x, m.shape[0])
    return float(np.sum(m * x - np.logaddexp(0.0, m)))


class OriginalState:
    """Recursive state of the original DyBM: delay line, alpha and gamma"""

    __slots__ = ("line", "alpha", "gamma")

    def __init__(self, line: DelayLine, alpha: TraceVector, gamma: TraceVector):
        self.line = line
        self.alpha = alpha
        self.gamma = gamma

    @classmethod
    def zeros(cls, params: BinaryDyBMOriginalParams) -> "OriginalState":
        size = params.n_units
        return cls(
            DelayLine.zeros(size, params.delay),
            TraceVector.zeros(size, params.lam),
            TraceVector.zeros(size, params.mu),
        )

    def advance(self, pattern) -> "OriginalState":
        line, evicted = push_delay_line(self.line, pattern)
        return OriginalState(
            line,
            update_synaptic_trace(self.alpha, evicted),
            update_neural_trace(self.gamma, pattern),
        )

    def copy(self) -> "OriginalState":
        return OriginalState(self.line.copy(), self.alpha.copy(), self.gamma.copy())


def _mean_of(params, state) -> np.ndarray:
    if isinstance(params, BinaryDyBMOriginalParams):
        return compute_mean_original(params, state.line, state.alpha, state.gamma)
    return compute_mean_general(params, state.line, state.traces)


def sample_step(params, state, seed=None) -> np.ndarray:
    """draw the next pattern, every unit independently given the history

    :param params: original or relaxed parameters
    :param state: matching :class:`OriginalState` or :class:`DyBMState`
    :param seed: seed or ``numpy.random.Generator``
    :return: binary pattern
    :rtype: numpy.ndarray
    """

    rng = np.random.default_rng(seed)
    p1 = sigmoid(_mean_of(params, state))
    return (rng.random(p1.shape[0]) < p1).astype(np.float64)


def stdp_update(
    params: BinaryDyBMOriginalParams, state: OriginalState, x_t, eta: float
) -> BinaryDyBMOriginalParams:
    """one STDP learning step of the original DyBM

    The expected pattern is the exact firing probability computed before
    ``x_t`` is seen. Both LTD terms are applied in the same step.

    :param params: parameters at t-1
    :param state: state at t-1 (alpha, beta via the delay line, gamma)
    :param x_t: observed binary pattern at t
    :param eta: learning rate
    :return: updated parameters
    :rtype: BinaryDyBMOriginalParams
    """

    x_t = check_binary(x_t, params.n_units)
    expected = sigmoid(compute_mean_original(params, state.line, state.alpha, state.gamma))
    residual = x_t - expected
    beta = _beta_values(params, state.line)
    updated = params.copy()
    updated.b += eta * residual
    updated.U += eta * np.outer(state.alpha.values, residual)
    updated.V += eta * np.outer(beta, -residual)
    updated.V += eta * np.outer(-residual, state.gamma.values)
    return updated


def general_update(
    params: BinaryDyBMGeneralParams, state: DyBMState, x_t, eta: float
) -> BinaryDyBMGeneralParams:
    """one gradient-ascent step on the log-likelihood of the relaxed DyBM

    Every weight moves by ``eta * (x_j - sigmoid(m_j)) * feature_i``.
    """

    x_t = check_binary(x_t, params.n_units)
    residual = x_t - sigmoid(compute_mean_general(params, state.line, state.traces))
    updated = params.copy()
    updated.b += eta * residual
    if params.W.shape[0] > 0:
        updated.W += eta * state.line.slots[:, :, None] * residual[None, None, :]
    if params.U.shape[0] > 0:
        updated.U += eta * state.trace_matrix()[:, :, None] * residual[None, None, :]
    return updated


class BinaryDyBM:
    """Binary DyBM in the relaxed form, learned online

    :param n_units: number of units N
    :type n_units: int
    :param delay: conduction delay d
    :type delay: int
    :param lambdas: decay rates of the L traces
    :type lambdas: list
    :param mode: how the traces are fed
    :type mode: TraceMode, optional
    :param eta: learning rate
    :type eta: float, optional
    :param params: initial parameters, zero by default
    :type params: BinaryDyBMGeneralParams, optional
    """

    def __init__(
        self,
        n_units: int,
        delay: int,
        lambdas: Sequence[float] = (),
        mode: Union[TraceMode, str] = TraceMode.SYNAPTIC,
        eta: float = 0.01,
        params: Optional[BinaryDyBMGeneralParams] = None,
    ):
        self.params = (
            params.copy()
            if params is not None
            else BinaryDyBMGeneralParams.zeros(n_units, delay, lambdas)
        )
        self.state = DyBMState.zeros(
            self.params.n_units, self.params.delay, self.params.lambdas, mode
        )
        self.eta = eta

    def mean(self) -> np.ndarray:
        return compute_mean_general(self.params, self.state.line, self.state.traces)

    def predict(self) -> np.ndarray:
        """firing probability of every unit at the next step"""

        return sigmoid(self.mean())

    def log_likelihood(self, x) -> float:
        return log_likelihood(self.mean(), x)

    def observe(self, x) -> None:
        self.state = advance_state(self.state, check_binary(x, self.params.n_units))

    def learn(self, x) -> np.ndarray:
        """update the parameters on ``x`` then advance the state

        :return: the firing probabilities predicted before the update
        :rtype: numpy.ndarray
        """

        prediction = self.predict()
        self.params = general_update(self.params, self.state, x, self.eta)
        self.observe(x)
        return prediction

    def sample(self, seed=None) -> np.ndarray:
        return sample_step(self.params, self.state, seed)

    def generate(self, steps: int, seed=None) -> np.ndarray:
        """sample ``steps`` patterns, feeding each one back into the state"""

        rng = np.random.default_rng(seed)
        patterns = np.zeros((steps, self.params.n_units))
        for t in range(steps):
            patterns[t] = self.sample(rng)
            self.observe(patterns[t])
        return patterns

    def copy(self) -> "BinaryDyBM":
        other = BinaryDyBM.__new__(BinaryDyBM)
        other.params = self.params.copy()
        other.state = self.state.copy()
        other.eta = self.eta
        return other


class OriginalBinaryDyBM:
    """Binary DyBM with the original LTP/LTD energy, learned by STDP

    :param params: initial parameters
    :type params: BinaryDyBMOriginalParams
    :param eta: learning rate
    :type eta: float, optional
    """

    def __init__(self, params: BinaryDyBMOriginalParams, eta: float = 0.01):
        self.params = params.copy()
        self.state = OriginalState.zeros(self.params)
        self.eta = eta

    def mean(self) -> np.ndarray:
        return compute_mean_original(
            self.params, self.state.line, self.state.alpha, self.state.gamma
        )

    def predict(self) -> np.ndarray:
        return sigmoid(self.mean())

    def energy(self, x) -> float:
        return energy_original(
            self.params, x, self.state.line, self.state.alpha, self.state.gamma
        )

    def log_likelihood(self, x) -> float:
        return log_likelihood(self.mean(), x)

    def observe(self, x) -> None:
        self.state = self.state.advance(check_binary(x, self.params.n_units))

    def learn(self, x) -> np.ndarray:
        prediction = self.predict()
        self.params = stdp_update(self.params, self.state, x, self.eta)
        self.observe(x)
        return prediction

    def copy(self) -> "OriginalBinaryDyBM":
        other = OriginalBinaryDyBM(self.params, self.eta)
        other.state = self.state.copy()
        return other

    def to_general(self) -> BinaryDyBM:
        """equivalent relaxed model (L=2) starting from an empty history

        The synaptic trace alpha equals lambda times the lagged trace with the
        same decay, so U_1 is scaled by lambda on the lagged state.
        """

        params = reduce_original_to_general(self.params)
        params.U[0] = self.params.lam * params.U[0]
        general = BinaryDyBM(
            self.params.n_units,
            self.params.delay,
            mode=TraceMode.LAGGED,
            eta=self.eta,
            params=params,
        )
        logging.debug("Reduced original DyBM to the relaxed form with L=2")
        return general
