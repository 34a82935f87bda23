# coding: utf-8

from typing import List, Sequence, Tuple

import numpy as np

from pydybm.utils.constants import TraceMode
from pydybm.utils.exceptions import DimensionError, InvalidParameterError


def _as_pattern(pattern, size: int, name: str = "pattern") -> np.ndarray:
    pattern = np.asarray(pattern, dtype=np.float64)
    if pattern.ndim == 0:
        pattern = pattern.reshape(1)
    if pattern.shape != (size,):
        raise DimensionError(
            "Expected "
            + name
            + " of length "
            + str(size)
            + ", got shape "
            + str(pattern.shape)
        )
    return pattern


def _check_decay(decay: float) -> float:
    decay = float(decay)
    if not 0.0 <= decay < 1.0:
        raise InvalidParameterError("Decay rate must lie in [0, 1), got " + str(decay))
    return decay


class TraceVector:
    """Exponentially decayed history of a layer of N units

    :param values: current trace values (length N)
    :type values: array-like
    :param decay: decay rate in [0, 1)
    :type decay: float
    """

    __slots__ = ("values", "decay")

    def __init__(self, values, decay: float):
        self.values = np.array(values, dtype=np.float64).reshape(-1)
        self.decay = _check_decay(decay)

    @classmethod
    def zeros(cls, size: int, decay: float) -> "TraceVector":
        return cls(np.zeros(size), decay)

    @property
    def size(self) -> int:
        return self.values.shape[0]

    def copy(self) -> "TraceVector":
        return TraceVector(self.values.copy(), self.decay)

    def __repr__(self):
        return "TraceVector(values=" + repr(self.values) + ", decay=" + repr(self.decay) + ")"


class DelayLine:
    """FIFO queue of the last d-1 patterns, most recent first

    Slot ``k`` (1-based) holds the pattern observed ``k`` steps ago.

    :param slots: array of shape (d-1, N)
    :type slots: numpy.ndarray
    """

    __slots__ = ("slots",)

    def __init__(self, slots):
        slots = np.array(slots, dtype=np.float64)
        if slots.ndim != 2:
            raise DimensionError("Delay line slots must be a (d-1, N) array")
        self.slots = slots

    @classmethod
    def zeros(cls, size: int, delay: int) -> "DelayLine":
        if int(delay) < 1:
            raise InvalidParameterError("Conduction delay must be >= 1, got " + str(delay))
        return cls(np.zeros((int(delay) - 1, size)))

    @property
    def capacity(self) -> int:
        return self.slots.shape[0]

    @property
    def delay(self) -> int:
        return self.capacity + 1

    @property
    def size(self) -> int:
        return self.slots.shape[1]

    def copy(self) -> "DelayLine":
        return DelayLine(self.slots.copy())

    def __repr__(self):
        return "DelayLine(slots=" + repr(self.slots) + ")"


class BetaView:
    """Summary of the spikes still travelling in the delay line

    :param values: beta values (length N)
    :type values: numpy.ndarray
    """

    __slots__ = ("values",)

    def __init__(self, values):
        self.values = np.asarray(values, dtype=np.float64)


def update_synaptic_trace(trace: TraceVector, arriving) -> TraceVector:
    """synaptic eligibility trace step: ``alpha <- decay * (alpha + arriving)``

    :param trace: trace at t-1
    :type trace: TraceVector
    :param arriving: pattern leaving the delay line (x at t-d+1)
    :type arriving: array-like
    :return: trace at t
    :rtype: TraceVector
    """

    arriving = _as_pattern(arriving, trace.size, "arriving pattern")
    return TraceVector(trace.decay * (trace.values + arriving), trace.decay)


def update_neural_trace(trace: TraceVector, fired) -> TraceVector:
    """neural eligibility trace step: ``gamma <- decay * (gamma + fired)``

    :param trace: trace at t-1
    :type trace: TraceVector
    :param fired: current pattern x at t
    :type fired: array-like
    :return: trace at t
    :rtype: TraceVector
    """

    fired = _as_pattern(fired, trace.size, "fired pattern")
    return TraceVector(trace.decay * (trace.values + fired), trace.decay)


def update_lagged_trace(trace: TraceVector, arriving) -> TraceVector:
    """lagged trace step: ``gamma <- decay * gamma + arriving``

    With ``decay=0`` the trace is exactly the lag-d pattern.
    """

    arriving = _as_pattern(arriving, trace.size, "arriving pattern")
    return TraceVector(trace.decay * trace.values + arriving, trace.decay)


def push_delay_line(line: DelayLine, pattern) -> Tuple[DelayLine, np.ndarray]:
    """push a pattern into the delay line and evict the oldest slot

    With ``d=1`` the line has no slot and the pattern passes straight through.

    :param line: delay line at t-1
    :type line: DelayLine
    :param pattern: pattern x at t
    :type pattern: array-like
    :return: the delay line at t and the evicted pattern (x at t-d+1)
    :rtype: tuple
    """

    pattern = _as_pattern(pattern, line.size)
    if line.capacity == 0:
        return DelayLine(line.slots.copy()), pattern.copy()
    evicted = line.slots[-1].copy()
    slots = np.empty_like(line.slots)
    slots[0] = pattern
    slots[1:] = line.slots[:-1]
    return DelayLine(slots), evicted


def beta_weights(mu: float, delay: int) -> np.ndarray:
    """weights ``mu**-delta`` for delta = 1..d-1"""

    mu = float(mu)
    if not 0.0 < mu < 1.0:
        raise InvalidParameterError(
            "Beta requires a decay rate in (0, 1), got " + str(mu)
        )
    return mu ** -np.arange(1, int(delay), dtype=np.float64)


def compute_beta(line: DelayLine, mu: float) -> BetaView:
    """sum of the queued patterns weighted by ``mu**-delta``

    :param line: delay line at t-1
    :type line: DelayLine
    :param mu: decay rate in (0, 1)
    :type mu: float
    :raises InvalidParameterError: if mu is not in (0, 1)
    :return: beta at t-1
    :rtype: BetaView
    """

    weights = beta_weights(mu, line.delay)
    return BetaView(weights @ line.slots)


class DyBMState:
    """Recursive state of a DyBM: a delay line plus L traces

    :param line: delay line of d-1 past patterns
    :type line: DelayLine
    :param traces: one trace per decay rate
    :type traces: list
    :param mode: how the traces are fed
    :type mode: TraceMode
    """

    __slots__ = ("line", "traces", "mode")

    def __init__(self, line: DelayLine, traces: Sequence[TraceVector], mode: TraceMode):
        self.line = line
        self.traces = list(traces)
        self.mode = TraceMode(mode)
        for trace in self.traces:
            if trace.size != line.size:
                raise DimensionError("Trace and delay line sizes differ")

    @classmethod
    def zeros(
        cls, size: int, delay: int, decays: Sequence[float], mode: TraceMode
    ) -> "DyBMState":
        return cls(
            DelayLine.zeros(size, delay),
            [TraceVector.zeros(size, decay) for decay in decays],
            mode,
        )

    @property
    def decays(self) -> List[float]:
        return [trace.decay for trace in self.traces]

    def trace_matrix(self) -> np.ndarray:
        """traces stacked into an (L, N) array"""

        if len(self.traces) == 0:
            return np.zeros((0, self.line.size))
        return np.stack([trace.values for trace in self.traces])

    def copy(self) -> "DyBMState":
        return DyBMState(
            self.line.copy(), [trace.copy() for trace in self.traces], self.mode
        )

    def advance_inplace(self, pattern: np.ndarray) -> None:
        """same transition as :func:`advance_state`, overwriting this state

        ``pattern`` must already be a float vector of the right length; no
        validation happens here.
        """

        slots = self.line.slots
        if slots.shape[0] == 0:
            evicted = pattern
        else:
            evicted = slots[-1].copy()
            slots[1:] = slots[:-1]
            slots[0] = pattern
        if self.mode == TraceMode.LAGGED:
            for trace in self.traces:
                trace.values *= trace.decay
                trace.values += evicted
        else:
            feed = pattern if self.mode == TraceMode.NEURAL else evicted
            for trace in self.traces:
                trace.values += feed
                trace.values *= trace.decay


def advance_state(state: DyBMState, pattern) -> DyBMState:
    """move the state from t-1 to t after observing ``pattern``

    :param state: state at t-1
    :type state: DyBMState
    :param pattern: pattern x at t
    :type pattern: array-like
    :return: state at t
    :rtype: DyBMState
    """

    line, evicted = push_delay_line(state.line, pattern)
    if state.mode == TraceMode.SYNAPTIC:
        traces = [update_synaptic_trace(trace, evicted) for trace in state.traces]
    elif state.mode == TraceMode.NEURAL:
        traces = [update_neural_trace(trace, pattern) for trace in state.traces]
    else:
        traces = [update_lagged_trace(trace, evicted) for trace in state.traces]
    return DyBMState(line, traces, state.mode)
