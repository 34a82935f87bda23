"""These are the enumerations and numeric constants shared across pydybm.

"""
from enum import Enum, IntEnum

# Lower bound applied to every variance after an update
VARIANCE_FLOOR = 1e-8

# AdaGrad denominator stabilizer
ADAGRAD_EPSILON = 1e-8

# Initial learning rate of the noisy sine protocol
DEFAULT_ETA0 = 0.001

# Snapshot document format
SNAPSHOT_VERSION = 1

# Decay rates swept when none are given
DEFAULT_MU_SWEEP = (0.0, 0.1, 0.3, 0.5, 0.7, 0.9)

# Fraction of the rolling MSE curve averaged into the converged MSE
CONVERGED_FRACTION = 0.1

STEP_COLUMNS = ["step", "target", "prediction", "sq_error", "rolling_mse"]
SUMMARY_COLUMNS = [
    "model",
    "d",
    "mu",
    "runs",
    "steps",
    "converged_mse",
    "improvement_vs_var",
    "seconds_per_1000_steps",
]
CURVE_COLUMNS = ["step", "avg_rolling_mse"]
TIMING_COLUMNS = ["model", "d", "mu", "seconds_per_1000_steps"]


class _LookupEnum(Enum):
    @classmethod
    def has_value(cls, value):
        lower_attr = list(map(lambda x: x.lower(), cls._value2member_map_))
        return value is not None and str(value).lower() in lower_attr


class ModelKind(_LookupEnum):
    """Models the experiment harness can train.

    ``VAR`` is the Gaussian DyBM with ``mu=0``, i.e. a VAR model with ``d`` lags.
    """

    GAUSSIAN_DYBM = "gaussian-dybm"
    VAR = "var"


class TraceMode(_LookupEnum):
    """How an eligibility trace is fed at each step.

    SYNAPTIC: ``alpha <- decay * (alpha + arriving)``, fed by the pattern
    evicted from the delay line.
    NEURAL: ``gamma <- decay * (gamma + fired)``, fed by the current pattern.
    LAGGED: ``gamma <- decay * gamma + arriving``; equals the lag-d value when
    ``decay=0``.
    """

    SYNAPTIC = "synaptic"
    NEURAL = "neural"
    LAGGED = "lagged"


class UpdateRule(_LookupEnum):
    NATURAL = "natural"
    SGD = "sgd"


class OptimizerKind(_LookupEnum):
    ADAGRAD = "adagrad"
    CONSTANT = "constant"


class ExitCode(IntEnum):
    OK = 0
    CONFIG = 2
    NUMERIC = 3
    SNAPSHOT = 4
