# -*- coding: utf-8 -*-
__version__ = "1.0.0"

from .models.dybm_trace import (
    TraceVector,
    DelayLine,
    BetaView,
    DyBMState,
    update_synaptic_trace,
    update_neural_trace,
    update_lagged_trace,
    push_delay_line,
    compute_beta,
    advance_state,
)
from .models.dybm_binary import (
    BinaryDyBMOriginalParams,
    BinaryDyBMGeneralParams,
    BinaryDyBM,
    OriginalBinaryDyBM,
    compute_mean_general,
    energy_original,
    energy_general,
    reduce_original_to_general,
    firing_probability,
    sample_step,
    stdp_update,
    general_update,
)
from .models.dybm_gaussian import (
    GaussianDyBMParams,
    GaussianDyBM,
    Scalar1DModel,
    predict,
    log_density,
    sgd_step,
    natural_gradient_step,
    var_baseline,
    gamma_experiment_update,
    planted_long_delay_model,
)
from .optimizers.dybm_adagrad import AdaGrad, AdaGradState, ConstantRate, adagrad_scale
from .experiment.dybm_experiment import (
    NoisySineSpec,
    ExperimentConfig,
    RunRecord,
    generate_noisy_sine,
    run_online,
    rolling_mse,
    average_runs,
    time_per_run,
    run_sweep,
)

from .utils.constants import ModelKind, TraceMode, UpdateRule, OptimizerKind
from .utils.exceptions import (
    DyBMError,
    DimensionError,
    InvalidParameterError,
    DomainError,
    BoundaryError,
    ConfigError,
    SnapshotError,
    NumericDivergenceError,
)

__all__ = [
    "TraceVector",
    "DelayLine",
    "BetaView",
    "DyBMState",
    "update_synaptic_trace",
    "update_neural_trace",
    "update_lagged_trace",
    "push_delay_line",
    "compute_beta",
    "advance_state",
    "BinaryDyBMOriginalParams",
    "BinaryDyBMGeneralParams",
    "BinaryDyBM",
    "OriginalBinaryDyBM",
    "compute_mean_general",
    "energy_original",
    "energy_general",
    "reduce_original_to_general",
    "firing_probability",
    "sample_step",
    "stdp_update",
    "general_update",
    "GaussianDyBMParams",
    "GaussianDyBM",
    "Scalar1DModel",
    "predict",
    "log_density",
    "sgd_step",
    "natural_gradient_step",
    "var_baseline",
    "gamma_experiment_update",
    "planted_long_delay_model",
    "AdaGrad",
    "AdaGradState",
    "ConstantRate",
    "adagrad_scale",
    "NoisySineSpec",
    "ExperimentConfig",
    "RunRecord",
    "generate_noisy_sine",
    "run_online",
    "rolling_mse",
    "average_runs",
    "time_per_run",
    "run_sweep",
    "ModelKind",
    "TraceMode",
    "UpdateRule",
    "OptimizerKind",
    "DyBMError",
    "DimensionError",
    "InvalidParameterError",
    "DomainError",
    "BoundaryError",
    "ConfigError",
    "SnapshotError",
    "NumericDivergenceError",
]
