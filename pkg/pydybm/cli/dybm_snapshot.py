# coding: utf-8

import logging
from typing import Any, Dict, Optional, Tuple

import numpy as np
import yaml

from pydybm.models.dybm_gaussian import GaussianDyBM, GaussianDyBMParams
from pydybm.models.dybm_trace import DelayLine, DyBMState, TraceVector
from pydybm.optimizers.dybm_adagrad import AdaGrad, AdaGradState, ConstantRate
from pydybm.utils.constants import SNAPSHOT_VERSION, ModelKind, OptimizerKind, TraceMode, UpdateRule
from pydybm.utils.exceptions import DyBMError, SnapshotError


def _array(values, shape) -> np.ndarray:
    return np.array(values, dtype=np.float64).reshape(shape)


def _optimizer_to_dict(optimizer) -> Dict[str, Any]:
    if isinstance(optimizer, AdaGrad):
        return {
            "kind": OptimizerKind.ADAGRAD.value,
            "eta0": float(optimizer.state.eta0),
            "epsilon": float(optimizer.state.epsilon),
            "accum": {name: value.tolist() for name, value in optimizer.state.accum.items()},
        }
    return {"kind": OptimizerKind.CONSTANT.value, "eta0": float(optimizer.eta0)}


def _optimizer_from_dict(data: Dict[str, Any], shapes: Dict[str, tuple]):
    kind = OptimizerKind(data["kind"])
    if kind == OptimizerKind.CONSTANT:
        return ConstantRate(float(data["eta0"]))
    optimizer = AdaGrad(float(data["eta0"]), float(data["epsilon"]))
    optimizer.state = AdaGradState(
        optimizer.state.eta0,
        optimizer.state.epsilon,
        {name: _array(value, shapes[name]) for name, value in data["accum"].items()},
    )
    return optimizer


def snapshot_to_dict(
    model: GaussianDyBM,
    model_kind: ModelKind = ModelKind.GAUSSIAN_DYBM,
    source: Optional[Dict[str, Any]] = None,
) -> Dict[str, Any]:
    """plain-data document describing a model, its state and its optimizer"""

    params = model.params
    return {
        "format_version": SNAPSHOT_VERSION,
        "model_kind": ModelKind(model_kind).value,
        "rule": model.rule.value,
        "step": int(model.step),
        "params": {
            "n_units": params.n_units,
            "delay": params.delay,
            "lambdas": params.lambdas.tolist(),
            "b": params.b.tolist(),
            "W": params.W.tolist(),
            "U": params.U.tolist(),
            "sigma2": params.sigma2.tolist(),
        },
        "state": {
            "trace_mode": model.state.mode.value,
            "line": model.state.line.slots.tolist(),
            "traces": [trace.values.tolist() for trace in model.state.traces],
        },
        "optimizer": _optimizer_to_dict(model.optimizer),
        "source": source,
    }


def snapshot_from_dict(data: Any) -> Tuple[GaussianDyBM, ModelKind, Optional[Dict[str, Any]]]:
    """rebuild a model from :func:`snapshot_to_dict` output

    :raises SnapshotError: on a version mismatch or a malformed document
    """

    if not isinstance(data, dict):
        raise SnapshotError("Snapshot is empty or not a mapping")
    version = data.get("format_version")
    if version != SNAPSHOT_VERSION:
        raise SnapshotError(
            "Unsupported snapshot format version "
            + str(version)
            + " (expected "
            + str(SNAPSHOT_VERSION)
            + ")"
        )
    try:
        model_kind = ModelKind(data["model_kind"])
        p = data["params"]
        size, delay = int(p["n_units"]), int(p["delay"])
        lambdas = [float(decay) for decay in p["lambdas"]]
        params = GaussianDyBMParams(
            _array(p["b"], (size,)),
            _array(p["W"], (delay - 1, size, size)),
            _array(p["U"], (len(lambdas), size, size)),
            lambdas,
            _array(p["sigma2"], (size,)),
        )
        s = data["state"]
        if len(s["traces"]) != len(lambdas):
            raise SnapshotError("Snapshot holds " + str(len(s["traces"])) + " traces")
        state = DyBMState(
            DelayLine(_array(s["line"], (delay - 1, size))),
            [TraceVector(_array(values, (size,)), decay) for values, decay in zip(s["traces"], lambdas)],
            TraceMode(s["trace_mode"]),
        )
        shapes = {
            "b": (size,),
            "sigma": (size,),
            "sigma2": (size,),
            "W": params.W.shape,
            "U": params.U.shape,
        }
        optimizer = _optimizer_from_dict(data["optimizer"], shapes)
        model = GaussianDyBM(
            size,
            delay,
            lambdas,
            mode=state.mode,
            rule=UpdateRule(data["rule"]),
            optimizer=optimizer,
            params=params,
        )
        model.state = state
        model.step = int(data["step"])
    except SnapshotError:
        raise
    except (KeyError, TypeError, ValueError, DyBMError) as e:
        raise SnapshotError("Corrupt snapshot: " + str(e))
    return model, model_kind, data.get("source")


def save_snapshot(
    model: GaussianDyBM,
    path: str,
    model_kind: ModelKind = ModelKind.GAUSSIAN_DYBM,
    source: Optional[Dict[str, Any]] = None,
) -> None:
    """write a YAML snapshot of ``model`` to ``path``"""

    with open(path, "w") as f:
        yaml.safe_dump(snapshot_to_dict(model, model_kind, source), f, sort_keys=False)
    logging.info("Snapshot of step " + str(model.step) + " saved to " + path)


def load_snapshot(path: str) -> Tuple[GaussianDyBM, ModelKind, Optional[Dict[str, Any]]]:
    """read a YAML snapshot

    :raises SnapshotError: if the file is missing, empty, corrupt or of another version
    :return: the model, its kind and the data source recorded at save time
    :rtype: tuple
    """

    try:
        with open(path, "r") as f:
            data = yaml.safe_load(f)
    except OSError as e:
        raise SnapshotError("Unable to read snapshot " + str(path) + ": " + str(e))
    except yaml.YAMLError as e:
        raise SnapshotError("Corrupt snapshot " + str(path) + ": " + str(e))
    model, model_kind, source = snapshot_from_dict(data)
    logging.info("Snapshot of step " + str(model.step) + " loaded from " + path)
    return model, model_kind, source
