# coding: utf-8

import logging
import os
from typing import Any, Dict, Iterable, Optional, Union

import yaml

from pydybm.experiment.dybm_experiment import ExperimentConfig, NoisySineSpec, default_threads
from pydybm.utils.constants import (
    DEFAULT_ETA0,
    DEFAULT_MU_SWEEP,
    ModelKind,
    OptimizerKind,
    UpdateRule,
)
from pydybm.utils.exceptions import ConfigError, DyBMError


def _float_list(value) -> list:
    if isinstance(value, str):
        value = [item for item in value.split(",") if item.strip() != ""]
    if not isinstance(value, (list, tuple)):
        value = [value]
    return [float(item) for item in value]


def _int_list(value) -> list:
    return [int(item) for item in _float_list(value)]


# section -> key -> (environment variable, converter, default)
CONFIG_SCHEMA = {
    "experiment": {
        "model": ("DYBM_MODEL", str, "gaussian-dybm"),
        "d": ("DYBM_D", int, None),
        "mu": ("DYBM_MU", float, 0.9),
        "mus": ("DYBM_MUS", _float_list, list(DEFAULT_MU_SWEEP)),
        "ds": ("DYBM_DS", _int_list, [1]),
        "lambdas": ("DYBM_LAMBDAS", _float_list, []),
        "eta0": ("DYBM_ETA0", float, DEFAULT_ETA0),
        "steps": ("DYBM_STEPS", int, 10000),
        "runs": ("DYBM_RUNS", int, 100),
        "mse_window": ("DYBM_MSE_WINDOW", int, 100),
        "seed": ("DYBM_SEED", int, 0),
        "rule": ("DYBM_RULE", str, "natural"),
        "optimizer": ("DYBM_OPTIMIZER", str, "adagrad"),
        "period": ("DYBM_PERIOD", float, 100.0),
        "amplitude": ("DYBM_AMPLITUDE", float, 1.0),
        "noise_std": ("DYBM_NOISE_STD", float, 1.0),
    },
    "output": {
        "out": ("DYBM_OUT", str, "run.csv"),
        "summary": ("DYBM_SUMMARY", str, None),
        "directory": ("DYBM_OUT_DIR", str, "sweep"),
    },
    "runtime": {
        "threads": ("DYBM_THREADS", int, None),
        "log_level": ("DYBM_LOG_LEVEL", str, "info"),
    },
}


def get_config_variable(
    env_var: str,
    yaml_path: list,
    config: Optional[Dict] = None,
    isNumber: Optional[bool] = False,
) -> Union[bool, int, None, str]:
    """read a setting from the environment, then from the YAML config

    :param env_var: environment variable name
    :param yaml_path: [section, key] path in the YAML config
    :param config: parsed YAML config, defaults to an empty config
    :param isNumber: convert the value to an int, defaults to False
    :return: the value, or None when neither source defines it
    """

    if config is None:
        config = {}
    if os.getenv(env_var) is not None:
        result = os.getenv(env_var)
    elif yaml_path is not None:
        if (
            yaml_path[0] in config
            and config[yaml_path[0]] is not None
            and yaml_path[1] in config[yaml_path[0]]
        ):
            result = config[yaml_path[0]][yaml_path[1]]
        else:
            return None
    else:
        return None

    if result == "yes" or result == "true" or result == "True":
        return True
    elif result == "no" or result == "false" or result == "False":
        return False
    elif isNumber:
        try:
            return int(result)
        except (TypeError, ValueError):
            raise ConfigError("Variable " + env_var + " must be a number, got " + str(result))
    else:
        return result


def load_config_file(path: Optional[str]) -> Dict[str, Dict[str, Any]]:
    """parse a YAML config file and reject unknown sections and keys

    :param path: path of the config file, None for an empty config
    :raises ConfigError: if the file is unreadable, malformed or has unknown keys
    """

    if path is None:
        return {}
    try:
        with open(path, "r") as f:
            config = yaml.safe_load(f)
    except (OSError, yaml.YAMLError) as e:
        raise ConfigError("Unable to read config file " + str(path) + ": " + str(e))
    if config is None:
        return {}
    if not isinstance(config, dict):
        raise ConfigError("Config file must hold a mapping of sections")
    for section, values in config.items():
        if section not in CONFIG_SCHEMA:
            raise ConfigError("Unknown config section: " + str(section))
        if values is None:
            continue
        if not isinstance(values, dict):
            raise ConfigError("Config section " + section + " must be a mapping")
        for key in values:
            if key not in CONFIG_SCHEMA[section]:
                raise ConfigError("Unknown config key: " + section + "." + str(key))
    return config


def resolve_settings(
    config: Dict[str, Dict[str, Any]],
    overrides: Optional[Dict[str, Any]] = None,
    required: Iterable[str] = (),
) -> Dict[str, Any]:
    """flat settings: CLI override, then environment, then YAML, then default

    :param config: parsed YAML config
    :param overrides: values given on the command line, None when absent
    :param required: keys that have no default and must be given
    :raises ConfigError: on a missing required key or an unconvertible value
    """

    overrides = overrides or {}
    required = set(required)
    settings = {}
    for section, keys in CONFIG_SCHEMA.items():
        for key, (env_var, convert, default) in keys.items():
            value = overrides.get(key)
            if value is None:
                value = get_config_variable(env_var, [section, key], config, convert is int)
            if value is None:
                if key in required:
                    raise ConfigError("Missing required setting: " + section + "." + key)
                if default is not None:
                    logging.info(
                        "Setting " + section + "." + key + " not given, using default " + str(default)
                    )
                settings[key] = default
                continue
            try:
                settings[key] = convert(value)
            except (TypeError, ValueError):
                raise ConfigError(
                    "Invalid value for " + section + "." + key + ": " + str(value)
                )
    if settings["threads"] is None:
        settings["threads"] = default_threads()
    if settings["threads"] < 1:
        raise ConfigError("runtime.threads must be >= 1")
    return settings


def configure_logging(log_level: str) -> None:
    """set the root log level from its name

    :raises ConfigError: if the level name is unknown
    """

    numeric_level = getattr(logging, str(log_level).upper(), None)
    if not isinstance(numeric_level, int):
        raise ConfigError("Invalid log level: " + str(log_level))
    logging.basicConfig(level=numeric_level)
    logging.getLogger().setLevel(numeric_level)


def build_experiment_config(settings: Dict[str, Any], **changes) -> ExperimentConfig:
    """:class:`ExperimentConfig` from resolved settings

    :raises ConfigError: if the settings describe an invalid experiment
    """

    values = dict(settings)
    values.update(changes)
    for key, kind in (("model", ModelKind), ("rule", UpdateRule), ("optimizer", OptimizerKind)):
        if not kind.has_value(values[key]):
            raise ConfigError(
                "Unknown "
                + key
                + " "
                + str(values[key])
                + ", expected one of "
                + ", ".join(member.value for member in kind)
            )
        values[key] = str(values[key]).lower()
    try:
        return ExperimentConfig(
            model=values["model"],
            d=values["d"] if values["d"] is not None else 1,
            mu=values["mu"],
            lambdas=tuple(values["lambdas"]),
            eta0=values["eta0"],
            steps=values["steps"],
            runs=values["runs"],
            mse_window=values["mse_window"],
            seed=values["seed"],
            rule=values["rule"],
            optimizer=values["optimizer"],
            noise=NoisySineSpec(
                values["period"], values["amplitude"], values["noise_std"], values["seed"]
            ),
        )
    except (DyBMError, ValueError) as e:
        raise ConfigError("Invalid experiment configuration: " + str(e))
