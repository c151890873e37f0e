"""Experiment configuration files: strict JSON loading and round-tripping."""

from __future__ import annotations

import inspect
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .experiments import DEFAULT_TRIALS, EXPERIMENTS


class ConfigError(ValueError):
    """A config file failed to parse or violated the schema."""


_TOP_LEVEL_FIELDS = {
    "experiment": str,
    "trials": int,
    "master_seed": int,
    "out_dir": str,
    "jobs": int,
    "scale": str,
    "overrides": dict,
}

DEFAULT_MASTER_SEED = 20180607


@dataclass(frozen=True)
class ExperimentConfig:
    """A validated benchmark request.

    ``overrides`` are keyword arguments forwarded to the experiment bundle
    factory (see ``krabc.experiments``); they are validated against the
    factory signature at load time.
    """

    experiment: str
    trials: int
    master_seed: int = DEFAULT_MASTER_SEED
    out_dir: str = ""
    jobs: int = 1
    scale: str = "desk"
    overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError(f"field 'trials' must be >= 1, got {self.trials}")
        if self.jobs < 1:
            raise ConfigError(f"field 'jobs' must be >= 1, got {self.jobs}")
        if self.master_seed < 0:
            raise ConfigError(f"field 'master_seed' must be >= 0, got {self.master_seed}")
        if self.scale not in ("desk", "paper"):
            raise ConfigError(f"field 'scale' must be 'desk' or 'paper', got {self.scale!r}")
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(
                f"field 'experiment' must be one of {sorted(EXPERIMENTS)}, got {self.experiment!r}"
            )
        _validate_overrides(self.experiment, self.overrides)
        if not self.out_dir:
            object.__setattr__(self, "out_dir", os.path.join("results", self.experiment))


def _validate_overrides(experiment: str, overrides: dict):
    factory = EXPERIMENTS[experiment]
    allowed = set(inspect.signature(factory).parameters)
    required = {
        name
        for name, p in inspect.signature(factory).parameters.items()
        if p.default is inspect.Parameter.empty
    }
    for key in overrides:
        if key not in allowed:
            raise ConfigError(
                f"field 'overrides.{key}' is not accepted by experiment '{experiment}' "
                f"(accepted: {sorted(allowed)})"
            )
    missing = required - set(overrides)
    if missing:
        raise ConfigError(
            f"experiment '{experiment}' requires overrides {sorted(missing)}"
        )


def config_from_dict(payload: dict) -> ExperimentConfig:
    """Validate a parsed JSON object and fill defaults; rejects unknown keys."""
    if not isinstance(payload, dict):
        raise ConfigError(f"config root must be a JSON object, got {type(payload).__name__}")
    for key, value in payload.items():
        if key not in _TOP_LEVEL_FIELDS:
            raise ConfigError(f"unknown config field {key!r}")
        expected = _TOP_LEVEL_FIELDS[key]
        if expected is int:
            ok = isinstance(value, int) and not isinstance(value, bool)
        else:
            ok = isinstance(value, expected)
        if not ok:
            raise ConfigError(
                f"field {key!r} must be {expected.__name__}, got {type(value).__name__}"
            )
    if "experiment" not in payload:
        raise ConfigError("missing required field 'experiment'")
    experiment = payload["experiment"]
    scale = payload.get("scale", "desk")
    if scale in DEFAULT_TRIALS and experiment in DEFAULT_TRIALS[scale]:
        default_trials = DEFAULT_TRIALS[scale][experiment]
    else:
        default_trials = 5
    return ExperimentConfig(
        experiment=experiment,
        trials=payload.get("trials", default_trials),
        master_seed=payload.get("master_seed", DEFAULT_MASTER_SEED),
        out_dir=payload.get("out_dir", ""),
        jobs=payload.get("jobs", 1),
        scale=scale,
        overrides=payload.get("overrides", {}),
    )


def load_config(path) -> ExperimentConfig:
    """Load and validate an experiment config; KRABC_SEED overrides the seed."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        payload = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    cfg = config_from_dict(payload)
    env_seed = os.environ.get("KRABC_SEED")
    if env_seed is not None:
        try:
            seed = int(env_seed)
        except ValueError as exc:
            raise ConfigError(f"KRABC_SEED must be an integer, got {env_seed!r}") from exc
        cfg = ExperimentConfig(
            experiment=cfg.experiment,
            trials=cfg.trials,
            master_seed=seed,
            out_dir=cfg.out_dir,
            jobs=cfg.jobs,
            scale=cfg.scale,
            overrides=cfg.overrides,
        )
    return cfg


def config_to_dict(cfg: ExperimentConfig) -> dict:
    return {
        "experiment": cfg.experiment,
        "trials": cfg.trials,
        "master_seed": cfg.master_seed,
        "out_dir": cfg.out_dir,
        "jobs": cfg.jobs,
        "scale": cfg.scale,
        "overrides": cfg.overrides,
    }


def save_config(cfg: ExperimentConfig, path):
    Path(path).write_text(json.dumps(config_to_dict(cfg), indent=2, sort_keys=True) + "\n")
