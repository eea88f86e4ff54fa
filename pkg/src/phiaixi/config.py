"""YAML experiment configs mapped onto nested dataclasses."""
from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from .agent import AgentConfig, ExplorationConfig
from .core import ConfigError
from .featsel import RfBddConfig
from .planner import PlannerConfig
from .predicates import PoolConfig

SCHEMA_VERSION = 1
OUTPUT_ENV_VAR = "PHIAIXI_OUT"


@dataclass
class WindowConfig:
    reward: int = 5000
    actions: int = 500
    stride: int = 10


@dataclass
class ExperimentConfig:
    env: str = "rps"
    env_params: dict = field(default_factory=dict)
    agent: AgentConfig = field(default_factory=AgentConfig)
    seeds: list = field(default_factory=lambda: [0])
    steps: int = 10_000
    output_dir: str = ""
    windows: WindowConfig = field(default_factory=WindowConfig)
    schema_version: int = SCHEMA_VERSION

    def validate(self) -> None:
        if self.schema_version != SCHEMA_VERSION:
            raise ConfigError(f"unsupported schema_version {self.schema_version}; expected {SCHEMA_VERSION}")
        if not self.seeds:
            raise ConfigError("seeds must be nonempty")
        if self.steps < 1:
            raise ConfigError("steps must be at least 1")
        graph = self.env_params.get("graph_path")
        if graph and not Path(graph).exists():
            raise ConfigError(f"graph file {graph} does not exist")
        from .envs import REGISTRY

        if self.env not in REGISTRY:
            raise ConfigError(f"unknown environment {self.env!r}; known: {sorted(REGISTRY)}")
        for w in (self.windows.reward, self.windows.actions, self.windows.stride):
            if w < 1:
                raise ConfigError("windows and stride must be at least 1")
        self.agent.validate()

    def resolved_output(self) -> Path:
        root = self.output_dir or os.environ.get(OUTPUT_ENV_VAR) or "runs"
        return Path(root)


def _build(cls, data: Any, where: str):
    """Recursively instantiate dataclass ``cls`` from a mapping, rejecting unknown keys."""
    if data is None:
        return cls()
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: expected a mapping")
    fields = {f.name: f for f in dataclasses.fields(cls)}
    unknown = set(data) - set(fields)
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    kwargs = {}
    hints = {f.name: f.type for f in fields.values()}
    for key, value in data.items():
        sub = _NESTED.get((cls, key))
        if sub is not None:
            kwargs[key] = _build(sub, value, f"{where}.{key}")
        elif isinstance(value, list) and hints[key] in ("tuple", "tuple[float, float]"):
            kwargs[key] = tuple(tuple(v) if isinstance(v, list) else v for v in value)
        else:
            kwargs[key] = value
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"{where}: {exc}") from None


_NESTED = {
    (ExperimentConfig, "agent"): AgentConfig,
    (ExperimentConfig, "windows"): WindowConfig,
    (AgentConfig, "pool"): PoolConfig,
    (AgentConfig, "rfbdd"): RfBddConfig,
    (AgentConfig, "planner"): PlannerConfig,
    (AgentConfig, "exploration"): ExplorationConfig,
}


def config_from_dict(data: dict) -> ExperimentConfig:
    cfg = _build(ExperimentConfig, data, "config")
    if isinstance(cfg.agent.planner.reward_range, list):
        cfg.agent.planner.reward_range = tuple(cfg.agent.planner.reward_range)
    cfg.validate()
    return cfg


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file {path} does not exist")
    with open(path) as fh:
        try:
            data = yaml.safe_load(fh) or {}
        except yaml.YAMLError as exc:
            raise ConfigError(f"{path}: invalid YAML: {exc}") from None
    return config_from_dict(data)


def _plain(obj):
    if dataclasses.is_dataclass(obj):
        return {f.name: _plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    return obj


def config_to_dict(cfg: ExperimentConfig) -> dict:
    return _plain(cfg)


def dump_config(cfg: ExperimentConfig) -> str:
    return yaml.safe_dump(config_to_dict(cfg), sort_keys=False)
