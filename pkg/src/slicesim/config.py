"""Experiment configuration: defaults, flat dotted-key text format, overrides."""

import ast
from dataclasses import dataclass, field, fields, is_dataclass


class ConfigError(Exception):
    pass


@dataclass
class InfrastructureConfig:
    num_nodes: int = 10
    num_dcs: int = 5
    dc_capacity: float = 300.0
    ba_m: int = 2
    num_inps: int = 2


@dataclass
class SliceTypeConfig:
    num_flows: int = 180
    flow_arrival_interval_s: float = 2.0
    flow_service_time_s: float = 200.0


@dataclass
class SlicesConfig:
    num_vnfs: int = 4
    units_per_request_per_dc: float = 60.0
    type1: SliceTypeConfig = field(default_factory=lambda: SliceTypeConfig(180, 2.0, 200.0))
    type2: SliceTypeConfig = field(default_factory=lambda: SliceTypeConfig(60, 5.0, 300.0))


@dataclass
class TenantsConfig:
    request_rate_a: float = 10.0  # requests/hour
    request_rate_b: float = 12.0
    completion_rate: float = 6.0
    reward_a: float = 2.0
    reward_b: float = 2.0


@dataclass
class AgentConfig:
    gamma: float = 0.95
    alpha: float = 0.2  # tabular learning rate
    alpha_decay_tau: float = 300.0  # visit-count step decay for the Q-table
    tabular_train_episodes: int = 12000  # cheap episodes; the table needs more than the net
    learning_rate: float = 1e-3
    momentum: float = 0.9
    hidden_units: int = 64
    replay_capacity: int = 10000
    batch_size: int = 32
    target_sync: int = 200
    eps_start: float = 1.0
    eps_final: float = 0.05
    anneal_fraction: float = 0.5
    train_episodes: int = 300
    train_horizon_hours: float = 24.0


@dataclass
class AdaptationConfig:
    revenue_rate: float = 1.0
    unit_cost: float = 0.01
    op_cost: float = 0.1
    deltas: tuple = (0.0, 10.0, 20.0, -10.0)
    period_s: float = 1.0
    train_episodes: int = 150
    train_horizon_s: float = 2000.0


@dataclass
class RunConfig:
    horizon_hours: float = 48.0
    satisfaction_horizon_s: float = 2000.0
    measurement_period_s: float = 1.0
    seeds: tuple = tuple(range(1, 21))
    reward_b_sweep: tuple = (1.0, 2.0, 3.0, 4.0, 5.0, 6.0)
    vnf_sweep: tuple = (4, 8, 12, 16)


@dataclass
class ExperimentConfig:
    infrastructure: InfrastructureConfig = field(default_factory=InfrastructureConfig)
    slices: SlicesConfig = field(default_factory=SlicesConfig)
    tenants: TenantsConfig = field(default_factory=TenantsConfig)
    agent: AgentConfig = field(default_factory=AgentConfig)
    adaptation: AdaptationConfig = field(default_factory=AdaptationConfig)
    run: RunConfig = field(default_factory=RunConfig)

    @property
    def concurrency_cap(self):
        return int(self.infrastructure.dc_capacity // self.slices.units_per_request_per_dc)


def _flatten(obj, prefix=""):
    out = {}
    for f in fields(obj):
        value = getattr(obj, f.name)
        key = f"{prefix}{f.name}"
        if is_dataclass(value):
            out.update(_flatten(value, prefix=key + "."))
        else:
            out[key] = value
    return out


def serialize(config: ExperimentConfig) -> str:
    lines = []
    for key, value in sorted(_flatten(config).items()):
        lines.append(f"{key} = {value!r}")
    return "\n".join(lines) + "\n"


def _assign(config, dotted_key, raw_value):
    parts = dotted_key.split(".")
    obj = config
    for part in parts[:-1]:
        if not is_dataclass(obj) or part not in {f.name for f in fields(obj)}:
            raise ConfigError(f"unknown config key: {dotted_key}")
        obj = getattr(obj, part)
    leaf = parts[-1]
    if not is_dataclass(obj) or leaf not in {f.name for f in fields(obj)}:
        raise ConfigError(f"unknown config key: {dotted_key}")
    try:
        value = ast.literal_eval(raw_value)
    except (ValueError, SyntaxError) as e:
        raise ConfigError(f"bad value for {dotted_key}: {raw_value!r}") from e
    current = getattr(obj, leaf)
    if isinstance(current, tuple) and isinstance(value, (list, tuple)):
        value = tuple(value)
    elif isinstance(current, float) and isinstance(value, int):
        value = float(value)
    elif type(value) is not type(current):
        raise ConfigError(
            f"type mismatch for {dotted_key}: expected {type(current).__name__}")
    setattr(obj, leaf, value)


def parse(text: str) -> ExperimentConfig:
    config = ExperimentConfig()
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, _, raw = line.partition("=")
        _assign(config, key.strip(), raw.strip())
    return config


def load(path) -> ExperimentConfig:
    with open(path) as f:
        return parse(f.read())


def apply_overrides(config, overrides):
    """overrides: iterable of 'dotted.key=value' strings (the --set flag)."""
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override must be key=value, got {item!r}")
        key, _, raw = item.partition("=")
        _assign(config, key.strip(), raw.strip())
    return config
