"""YAML run configuration: parsing, validation and round-trip serialization.

An empty file is a runnable configuration; every section falls back to the
reference defaults. Unknown keys are rejected with the dotted path of the
offending field.
"""

from __future__ import annotations

import os
import typing
from dataclasses import asdict, dataclass, field, fields

import yaml

from .environment import EnvConfig
from .errors import ConfigError
from .trainer import TrainerConfig

OUTPUT_DIR_ENV = "ALIGNLAB_OUTPUT_DIR"
MODES = ("train", "sweep", "profile", "certify")
GRAPH_KEYS = ("d_id", "beta_min", "topology")
SWEEP_PARAMETERS = ("k", "alpha", "tau_schedule", "delta_H", "lambda_reg")
TAU_KEYS = ("tau_0", "tau_min", "K_tau_steps")


@dataclass
class OutputConfig:
    directory: str = "runs/default"
    checkpoint_interval: int = 0
    figures: bool = True
    dump_trajectories: bool = False
    dump_embeddings: bool = False
    dump_diagnostics: bool = False
    dump_attention: bool = False
    dump_graph: bool = False


@dataclass
class RunConfig:
    trainer: TrainerConfig = field(default_factory=TrainerConfig)
    environment: EnvConfig = field(default_factory=EnvConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    seed: int = 0
    mode: str = "train"

    def validate(self):
        if self.mode not in MODES:
            raise ConfigError(f"must be one of {MODES}", "mode")
        if self.output.checkpoint_interval < 0:
            raise ConfigError("must be >= 0", "output.checkpoint_interval")
        self.environment.validate()
        self.trainer.validate()
        return self

    def output_dir(self):
        return os.environ.get(OUTPUT_DIR_ENV) or self.output.directory


def _coerce(value, annotation, path):
    """Check ``value`` against a simple field annotation, converting ints to floats."""
    origin = typing.get_origin(annotation)
    if origin is typing.Union or type(annotation).__name__ == "UnionType":
        args = typing.get_args(annotation)
        if value is None and type(None) in args:
            return None
        inner = [a for a in args if a is not type(None)]
        return _coerce(value, inner[0], path)
    if annotation is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"expected a boolean, got {value!r}", path)
        return value
    if annotation is int:
        if isinstance(value, bool) or not isinstance(value, int):
            if isinstance(value, float) and value.is_integer():
                return int(value)
            raise ConfigError(f"expected an integer, got {value!r}", path)
        return value
    if annotation is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"expected a number, got {value!r}", path)
        return float(value)
    if annotation is str:
        if not isinstance(value, str):
            raise ConfigError(f"expected a string, got {value!r}", path)
        return value
    return value


def _build(cls, data, section):
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("expected a mapping", section)
    hints = typing.get_type_hints(cls)
    known = {f.name for f in fields(cls)}
    kwargs = {}
    for key, value in data.items():
        path = f"{section}.{key}"
        if key not in known:
            raise ConfigError("unknown key", path)
        kwargs[key] = _coerce(value, hints[key], path)
    return cls(**kwargs)


def config_from_dict(data) -> RunConfig:
    data = {} if data is None else data
    if not isinstance(data, dict):
        raise ConfigError("top level must be a mapping")
    allowed = {"trainer", "environment", "graph", "output", "seed", "mode"}
    for key in data:
        if key not in allowed:
            raise ConfigError("unknown key", key)
    trainer_data = dict(data.get("trainer") or {})
    graph = data.get("graph") or {}
    if not isinstance(graph, dict):
        raise ConfigError("expected a mapping", "graph")
    for key, value in graph.items():
        if key not in GRAPH_KEYS:
            raise ConfigError("unknown key", f"graph.{key}")
        trainer_data[key] = value
    for key in GRAPH_KEYS:
        if key in (data.get("trainer") or {}):
            raise ConfigError("belongs in the graph section", f"trainer.{key}")
    seed = data.get("seed", 0)
    mode = data.get("mode", "train")
    cfg = RunConfig(
        trainer=_build(TrainerConfig, trainer_data, "trainer"),
        environment=_build(EnvConfig, data.get("environment"), "environment"),
        output=_build(OutputConfig, data.get("output"), "output"),
        seed=_coerce(seed, int, "seed"),
        mode=_coerce(mode, str, "mode"),
    )
    return cfg.validate()


def config_to_dict(cfg: RunConfig):
    trainer = asdict(cfg.trainer)
    graph = {key: trainer.pop(key) for key in GRAPH_KEYS}
    return {
        "seed": cfg.seed,
        "mode": cfg.mode,
        "trainer": trainer,
        "graph": graph,
        "environment": asdict(cfg.environment),
        "output": asdict(cfg.output),
    }


def _load_yaml(path):
    try:
        with open(path) as fh:
            return yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}", "file") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML: {exc}", "file") from exc


def load_config(path=None) -> RunConfig:
    if path is None:
        return RunConfig().validate()
    return config_from_dict(_load_yaml(path))


def dump_config(cfg: RunConfig, path=None):
    text = yaml.safe_dump(config_to_dict(cfg), sort_keys=False)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


@dataclass
class SweepSpec:
    parameter: str
    values: list
    seeds: list = field(default_factory=lambda: [0])
    episodes: int = 20
    metrics: list = field(default_factory=lambda: [
        "mean_r_ext", "mean_AR", "mean_harm", "mean_norm_E", "forecast_loss", "lambda_max",
    ])
    workers: int = 1
    base: RunConfig = field(default_factory=RunConfig)

    def validate(self):
        if self.parameter not in SWEEP_PARAMETERS:
            raise ConfigError(f"must be one of {SWEEP_PARAMETERS}", "sweep.parameter")
        if not self.values:
            raise ConfigError("grid must be nonempty", "sweep.values")
        if not self.seeds:
            raise ConfigError("need at least one seed", "sweep.seeds")
        if self.episodes < 1:
            raise ConfigError("must be >= 1", "sweep.episodes")
        if self.workers < 1:
            raise ConfigError("must be >= 1", "sweep.workers")
        for i, v in enumerate(self.values):
            self.cell_overrides(v, f"sweep.values[{i}]")
        return self

    def cell_overrides(self, value, path="sweep.values"):
        """Trainer-field overrides for one grid value."""
        if self.parameter == "tau_schedule":
            if isinstance(value, dict):
                bad = set(value) - set(TAU_KEYS)
                if bad:
                    raise ConfigError(f"unknown temperature keys {sorted(bad)}", path)
                return {k: _coerce(v, float, f"{path}.{k}") for k, v in value.items()}
            return {"K_tau_steps": _coerce(value, float, path)}
        if self.parameter == "k":
            return {"k": _coerce(value, int, path)}
        return {self.parameter: _coerce(value, float, path)}

    @staticmethod
    def cell_label(value):
        if isinstance(value, dict):
            return ";".join(f"{k}={value[k]}" for k in sorted(value))
        return str(value)


def sweep_from_dict(data) -> SweepSpec:
    if not isinstance(data, dict):
        raise ConfigError("sweep spec must be a mapping")
    allowed = {"parameter", "values", "seeds", "episodes", "metrics", "workers", "base"}
    for key in data:
        if key not in allowed:
            raise ConfigError("unknown key", f"sweep.{key}")
    if "parameter" not in data or "values" not in data:
        raise ConfigError("parameter and values are required", "sweep")
    seeds = data.get("seeds", [0])
    if isinstance(seeds, int) and not isinstance(seeds, bool):
        seeds = list(range(seeds))
    if not isinstance(seeds, list):
        raise ConfigError("expected a list of seeds or a count", "sweep.seeds")
    values = data["values"]
    if not isinstance(values, list):
        raise ConfigError("expected a list", "sweep.values")
    spec = SweepSpec(
        parameter=_coerce(data["parameter"], str, "sweep.parameter"),
        values=values,
        seeds=[_coerce(s, int, "sweep.seeds") for s in seeds],
        episodes=_coerce(data.get("episodes", 20), int, "sweep.episodes"),
        workers=_coerce(data.get("workers", 1), int, "sweep.workers"),
        base=config_from_dict(data.get("base") or {}),
    )
    if "metrics" in data:
        spec.metrics = list(data["metrics"])
    return spec.validate()


def load_sweep(path) -> SweepSpec:
    return sweep_from_dict(_load_yaml(path))
