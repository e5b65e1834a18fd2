"""Pipeline configuration: nested dataclasses loaded from JSON with strict key checking."""

from __future__ import annotations

import json
import types
import typing
from dataclasses import asdict, dataclass, fields, is_dataclass, replace
from pathlib import Path

from .classify.mlp import MlpConfig
from .classify.tree import TreeConfig
from .denoise import DenoiseConfig
from .diarize import DiarizeConfig
from .errors import ConfigError
from .features.vector import FeatureConfig
from .vad import VadConfig

MODES = ("analyze", "train-tree", "train-mlp", "evaluate", "features")


@dataclass(frozen=True)
class ModelPaths:
    environment: str = "environment_tree.json"
    mood: str = "mood_mlp.json"


@dataclass(frozen=True)
class PipelineConfig:
    mode: str = "analyze"
    seed: int = 0
    jobs: int = 1
    vad: VadConfig = VadConfig()
    denoise: DenoiseConfig = DenoiseConfig()
    diarize: DiarizeConfig = DiarizeConfig()
    features: FeatureConfig = FeatureConfig()
    tree: TreeConfig = TreeConfig()
    mlp: MlpConfig = MlpConfig()
    models: ModelPaths = ModelPaths()

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        if self.features.jitter_divisor not in ("M", "M-1"):
            raise ConfigError("features.jitter_divisor must be 'M' or 'M-1'")

    @property
    def diarize_cfg(self) -> DiarizeConfig:
        """Diarization settings with the top-level seed applied."""
        return replace(self.diarize, seed=self.seed)

    @property
    def mlp_cfg(self) -> MlpConfig:
        return replace(self.mlp, seed=self.seed)

    def to_dict(self) -> dict:
        return asdict(self)


def _coerce(tp, value, where: str):
    origin = typing.get_origin(tp)
    if is_dataclass(tp):
        if not isinstance(value, dict):
            raise ConfigError(f"{where}: expected an object")
        return build(tp, value, where)
    if origin is tuple:
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"{where}: expected a list")
        inner = typing.get_args(tp)[0]
        return tuple(_coerce(inner, v, f"{where}[{i}]") for i, v in enumerate(value))
    if origin in (typing.Union, types.UnionType):
        args = [a for a in typing.get_args(tp) if a is not type(None)]
        if value is None:
            return None
        return _coerce(args[0], value, where)
    if tp is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where}: expected a number")
        return float(value)
    if tp is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where}: expected an integer")
        return value
    if tp is str:
        if not isinstance(value, str):
            raise ConfigError(f"{where}: expected a string")
        return value
    if tp is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{where}: expected true/false")
        return value
    return value


def build(cls, data: dict, where: str = "config"):
    """Instantiate dataclass ``cls`` from ``data``, rejecting unknown keys."""
    hints = typing.get_type_hints(cls)
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {', '.join(unknown)}")
    kwargs = {k: _coerce(hints[k], v, f"{where}.{k}") for k, v in data.items()}
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def load_config(path: str | Path | None = None, **overrides) -> PipelineConfig:
    data: dict = {}
    if path is not None:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: top level must be an object")
    data.update({k: v for k, v in overrides.items() if v is not None})
    return build(PipelineConfig, data)
