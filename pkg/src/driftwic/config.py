import copy
import os
from typing import Iterable, Optional

import yaml

from driftwic.errors import ConfigError
from driftwic.model.experts import OovPolicy
from driftwic.model.matching import MatchConfig
from driftwic.model.wic_model import ModelConfig
from driftwic.training.adversarial import FgmConfig
from driftwic.training.trainer import TrainConfig

DATA_DIR_ENV = "DRIFTWIC_DATA_DIR"

DEFAULTS = {
    "data": {
        "train": None,
        "dev": None,
        "test": None,
        "augment": None,
        "glove": None,
        "oov_policy": "zero",
        "min_count": 1,
        "lowercase": True,
    },
    "model": {
        "repr_mode": "first_last",
        "d": 64,
        "n_layers": 2,
        "pos_dim": 32,
        "glove_dim": 50,
        "bilstm_hidden": 64,
        "gate_task_dim": 64,
        "mlp_hidden": 256,
        "tagger": "lexicon",
    },
    "moe": {
        "variant": "none",
        "use_pos": True,
        "use_glove": True,
    },
    "match": {
        "use_cls": True,
        "use_diff_prod": True,
    },
    "training": {
        "batch_size": 8,
        "max_len": 256,
        "lr_encoder": 1e-6,
        "lr_bilstm": 1e-4,
        "warmup_ratio": 0.1,
        "epochs": 20,
        "early_stop_patience": 5,
        "weight_decay": 0.01,
    },
    "fgm": {
        "enabled": False,
        "epsilon": 1.0,
        "norm_scope": "global",
        "perturb_experts": False,
    },
    "output_dir": "runs/default",
    "seed": 13,
}

REQUIRED = ("data.train", "data.dev")
PATH_KEYS = ("train", "dev", "test", "augment", "glove")


def _merge(base: dict, overrides: dict, prefix: str = "") -> dict:
    for key, value in overrides.items():
        dotted = prefix + str(key)
        if key not in base:
            raise ConfigError("Unknown configuration key '" + dotted + "'")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError("Configuration key '" + dotted + "' should be a section")
            _merge(base[key], value, dotted + ".")
        else:
            if isinstance(value, dict):
                raise ConfigError("Configuration key '" + dotted + "' should not be a section")
            base[key] = value
    return base


def parse_override(text: str) -> dict:
    """
    Turns a `section.key=value` flag into a nested mapping, the value is parsed as a YAML scalar
    """
    if "=" not in text:
        raise ConfigError("Override '" + text + "' should look like key=value")
    dotted, raw = text.split("=", 1)
    try:
        value = yaml.safe_load(raw) if raw else None
    except yaml.YAMLError:
        raise ConfigError("Override '" + dotted + "' has an unreadable value: " + raw)
    nested = value
    for key in reversed(dotted.strip().split(".")):
        nested = {key: nested}
    return nested


class RunConfig:
    """
    Configuration of one run: data paths, model, mixture of experts, matching layer, training and FGM
    sections, output directory and seed.
    """

    def __init__(self, values: Optional[dict] = None):
        self.values = _merge(copy.deepcopy(DEFAULTS), values or {})

    @classmethod
    def load(cls, path: Optional[str] = None, overrides: Iterable[str] = ()) -> "RunConfig":
        """
        Reads a YAML configuration file and applies the command line overrides on top of it
        Args:
            path: YAML file, None for the defaults only
            overrides: `key=value` strings, applied in order
        Returns: The configuration
        """
        values = {}
        if path is not None:
            with open(path, "r", encoding="utf-8") as f:
                try:
                    values = yaml.safe_load(f) or {}
                except yaml.YAMLError as e:
                    raise ConfigError(path + ": invalid YAML: " + str(e))
            if not isinstance(values, dict):
                raise ConfigError(path + ": the configuration should be a mapping")
        config = cls(values)
        for override in overrides:
            config = config.with_overrides(parse_override(override))
        return config

    def with_overrides(self, overrides: dict) -> "RunConfig":
        return RunConfig(_merge(copy.deepcopy(self.values), overrides))

    def get(self, dotted: str):
        value = self.values
        for key in dotted.split("."):
            value = value[key]
        return value

    @property
    def output_dir(self) -> str:
        return self.values["output_dir"]

    @property
    def seed(self) -> int:
        return self.values["seed"]

    def data_path(self, name: str) -> Optional[str]:
        """
        Resolves a data path, relative paths are taken from DRIFTWIC_DATA_DIR when it is set
        """
        path = self.values["data"][name]
        if path is None:
            return None
        base = os.getenv(DATA_DIR_ENV)
        if base and not os.path.isabs(path):
            return os.path.join(base, path)
        return path

    def oov_policy(self) -> OovPolicy:
        try:
            return OovPolicy(self.values["data"]["oov_policy"])
        except ValueError:
            raise ConfigError("data.oov_policy should be one of " +
                              ", ".join(policy.value for policy in OovPolicy))

    def require_data(self):
        for dotted in REQUIRED:
            if not self.get(dotted):
                raise ConfigError("Configuration key '" + dotted + "' is required")

    def model_config(self) -> ModelConfig:
        model = self.values["model"]
        moe = self.values["moe"]
        try:
            return ModelConfig(repr_mode=model["repr_mode"], d=model["d"], n_layers=model["n_layers"],
                               variant=moe["variant"], use_pos=moe["use_pos"], use_glove=moe["use_glove"],
                               pos_dim=model["pos_dim"], glove_dim=model["glove_dim"],
                               bilstm_hidden=model["bilstm_hidden"], gate_task_dim=model["gate_task_dim"],
                               match=MatchConfig(**self.values["match"]), mlp_hidden=model["mlp_hidden"],
                               tagger=model["tagger"], seed=self.seed)
        except ValueError as e:
            if isinstance(e, ConfigError):
                raise
            raise ConfigError("Invalid model configuration: " + str(e))

    def train_config(self) -> TrainConfig:
        return TrainConfig(seed=self.seed, **self.values["training"])

    def fgm_config(self) -> FgmConfig:
        try:
            return FgmConfig(**self.values["fgm"])
        except ValueError as e:
            if isinstance(e, ConfigError):
                raise
            raise ConfigError("Invalid fgm configuration: " + str(e))

    def as_dict(self) -> dict:
        return copy.deepcopy(self.values)

    def dump(self) -> str:
        return yaml.safe_dump(self.values, sort_keys=False)
