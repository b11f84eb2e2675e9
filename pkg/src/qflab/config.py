"""Experiment configuration: strict JSON schema, named presets, quick variants.

Configs are plain dataclasses resolved from JSON.  Validation is strict:
unknown keys anywhere are rejected, as are out-of-range values, so a typo'd
field fails the run before any artifact is written.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

from .errors import ConfigurationError

TWO_PI = 2.0 * math.pi

EXPERIMENTS = ("attack", "landscape", "train", "spectrum", "bounds", "classical")


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ConfigurationError(message)


def _check_keys(data: dict, allowed, where: str) -> None:
    unknown = set(data) - set(allowed)
    _require(not unknown, f"unknown field(s) in {where}: {sorted(unknown)}")


def _build(cls, data: dict, where: str):
    if not isinstance(data, dict):
        raise ConfigurationError(f"{where} must be an object")
    _check_keys(data, cls.__dataclass_fields__, where)
    try:
        return cls(**data)
    except TypeError as exc:
        raise ConfigurationError(f"invalid {where}: {exc}") from None


@dataclass(frozen=True)
class ModelConfig:
    n: int = 1
    m: int = 3
    layers: int = None  # None: smallest overparameterized depth
    gamma: float = TWO_PI
    prefactor_base: int = 5
    entangler: str = "ring"

    def validate(self):
        _require(self.n >= 1 and self.m >= 1, "model.n and model.m must be >= 1")
        _require(self.layers is None or self.layers >= 1, "model.layers must be >= 1")

    def build(self):
        from .ansatz import AnsatzSpec, min_layers_for_overparameterization
        from .encoding import EncodingSpec
        from .qmodel import ModelSpec

        num_qubits = self.n * self.m
        layers = self.layers
        if layers is None:
            layers = min_layers_for_overparameterization(num_qubits)
        return ModelSpec(
            EncodingSpec(n=self.n, m=self.m, gamma=self.gamma,
                         prefactor_base=self.prefactor_base),
            AnsatzSpec(num_qubits=num_qubits, layers=layers, entangler=self.entangler),
        )


@dataclass(frozen=True)
class AttackSection:
    iterations: int = 60
    learning_rate: float = 0.01
    num_experiments: int = 100
    attempts_per_experiment: int = 10
    epsilon_count: int = 50

    def validate(self):
        _require(self.iterations >= 1, "attack.iterations must be >= 1")
        _require(self.learning_rate > 0, "attack.learning_rate must be positive")
        _require(self.num_experiments >= 1 and self.attempts_per_experiment >= 1,
                 "attack trial counts must be >= 1")
        _require(self.epsilon_count >= 2, "attack.epsilon_count must be >= 2")


@dataclass(frozen=True)
class LandscapeSection:
    m_values: tuple = (1, 2, 3, 4)
    seeds: int = 10
    resolution_multiplier: int = 10

    def validate(self):
        _require(len(self.m_values) >= 1, "landscape.m_values must be non-empty")
        _require(all(1 <= int(m) <= 5 for m in self.m_values),
                 "landscape.m_values must lie in [1, 5]")
        _require(self.seeds >= 1, "landscape.seeds must be >= 1")
        _require(self.resolution_multiplier >= 10,
                 "landscape.resolution_multiplier must be >= 10 (Nyquist floor)")


@dataclass(frozen=True)
class TrainSection:
    epochs: int = 400
    clients: int = 1
    samples_per_client: int = 30
    batch_size: int = 10
    learning_rate: float = 0.01
    optimizer: str = "adam"
    target: str = "cosine_0p7"
    target_table: tuple = None  # ((angle, value), ...) for target == "custom"
    snapshot_epochs: tuple = (0, 20, 100, 400)
    track_landscape: bool = True
    attack_target_angle: float = 1.6371

    def validate(self):
        _require(self.epochs >= 0, "train.epochs must be >= 0")
        _require(self.clients >= 1, "train.clients must be >= 1")
        _require(1 <= self.batch_size <= self.samples_per_client,
                 "train.batch_size must be in [1, samples_per_client]")
        _require(self.optimizer in ("sgd", "adam"), "train.optimizer must be sgd or adam")
        _require(self.target in ("cosine_0p7", "line", "custom"),
                 "train.target must be cosine_0p7, line, or custom")
        if self.target == "custom":
            _require(self.target_table is not None and len(self.target_table) >= 2,
                     "train.target_table needs at least two (angle, value) rows")


@dataclass(frozen=True)
class SpectrumSection:
    m_values: tuple = (1, 2, 3)
    seeds_per_m: int = 3

    def validate(self):
        _require(all(1 <= int(m) <= 3 for m in self.m_values),
                 "spectrum.m_values must lie in [1, 3]")
        _require(self.seeds_per_m >= 1, "spectrum.seeds_per_m must be >= 1")


@dataclass(frozen=True)
class BoundsSection:
    n_values: tuple = (1, 2)
    m_values: tuple = (1, 2, 3, 4, 5, 6)

    def validate(self):
        _require(all(int(n) >= 1 for n in self.n_values), "bounds.n_values must be >= 1")
        _require(all(1 <= int(m) <= 12 for m in self.m_values),
                 "bounds.m_values must lie in [1, 12]")


@dataclass(frozen=True)
class ClassicalSection:
    input_dim: int = 10
    num_classes: int = 5
    trials: int = 100

    def validate(self):
        _require(self.input_dim >= 1 and self.num_classes >= 2,
                 "classical layer needs input_dim >= 1 and num_classes >= 2")
        _require(self.trials >= 1, "classical.trials must be >= 1")


_SECTION_TYPES = {
    "model": ModelConfig,
    "attack": AttackSection,
    "landscape": LandscapeSection,
    "train": TrainSection,
    "spectrum": SpectrumSection,
    "bounds": BoundsSection,
    "classical": ClassicalSection,
}

_REQUIRED_SECTIONS = {
    "attack": ("model", "attack"),
    "landscape": ("landscape",),
    "train": ("model", "train"),
    "spectrum": ("spectrum",),
    "bounds": ("bounds",),
    "classical": ("classical",),
}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    seed: int
    out_dir: str = None
    preset: str = None
    quick: bool = False
    model: ModelConfig = None
    attack: AttackSection = None
    landscape: LandscapeSection = None
    train: TrainSection = None
    spectrum: SpectrumSection = None
    bounds: BoundsSection = None
    classical: ClassicalSection = None

    def validate(self):
        _require(self.experiment in EXPERIMENTS,
                 f"experiment must be one of {EXPERIMENTS}, got {self.experiment!r}")
        _require(isinstance(self.seed, int), "seed must be an integer")
        for name in _REQUIRED_SECTIONS[self.experiment]:
            _require(getattr(self, name) is not None,
                     f"experiment {self.experiment!r} requires the {name!r} section")
        for name in _SECTION_TYPES:
            section = getattr(self, name)
            if section is not None:
                section.validate()
        return self

    def to_dict(self) -> dict:
        out = {"experiment": self.experiment, "seed": self.seed,
               "out_dir": self.out_dir, "preset": self.preset, "quick": self.quick}
        for name in _SECTION_TYPES:
            section = getattr(self, name)
            out[name] = asdict(section) if section is not None else None
        return out


def config_from_dict(data: dict) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigurationError("config root must be a JSON object")
    allowed = ("experiment", "seed", "out_dir", "preset", "quick", *_SECTION_TYPES)
    _check_keys(data, allowed, "config")
    _require("experiment" in data, "missing required field 'experiment'")
    _require("seed" in data, "missing required field 'seed'")
    kwargs = {k: data[k] for k in ("experiment", "seed", "out_dir", "preset", "quick")
              if k in data}
    for name, cls in _SECTION_TYPES.items():
        if data.get(name) is not None:
            section = data[name]
            for key, value in list(section.items()) if isinstance(section, dict) else []:
                if isinstance(value, list):
                    section[key] = tuple(tuple(v) if isinstance(v, list) else v
                                         for v in value)
            kwargs[name] = _build(cls, section, f"config.{name}")
    return ExperimentConfig(**kwargs).validate()


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise ConfigurationError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config file {path} is not valid JSON: {exc}") from None
    return config_from_dict(data)


# ---------------------------------------------------------------------------
# named presets for the reproduction experiments

def _preset_dict(name: str) -> dict:
    presets = {
        # repeated gradient-inversion protocol, high tower (privacy holds)
        "fig3": {
            "experiment": "attack", "seed": 20240 + 3,
            "model": {"n": 1, "m": 3},
            "attack": {"iterations": 60, "num_experiments": 100,
                       "attempts_per_experiment": 10},
        },
        # same protocol at m=1 (privacy degrades)
        "fig3_m1": {
            "experiment": "attack", "seed": 20240 + 3,
            "model": {"n": 1, "m": 1},
            "attack": {"iterations": 60, "num_experiments": 100,
                       "attempts_per_experiment": 10},
        },
        # landscape census; emits both the minima-count and valley-width fits
        "fig4": {
            "experiment": "landscape", "seed": 20240 + 4,
            "landscape": {"m_values": (1, 2, 3, 4), "seeds": 10},
        },
        # trained model, straight-line target, high tower
        "fig8": {
            "experiment": "train", "seed": 20240 + 8,
            "model": {"n": 1, "m": 4},
            "train": {"target": "line", "epochs": 400,
                      "snapshot_epochs": (0, 20, 100, 400)},
        },
        # trained model, cosine target, low tower (landscape simplifies)
        "fig9": {
            "experiment": "train", "seed": 20240 + 9,
            "model": {"n": 1, "m": 2},
            "train": {"target": "cosine_0p7", "epochs": 400,
                      "snapshot_epochs": (0, 100, 400)},
        },
        # trained model, cosine target, high tower (landscape persists)
        "fig10": {
            "experiment": "train", "seed": 20240 + 10,
            "model": {"n": 1, "m": 4},
            "train": {"target": "cosine_0p7", "epochs": 400,
                      "snapshot_epochs": (0, 100, 400)},
        },
        "spectrum": {
            "experiment": "spectrum", "seed": 20240 + 52,
            "spectrum": {"m_values": (1, 2, 3), "seeds_per_m": 3},
        },
        "bounds": {
            "experiment": "bounds", "seed": 20240 + 53,
            "bounds": {},
        },
        "classical": {
            "experiment": "classical", "seed": 20240 + 33,
            "classical": {"input_dim": 10, "num_classes": 5, "trials": 100},
        },
    }
    # figure 7 shares the census runs of figure 4; figures 5 and 6 render its
    # per-profile and distance artifacts
    for alias in ("fig5", "fig6", "fig7"):
        presets[alias] = dict(presets["fig4"])
    if name not in presets:
        raise ConfigurationError(
            f"unknown preset {name!r}; available: {sorted(presets)}"
        )
    return json.loads(json.dumps(presets[name]))  # deep copy, JSON-clean


def _apply_quick(data: dict) -> dict:
    experiment = data["experiment"]
    if experiment == "attack":
        data["attack"].update({"num_experiments": 10, "attempts_per_experiment": 5})
        if data["model"].get("m", 3) == 1:
            # full-reach smoke tier: enough steps to cross the whole circle
            data["attack"]["iterations"] = 400
    elif experiment == "landscape":
        data["landscape"].update({"m_values": [1, 2], "seeds": 3})
    elif experiment == "train":
        data["train"]["epochs"] = 40
        data["train"]["snapshot_epochs"] = [0, 20, 40]
    elif experiment == "spectrum":
        data["spectrum"].update({"m_values": [1, 2], "seeds_per_m": 2})
    elif experiment == "classical":
        data["classical"]["trials"] = 20
    return data


def preset_config(name: str, quick: bool = False, seed: int = None,
                  out_dir: str = None) -> ExperimentConfig:
    data = _preset_dict(name)
    if quick:
        data = _apply_quick(data)
    data["preset"] = name
    data["quick"] = bool(quick)
    if seed is not None:
        data["seed"] = seed
    if out_dir is not None:
        data["out_dir"] = out_dir
    return config_from_dict(data)
