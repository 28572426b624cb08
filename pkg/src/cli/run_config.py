"""Validated run configuration for every named experiment.

Values resolve in this order, later winning: model defaults, the
``experiments.<name>`` section of config/config.yaml, the same section (or a
flat ``<name>`` section) of a ``--config`` file, then command-line flags.
"""

from typing import Any, ClassVar, Dict, List, Optional, Tuple, Type, get_args

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..analysis import (
    DEAD_VARIANTS,
    NET_KINDS,
    RANK_MODES,
    SYMMETRY_MODES,
    ExperimentReport,
    ToyConfig,
    asymmetry_experiment,
    dead_neuron_experiment,
    isometry_experiment,
    long_stem_probe,
    loose_rank_comparison,
    mnist_experiment,
    rank_experiment,
    symmetry_experiment,
    toy_dynamics,
    variance_probe,
)
from ..analysis.classification import NETS
from ..analysis.toy import DEFAULT_INPUTS
from ..initializers.network import POLICY_METHODS
from ..micro_net import Activation
from ..micro_net.jacobian import JacobianMethod
from ..utils import Config, ConfigError

FORMATS = ("csv", "json", "both")
ACTIVATIONS = tuple(a.value for a in Activation)
JACOBIAN_METHODS = get_args(JacobianMethod)


class ExperimentParams(BaseModel):
    """Base for per-experiment parameters; unknown keys are rejected."""

    model_config = ConfigDict(extra="forbid")

    # True for experiments that train and can write their weights.
    saves_weights: ClassVar[bool] = False
    # Allowed values of string fields, checked before anything runs.
    choices: ClassVar[Dict[str, Tuple[str, ...]]] = {}

    @model_validator(mode="after")
    def _known_choices(self) -> "ExperimentParams":
        for field, allowed in self.choices.items():
            value = getattr(self, field)
            if value not in allowed:
                raise ValueError(f"{field} must be one of {allowed}, got {value!r}")
        return self

    def mode_label(self) -> str:
        return "default"

    def run(
        self, seed: int, progress: bool = False, weights_dir: Optional[str] = None
    ) -> ExperimentReport:
        raise NotImplementedError


class SymmetryParams(ExperimentParams):
    mode: str = "sgd_momentum"
    dim: int = Field(default=10, ge=1)
    depth: int = Field(default=4, ge=2)
    n_train: int = Field(default=2000, ge=1)
    n_test: int = Field(default=2000, ge=1)
    noise_std: float = Field(default=1e-2, ge=0.0)
    epochs: int = Field(default=200, ge=0)
    learning_rate: float = Field(default=2.5e-4, ge=0.0)
    momentum: float = Field(default=0.9, ge=0.0, lt=1.0)
    batch_size: int = Field(default=4, ge=1)
    snapshot_epochs: List[int] = Field(default_factory=list)

    saves_weights: ClassVar[bool] = True
    choices: ClassVar[Dict[str, Tuple[str, ...]]] = {"mode": SYMMETRY_MODES}

    def mode_label(self) -> str:
        return self.mode

    def run(
        self, seed: int, progress: bool = False, weights_dir: Optional[str] = None
    ) -> ExperimentReport:
        return symmetry_experiment(
            seed=seed, progress=progress, weights_dir=weights_dir, **self.model_dump()
        )


class RankParams(ExperimentParams):
    init: str = "idinit"
    d0: int = Field(default=8, ge=1)
    dh: int = Field(default=32, ge=2)
    dl: int = Field(default=8, ge=1)
    steps: int = Field(default=100, ge=0)
    learning_rate: float = Field(default=0.1, ge=0.0)
    loose_eps: float = Field(default=0.0, ge=0.0)

    choices: ClassVar[Dict[str, Tuple[str, ...]]] = {"init": RANK_MODES + ("loose",)}

    @model_validator(mode="after")
    def _hidden_is_widest(self) -> "RankParams":
        if self.dh <= self.d0 or self.dh <= self.dl:
            raise ValueError(f"dh={self.dh} must exceed d0={self.d0} and dl={self.dl}")
        return self

    def mode_label(self) -> str:
        return self.init

    def run(
        self, seed: int, progress: bool = False, weights_dir: Optional[str] = None
    ) -> ExperimentReport:
        if self.init == "loose":
            return loose_rank_comparison(
                self.d0, self.dh, self.dl, self.steps, seed, self.loose_eps or 1e-6, self.learning_rate
            )
        return rank_experiment(
            self.init, self.d0, self.dh, self.dl, self.steps, seed, self.learning_rate, self.loose_eps
        )


class IsometryParams(ExperimentParams):
    init: str = "idinit"
    blocks: int = Field(default=64, ge=1)
    width: int = Field(default=16, ge=1)
    activation: str = "relu"
    method: str = "auto"
    loose_eps: float = Field(default=1e-6, ge=0.0)

    choices: ClassVar[Dict[str, Tuple[str, ...]]] = {
        "init": POLICY_METHODS,
        "activation": ACTIVATIONS,
        "method": JACOBIAN_METHODS,
    }

    def mode_label(self) -> str:
        return self.init

    def run(
        self, seed: int, progress: bool = False, weights_dir: Optional[str] = None
    ) -> ExperimentReport:
        return isometry_experiment(seed=seed, **self.model_dump())


class VarianceParams(ExperimentParams):
    net_kind: str = "resfc"
    init: str = "idinit"
    noise_std: float = Field(default=0.0, ge=0.0)
    n_rounds: int = Field(default=500, ge=1)
    batch: int = Field(default=32, ge=1)
    blocks: int = Field(default=10, ge=1)
    image_size: int = Field(default=16, ge=1)
    loose_eps: float = Field(default=1e-6, ge=0.0)

    choices: ClassVar[Dict[str, Tuple[str, ...]]] = {
        "net_kind": NET_KINDS,
        "init": POLICY_METHODS + ("default",),
    }

    def mode_label(self) -> str:
        return f"{self.net_kind}_{self.init}_{self.noise_std:g}"

    def run(
        self, seed: int, progress: bool = False, weights_dir: Optional[str] = None
    ) -> ExperimentReport:
        return variance_probe(seed=seed, **self.model_dump())


class DeadNeuronParams(ExperimentParams):
    variant: str = "idiz"
    steps: int = Field(default=100, ge=0)
    width: int = Field(default=16, ge=1)
    d_out: int = Field(default=4, ge=1)
    n_samples: int = Field(default=512, ge=1)
    learning_rate: float = Field(default=0.1, ge=0.0)
    momentum: float = Field(default=0.9, ge=0.0, lt=1.0)
    batch_size: int = Field(default=32, ge=1)
    epsilon: float = Field(default=1e-6, gt=0.0)

    choices: ClassVar[Dict[str, Tuple[str, ...]]] = {"variant": DEAD_VARIANTS}

    def mode_label(self) -> str:
        return self.variant

    def run(
        self, seed: int, progress: bool = False, weights_dir: Optional[str] = None
    ) -> ExperimentReport:
        return dead_neuron_experiment(seed=seed, **self.model_dump())


class ToyParams(ExperimentParams):
    r: int = 1
    depth: int = Field(default=5, ge=1)
    lr: float = Field(default=1e-5, ge=0.0)
    w1: Optional[float] = None
    w2: Optional[float] = None
    inputs: List[float] = Field(default_factory=lambda: list(DEFAULT_INPUTS), min_length=1)
    target_scale: float = 50.0
    steps: int = Field(default=5000, ge=0)

    @field_validator("r")
    @classmethod
    def _binary(cls, value: int) -> int:
        if value not in (0, 1):
            raise ValueError(f"r must be 0 or 1, got {value}")
        return value

    def mode_label(self) -> str:
        return f"r{self.r}"

    def to_toy_config(self) -> ToyConfig:
        start = ToyConfig.default_start(self.r)
        return ToyConfig(
            r=self.r,
            depth=self.depth,
            lr=self.lr,
            w1=start.w1 if self.w1 is None else self.w1,
            w2=start.w2 if self.w2 is None else self.w2,
            inputs=tuple(self.inputs),
            target_scale=self.target_scale,
            steps=self.steps,
        )

    def run(
        self, seed: int, progress: bool = False, weights_dir: Optional[str] = None
    ) -> ExperimentReport:
        return toy_dynamics(self.to_toy_config())


class LongStemParams(ExperimentParams):
    stem_depth: int = Field(default=32, ge=1)
    init: str = "idinit"
    epochs: int = Field(default=35, ge=0)
    width: int = Field(default=16, ge=1)
    n_samples: int = Field(default=512, ge=1)
    learning_rate: float = Field(default=1e-3, ge=0.0)
    momentum: float = Field(default=0.9, ge=0.0, lt=1.0)
    batch_size: int = Field(default=32, ge=1)
    activation: str = "identity"
    snapshot_epochs: List[int] = Field(default_factory=list)

    saves_weights: ClassVar[bool] = True
    choices: ClassVar[Dict[str, Tuple[str, ...]]] = {
        "init": POLICY_METHODS,
        "activation": ACTIVATIONS,
    }

    def mode_label(self) -> str:
        return f"{self.init}_depth{self.stem_depth}"

    def run(
        self, seed: int, progress: bool = False, weights_dir: Optional[str] = None
    ) -> ExperimentReport:
        return long_stem_probe(seed=seed, weights_dir=weights_dir, **self.model_dump())


class MnistParams(ExperimentParams):
    net: str = "linear5relu"
    init: str = "idinit"
    epochs: int = Field(default=30, ge=0)
    batch_size: int = Field(default=128, ge=1)
    learning_rate: float = Field(default=0.1, ge=0.0)
    momentum: float = Field(default=0.9, ge=0.0, lt=1.0)
    weight_decay: float = Field(default=5e-4, ge=0.0)
    train_limit: Optional[int] = Field(default=10000, ge=1)
    test_limit: Optional[int] = Field(default=None, ge=1)
    data_dir: Optional[str] = None
    snapshot_epochs: List[int] = Field(default_factory=list)

    saves_weights: ClassVar[bool] = True
    choices: ClassVar[Dict[str, Tuple[str, ...]]] = {"net": tuple(NETS), "init": POLICY_METHODS}

    def mode_label(self) -> str:
        return f"{self.net}_{self.init}"

    def run(
        self, seed: int, progress: bool = False, weights_dir: Optional[str] = None
    ) -> ExperimentReport:
        return mnist_experiment(
            seed=seed, progress=progress, weights_dir=weights_dir, **self.model_dump()
        )


class AsymmetryParams(ExperimentParams):
    d: int = Field(default=64, ge=1)
    sigma: float = Field(default=1.0, ge=0.0)
    eta: float = Field(default=0.1, ge=0.0)
    n_samples: int = Field(default=20000, ge=1)
    scaling_dims: List[int] = Field(default_factory=list)

    def mode_label(self) -> str:
        return f"d{self.d}"

    def run(
        self, seed: int, progress: bool = False, weights_dir: Optional[str] = None
    ) -> ExperimentReport:
        return asymmetry_experiment(
            self.d, self.sigma, self.eta, self.n_samples, seed, tuple(self.scaling_dims)
        )


EXPERIMENTS: Dict[str, Type[ExperimentParams]] = {
    "symmetry": SymmetryParams,
    "rank": RankParams,
    "isometry": IsometryParams,
    "variance": VarianceParams,
    "deadneuron": DeadNeuronParams,
    "toy": ToyParams,
    "longstem": LongStemParams,
    "mnist": MnistParams,
    "asymmetry": AsymmetryParams,
}


class RunConfig(BaseModel):
    """One resolved experiment invocation."""

    model_config = ConfigDict(extra="forbid")

    experiment: str
    params: ExperimentParams
    seeds: List[int] = Field(default_factory=lambda: [0])
    out_dir: Optional[str] = None
    base_dir: str = "runs"
    format: str = "both"
    workers: int = Field(default=1, ge=1)
    progress: bool = False
    save_weights: bool = False

    @field_validator("experiment")
    @classmethod
    def _known_experiment(cls, value: str) -> str:
        if value not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {value!r}; expected one of {sorted(EXPERIMENTS)}")
        return value

    @field_validator("format")
    @classmethod
    def _known_format(cls, value: str) -> str:
        if value not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}, got {value!r}")
        return value

    @model_validator(mode="after")
    def _weights_supported(self) -> "RunConfig":
        if self.save_weights and not self.params.saves_weights:
            raise ValueError(f"experiment {self.experiment!r} trains no weights to save")
        return self

    def echo(self, seed: int) -> Dict[str, Any]:
        """Self-describing config for one seed; excludes the output location."""
        return {
            "experiment": self.experiment,
            "params": self.params.model_dump(mode="json"),
            "seed": seed,
            "format": self.format,
        }


def _section(config: Optional[Config], name: str) -> Dict[str, Any]:
    if config is None:
        return {}
    section = config.get_section(f"experiments.{name}") or config.get_section(name)
    return section


def resolve_run_config(
    name: str,
    defaults: Optional[Config] = None,
    file_config: Optional[Config] = None,
    overrides: Optional[Dict[str, Any]] = None,
    seeds: Optional[List[int]] = None,
    out_dir: Optional[str] = None,
    fmt: Optional[str] = None,
    workers: Optional[int] = None,
    progress: bool = False,
    save_weights: bool = False,
) -> RunConfig:
    """Merge config layers and validate.

    Raises:
        ConfigError: Unknown experiment name
        pydantic.ValidationError: Unknown keys or out-of-range values
    """
    if name not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {name!r}; expected one of {sorted(EXPERIMENTS)}")

    values: Dict[str, Any] = {}
    values.update(_section(defaults, name))
    values.update(_section(file_config, name))
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})

    if name == "mnist" and values.get("data_dir") is None:
        for layer in (file_config, defaults):
            if layer is not None and layer.get("data.data_dir"):
                values["data_dir"] = layer.get("data.data_dir")
                break

    def runs_value(key: str, explicit):
        if explicit is not None:
            return explicit
        for layer in (file_config, defaults):
            if layer is not None and layer.get(f"runs.{key}") is not None:
                return layer.get(f"runs.{key}")
        return None

    params = EXPERIMENTS[name].model_validate(values)
    run = {
        "experiment": name,
        "params": params,
        "seeds": seeds if seeds else [runs_value("seed", None) or 0],
        "out_dir": out_dir,
        "base_dir": runs_value("out_dir", None) or "runs",
        "format": runs_value("format", fmt) or "both",
        "workers": runs_value("workers", workers) or 1,
        "progress": progress,
        "save_weights": save_weights,
    }
    return RunConfig.model_validate(run)
