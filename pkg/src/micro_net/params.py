"""Live network parameters and optimizer state."""

import copy
from dataclasses import dataclass, field
from typing import Dict, Iterator, Optional, Tuple

import numpy as np

from ..tensor_core import ConvKernel


def weight_name(layer: int) -> str:
    return f"layer{layer}.weight"


def stem_name(layer: int, index: int) -> str:
    return f"layer{layer}.stem{index}"


def gate_name(layer: int) -> str:
    return f"layer{layer}.gate"


def kernel_name(layer: int) -> str:
    return f"layer{layer}.kernel"


def parse_name(name: str) -> Tuple[int, str]:
    """``"layer3.stem1"`` -> ``(3, "stem1")``."""
    head, _, tail = name.partition(".")
    return int(head[len("layer"):]), tail


@dataclass
class ParamSet:
    """Trainable arrays (dense weights and gates), conv kernels and momentum.

    Attributes:
        arrays: Trainable parameters keyed by name; gates are 0-d arrays
        kernels: Forward-only convolution kernels keyed by name
        roles: Role tag per parameter ("dense", "stem", "stem_last", "gate", "conv", "conv_stem")
        momentum: Momentum buffer per trainable array, zero-initialized
    """

    arrays: Dict[str, np.ndarray]
    kernels: Dict[str, ConvKernel] = field(default_factory=dict)
    roles: Dict[str, str] = field(default_factory=dict)
    momentum: Dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        self.arrays = {k: np.asarray(v, dtype=np.float64) for k, v in self.arrays.items()}
        for name, value in self.arrays.items():
            if name not in self.momentum:
                self.momentum[name] = np.zeros_like(value)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.arrays[name]

    def __contains__(self, name: str) -> bool:
        return name in self.arrays or name in self.kernels

    def names(self) -> Iterator[str]:
        return iter(self.arrays)

    def gate(self, layer: int) -> Optional[np.ndarray]:
        return self.arrays.get(gate_name(layer))

    def copy(self) -> "ParamSet":
        return ParamSet(
            arrays={k: v.copy() for k, v in self.arrays.items()},
            kernels=copy.deepcopy(self.kernels),
            roles=dict(self.roles),
            momentum={k: v.copy() for k, v in self.momentum.items()},
        )
