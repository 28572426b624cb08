"""Initializer selection: method names and parameters."""

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, model_validator

DEFAULT_TAU = 1.0
DEFAULT_EPSILON = 1e-6
DEFAULT_LOOSE_EPS = 1e-6


class InitMethod(str, Enum):
    """Construction rules."""

    IDI = "idi"
    IDIZ = "idiz"
    IDIC = "idic"
    IDIZC = "idizc"
    CHANNEL_MAINTAIN = "channel_maintain"
    HADAMARD = "hadamard"
    XAVIER = "xavier"
    KAIMING = "kaiming"
    ORTHOGONAL = "orthogonal"
    ZERO = "zero"
    PARTIAL_IDENTITY = "partial_identity"

    @property
    def is_kernel(self) -> bool:
        return self in KERNEL_METHODS

    @property
    def is_baseline(self) -> bool:
        return self in BASELINE_METHODS


KERNEL_METHODS = frozenset({InitMethod.IDIC, InitMethod.IDIZC, InitMethod.CHANNEL_MAINTAIN})
BASELINE_METHODS = frozenset(
    {
        InitMethod.HADAMARD,
        InitMethod.XAVIER,
        InitMethod.KAIMING,
        InitMethod.ORTHOGONAL,
        InitMethod.ZERO,
        InitMethod.PARTIAL_IDENTITY,
    }
)


class InitSpec(BaseModel):
    """Named initializer plus its parameters.

    Attributes:
        method: Construction rule
        tau: Identity scale for IDI / IDIC / channel-maintain
        epsilon: Magnitude of the zero-preserving pairs for IDIZ / IDIZC
        loose_eps: Std of the loose-condition noise on tau entries (0 disables)
        seed: Seed of the stream feeding the loose condition and random baselines
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    method: InitMethod
    tau: float = DEFAULT_TAU
    epsilon: float = DEFAULT_EPSILON
    loose_eps: float = Field(default=DEFAULT_LOOSE_EPS, ge=0.0)
    seed: int = 0

    @model_validator(mode="after")
    def _check_parameters(self) -> "InitSpec":
        if self.method in (InitMethod.IDIZ, InitMethod.IDIZC) and self.epsilon <= 0:
            raise ValueError(f"epsilon must be positive for {self.method.value}, got {self.epsilon}")
        if (
            self.method in (InitMethod.IDI, InitMethod.IDIC, InitMethod.CHANNEL_MAINTAIN)
            and self.tau == 0
        ):
            raise ValueError(f"tau must be non-zero for {self.method.value}")
        return self
