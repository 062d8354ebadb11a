"""Shared domain types and validation for the opinion simulator."""

from dataclasses import dataclass
from enum import Enum

AgentId = str


class DataError(ValueError):
    """An input file or record could not be parsed."""


class ConfigError(ValueError):
    """A parameter set or run configuration is invalid."""


class DiscreteOpinion(Enum):
    """Verbalized opinion: one of two stances, or the mixed state AB."""

    A = "A"
    B = "B"
    AB = "AB"


# Ternary survey coding: agree (0), disagree (1), not sure (2).
OPINION_TO_TERNARY = {
    DiscreteOpinion.A: 0,
    DiscreteOpinion.B: 1,
    DiscreteOpinion.AB: 2,
}
TERNARY_TO_OPINION = {v: k for k, v in OPINION_TO_TERNARY.items()}


@dataclass(frozen=True)
class ContactEvent:
    """One directed communication: sender speaks, receiver listens.

    `t` is in hours since the simulation epoch (the earliest event).
    """

    sender: AgentId
    receiver: AgentId
    t: float

    def __post_init__(self):
        if self.sender == self.receiver:
            raise ValueError(f"self-loop event: {self.sender!r} at t={self.t}")
        if self.t < 0:
            raise ValueError(f"negative event time: {self.t}")


@dataclass(frozen=True)
class MemoryParams:
    """Parameters of the reinforcement/forgetting kernel.

    mu       reinforcement peak: the weight a single event imposes, in (0, 1]
    theta    forgetting threshold: decayed traces below it read as 0, in (0, mu)
    lambda_  forgetting intensity per hour, > 0
    """

    mu: float = 0.3
    theta: float = 0.2
    lambda_: float = 0.005631
    forgetting: str = "exponential"


def validate_params(params: MemoryParams) -> None:
    """Reject parameter sets violating 0 < theta < mu <= 1 and lambda > 0."""
    if not 0.0 < params.mu <= 1.0:
        raise ConfigError(f"mu must be in (0, 1], got {params.mu}")
    if params.theta <= 0.0:
        raise ConfigError(f"theta must be > 0, got {params.theta}")
    if not params.theta < params.mu:
        raise ConfigError(f"theta must be < mu, got theta={params.theta}, mu={params.mu}")
    if not params.lambda_ > 0.0:
        raise ConfigError(f"lambda must be > 0, got {params.lambda_}")
    if params.forgetting != "exponential":
        raise ConfigError(f"unsupported forgetting kind: {params.forgetting!r}")


def validate_gamma(gamma: float) -> None:
    """A threshold of 1 or more forces AB forever since |o_A - o_B| <= 1."""
    if not 0.0 <= gamma < 1.0:
        raise ConfigError(f"gamma must be in [0, 1), got {gamma}")


@dataclass
class OpinionVector:
    """Latent opinion strengths of one agent, with per-channel update times.

    Stored weights are the values at their respective update times; decay
    is applied lazily on read, so both stay in [0, 1].
    """

    o_a: float = 0.0
    o_b: float = 0.0
    t_a: float = 0.0
    t_b: float = 0.0
