"""Opinion-formation simulator on temporal contact networks.

Two models over the same recorded event stream: the classic Naming Game
baseline (discrete A/B/AB states) and a hybrid model whose agents hold a
continuous latent opinion pair driven by a reinforcement/forgetting
memory kernel, discretized through a gamma threshold. An evaluation
harness scores simulated opinions against survey waves with F1.
"""

__version__ = "0.1.0"

from .coding import CodingState, exhibited_opinion
from .engine import MODEL_CODING, MODEL_NG, SimConfig, Trajectory, run_once, run_repeated
from .evaluation import (
    DEFAULT_GAMMA_GRID,
    EvaluationReport,
    ReportRow,
    SweepConfig,
    f1_score,
    sweep_gamma,
)
from .kernel import (
    decayed_weight,
    forgetting_factor,
    lifetime_to_lambda,
    reinforce,
    trace_lifetime,
)
from .synthetic import PlantedConfig, SynthSpec, generate_events, generate_planted_surveys
from .types import (
    ConfigError,
    ContactEvent,
    DataError,
    DiscreteOpinion,
    MemoryParams,
    OpinionVector,
    validate_gamma,
    validate_params,
)

__all__ = [
    "CodingState",
    "ConfigError",
    "ContactEvent",
    "DataError",
    "DEFAULT_GAMMA_GRID",
    "DiscreteOpinion",
    "EvaluationReport",
    "MemoryParams",
    "MODEL_CODING",
    "MODEL_NG",
    "OpinionVector",
    "PlantedConfig",
    "ReportRow",
    "SimConfig",
    "SweepConfig",
    "SynthSpec",
    "Trajectory",
    "decayed_weight",
    "exhibited_opinion",
    "f1_score",
    "forgetting_factor",
    "generate_events",
    "generate_planted_surveys",
    "lifetime_to_lambda",
    "reinforce",
    "run_once",
    "run_repeated",
    "sweep_gamma",
    "trace_lifetime",
    "validate_gamma",
    "validate_params",
]
