"""Synthetic contact streams and planted ground-truth surveys.

The planted truth is generated by an actual model run, so the full
pipeline has an exact oracle: scoring the generating model at the
generating configuration must recover the planted answers perfectly.
"""

from collections.abc import Mapping
from dataclasses import dataclass

import networkx as nx
import numpy as np

from .dataio import SurveyRecord, coding_init_sampler, collect_agents, ng_init_sampler
from .engine import MODEL_CODING, MODEL_NG, SimConfig, run_repeated
from .types import ConfigError, ContactEvent, MemoryParams, OPINION_TO_TERNARY

TOPOLOGIES = ("complete", "erdos_renyi", "barabasi_albert")

# Sub-streams of the master seed.
_EVENTS_STREAM = 0
_ANSWERS_STREAM = 1


@dataclass(frozen=True)
class SynthSpec:
    """Shape of a generated contact stream.

    `rate` is the mean number of directed events per adjacent ordered
    pair per day (Poisson); timestamps are uniform over the horizon.
    """

    n_agents: int
    topology: str = "complete"
    edge_prob: float = 0.1  # erdos_renyi only
    attach_m: int = 2  # barabasi_albert only
    rate: float = 1.0
    horizon_days: float = 30.0
    seed: int = 0

    def validate(self) -> None:
        if self.n_agents < 1:
            raise ConfigError(f"n_agents must be >= 1, got {self.n_agents}")
        if self.topology not in TOPOLOGIES:
            raise ConfigError(f"topology must be one of {TOPOLOGIES}, got {self.topology!r}")
        if self.rate < 0:
            raise ConfigError(f"rate must be >= 0, got {self.rate}")
        if self.horizon_days <= 0:
            raise ConfigError(f"horizon_days must be > 0, got {self.horizon_days}")


def agent_name(i: int, n: int) -> str:
    width = max(2, len(str(n - 1)))
    return f"a{i:0{width}d}"


def _edge_list(spec: SynthSpec) -> list[tuple[int, int]]:
    n = spec.n_agents
    if spec.topology == "complete":
        graph = nx.complete_graph(n)
    elif spec.topology == "erdos_renyi":
        graph = nx.gnp_random_graph(n, spec.edge_prob, seed=spec.seed)
    else:
        m = min(spec.attach_m, max(1, n - 1))
        graph = nx.barabasi_albert_graph(n, m, seed=spec.seed)
    return sorted(graph.edges())


def generate_events(spec: SynthSpec) -> list[ContactEvent]:
    """Poisson contact stream over the topology's edges; deterministic per seed."""
    spec.validate()
    rng = np.random.default_rng([spec.seed, _EVENTS_STREAM])
    horizon_h = spec.horizon_days * 24.0
    events: list[ContactEvent] = []
    for u, v in _edge_list(spec):
        for s, r in ((u, v), (v, u)):
            count = int(rng.poisson(spec.rate * spec.horizon_days))
            times = rng.uniform(0.0, horizon_h, size=count)
            sender = agent_name(s, spec.n_agents)
            receiver = agent_name(r, spec.n_agents)
            events.extend(ContactEvent(sender, receiver, float(t)) for t in times)
    events.sort(key=lambda ev: ev.t)
    return events


@dataclass(frozen=True)
class PlantedConfig:
    """One generating run whose exhibited opinions become ground truth."""

    model: str = MODEL_CODING
    gamma: float = 0.25
    params: MemoryParams = MemoryParams()
    seed: int = 0
    question: str = "synthetic"
    init_time: float = 0.0

    def validate(self) -> None:
        if self.model not in (MODEL_NG, MODEL_CODING):
            raise ConfigError(f"model must be '{MODEL_NG}' or '{MODEL_CODING}', got {self.model!r}")


def generate_planted_surveys(
    events: list[ContactEvent],
    config: PlantedConfig,
    wave_times: Mapping[int, float],
) -> list[SurveyRecord]:
    """Random wave-1 answers plus model-generated answers for later waves.

    Uses the same initializer and run engine as the sweep, with
    repetitions=1, so a sweep at the generating (gamma, seed) reproduces
    the planting run exactly and scores F1 = 1.0.
    """
    config.validate()
    for wave in wave_times:
        if wave < 2:
            raise ConfigError(f"planted wave indices start at 2, got {wave}")
    agents = collect_agents(events)
    ans_rng = np.random.default_rng([config.seed, _ANSWERS_STREAM])
    records = [
        SurveyRecord(agent, 1, config.question, int(ans_rng.integers(0, 3)))
        for agent in agents
    ]
    wave1 = list(records)

    sim = SimConfig(
        model=config.model,
        seed=config.seed,
        params=config.params if config.model == MODEL_CODING else None,
        gamma=config.gamma if config.model == MODEL_CODING else None,
        repetitions=1,
        snapshot_times=tuple(sorted(wave_times.values())),
    )
    if config.model == MODEL_CODING:
        sampler = coding_init_sampler(wave1, agents, config.gamma, t0=config.init_time)
    else:
        sampler = ng_init_sampler(wave1, agents)
    trajectory = run_repeated(events, sampler, sim)[0]

    for wave in sorted(wave_times):
        snap = trajectory.snapshots[wave_times[wave]]
        records.extend(
            SurveyRecord(agent, wave, config.question, OPINION_TO_TERNARY[snap[agent]])
            for agent in agents
        )
    return records
