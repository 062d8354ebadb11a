"""Deterministic, seed-driven replay of an event stream through either model.

Every repetition gets its own random stream derived from
(seed, run_index), so results depend only on the inputs and never on
wall-clock time or execution order. Snapshots at time t include every
event with t_event <= t and never mutate stored state.
"""

import csv
import hashlib
import json
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np
from numpy.random import Generator

from . import coding, naming_game
from .types import (
    AgentId,
    ConfigError,
    ContactEvent,
    DiscreteOpinion,
    MemoryParams,
    validate_gamma,
    validate_params,
)

MODEL_NG = "ng"
MODEL_CODING = "coding"


@dataclass(frozen=True)
class SimConfig:
    """Resolved settings for one batch of repeated runs."""

    model: str
    seed: int
    params: MemoryParams | None = None
    gamma: float | None = None
    repetitions: int = 10
    snapshot_times: tuple[float, ...] = ()

    def validate(self) -> None:
        if self.model not in (MODEL_NG, MODEL_CODING):
            raise ConfigError(f"model must be '{MODEL_NG}' or '{MODEL_CODING}', got {self.model!r}")
        if self.seed < 0:
            raise ConfigError(f"seed must be >= 0, got {self.seed}")
        if self.repetitions < 1:
            raise ConfigError(f"repetitions must be >= 1, got {self.repetitions}")
        if any(b < a for a, b in zip(self.snapshot_times, self.snapshot_times[1:])):
            raise ConfigError("snapshot_times must be sorted")
        if self.model == MODEL_CODING:
            if self.params is None or self.gamma is None:
                raise ConfigError("the coding model requires params and gamma")
            validate_params(self.params)
            validate_gamma(self.gamma)

    def digest(self) -> str:
        payload = {
            "model": self.model,
            "seed": self.seed,
            "params": None
            if self.params is None
            else [self.params.mu, self.params.theta, self.params.lambda_, self.params.forgetting],
            "gamma": self.gamma,
            "repetitions": self.repetitions,
            "snapshot_times": list(self.snapshot_times),
        }
        blob = json.dumps(payload, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class Trajectory:
    """Snapshots of one run, keyed by snapshot time."""

    run_index: int
    seed: int
    model: str
    config_digest: str
    snapshots: dict[float, dict[AgentId, DiscreteOpinion]] = field(default_factory=dict)


def derive_rng(seed: int, run_index: int) -> Generator:
    """The run's random stream; keyed by both values, so repetitions are
    independent and reruns reproduce draws exactly."""
    return np.random.default_rng([seed, run_index])


def run_once(
    events: Sequence[ContactEvent],
    init,
    config: SimConfig,
    run_index: int,
    rng: Generator | None = None,
) -> Trajectory:
    """Stream events through the configured model and collect snapshots.

    `init` is an NgState for the baseline or a CodingState for the hybrid
    model; it is not modified. Pass `rng` only to continue a stream that
    already produced the initial state (as run_repeated does).
    """
    config.validate()
    if rng is None:
        rng = derive_rng(config.seed, run_index)
    times = config.snapshot_times

    if config.model == MODEL_NG:
        state = dict(init)
        apply = lambda ev: naming_game.step(state, ev, rng)
        take = lambda t: dict(state)
    else:
        state = init.copy()
        apply = lambda ev: coding.apply_event(state, ev, config.gamma, config.params, rng)
        take = lambda t: coding.snapshot(state, t, config.gamma, config.params)

    traj = Trajectory(run_index=run_index, seed=config.seed, model=config.model,
                      config_digest=config.digest())
    i = 0
    prev_t = -math.inf
    for ev in events:
        if ev.t < prev_t:
            raise ConfigError(f"events not sorted: t={ev.t} after t={prev_t}")
        prev_t = ev.t
        while i < len(times) and times[i] < ev.t:
            traj.snapshots[times[i]] = take(times[i])
            i += 1
        apply(ev)
    while i < len(times):
        traj.snapshots[times[i]] = take(times[i])
        i += 1
    return traj


def run_repeated(
    events: Sequence[ContactEvent],
    init_sampler: Callable[[int, Generator], object],
    config: SimConfig,
) -> list[Trajectory]:
    """Execute config.repetitions independent runs, ordered by run index.

    Each run draws its initial state from init_sampler(run_index, rng)
    using the run's own stream, then replays the events on that stream.
    Runs share no mutable state, so callers may execute them in any order
    or concurrently and obtain the same list.
    """
    config.validate()
    out = []
    for run_index in range(config.repetitions):
        rng = derive_rng(config.seed, run_index)
        init = init_sampler(run_index, rng)
        out.append(run_once(events, init, config, run_index, rng=rng))
    return out


def constant_sampler(init):
    """Sampler that reuses one initial state for every repetition (copied per run)."""

    def sample(run_index: int, rng: Generator):
        return init.copy() if hasattr(init, "copy") else dict(init)

    return sample


def trajectory_rows(trajectories: Sequence[Trajectory]) -> list[tuple[int, str, float, str]]:
    """Flat (run_index, agent, snapshot_time, opinion) rows in stable order."""
    rows = []
    for traj in trajectories:
        for t in sorted(traj.snapshots):
            snap = traj.snapshots[t]
            for agent in sorted(snap):
                rows.append((traj.run_index, agent, t, snap[agent].value))
    return rows


def write_trajectories_csv(trajectories: Sequence[Trajectory], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["run_index", "agent", "snapshot_time", "opinion"])
        for run_index, agent, t, opinion in trajectory_rows(trajectories):
            writer.writerow([run_index, agent, repr(t), opinion])


def write_trajectories_json(trajectories: Sequence[Trajectory], path) -> None:
    payload = [
        {"run_index": r, "agent": a, "snapshot_time": t, "opinion": op}
        for r, a, t, op in trajectory_rows(trajectories)
    ]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=0, sort_keys=True)
        fh.write("\n")
