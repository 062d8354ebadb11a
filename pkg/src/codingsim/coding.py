"""Hybrid latent/exhibited opinion model.

Each agent carries a continuous pair of opinion strengths (o_a, o_b) in
[0, 1], driven by the reinforcement/forgetting kernel, plus per-channel
last-update times. The verbalized (exhibited) opinion is derived from the
lazily decayed pair: the stronger side when the strengths differ by more
than gamma, the mixed state AB otherwise.

A contact reinforces exactly one channel of the receiver: the channel
named by the token the sender utters (its exhibited opinion, or a fair
draw when it exhibits AB). Contacts are unidirectional; the sender is
never modified, and the receiver's other channel just keeps decaying.
"""

from collections.abc import Iterable

import numpy as np
from numpy.random import Generator

from .kernel import decayed_weight, reinforce
from .types import (
    AgentId,
    ContactEvent,
    DiscreteOpinion,
    MemoryParams,
    OpinionVector,
)

_A = DiscreteOpinion.A
_B = DiscreteOpinion.B
_AB = DiscreteOpinion.AB


def exhibited_opinion(o_a: float, o_b: float, gamma: float) -> DiscreteOpinion:
    """Discretize a decayed strength pair.

    A or B only when the absolute gap strictly exceeds gamma; ties and
    sub-threshold gaps exhibit AB.
    """
    delta = abs(o_a - o_b)
    if delta > gamma:
        return _A if o_a > o_b else _B
    return _AB


class CodingState:
    """Latent state for a fixed agent roster, stored as dense arrays.

    Agent ids are mapped to dense indices in sorted order, which makes
    snapshot evaluation vectorizable and iteration order deterministic.
    Per-channel reinforcement counters are kept as diagnostics only; the
    weight recursion never reads them.
    """

    __slots__ = ("agents", "o_a", "o_b", "t_a", "t_b", "n_a", "n_b", "_pos")

    def __init__(self, agents: Iterable[AgentId], t0: float = 0.0):
        self.agents: tuple[AgentId, ...] = tuple(sorted(set(agents)))
        n = len(self.agents)
        self.o_a = np.zeros(n)
        self.o_b = np.zeros(n)
        self.t_a = np.full(n, float(t0))
        self.t_b = np.full(n, float(t0))
        self.n_a = np.zeros(n, dtype=np.int64)
        self.n_b = np.zeros(n, dtype=np.int64)
        self._pos = {a: i for i, a in enumerate(self.agents)}

    def index(self, agent: AgentId) -> int:
        try:
            return self._pos[agent]
        except KeyError:
            raise KeyError(f"unknown agent {agent!r}") from None

    def vector(self, agent: AgentId) -> OpinionVector:
        """Stored (undecayed) opinion vector of one agent."""
        i = self.index(agent)
        return OpinionVector(
            o_a=float(self.o_a[i]),
            o_b=float(self.o_b[i]),
            t_a=float(self.t_a[i]),
            t_b=float(self.t_b[i]),
        )

    def set_vector(self, agent: AgentId, vec: OpinionVector) -> None:
        i = self.index(agent)
        self.o_a[i] = vec.o_a
        self.o_b[i] = vec.o_b
        self.t_a[i] = vec.t_a
        self.t_b[i] = vec.t_b

    def copy(self) -> "CodingState":
        dup = CodingState.__new__(CodingState)
        dup.agents = self.agents
        dup._pos = self._pos
        for name in ("o_a", "o_b", "t_a", "t_b", "n_a", "n_b"):
            setattr(dup, name, getattr(self, name).copy())
        return dup


def transmit(
    vec: OpinionVector,
    t: float,
    gamma: float,
    params: MemoryParams,
    rng: Generator,
) -> DiscreteOpinion:
    """Token a sender utters at time t, from its lazily decayed vector."""
    w_a = decayed_weight(vec.o_a, vec.t_a, t, params)
    w_b = decayed_weight(vec.o_b, vec.t_b, t, params)
    shown = exhibited_opinion(w_a, w_b, gamma)
    if shown is _AB:
        return _A if int(rng.integers(0, 2)) == 0 else _B
    return shown


def apply_event(
    state: CodingState,
    ev: ContactEvent,
    gamma: float,
    params: MemoryParams,
    rng: Generator,
) -> DiscreteOpinion:
    """Apply one contact in place; returns the transmitted token.

    Reinforces the receiver channel named by the token and stamps it with
    the event time. The sender and the receiver's other channel are
    untouched (they continue to decay lazily).
    """
    token = transmit(state.vector(ev.sender), ev.t, gamma, params, rng)
    i = state.index(ev.receiver)
    if ev.t < state.t_a[i] or ev.t < state.t_b[i]:
        raise ValueError(f"out-of-order event for {ev.receiver!r} at t={ev.t}")
    if token is _A:
        state.o_a[i] = reinforce(float(state.o_a[i]), float(state.t_a[i]), ev.t, params)
        state.t_a[i] = ev.t
        state.n_a[i] += 1
    else:
        state.o_b[i] = reinforce(float(state.o_b[i]), float(state.t_b[i]), ev.t, params)
        state.t_b[i] = ev.t
        state.n_b[i] += 1
    return token


def latent_arrays(state: CodingState, t: float, params: MemoryParams) -> tuple[np.ndarray, np.ndarray]:
    """Both channels decayed to time t, theta cutoff applied. Read-only."""
    if len(state.agents) and (t < state.t_a.max() or t < state.t_b.max()):
        raise ValueError(f"snapshot time {t} precedes a stored update time")
    w_a = state.o_a * np.exp(-params.lambda_ * (t - state.t_a))
    w_b = state.o_b * np.exp(-params.lambda_ * (t - state.t_b))
    w_a[w_a < params.theta] = 0.0
    w_b[w_b < params.theta] = 0.0
    return w_a, w_b


def latent_snapshot(
    state: CodingState, t: float, params: MemoryParams
) -> dict[AgentId, tuple[float, float]]:
    """Decayed (o_a, o_b) per agent at time t. Stored state is unchanged."""
    w_a, w_b = latent_arrays(state, t, params)
    return {a: (float(w_a[i]), float(w_b[i])) for i, a in enumerate(state.agents)}


def snapshot(
    state: CodingState, t: float, gamma: float, params: MemoryParams
) -> dict[AgentId, DiscreteOpinion]:
    """Exhibited opinion per agent at time t. Stored state is unchanged."""
    w_a, w_b = latent_arrays(state, t, params)
    delta = np.abs(w_a - w_b)
    decided = delta > gamma
    return {
        a: (_A if w_a[i] > w_b[i] else _B) if decided[i] else _AB
        for i, a in enumerate(state.agents)
    }
