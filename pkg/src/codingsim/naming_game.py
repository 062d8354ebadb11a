"""Classic Naming Game baseline, replayed over a recorded event stream.

Each interaction is one speaker -> listener transmission of a single
token (A or B; an AB speaker utters either with equal probability).
If the listener already holds the token, directly or as part of the
mixed state, both sides collapse to it; otherwise the listener moves
to the mixed state and the speaker is unchanged:

    speaker  token  listener  ->  speaker'  listener'
    A        A      A             A         A
    A        A      B             A         AB
    A        A      AB            A         A
    B        B      A             B         AB
    B        B      B             B         B
    B        B      AB            B         B
    AB       A      A             A         A
    AB       A      B             AB        AB
    AB       A      AB            A         A
    AB       B      A             AB        AB
    AB       B      B             B         B
    AB       B      AB            B         B

The baseline consumes the same recorded contact stream as the hybrid
model (sender = speaker, receiver = listener) so both models see
identical interaction sequences.
"""

from collections.abc import Iterable, Sequence

from numpy.random import Generator

from .types import AgentId, ContactEvent, DiscreteOpinion

NgState = dict[AgentId, DiscreteOpinion]

_A = DiscreteOpinion.A
_B = DiscreteOpinion.B
_AB = DiscreteOpinion.AB


def transmit(speaker: DiscreteOpinion, rng: Generator) -> DiscreteOpinion:
    """Token the speaker utters: its own opinion, or a fair draw for AB."""
    if speaker is _AB:
        return _A if int(rng.integers(0, 2)) == 0 else _B
    return speaker


def apply_rules(
    speaker: DiscreteOpinion, listener: DiscreteOpinion, token: DiscreteOpinion
) -> tuple[DiscreteOpinion, DiscreteOpinion]:
    """One pairwise update; returns (speaker', listener')."""
    if token not in (_A, _B):
        raise ValueError(f"token must be A or B, got {token}")
    if speaker is not _AB and token is not speaker:
        raise ValueError(f"token {token.value} inconsistent with speaker {speaker.value}")
    if listener is token or listener is _AB:
        return token, token
    return speaker, _AB


def step(state: NgState, event: ContactEvent, rng: Generator) -> DiscreteOpinion:
    """Apply one contact event in place; returns the transmitted token."""
    if event.sender not in state or event.receiver not in state:
        raise KeyError(f"event references unknown agent at t={event.t}")
    token = transmit(state[event.sender], rng)
    new_speaker, new_listener = apply_rules(state[event.sender], state[event.receiver], token)
    state[event.sender] = new_speaker
    state[event.receiver] = new_listener
    return token


def run(
    events: Iterable[ContactEvent],
    init: NgState,
    rng: Generator,
    snapshot_times: Sequence[float],
) -> list[NgState]:
    """Replay events in time order; return one state copy per requested time.

    A snapshot at time t reflects every event with t_event <= t; the state
    is piecewise constant between events. The initial state is not modified.
    """
    times = list(snapshot_times)
    if any(b < a for a, b in zip(times, times[1:])):
        raise ValueError("snapshot_times must be sorted")
    state = dict(init)
    snapshots: list[NgState] = []
    i = 0
    prev_t = 0.0
    for ev in events:
        if ev.t < prev_t:
            raise ValueError(f"events not sorted: t={ev.t} after t={prev_t}")
        prev_t = ev.t
        while i < len(times) and times[i] < ev.t:
            snapshots.append(dict(state))
            i += 1
        step(state, ev, rng)
    while i < len(times):
        snapshots.append(dict(state))
        i += 1
    return snapshots


def is_consensus(state: NgState) -> bool:
    """True when every agent holds the same single opinion (all A or all B)."""
    values = set(state.values())
    return values == {_A} or values == {_B}
