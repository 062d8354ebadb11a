import numpy as np
import pytest

from codingsim.types import DiscreteOpinion

A, B, AB = DiscreteOpinion.A, DiscreteOpinion.B, DiscreteOpinion.AB

MIRROR = {A: B, B: A, AB: AB}


class MirrorRng:
    """Random source whose fair binary draws are the complement of a base
    stream's. Token draws consume integers(0, 2), so a run driven by this
    wrapper utters the opposite token at exactly the same points."""

    def __init__(self, base: np.random.Generator):
        self._base = base

    def integers(self, low, high=None):
        assert (low, high) == (0, 2), "mirroring is defined for fair binary draws only"
        return 1 - self._base.integers(low, high)


def mirror_state(state):
    """Relabel A<->B in a discrete state map."""
    return {agent: MIRROR[op] for agent, op in state.items()}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
