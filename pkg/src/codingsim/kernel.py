"""Reinforcement/forgetting weight kernel.

Pure functions over (weight, time) pairs. A trace stored as `w` at time
`t` reads at a later time `t'` as `w * f(t' - t)` with
`f(dt) = exp(-lambda * dt)`, and is treated as fully forgotten (0) once
the decayed value drops strictly below the threshold theta. An event
pushes a forgotten trace back to the peak mu, and a surviving one to
`mu + decayed * (1 - mu)`, which never exceeds 1.

All functions are stateless and reentrant; bookkeeping of stored values
and timestamps lives in the callers.
"""

import math

from .types import ConfigError, MemoryParams, validate_params


def forgetting_factor(delta_t: float, lambda_: float) -> float:
    """Exponential forgetting factor exp(-lambda * delta_t), in (0, 1]."""
    if delta_t < 0:
        raise ValueError(f"delta_t must be >= 0, got {delta_t}")
    return math.exp(-lambda_ * delta_t)


def decayed_weight(w_last: float, t_last: float, t_now: float, params: MemoryParams) -> float:
    """Weight read at t_now for a trace stored as w_last at t_last.

    Strictly below theta the trace is zeroed; at exactly theta it survives.
    """
    if t_now < t_last:
        raise ValueError(f"t_now={t_now} precedes t_last={t_last}")
    d = w_last * forgetting_factor(t_now - t_last, params.lambda_)
    return d if d >= params.theta else 0.0


def reinforce(w_last: float, t_last: float, t_event: float, params: MemoryParams) -> float:
    """New stored weight after an event at t_event.

    A trace whose decayed value has fallen below theta restarts at mu;
    otherwise the decayed value is pushed up by mu toward 1. The result
    is always in [mu, 1].
    """
    if t_event < t_last:
        raise ValueError(f"t_event={t_event} precedes t_last={t_last}")
    d = w_last * forgetting_factor(t_event - t_last, params.lambda_)
    if d < params.theta:
        return params.mu
    return params.mu + d * (1.0 - params.mu)


def trace_lifetime(params: MemoryParams) -> float:
    """Hours for an unreinforced trace to fall from mu to theta.

    L = ln(mu / theta) / lambda, so mu * f(L) == theta.
    """
    validate_params(params)
    return math.log(params.mu / params.theta) / params.lambda_


def lifetime_to_lambda(mu: float, theta: float, lifetime: float) -> float:
    """Forgetting intensity per hour that yields the given trace lifetime."""
    if not 0.0 < theta < mu <= 1.0:
        raise ConfigError(f"need 0 < theta < mu <= 1, got mu={mu}, theta={theta}")
    if lifetime <= 0:
        raise ConfigError(f"lifetime must be > 0, got {lifetime}")
    return math.log(mu / theta) / lifetime
