"""Kernel unit tests against frozen high-precision oracle values.

The frozen constants below were computed with mpmath at 40 significant
digits from the closed forms (exp(-lambda*dt), ln(mu/theta)/lambda) and
rounded to 16 digits.
"""

import math

import numpy as np
import pytest

from codingsim.kernel import (
    decayed_weight,
    forgetting_factor,
    lifetime_to_lambda,
    reinforce,
    trace_lifetime,
)
from codingsim.types import ConfigError, MemoryParams, validate_params

PARAMS = MemoryParams(mu=0.3, theta=0.2, lambda_=0.005631)

# mpmath oracle values for mu=0.3, theta=0.2, lambda=0.005631
F_24H = 0.8735901056550031          # exp(-0.005631 * 24)
DECAYED_24H = 0.2620770316965009    # 0.3 * exp(-0.005631 * 24)
REINFORCED_24H = 0.4834539221875507  # 0.3 + 0.2620770316965009 * 0.7
LIFETIME_H = 72.00587961430730      # ln(1.5) / 0.005631
LAMBDA_240H = 0.005776226504666211  # ln(4) / 240


class TestForgettingFactor:
    def test_zero_delta_is_one(self):
        assert forgetting_factor(0.0, 0.005631) == 1.0

    def test_one_day(self):
        assert forgetting_factor(24.0, 0.005631) == pytest.approx(F_24H, rel=1e-14)

    def test_just_past_lifetime_below_theta_over_mu(self):
        # theta/mu = 2/3; 72.01 h is just past the trace lifetime
        assert forgetting_factor(72.01, 0.005631) < 2.0 / 3.0

    def test_negative_delta_rejected(self):
        with pytest.raises(ValueError):
            forgetting_factor(-1.0, 0.005631)

    def test_monotone_non_increasing(self):
        rng = np.random.default_rng(7)
        dts = np.sort(rng.uniform(0, 500, size=200))
        values = [forgetting_factor(dt, 0.005631) for dt in dts]
        assert all(b <= a for a, b in zip(values, values[1:]))
        assert all(0.0 < v <= 1.0 for v in values)


class TestDecayedWeight:
    def test_no_decay_at_zero_delta(self):
        assert decayed_weight(0.3, 10.0, 10.0, PARAMS) == 0.3

    def test_one_day(self):
        assert decayed_weight(0.3, 0.0, 24.0, PARAMS) == pytest.approx(DECAYED_24H, rel=1e-14)

    def test_cutoff_zeroes_forgotten_trace(self):
        # 0.3 * exp(-0.5631) = 0.1708... < theta
        assert decayed_weight(0.3, 0.0, 100.0, PARAMS) == 0.0

    def test_exactly_theta_survives(self):
        # cutoff is strict: a decayed value of exactly theta is kept
        params = MemoryParams(mu=0.5, theta=0.25, lambda_=math.log(2.0))
        assert decayed_weight(0.5, 0.0, 1.0, params) == pytest.approx(0.25, abs=1e-15)
        assert decayed_weight(0.5, 0.0, 1.0, params) >= params.theta

    def test_time_reversal_rejected(self):
        with pytest.raises(ValueError):
            decayed_weight(0.3, 5.0, 4.0, PARAMS)

    def test_output_range(self):
        rng = np.random.default_rng(13)
        for _ in range(500):
            w = float(rng.uniform(0, 1))
            dt = float(rng.uniform(0, 400))
            out = decayed_weight(w, 0.0, dt, PARAMS)
            assert out == 0.0 or PARAMS.theta <= out <= w

    def test_composition_is_idempotent(self):
        # decaying t0->t1 then t1->t2 equals t0->t2 when theta is never hit
        rng = np.random.default_rng(29)
        for _ in range(500):
            w = float(rng.uniform(0.5, 1.0))
            t1 = float(rng.uniform(0, 30))
            t2 = t1 + float(rng.uniform(0, 30))
            via = decayed_weight(w, 0.0, t1, PARAMS)
            assert via >= PARAMS.theta
            two_step = via * forgetting_factor(t2 - t1, PARAMS.lambda_)
            one_step = decayed_weight(w, 0.0, t2, PARAMS)
            if one_step > 0.0:
                assert one_step == pytest.approx(two_step, abs=1e-12)

    def test_lifetime_lands_on_cutoff_boundary(self):
        lifetime = trace_lifetime(PARAMS)
        product = PARAMS.mu * forgetting_factor(lifetime, PARAMS.lambda_)
        assert product == pytest.approx(PARAMS.theta, abs=1e-9)


class TestReinforce:
    def test_fresh_trace_set_to_mu(self):
        assert reinforce(0.0, 0.0, 0.0, PARAMS) == PARAMS.mu
        assert reinforce(0.0, 0.0, 500.0, PARAMS) == PARAMS.mu

    def test_surviving_trace_pushed_toward_one(self):
        assert reinforce(0.3, 0.0, 24.0, PARAMS) == pytest.approx(REINFORCED_24H, rel=1e-14)

    def test_forgotten_trace_resets_to_mu(self):
        assert reinforce(0.3, 0.0, 100.0, PARAMS) == PARAMS.mu

    def test_time_reversal_rejected(self):
        with pytest.raises(ValueError):
            reinforce(0.3, 5.0, 4.0, PARAMS)

    def test_output_in_mu_one(self):
        rng = np.random.default_rng(41)
        for _ in range(1000):
            w = float(rng.uniform(0, 1))
            dt = float(rng.uniform(0, 300))
            out = reinforce(w, 0.0, dt, PARAMS)
            assert PARAMS.mu <= out <= 1.0

    def test_monotone_in_prior_weight(self):
        rng = np.random.default_rng(43)
        for _ in range(200):
            dt = float(rng.uniform(0, 200))
            ws = np.sort(rng.uniform(0, 1, size=20))
            outs = [reinforce(float(w), 0.0, dt, PARAMS) for w in ws]
            assert all(b >= a for a, b in zip(outs, outs[1:]))


class TestTraceLifetime:
    def test_published_parameter_set(self):
        assert trace_lifetime(PARAMS) == pytest.approx(LIFETIME_H, rel=1e-12)
        assert trace_lifetime(PARAMS) == pytest.approx(72.01, abs=0.01)

    def test_lambda_from_ten_day_lifetime(self):
        assert lifetime_to_lambda(0.4, 0.1, 240.0) == pytest.approx(LAMBDA_240H, rel=1e-12)

    def test_unit_lifetime_when_ratio_is_e(self):
        params = MemoryParams(mu=0.2 * math.e, theta=0.2, lambda_=1.0)
        assert trace_lifetime(params) == pytest.approx(1.0, rel=1e-14)

    def test_inversion_round_trip(self):
        lam = lifetime_to_lambda(0.4, 0.1, 240.0)
        assert trace_lifetime(MemoryParams(mu=0.4, theta=0.1, lambda_=lam)) == pytest.approx(
            240.0, rel=1e-12
        )

    def test_invalid_inputs(self):
        with pytest.raises(ConfigError):
            lifetime_to_lambda(0.2, 0.3, 240.0)
        with pytest.raises(ConfigError):
            lifetime_to_lambda(0.4, 0.1, 0.0)


class TestValidateParams:
    def test_published_set_ok(self):
        validate_params(MemoryParams(mu=0.3, theta=0.2, lambda_=0.005631))

    def test_back_solved_set_ok(self):
        validate_params(MemoryParams(mu=0.4, theta=0.1, lambda_=0.005776))

    def test_theta_equal_mu_rejected(self):
        with pytest.raises(ConfigError, match="theta must be < mu"):
            validate_params(MemoryParams(mu=0.3, theta=0.3, lambda_=0.01))

    @pytest.mark.parametrize(
        "params, fragment",
        [
            (MemoryParams(mu=0.0, theta=0.2, lambda_=0.01), "mu"),
            (MemoryParams(mu=1.5, theta=0.2, lambda_=0.01), "mu"),
            (MemoryParams(mu=0.3, theta=0.0, lambda_=0.01), "theta"),
            (MemoryParams(mu=0.3, theta=0.2, lambda_=0.0), "lambda"),
            (MemoryParams(mu=0.3, theta=0.2, lambda_=0.01, forgetting="power"), "forgetting"),
        ],
    )
    def test_each_constraint_reported(self, params, fragment):
        with pytest.raises(ConfigError, match=fragment):
            validate_params(params)
