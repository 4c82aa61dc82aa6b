import numpy as np
import pytest
from numpy.testing import assert_allclose

from smc_stability.common.exceptions import (ParameterRangeError, ScheduleError,
                                             UnsupportedModelError)
from smc_stability.fk_core.model import FlowIndex
from smc_stability.tempering.schedules import (linear_schedule, make_schedule,
                                               piecewise_linear_schedule, smoothstep_schedule)
from smc_stability.tempering.targets import (gaussian_mixture_target, gaussian_target,
                                             logistic_target, make_target)
from smc_stability.tempering.tempered_family import (TemperedFamily, build_potentials,
                                                     check_gamma, drift_function,
                                                     tempered_distribution,
                                                     tempered_log_density)


class TestSchedules:

    @pytest.mark.parametrize('factory', [linear_schedule, smoothstep_schedule,
                                         piecewise_linear_schedule])
    def test_audit_passes(self, factory):
        schedule = factory(0.5)
        assert schedule(0.0) == 0.5
        assert schedule(1.0) == 1.0
        assert schedule.audit().passed

    def test_midpoints(self):
        assert linear_schedule(0.5)(0.5) == pytest.approx(0.75)
        assert smoothstep_schedule(0.5)(0.5) == pytest.approx(0.75)
        assert piecewise_linear_schedule(0.5)(0.5) == pytest.approx(0.625)

    def test_lipschitz_constants(self):
        assert smoothstep_schedule(0.6).lipschitz_const == pytest.approx(0.6)
        assert piecewise_linear_schedule(0.5).lipschitz_const == pytest.approx(0.75)

    def test_declared_lipschitz_too_small(self):
        with pytest.raises(ScheduleError):
            make_schedule('linear', 0.5, lipschitz=0.1)

    def test_unknown_schedule(self):
        with pytest.raises(ScheduleError):
            make_schedule('cosine', 0.5)

    def test_bad_knots(self):
        with pytest.raises(ScheduleError):
            piecewise_linear_schedule(0.5, knots=((0.0, 0.0), (0.5, 0.8), (0.4, 0.9), (1.0, 1.0)))

    def test_gamma_floor_range(self):
        with pytest.raises(ParameterRangeError):
            linear_schedule(0.0)


class TestTargets:

    def test_gaussian(self):
        target = gaussian_target(1)
        assert_allclose(target.log_unnorm(np.array([[0.0], [1.0]])), (0.0, -0.5))
        assert target.sup_log_unnorm == 0.0

    def test_mixture_sampler_only_at_one(self, rng):
        target = gaussian_mixture_target((0.5, 0.5), (-2.0, 2.0))
        assert target.direct_sampler(1.0, 10, rng).shape == (10, 1)
        with pytest.raises(UnsupportedModelError):
            target.direct_sampler(0.5, 10, rng)

    def test_logistic_is_bounded_by_zero(self, rng):
        target = logistic_target(n_obs=30, dim=2)
        assert not target.sup_verified
        assert np.all(target.log_unnorm(rng.standard_normal((200, 2)) * 3) <= 0.0)

    def test_logistic_data_is_seeded(self):
        points = np.array([[0.3, -0.7]])
        assert_allclose(logistic_target(seed=3).log_unnorm(points),
                        logistic_target(seed=3).log_unnorm(points))

    def test_unknown_target(self):
        with pytest.raises(KeyError):
            make_target('banana')


class TestTemperedFamily:

    def test_potentials_sum_to_log_ratio(self, two_state):
        n = 4
        potentials = build_potentials(two_state, n)
        states = np.array([0, 1])
        total = sum(potentials.log_values(FlowIndex(n, k), states) for k in range(n))
        assert_allclose(total, (0.0, -0.5 * np.log(2.0)))
        assert potentials.upper_bound_log == 0.0

    def test_tempered_distribution(self, two_state):
        assert_allclose(tempered_distribution(two_state, 1.0).weights, (2 / 3, 1 / 3))
        half = tempered_distribution(two_state, 0.5).weights
        assert half[1] / half[0] == pytest.approx(2 ** -0.5)

    def test_tempered_distribution_needs_finite_target(self):
        fam = TemperedFamily(gaussian_target(1), linear_schedule(0.5))
        with pytest.raises(UnsupportedModelError):
            tempered_distribution(fam, 1.0)

    def test_gamma_range(self, two_state):
        with pytest.raises(ParameterRangeError):
            check_gamma(two_state, 0.3)
        assert tempered_log_density(two_state, 1.0, 1) == pytest.approx(-np.log(2.0))

    def test_drift_function(self):
        fam = TemperedFamily(gaussian_target(1), linear_schedule(0.7))
        drift = drift_function(fam, 0.5)
        assert_allclose(drift.values(np.array([[0.0], [2.0]])), (1.0, np.exp(0.7)))
        with pytest.raises(ParameterRangeError):
            drift_function(fam, 1.0)
