import itertools

import numpy as np
import pytest
from numpy.testing import assert_allclose

from smc_stability.common.exceptions import (IndexOutOfRangeError, ParameterRangeError,
                                             PreconditionError, UnsupportedModelError)
from smc_stability.fk_core.drift import DriftSpec
from smc_stability.fk_core.measures import DiscreteMeasure
from smc_stability.fk_core.model import FKModel, InitialDistribution, KernelFamily
from smc_stability.oracle.drift_objects import (forgetting_profile, lemma3_path_bound,
                                                norm_const_lower_bound_check,
                                                row_overlap_minorizer, tilted_drift_objects,
                                                u_v_norm, v_norm_distance, verify_a2)
from smc_stability.oracle.exact_flow import (compensated_matmul, eta_exact, flow_map,
                                             flow_map_via_s, future_masses, phi_step, psi_map,
                                             q_matrix, q_semigroup, q_tilde_semigroup,
                                             s_kernel_matrix)
from smc_stability.oracle.fixtures import (finite_tempered_model, flat_model,
                                           random_finite_model, two_state_family)
from smc_stability.tempering.schedules import linear_schedule, smoothstep_schedule
from smc_stability.tempering.targets import finite_target
from smc_stability.tempering.tempered_family import TemperedFamily, tempered_distribution


class TestHandModel:
    """ M = [[0.9, 0.1], [0.2, 0.8]], G = (1, 0.5), μ = (0.5, 0.5). """

    def test_first_steps(self, hand_model):
        assert_allclose(eta_exact(hand_model, 0).weights, (0.5, 0.5))
        assert_allclose(eta_exact(hand_model, 1).weights, (2 / 3, 1 / 3), rtol=1e-14)
        assert_allclose(eta_exact(hand_model, 2).weights, (0.76, 0.24), rtol=1e-14)

    def test_q_matrix(self, hand_model):
        assert_allclose(q_matrix(hand_model, 1), [[0.9, 0.1], [0.1, 0.4]])

    def test_phi_step_matches_flow(self, hand_model):
        eta = eta_exact(hand_model, 0)
        for k in range(1, hand_model.horizon + 1):
            eta = phi_step(hand_model, eta, k)
            assert_allclose(eta.weights, eta_exact(hand_model, k).weights, atol=1e-14)

    def test_psi_map(self, hand_model):
        assert_allclose(psi_map(hand_model, DiscreteMeasure((0.5, 0.5)), 0).weights, (2 / 3, 1 / 3))

    def test_last_future_mass(self, hand_model):
        masses = future_masses(hand_model)
        assert_allclose(masses[-1], (1.0, 1.0))
        assert_allclose(masses[-2], (1.0, 0.5))

    def test_semigroup_identity(self, hand_model):
        assert_allclose(q_semigroup(hand_model, 2, 2), np.eye(2))

    def test_index_out_of_range(self, hand_model):
        with pytest.raises(IndexOutOfRangeError):
            q_semigroup(hand_model, 2, 1)
        with pytest.raises(IndexOutOfRangeError):
            eta_exact(hand_model, 4)


def test_flat_model_is_markov_propagation():
    matrix = np.array([[0.5, 0.5, 0.0], [0.1, 0.6, 0.3], [0.0, 0.2, 0.8]])
    model = flat_model(matrix, 4, mu=(1.0, 0.0, 0.0))
    expected = np.array([1.0, 0.0, 0.0]) @ np.linalg.matrix_power(matrix, 4)
    assert_allclose(eta_exact(model, 4).weights, expected, atol=1e-14)


def test_normalized_and_raw_semigroups_give_same_flow(rng):
    model = random_finite_model(rng, 4, 6)
    mu = model.initial.measure.weights
    raw = mu @ q_semigroup(model, 0, 6)
    tilde = mu @ q_tilde_semigroup(model, 0, 6)
    assert_allclose(raw / raw.sum(), tilde / tilde.sum(), atol=1e-13)


def test_two_routes_agree(rng):
    model = random_finite_model(rng, 5, 8)
    eta = DiscreteMeasure.from_unnormalized(rng.random(5))
    for k in (0, 3, 7):
        assert_allclose(flow_map_via_s(model, eta, k).weights,
                        flow_map(model, eta, k, model.horizon).weights, atol=1e-10)


def test_s_kernels_are_stochastic(rng):
    model = random_finite_model(rng, 4, 5)
    masses = future_masses(model)
    for k in range(1, 6):
        assert_allclose(s_kernel_matrix(model, k, masses).sum(axis=1), np.ones(4), atol=1e-14)


def test_compensated_matmul(rng):
    a = rng.random((6, 7))
    b = rng.random((7, 3))
    assert_allclose(compensated_matmul(a, b), a @ b, rtol=1e-14)


@pytest.mark.parametrize('seed', range(100))
def test_flow_identities_on_random_models(seed):
    rng = np.random.default_rng(seed)
    m, n = int(rng.integers(2, 6)), int(rng.integers(2, 21))
    model = random_finite_model(rng, m, n)
    k, j, ell = (int(i) for i in np.sort(rng.integers(0, n + 1, size=3)))
    assert_allclose(q_semigroup(model, k, j) @ q_semigroup(model, j, ell),
                    q_semigroup(model, k, ell), rtol=1e-12)

    eta = DiscreteMeasure.from_unnormalized(rng.random(m) + 0.01)
    assert_allclose(flow_map(model, flow_map(model, eta, k, j), j, ell).weights,
                    flow_map(model, eta, k, ell).weights, atol=1e-10)
    assert_allclose(flow_map(model, eta_exact(model, k), k, ell).weights,
                    eta_exact(model, ell).weights, atol=1e-10)
    assert_allclose(flow_map_via_s(model, eta, k).weights,
                    flow_map(model, eta, k, n).weights, atol=1e-10)


@pytest.mark.parametrize('fam', [
    two_state_family(),
    TemperedFamily(target=finite_target((0.0, -0.4, -1.1, -2.0)),
                   schedule=smoothstep_schedule(0.4)),
], ids=['two-state-linear', 'four-state-smoothstep'])
def test_flow_from_floor_is_tempered_path(fam):
    for n in range(1, 31):
        model = finite_tempered_model(fam, n)
        for k in range(n + 1):
            expected = tempered_distribution(fam, float(fam.schedule(k / n)))
            assert_allclose(eta_exact(model, k).weights, expected.weights, atol=1e-12)


def test_oracle_needs_matrices(hand_model):
    model = FKModel(horizon=2, kernels=KernelFamily(sample=hand_model.kernels.sample),
                    potentials=hand_model.potentials,
                    initial=InitialDistribution(sampler=hand_model.initial.sampler))
    with pytest.raises(UnsupportedModelError):
        eta_exact(model, 1)


class TestDriftObjects:

    def test_a2_on_tempered_fixture(self, tempered_model, drift, minorizer):
        assert verify_a2(tempered_model, drift, minorizer).all_pass

    def test_tilted_checks_pass(self, tempered_model, drift, minorizer):
        masses = future_masses(tempered_model)
        for k in range(tempered_model.horizon + 1):
            report = tilted_drift_objects(tempered_model, k, drift, minorizer, masses)
            assert report.all_pass
            assert not report.off_by_one_disagrees
            assert np.all(report.objects.v_nk >= 1.0)
            assert report.objects.b_nk == pytest.approx(1.5 / report.objects.eps_nk)

    def test_step_zero_has_no_kernel(self, tempered_model, drift, minorizer):
        report = tilted_drift_objects(tempered_model, 0, drift, minorizer)
        assert report.previous is None
        assert report.failing_states() == []

    def test_drift_constants_required(self, tempered_model, minorizer):
        with pytest.raises(PreconditionError):
            verify_a2(tempered_model, DriftSpec.from_vector((1.0, 2.0)), minorizer)

    def test_row_overlap_minorizer(self, hand_model):
        found = row_overlap_minorizer(hand_model)
        assert found.epsilon == pytest.approx(0.3)
        assert_allclose(found.nu.weights, (2 / 3, 1 / 3))

    def test_v_norm_distance(self):
        assert v_norm_distance((1.0, 0.0), (0.0, 1.0), (1.0, 2.0)) == pytest.approx(3.0)
        assert v_norm_distance((1.0, 0.0), (0.0, 1.0), (1.0, 4.0), alpha=0.5) == pytest.approx(3.0)
        with pytest.raises(ParameterRangeError):
            v_norm_distance((1.0, 0.0), (0.0, 1.0), (1.0, 2.0), alpha=0.0)

    @pytest.mark.parametrize('seed', range(40))
    def test_v_norm_is_sup_over_signed_tests(self, seed):
        rng = np.random.default_rng(seed)
        m = int(rng.integers(1, 9))
        a, b, c = rng.dirichlet(np.ones(m), size=3)
        v = 1.0 + rng.exponential(2.0, size=m)
        alpha = float(rng.uniform(0.05, 1.0))
        weight = v ** alpha
        best = max(abs(np.dot(a - b, np.array(signs) * weight))
                   for signs in itertools.product((-1.0, 1.0), repeat=m))
        distance = v_norm_distance(a, b, v, alpha)
        assert distance == pytest.approx(best, rel=1e-12)
        assert v_norm_distance(b, a, v, alpha) == distance
        assert v_norm_distance(a, a, v, alpha) == 0.0
        assert distance <= v_norm_distance(a, c, v, alpha) + v_norm_distance(c, b, v, alpha) + 1e-12

    def test_v_norm_rejects_small_weight(self):
        with pytest.raises(PreconditionError):
            v_norm_distance((1.0, 0.0), (0.0, 1.0), (0.5, 2.0))

    def test_u_v_norm(self, two_state, drift):
        model = finite_tempered_model(two_state, 6)
        assert u_v_norm(model, drift) == pytest.approx(0.25 * np.log(2.0))

    @pytest.mark.parametrize('n', (10, 30, 100, 300, 1000))
    def test_u_v_norm_does_not_grow_with_n(self, n, drift):
        linear = finite_tempered_model(two_state_family(0.5, linear_schedule(0.5)), n)
        assert u_v_norm(linear, drift) == pytest.approx(0.25 * np.log(2.0), rel=1e-9)
        smooth = finite_tempered_model(two_state_family(0.5, smoothstep_schedule(0.5)), n)
        value = u_v_norm(smooth, drift)
        assert 0.25 * np.log(2.0) - 1e-12 <= value <= 0.375 * np.log(2.0) + 1e-12

    def test_norm_const_bound(self, two_state, drift):
        model = finite_tempered_model(two_state, 8, initial=DiscreteMeasure.dirac(2, 1))
        report = norm_const_lower_bound_check(model, drift, model.initial.measure)
        assert report.holds
        assert report.bound == pytest.approx(np.exp(-np.log(2.0) * 2.0))
        assert report.values[-1] == 1.0

    def test_path_bound_below_values(self, two_state, drift):
        model = finite_tempered_model(two_state, 8)
        mu = model.initial.measure
        report = norm_const_lower_bound_check(model, drift, mu)
        assert np.all(report.values >= lemma3_path_bound(model, mu) - 1e-12)

    def test_forgetting(self, tempered_model):
        profile = forgetting_profile(tempered_model, DiscreteMeasure.dirac(2, 0),
                                     DiscreteMeasure.dirac(2, 1), (1.0, 2.0))
        distances = profile.set_index('k')['distance']
        assert distances[tempered_model.horizon] == pytest.approx(3.0)
        assert distances[0] < distances[tempered_model.horizon]
