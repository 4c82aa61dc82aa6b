import numpy as np
import pandas as pd
import pytest
from joblib import parallel_backend
from numpy.testing import assert_allclose

from smc_stability.common.exceptions import (IndexOutOfRangeError, NonFiniteEstimateError,
                                             TotalDegeneracyError)
from smc_stability.fk_core.measures import DiscreteMeasure
from smc_stability.fk_core.model import (FKModel, FlowIndex, InitialDistribution, KernelFamily,
                                         PotentialFamily)
from smc_stability.oracle.exact_flow import eta_exact, phi_step
from smc_stability.particles.ensemble import EmpiricalMeasure, Ensemble
from smc_stability.particles.sampler import (estimate, init_ensemble, one_step_law,
                                             particle_drift_regression, run_sampler, smc_step,
                                             trajectories_frame)
from smc_stability.stabilitylab.replicate_worker import (ReplicateWorker, estimates_of,
                                                         monitored_statistics, trajectories_of)


def indicator_of_one(states):
    return (np.asarray(states) == 1).astype(float)


@pytest.fixture
def degenerate_model():
    """ Модель в R с нулевым потенциалом: все веса частиц нулевые на первом шаге. """
    return FKModel(horizon=2,
                   kernels=KernelFamily(sample=lambda idx, states, rng: states),
                   potentials=PotentialFamily(
                       eval_log=lambda idx, states: np.full(len(states), -np.inf),
                       upper_bound_log=0.0),
                   initial=InitialDistribution(sampler=lambda size, rng: np.zeros(size)))


def test_init_needs_particles(hand_model):
    with pytest.raises(IndexOutOfRangeError):
        init_ensemble(hand_model.initial.sampler, 0, hand_model.horizon, seed=1)


def test_estimate_matches_exact_flow(hand_model):
    terminal, _ = run_sampler(hand_model, 20000, seed=5, trajectory=False)
    exact = eta_exact(hand_model, hand_model.horizon).integrate((0.0, 1.0))
    assert_allclose(estimate(terminal, indicator_of_one), exact, atol=0.02)


def test_same_key_same_result(hand_model):
    first, _ = run_sampler(hand_model, 300, seed=9, replicate=2)
    again, _ = run_sampler(hand_model, 300, seed=9, replicate=2)
    other, _ = run_sampler(hand_model, 300, seed=9, replicate=3)
    assert_allclose(first.support, again.support)
    assert not np.array_equal(first.support, other.support)


def test_zero_steps_returns_initial_ensemble(hand_model):
    terminal, summaries = run_sampler(hand_model, 50, seed=1, n_steps=0)
    assert terminal.N == 50
    assert len(summaries) == 1
    with pytest.raises(IndexOutOfRangeError):
        run_sampler(hand_model, 50, seed=1, n_steps=hand_model.horizon + 1)


def test_trajectory_rows(hand_model, drift):
    _, summaries = run_sampler(hand_model, 100, seed=1, drift=drift)
    frame = trajectories_frame(summaries)
    assert list(frame['k']) == [0, 1, 2, 3]
    assert np.isnan(frame['ess'].iloc[-1])
    assert frame['ess'].iloc[:-1].between(1.0, 100.0).all()
    assert frame['eta_V'].between(1.0, 2.0).all()
    assert frame['eta_Gtilde'].iloc[:-1].between(0.5, 1.0).all()


def test_one_step_law(hand_model):
    ens = Ensemble(states=np.array([0, 0, 1, 1, 1]), step=FlowIndex(3, 0), seed=1)
    law = one_step_law(hand_model, ens)
    assert_allclose(law.weights, phi_step(hand_model, DiscreteMeasure((0.4, 0.6)), 1).weights)


def test_smc_step_draws_from_one_step_law(hand_model):
    states = np.repeat([0, 1], [8000, 12000])
    ens = Ensemble(states=states, step=FlowIndex(3, 0), seed=4)
    moved = smc_step(ens, hand_model)
    assert moved.step == FlowIndex(3, 1)
    assert_allclose(np.mean(moved.states == 1), one_step_law(hand_model, ens).weights[1],
                    atol=0.015)


def test_smc_step_checks_horizon(hand_model):
    ens = Ensemble(states=np.zeros(4, dtype=int), step=FlowIndex(5, 0), seed=1)
    with pytest.raises(IndexOutOfRangeError):
        smc_step(ens, hand_model)


def test_total_degeneracy(degenerate_model):
    with pytest.raises(TotalDegeneracyError):
        run_sampler(degenerate_model, 10, seed=1, trajectory=False)


def test_non_finite_estimate():
    em = EmpiricalMeasure(support=np.array([0.0, 1.0, 2.0]))
    with pytest.raises(NonFiniteEstimateError) as error:
        estimate(em, lambda states: np.array([1.0, np.inf, 2.0]))
    assert error.value.index == 1


def test_particle_drift_regression():
    trajectories = pd.DataFrame({'replicate': 0, 'n': 3, 'k': [0, 1, 2, 3],
                                 'eta_V': [4.0, 3.0, 2.5, 2.25]})
    slope, intercept = particle_drift_regression(trajectories)
    assert slope == pytest.approx(0.5)
    assert intercept == pytest.approx(1.0)


class TestReplicateWorker:

    def test_aborted_replicates(self, degenerate_model):
        results = ReplicateWorker(degenerate_model, 10, 1, lambda states: states).run_all(3)
        assert all(result.aborted for result in results)
        assert np.isnan(results[0].estimate)
        assert estimates_of(results).size == 0

    def test_workers_do_not_change_results(self, hand_model):
        worker = ReplicateWorker(hand_model, 200, 3, indicator_of_one, replicate_offset=10)
        sequential = worker.run_all(6, workers=1)
        with parallel_backend('threading'):
            parallel = worker.run_all(6, workers=2)
        assert [result.replicate for result in parallel] == list(range(10, 16))
        assert_allclose(estimates_of(sequential), estimates_of(parallel))

    def test_monitored_statistics(self, hand_model, drift):
        worker = ReplicateWorker(hand_model, 100, 3, indicator_of_one, drift=drift)
        frame = trajectories_of(worker.run_all(2))
        assert len(frame) == 2 * (hand_model.horizon + 1)
        stats = monitored_statistics(frame, g_tilde_threshold=0.99)
        assert 1.0 <= stats['max_eta_V'] <= 2.0
        assert stats['g_tilde_below_threshold']
        assert monitored_statistics(frame.iloc[0:0]) == {}


def test_drift_regression_needs_two_pairs():
    trajectories = pd.DataFrame({'replicate': 0, 'n': 1, 'k': [0, 1], 'eta_V': [2.0, 1.5]})
    slope, intercept = particle_drift_regression(trajectories)
    assert np.isnan(slope)
    assert np.isnan(intercept)
