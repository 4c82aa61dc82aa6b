import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.stats import ks_2samp

from smc_stability.common.exceptions import (AsymmetricIncrementError, ParameterRangeError,
                                             UnsupportedModelError)
from smc_stability.fk_core.drift import DriftSpec
from smc_stability.fk_core.model import FlowIndex
from smc_stability.rwm.increments import GaussianIncrement, UniformBallIncrement, make_increment
from smc_stability.rwm.metropolis import (drift_probe, finite_metropolis_family,
                                          metropolis_matrix, rwm_kernel_family, rwm_move,
                                          rwm_step)
from smc_stability.tempering.schedules import linear_schedule
from smc_stability.tempering.targets import gaussian_target
from smc_stability.tempering.tempered_family import (TemperedFamily, drift_function,
                                                     tempered_distribution)


class ShiftedIncrement(GaussianIncrement):
    name = 'shifted'

    def log_density(self, y):
        return super().log_density(np.asarray(y, dtype=float) - 0.5)


@pytest.fixture
def gaussian_family():
    return TemperedFamily(gaussian_target(1), linear_schedule(0.7))


class TestIncrements:

    def test_gaussian_is_symmetric(self):
        assert GaussianIncrement(0.5).check_symmetry(2) <= 1e-12

    def test_asymmetric_rejected(self, gaussian_family):
        with pytest.raises(AsymmetricIncrementError):
            rwm_kernel_family(gaussian_family, gaussian_family.schedule, 5, ShiftedIncrement())

    def test_uniform_ball(self, rng):
        q = UniformBallIncrement(2.0)
        assert np.all(np.linalg.norm(q.sample(3, 500, rng), axis=1) <= 2.0)
        assert q.positivity_radius_profile(2.5, 2) == 0.0
        assert q.positivity_radius_profile(1.0, 2) == pytest.approx(1.0 / (4.0 * np.pi))
        q.check_symmetry(2)

    def test_make_increment(self):
        assert isinstance(make_increment('uniform-ball', 0.5), UniformBallIncrement)
        with pytest.raises(KeyError):
            make_increment('cauchy')
        with pytest.raises(ParameterRangeError):
            GaussianIncrement(0.0)


class TestFiniteMetropolis:

    def test_detailed_balance(self):
        table = np.array([0.0, -1.0, -2.0])
        matrix = metropolis_matrix(table, 0.8, 0.5)
        assert_allclose(matrix.sum(axis=1), np.ones(3))
        pi = np.exp(0.8 * table)
        flux = pi[:, None] * matrix
        assert_allclose(flux, flux.T, atol=1e-15)

    def test_family_keeps_tempered_law(self, two_state):
        n = 5
        kernels = finite_metropolis_family(two_state, n, 0.2)
        for k in range(1, n + 1):
            pi = tempered_distribution(two_state, two_state.schedule(k / n)).weights
            assert_allclose(pi @ kernels.matrix(FlowIndex(n, k)), pi, atol=1e-14)

    def test_flip_range(self):
        with pytest.raises(ParameterRangeError):
            metropolis_matrix([0.0, 1.0], 1.0, 0.0)

    def test_single_state(self):
        assert_allclose(metropolis_matrix([0.3], 0.8, 0.5), [[1.0]])

    def test_rwm_needs_continuous_target(self, two_state):
        with pytest.raises(UnsupportedModelError):
            rwm_kernel_family(two_state, two_state.schedule, 3, GaussianIncrement())

    def test_matrix_needs_finite_target(self, gaussian_family):
        with pytest.raises(UnsupportedModelError):
            finite_metropolis_family(gaussian_family, 3, 0.2)


class TestRandomWalk:

    def test_one_step_keeps_target(self, gaussian_family, rng):
        start = rng.standard_normal((40000, 1))
        moved, accepted = rwm_move(gaussian_family, 1.0, GaussianIncrement(1.0), start, rng)
        assert accepted.shape == (40000,)
        assert 0.0 < accepted.mean() < 1.0
        assert_allclose(moved.mean(), 0.0, atol=0.05)
        assert_allclose(moved.var(), 1.0, atol=0.05)

    @pytest.mark.parametrize('k', [1, 4, 10])
    def test_kernel_keeps_tempered_law(self, gaussian_family, k):
        n = 10
        kernels = rwm_kernel_family(gaussian_family, gaussian_family.schedule, n,
                                    GaussianIncrement(1.0))
        gamma = float(gaussian_family.schedule(k / n))
        sampler = gaussian_family.target.direct_sampler
        start = sampler(gamma, 20000, np.random.default_rng(100 + k))
        moved = kernels.draw(FlowIndex(n, k), start, np.random.default_rng(200 + k))
        fresh = sampler(gamma, 20000, np.random.default_rng(300 + k))
        assert np.any(moved != start)
        assert ks_2samp(moved[:, 0], fresh[:, 0]).pvalue > 1e-3

    def test_rejected_move_stays(self, gaussian_family, rng):
        x = np.array([0.0])
        # из вершины любое предложение понижает плотность
        q = GaussianIncrement(3.0)
        points = np.array([rwm_step(gaussian_family, 1.0, q, x, rng) for _ in range(200)])
        assert np.any(points == 0.0)

    def test_gamma_out_of_range(self, gaussian_family, rng):
        with pytest.raises(ParameterRangeError):
            rwm_move(gaussian_family, 0.5, GaussianIncrement(), np.zeros((3, 1)), rng)


class TestDriftEstimate:

    def test_contracts_in_the_tails(self, gaussian_family):
        drift = drift_function(gaussian_family, 0.5)
        report = drift_probe(gaussian_family, 0.7, GaussianIncrement(1.0), drift, (4.0, 6.0),
                             seed=3, proposals=10 ** 4)
        assert set(report.table.columns) >= {'radius', 'point', 'estimate', 'band', 'upper'}
        assert report.per_radius.set_index('radius').loc[6.0, 'lambda_hat'] < 1.0
        assert report.contracting_radius is not None

    def test_drift_estimate_is_reproducible(self, gaussian_family):
        drift = drift_function(gaussian_family, 0.5)
        first = drift_probe(gaussian_family, 0.7, GaussianIncrement(), drift, (2.0,), seed=1,
                            proposals=500)
        again = drift_probe(gaussian_family, 0.7, GaussianIncrement(), drift, (2.0,), seed=1,
                            proposals=500)
        assert_allclose(first.table['estimate'], again.table['estimate'])

    def test_overflowing_drift_is_not_contracting(self):
        fam = TemperedFamily(gaussian_target(1), linear_schedule(0.5))
        # скачок за |x| = 3.5 умножает V на e^800
        drift = DriftSpec(log_v=lambda states: (0.5 * states[:, 0] ** 2
                                                + 800.0 * (np.abs(states[:, 0]) > 3.5)))
        report = drift_probe(fam, 0.5, GaussianIncrement(1.0), drift, (3.0,), seed=0,
                             proposals=2000)
        row = report.per_radius.iloc[0]
        assert np.isinf(row['lambda_hat'])
        assert np.isinf(row['lambda_upper'])
        assert report.contracting_radius is None
        assert (report.table['log_estimate'] > 790.0).all()
