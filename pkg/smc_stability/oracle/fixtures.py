"""
Конечные модели для оракула, тестов и поставляемых экспериментов.

    def hand_two_state_model - M = [[0.9, 0.1], [0.2, 0.8]], G = (1, 0.5) на всех шагах.
    def flat_model - модель с G ≡ 1 и постоянной матрицей.
    def random_finite_model - случайные матрицы, потенциалы и μ.
    def two_state_family - π̄ = (1, 0.5) с линейным расписанием.
    def finite_tempered_model - темперированная модель на конечной цели с ядрами Метрополиса.
    def two_state_drift - V = (1, 2), λ = 0.5, b = 1.5, C = всё пространство.
    def two_state_minorizer - ε = 0.28, ν = (2/3, 1/3).
"""
import numpy as np

from smc_stability.fk_core.drift import DriftSpec, Minorizer
from smc_stability.fk_core.measures import DiscreteMeasure
from smc_stability.fk_core.model import (FKModel, InitialDistribution, PotentialFamily,
                                         matrix_kernel_family)
from smc_stability.rwm.metropolis import finite_metropolis_family
from smc_stability.tempering.schedules import TemperingSchedule, linear_schedule, make_schedule
from smc_stability.tempering.targets import finite_target
from smc_stability.tempering.tempered_family import (TemperedFamily, build_potentials,
                                                     tempered_distribution)

HAND_MATRIX = ((0.9, 0.1), (0.2, 0.8))
HAND_POTENTIAL = (1.0, 0.5)
FIXTURE_LOG_TARGET = (0.0, float(np.log(0.5)))
FIXTURE_FLIP = 0.2
FIXTURE_GAMMA_FLOOR = 0.5


def _table_potentials(log_table: np.ndarray) -> PotentialFamily:
    """ Потенциалы по таблице log G[k, x] (или одной строке для всех k). """
    log_table = np.atleast_2d(np.asarray(log_table, dtype=float))

    def eval_log(idx, states):
        row = log_table[min(idx.k, log_table.shape[0] - 1)]
        return row[np.asarray(states, dtype=int)]

    return PotentialFamily(eval_log=eval_log, upper_bound_log=float(log_table.max()))


def hand_two_state_model(n: int = 3, mu=(0.5, 0.5), potential=HAND_POTENTIAL,
                         matrix=HAND_MATRIX) -> FKModel:
    """ Модель из двух состояний с постоянными M и G. """
    matrix = np.asarray(matrix, dtype=float)
    return FKModel(horizon=n, kernels=matrix_kernel_family(lambda idx: matrix),
                   potentials=_table_potentials(np.log(potential)),
                   initial=InitialDistribution.from_measure(DiscreteMeasure(mu), 'μ'),
                   n_states=matrix.shape[0])


def flat_model(matrix, n: int, mu=None) -> FKModel:
    """ G ≡ 1: поток - просто распространение μ через M. """
    matrix = np.asarray(matrix, dtype=float)
    m = matrix.shape[0]
    measure = DiscreteMeasure(mu) if mu is not None else DiscreteMeasure.uniform(m)
    return FKModel(horizon=n, kernels=matrix_kernel_family(lambda idx: matrix),
                   potentials=_table_potentials(np.zeros(m)),
                   initial=InitialDistribution.from_measure(measure, 'μ'), n_states=m)


def random_finite_model(rng: np.random.Generator, m: int, n: int) -> FKModel:
    """ Случайная конечная модель: строки M по Дирихле, log G равномерно на [-2, 0]. """
    matrices = [rng.dirichlet(np.ones(m), size=m) for _ in range(n + 1)]
    log_table = rng.uniform(-2.0, 0.0, size=(n, m))
    mu = DiscreteMeasure.from_unnormalized(rng.dirichlet(np.ones(m)))
    return FKModel(horizon=n, kernels=matrix_kernel_family(lambda idx: matrices[idx.k]),
                   potentials=_table_potentials(log_table),
                   initial=InitialDistribution.from_measure(mu, 'μ'), n_states=m)


def two_state_family(gamma_floor: float = FIXTURE_GAMMA_FLOOR, schedule='linear',
                     log_target=FIXTURE_LOG_TARGET) -> TemperedFamily:
    """ π̄ = (1, 0.5) и расписание: готовый TemperingSchedule или имя. """
    if isinstance(schedule, TemperingSchedule):
        tempering = schedule
    elif schedule == 'linear':
        tempering = linear_schedule(gamma_floor)
    else:
        tempering = make_schedule(schedule, gamma_floor)
    return TemperedFamily(target=finite_target(log_target), schedule=tempering)


def finite_tempered_model(fam: TemperedFamily, n: int, flip: float = FIXTURE_FLIP,
                          initial: DiscreteMeasure = None) -> FKModel:
    """ Темперированная модель на конечной цели. По умолчанию μ = π_γ̲. """
    measure = initial if initial is not None else tempered_distribution(fam, fam.gamma_floor)
    return FKModel(horizon=n, kernels=finite_metropolis_family(fam, n, flip),
                   potentials=build_potentials(fam, n),
                   initial=InitialDistribution.from_measure(measure, 'μ'),
                   n_states=fam.target.n_states)


def two_state_drift() -> DriftSpec:
    return DriftSpec.from_vector((1.0, 2.0), lam=0.5, b=1.5, small_set=(True, True), level=2.0)


def two_state_minorizer() -> Minorizer:
    return Minorizer(epsilon=0.28, nu=DiscreteMeasure((2.0 / 3.0, 1.0 / 3.0)))
