"""
Сборка объектов модели из конфигурации.

    def build_family - цель и расписание.
    def build_increment - приращение случайного блуждания.
    def build_initial - начальное распределение μ.
    def build_model - модель Фейнмана-Каца для горизонта n.
    def build_test_function - тестовая функция f.
    def build_drift - функция дрейфа (таблица для конечной модели или V ∝ π^{-βγ̲}).
    def build_minorizer - (ε, ν) из конфигурации.
    def reference_value - π(f): точное, аналитическое или оценённое длинным прогоном.
"""
from typing import Callable

import numpy as np

from smc_stability.common.config import ExperimentConfig
from smc_stability.common.constants import REFERENCE_BUDGET_FACTOR, StreamPurpose
from smc_stability.common.exceptions import PreconditionError
from smc_stability.common.logger_config import logger
from smc_stability.common.rng_streams import make_stream
from smc_stability.fk_core.drift import DriftSpec, Minorizer
from smc_stability.fk_core.measures import DiscreteMeasure
from smc_stability.fk_core.model import FKModel, InitialDistribution
from smc_stability.oracle.fixtures import finite_tempered_model
from smc_stability.rwm.increments import IncrementDistribution, make_increment
from smc_stability.rwm.metropolis import rwm_kernel_family, rwm_move
from smc_stability.tempering.schedules import make_schedule
from smc_stability.tempering.targets import make_target
from smc_stability.tempering.tempered_family import (TemperedFamily, build_potentials,
                                                     drift_function, tempered_distribution)


def build_family(config: ExperimentConfig) -> TemperedFamily:
    spec = config.model.schedule
    schedule = make_schedule(spec.name, spec.gamma_floor, spec.lipschitz, spec.knots)
    return TemperedFamily(target=make_target(**config.model.target), schedule=schedule)


def build_increment(config: ExperimentConfig) -> IncrementDistribution:
    return make_increment(config.model.increment.name, config.model.increment.scale)


def build_initial(config: ExperimentConfig, fam: TemperedFamily) -> InitialDistribution:
    """ tempered - π_γ̲, gaussian - N(mean, std²I), dirac - точка, finite - вектор весов. """
    spec = config.initial
    target = fam.target
    name = spec['name']
    if name == 'tempered':
        if target.is_finite:
            return InitialDistribution.from_measure(
                tempered_distribution(fam, fam.gamma_floor), 'π_γ̲')
        if target.direct_sampler is None:
            raise PreconditionError(f'у цели {target.name} нет прямого сэмплера π_γ̲')
        return InitialDistribution(
            sampler=lambda size, rng: target.direct_sampler(fam.gamma_floor, size, rng),
            label='π_γ̲')
    if name == 'dirac':
        if target.is_finite:
            return InitialDistribution.from_measure(
                DiscreteMeasure.dirac(target.n_states, int(spec['state'])), f'δ_{spec["state"]}')
        point = np.asarray(spec['state'], dtype=float).reshape(1, target.dim)
        return InitialDistribution(sampler=lambda size, rng: np.repeat(point, size, axis=0),
                                   label='δ_x0')
    if name == 'finite':
        if not target.is_finite:
            raise PreconditionError('начальный вектор весов задаётся только для конечной цели')
        return InitialDistribution.from_measure(DiscreteMeasure(spec['weights']), 'μ')
    if target.is_finite:
        raise PreconditionError('гауссовское начальное распределение задаётся только в R^d')
    mean = np.broadcast_to(np.asarray(spec.get('mean', 0.0), dtype=float), (target.dim,)).copy()
    std = spec.get('std')
    std = 1.0 / np.sqrt(fam.gamma_floor) if std is None else float(std)
    return InitialDistribution(
        sampler=lambda size, rng: mean[None, :] + std * rng.standard_normal((size, target.dim)),
        label=f'N({mean.tolist()}, {std:.4g}²)')


def build_model(config: ExperimentConfig, fam: TemperedFamily, n: int,
                initial: InitialDistribution) -> FKModel:
    if fam.target.is_finite:
        return finite_tempered_model(fam, n, config.model.flip, initial.measure)
    kernels = rwm_kernel_family(fam, fam.schedule, n, build_increment(config))
    return FKModel(horizon=n, kernels=kernels, potentials=build_potentials(fam, n),
                   initial=initial)


def build_test_function(config: ExperimentConfig,
                        fam: TemperedFamily) -> Callable[[np.ndarray], np.ndarray]:
    """ identity - метка состояния или первая координата; indicator - 1 на списке меток;
    constant - константа. """
    spec = config.test_function
    name = spec['name']
    finite = fam.target.is_finite
    if name == 'constant':
        value = float(spec.get('value', 1.0))
        return lambda states: np.full(len(states), value)
    if name == 'indicator':
        if not finite:
            raise PreconditionError('индикатор набора меток задаётся только для конечной цели')
        labels = np.asarray(spec.get('states', [0]), dtype=int)
        return lambda states: np.isin(np.asarray(states, dtype=int), labels).astype(float)
    if finite:
        return lambda states: np.asarray(states, dtype=float)
    return lambda states: fam.target.points(states)[:, 0]


def build_drift(config: ExperimentConfig, fam: TemperedFamily) -> DriftSpec:
    inputs = config.drift
    if inputs is None or not fam.target.is_finite:
        return drift_function(fam, config.model.beta)
    small_set = None
    if inputs.small_set is not None:
        small_set = np.zeros(fam.target.n_states, dtype=bool)
        small_set[list(inputs.small_set)] = True
    return DriftSpec.from_vector(inputs.v, lam=inputs.lam, b=inputs.b, small_set=small_set)


def build_minorizer(config: ExperimentConfig) -> Minorizer:
    if config.drift is None:
        raise PreconditionError('нужна секция drift с ε и ν')
    return Minorizer(epsilon=config.drift.epsilon,
                     nu=DiscreteMeasure.from_unnormalized(config.drift.nu))


def _estimated_reference(fam: TemperedFamily, q: IncrementDistribution, f, initial,
                         chains: int, steps: int, seed: int) -> float:
    """ Среднее f по второй половине прогона chains цепей RWM при γ = 1. """
    rng = make_stream(seed, StreamPurpose.REFERENCE)
    states = fam.target.points(initial.sampler(chains, rng))
    total, count = 0.0, 0
    for step in range(steps):
        states, _ = rwm_move(fam, 1.0, q, states, rng)
        if step >= steps // 2:
            total += float(np.sum(f(states)))
            count += chains
    return total / count


def reference_value(config: ExperimentConfig, fam: TemperedFamily, f,
                    initial: InitialDistribution, particles: int, n_max: int) -> tuple[float, str]:
    """ π(f) и метка: exact, analytic или estimated (бюджет в 10 раз больше сэмплера). """
    target = fam.target
    if target.is_finite:
        return tempered_distribution(fam, 1.0).integrate(f(np.arange(target.n_states))), 'exact'
    name = config.test_function['name']
    if name == 'constant':
        return float(config.test_function.get('value', 1.0)), 'analytic'
    if name == 'identity' and target.target_mean is not None:
        return float(target.target_mean[0]), 'analytic'
    logger.info('Оценка π(f) длинным прогоном RWM при γ = 1')
    value = _estimated_reference(fam, build_increment(config), f, initial, particles,
                                 REFERENCE_BUDGET_FACTOR * n_max, config.seed)
    return value, 'estimated'
