"""
Модель Фейнмана-Каца: индексы шагов, семейства ядер и потенциалов, начальное
распределение, общие операции над потенциалами и ядрами.

Состояния непрозрачны: на конечном пространстве это целые метки (пачка формы (N,)),
в R^d это вещественные векторы (пачка формы (N, d)). Все семейства работают с пачками.

  @dataclass
  class FlowIndex: - пара (n, k), 0 ≤ k ≤ n, n ≥ 1.

  @dataclass
  class PotentialFamily: - log G_{n,k} и его верхняя граница log Ḡ.

  @dataclass
  class KernelFamily: - сэмплер ядер M_{n,k} и, для конечных пространств, их матрицы.

  @dataclass
  class InitialDistribution: - сэмплер μ и, если есть, μ в виде DiscreteMeasure.

  @dataclass
  class FKModel: - горизонт n, ядра, потенциалы, μ.

    def normalized_log_potential - log G̃_{n,k}(x).
    def u_function - U_{n,k}(x) = -n log G̃_{n,k}(x).
    def kernel_step - одна выборка из M_{n,k}(x, ·).
    def matrix_kernel_family - ядро, заданное стохастическими матрицами.
    def reweight_log - нормированные веса из логарифмов.
"""
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from smc_stability.common.constants import Tolerance
from smc_stability.common.exceptions import (IndexOutOfRangeError, InvalidKernelError,
                                             PotentialBoundError, TotalDegeneracyError)
from smc_stability.fk_core.measures import DiscreteMeasure


@dataclass(frozen=True)
class FlowIndex:
    """ Двойной индекс (n, k): своя модель для каждого горизонта n. """
    n: int
    k: int

    def __post_init__(self):
        if self.n < 1:
            raise IndexOutOfRangeError('n', self.n, 1, 'inf')
        if not 0 <= self.k <= self.n:
            raise IndexOutOfRangeError('k', self.k, 0, self.n)

    def require(self, low: int, high: int) -> 'FlowIndex':
        """ Проверить, что k лежит в [low, high]. """
        if not low <= self.k <= high:
            raise IndexOutOfRangeError('k', self.k, low, high)
        return self


@dataclass(frozen=True, eq=False)
class PotentialFamily:
    """ log G_{n,k}(x) для k из [0, n-1] и константа log Ḡ из условия ограниченности. """
    eval_log: Callable[[FlowIndex, np.ndarray], np.ndarray]
    upper_bound_log: float

    def log_values(self, idx: FlowIndex, states) -> np.ndarray:
        """ log G_{n,k} на пачке состояний. """
        idx.require(0, idx.n - 1)
        return np.asarray(self.eval_log(idx, states), dtype=float)


@dataclass(frozen=True, eq=False)
class KernelFamily:
    """ Марковские ядра M_{n,k}, k из [1, n]. """
    sample: Callable[[FlowIndex, np.ndarray, np.random.Generator], np.ndarray]
    exact_matrix: Optional[Callable[[FlowIndex], np.ndarray]] = None

    def draw(self, idx: FlowIndex, states, rng: np.random.Generator) -> np.ndarray:
        """ По одной выборке из M_{n,k}(x, ·) для каждого состояния пачки. """
        idx.require(1, idx.n)
        return self.sample(idx, states, rng)

    def matrix(self, idx: FlowIndex) -> np.ndarray:
        idx.require(1, idx.n)
        return np.asarray(self.exact_matrix(idx), dtype=float)


@dataclass(frozen=True, eq=False)
class InitialDistribution:
    """ Начальное распределение μ: сэмплер (size, rng) -> пачка и, если есть, точный вектор. """
    sampler: Callable[[int, np.random.Generator], np.ndarray]
    measure: Optional[DiscreteMeasure] = None
    label: str = ''

    @classmethod
    def from_measure(cls, measure: DiscreteMeasure, label: str = '') -> 'InitialDistribution':
        return cls(sampler=measure.sample, measure=measure, label=label)


@dataclass(frozen=True, eq=False)
class FKModel:
    """ Одна модель Фейнмана-Каца с горизонтом n. n_states задаётся для конечных моделей. """
    horizon: int
    kernels: KernelFamily
    potentials: PotentialFamily
    initial: InitialDistribution
    n_states: Optional[int] = None

    def __post_init__(self):
        if self.horizon < 1:
            raise IndexOutOfRangeError('n', self.horizon, 1, 'inf')
        if self.is_finite:
            self._validate_finite()

    @property
    def is_finite(self) -> bool:
        return self.n_states is not None and self.kernels.exact_matrix is not None

    def index(self, k: int) -> FlowIndex:
        return FlowIndex(self.horizon, k)

    def state_labels(self) -> np.ndarray:
        """ Метки состояний конечной модели 0..m-1. """
        return np.arange(self.n_states)

    def _validate_finite(self) -> None:
        """ Стохастичность матриц и строгая положительность потенциалов. """
        states = self.state_labels()
        for k in range(1, self.horizon + 1):
            matrix = self.kernels.matrix(self.index(k))
            if matrix.shape != (self.n_states, self.n_states):
                raise InvalidKernelError(k, f'размер {matrix.shape}')
            if np.any(matrix < 0):
                raise InvalidKernelError(k, 'отрицательные элементы')
            if np.max(np.abs(matrix.sum(axis=1) - 1.0)) > Tolerance.IDENTITY.value:
                raise InvalidKernelError(k, 'суммы строк не равны 1')
        for k in range(self.horizon):
            log_g = self.potentials.log_values(self.index(k), states)
            if not np.all(np.isfinite(log_g)):
                raise PotentialBoundError(k, 'потенциал должен быть строго положительным и конечным')
            bound = self.potentials.upper_bound_log
            if np.any(log_g > bound + Tolerance.IDENTITY.value * max(1.0, abs(bound))):
                raise PotentialBoundError(k, 'значение выше log Ḡ')


def _one(x) -> np.ndarray:
    """ Пачка из одного состояния. """
    return np.asarray(x)[None, ...]


def normalized_log_potential(pf: PotentialFamily, idx: FlowIndex, x) -> float:
    """ log G̃_{n,k}(x) = log G_{n,k}(x) - log Ḡ, результат ≤ 0. """
    value = float(pf.log_values(idx, _one(x))[0]) - pf.upper_bound_log
    if value > Tolerance.IDENTITY.value * max(1.0, abs(pf.upper_bound_log)):
        raise PotentialBoundError(idx.k, f'log G̃ = {value} > 0')
    return min(value, 0.0)


def u_function(pf: PotentialFamily, idx: FlowIndex, x) -> float:
    """ U_{n,k}(x) = -n log G̃_{n,k}(x) ≥ 0. """
    return -idx.n * normalized_log_potential(pf, idx, x)


def kernel_step(kf: KernelFamily, idx: FlowIndex, x, rng: np.random.Generator):
    """ Одна выборка из M_{n,k}(x, ·). """
    return kf.draw(idx, _one(x), rng)[0]


def matrix_kernel_family(matrix_fn: Callable[[FlowIndex], np.ndarray]) -> KernelFamily:
    """ Ядро на конечном пространстве по стохастическим матрицам.
    Выборка обратной функцией распределения строки, один равномерный на частицу. """

    def sample(idx: FlowIndex, states, rng: np.random.Generator) -> np.ndarray:
        states = np.asarray(states, dtype=int)
        cumulative = np.cumsum(np.asarray(matrix_fn(idx), dtype=float), axis=1)
        uniforms = rng.random(states.size)
        drawn = (uniforms[:, None] >= cumulative[states]).sum(axis=1)
        return np.minimum(drawn, cumulative.shape[1] - 1)

    return KernelFamily(sample=sample, exact_matrix=matrix_fn)


def reweight_log(log_w, replicate: int = 0, k: int = 0) -> np.ndarray:
    """ Нормированные веса из логарифмов с вычитанием максимума. """
    log_w = np.asarray(log_w, dtype=float)
    top = np.max(log_w)
    if top == -np.inf:
        raise TotalDegeneracyError(replicate, k)
    weights = np.exp(log_w - top)
    return weights / weights.sum()
