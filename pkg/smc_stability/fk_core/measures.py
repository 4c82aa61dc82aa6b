"""
Дискретная мера на конечном перечисленном пространстве состояний.

  @dataclass
  class DiscreteMeasure: - вероятностный (или знаковый) вектор весов.
"""
from dataclasses import dataclass

import numpy as np

from smc_stability.common.constants import Tolerance
from smc_stability.common.exceptions import InvalidMeasureError


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """ Вектор весов над m состояниями. При signed=False это вероятностная мера. """
    weights: np.ndarray
    signed: bool = False

    def __post_init__(self):
        weights = np.array(self.weights, dtype=float)
        if weights.ndim != 1 or weights.size == 0:
            raise InvalidMeasureError('ожидается непустой одномерный вектор')
        if not np.all(np.isfinite(weights)):
            raise InvalidMeasureError('веса не конечны')
        if not self.signed:
            if np.any(weights < 0):
                raise InvalidMeasureError('отрицательные веса')
            if abs(weights.sum() - 1.0) > Tolerance.IDENTITY.value:
                raise InvalidMeasureError(f'сумма весов {weights.sum()!r} не равна 1')
        weights.setflags(write=False)
        object.__setattr__(self, 'weights', weights)

    def __len__(self) -> int:
        return self.weights.size

    @classmethod
    def dirac(cls, m: int, state: int) -> 'DiscreteMeasure':
        """ Мера Дирака в состоянии state. """
        weights = np.zeros(m)
        weights[state] = 1.0
        return cls(weights)

    @classmethod
    def uniform(cls, m: int) -> 'DiscreteMeasure':
        return cls(np.full(m, 1.0 / m))

    @classmethod
    def from_unnormalized(cls, values) -> 'DiscreteMeasure':
        """ Нормировать неотрицательный вектор к вероятностной мере. """
        values = np.asarray(values, dtype=float)
        total = values.sum()
        if not total > 0:
            raise InvalidMeasureError('нулевая масса при нормировке')
        return cls(values / total)

    @classmethod
    def from_log_weights(cls, log_values) -> 'DiscreteMeasure':
        """ Нормировать вектор логарифмов весов с вычитанием максимума. """
        log_values = np.asarray(log_values, dtype=float)
        return cls.from_unnormalized(np.exp(log_values - log_values.max()))

    def integrate(self, values) -> float:
        """ η(f) для вектора значений f по состояниям. """
        return float(np.dot(self.weights, np.asarray(values, dtype=float)))

    def sample(self, size: int, rng: np.random.Generator) -> np.ndarray:
        """ size независимых состояний по этой мере. """
        return rng.choice(self.weights.size, size=size, p=self.weights)

    def minus(self, other: 'DiscreteMeasure') -> 'DiscreteMeasure':
        """ Знаковая разность мер. """
        return DiscreteMeasure(self.weights - other.weights, signed=True)
