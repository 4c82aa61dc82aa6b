"""
Функция дрейфа V и константы условия дрейфа и минорации.

  @dataclass
  class DriftSpec: - V в виде log V, темп λ, уровень d, сдвиг b, малое множество C.

  @dataclass
  class Minorizer: - пара (ε, ν) условия минорации на конечном пространстве.
"""
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from smc_stability.fk_core.measures import DiscreteMeasure


@dataclass(frozen=True, eq=False)
class DriftSpec:
    """ Функция дрейфа и константы MV ≤ λV + b·1_C. Поля констант необязательны,
    если нужна только сама V. """
    log_v: Callable[[np.ndarray], np.ndarray]
    lam: Optional[float] = None
    b: Optional[float] = None
    level: Optional[float] = None
    small_set: Optional[np.ndarray] = None

    def values(self, states) -> np.ndarray:
        """ V(x) для пачки состояний. """
        return np.exp(self.log_v(states))

    @classmethod
    def from_vector(cls, v, lam: float = None, b: float = None,
                    small_set=None, level: float = None) -> 'DriftSpec':
        """ V на конечном пространстве, заданная таблицей значений. """
        log_table = np.log(np.asarray(v, dtype=float))
        if small_set is not None:
            small_set = np.asarray(small_set, dtype=bool)
        return cls(log_v=lambda states: log_table[np.asarray(states, dtype=int)],
                   lam=lam, b=b, level=level, small_set=small_set)

    @classmethod
    def constant(cls) -> 'DriftSpec':
        """ V ≡ 1. """
        return cls(log_v=lambda states: np.zeros(len(np.asarray(states))))


@dataclass(frozen=True, eq=False)
class Minorizer:
    """ M(x, ·) ≥ ε ν(·) для x из малого множества. """
    epsilon: float
    nu: DiscreteMeasure
