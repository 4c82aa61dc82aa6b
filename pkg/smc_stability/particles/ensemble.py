"""
Ансамбль частиц, эмпирическая мера и сводка одного шага.

  @dataclass
  class Ensemble: - состояния N частиц, индекс шага и ключ потока (seed, повтор).

  @dataclass
  class EmpiricalMeasure: - η^N = (1/N) Σ δ_{ξ^i}.

  @dataclass
  class StepSummary: - ESS, крайние log-веса, η^N(V), η^N(G̃) на шаге k.

    def convert_to_pd_series() - строка таблицы траекторий.
"""
from dataclasses import asdict, dataclass

import numpy as np
import pandas as pd

from smc_stability.common.constants import COLS_TRAJECTORY
from smc_stability.fk_core.model import FlowIndex


@dataclass(frozen=True, eq=False)
class Ensemble:
    """ Ансамбль ζ_{n,k}. Случайность шага k берётся из потока (seed, повтор, k). """
    states: np.ndarray
    step: FlowIndex
    seed: int
    replicate: int = 0

    @property
    def N(self) -> int:  # pylint: disable=invalid-name
        return len(self.states)


@dataclass(frozen=True, eq=False)
class EmpiricalMeasure:
    """ Равные веса 1/N на носителе. """
    support: np.ndarray

    @property
    def N(self) -> int:  # pylint: disable=invalid-name
        return len(self.support)


@dataclass
class StepSummary:
    """ Класс для хранения сводки шага; на k = n поля весов равны NaN. """
    replicate: int = 0
    n: int = 0
    k: int = 0
    ess: float = np.nan
    log_w_max: float = np.nan
    log_w_min: float = np.nan
    eta_V: float = np.nan  # pylint: disable=invalid-name
    eta_Gtilde: float = np.nan  # pylint: disable=invalid-name

    def convert_to_pd_series(self) -> pd.Series:
        """ Конвертировать сводку в pd.Series с колонками таблицы траекторий. """
        return pd.Series(asdict(self), index=COLS_TRAJECTORY)
