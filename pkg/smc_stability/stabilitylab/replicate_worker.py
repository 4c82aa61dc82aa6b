"""
Модуль организации прогона повторов сэмплера. Повторы независимы и выполняются
пулом воркеров joblib; результат каждого повтора зависит только от seed и номера
повтора, поэтому workers = 1 и workers = K дают одинаковые таблицы.

  class ReplicateWorker - класс прогона повторов одной ячейки сетки.

    def run_replicate - прогон одного повтора с обработкой вырождения.

    def run_all - прогон всех повторов ячейки.

  def estimates_of - оценки непрерванных повторов.

  def trajectories_of - общая таблица траекторий всех повторов.

  def monitored_statistics - max η^N_k(V) и min η^N_k(G̃) по шагам и повторам.
"""
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from smc_stability.common.exceptions import TotalDegeneracyError
from smc_stability.common.logger_config import logger
from smc_stability.fk_core.drift import DriftSpec
from smc_stability.fk_core.model import FKModel
from smc_stability.particles.ensemble import StepSummary
from smc_stability.particles.sampler import estimate, run_sampler, trajectories_frame


@dataclass(eq=False)
class ReplicateResult:
    replicate: int
    estimate: float
    summaries: Optional[list[StepSummary]]
    aborted: bool = False


class ReplicateWorker:
    """ Класс прогона повторов: одна модель, N частиц, тестовая функция f. """

    def __init__(self, model: FKModel, N: int, seed: int, f: Callable,
                 drift: DriftSpec = None, trajectory: bool = False, replicate_offset: int = 0):
        self.model = model
        self.N = N  # pylint: disable=invalid-name
        self.seed = seed
        self.f = f
        self.drift = drift
        self.trajectory = trajectory or drift is not None
        self.replicate_offset = replicate_offset

    def run_replicate(self, replicate: int) -> ReplicateResult:
        """ Прогон одного повтора; полное вырождение записывается как прерванный повтор. """
        replicate_id = self.replicate_offset + replicate
        try:
            terminal, summaries = run_sampler(self.model, self.N, self.seed, replicate_id,
                                              drift=self.drift, trajectory=self.trajectory)
        except TotalDegeneracyError as error:
            self.handle_error_in_replicate(error)
            return ReplicateResult(replicate_id, np.nan, None, aborted=True)
        return ReplicateResult(replicate_id, estimate(terminal, self.f), summaries)

    @staticmethod
    def handle_error_in_replicate(error: TotalDegeneracyError) -> None:
        """ Набор действий при вырождении повтора. """
        logger.error(error.msg)

    def run_all(self, replicates: int, workers: int = 1) -> list[ReplicateResult]:
        """ Все повторы ячейки; порядок результатов совпадает с номерами повторов. """
        if workers == 1:
            return [self.run_replicate(replicate) for replicate in range(replicates)]
        return Parallel(n_jobs=workers)(
            delayed(self.run_replicate)(replicate) for replicate in range(replicates))


def estimates_of(results: list[ReplicateResult]) -> np.ndarray:
    """ Оценки непрерванных повторов. """
    return np.array([result.estimate for result in results if not result.aborted])


def trajectories_of(results: list[ReplicateResult]) -> pd.DataFrame:
    summaries = [summary for result in results if result.summaries
                 for summary in result.summaries]
    return trajectories_frame(summaries)


def monitored_statistics(trajectories: pd.DataFrame, g_tilde_threshold: float = None) -> dict:
    """ Эмпирические max η^N_k(V) и min η^N_k(G̃) по (k, повтор). """
    if trajectories.empty:
        return {}
    statistics = {'max_eta_V': float(trajectories['eta_V'].max()),
                  'min_eta_Gtilde': float(trajectories['eta_Gtilde'].min())}
    if g_tilde_threshold is not None:
        below = bool(statistics['min_eta_Gtilde'] < g_tilde_threshold)
        statistics['g_tilde_below_threshold'] = below
        if below:
            logger.warning('min η^N(G̃) = %.3g ниже порога %.3g',
                           statistics['min_eta_Gtilde'], g_tilde_threshold)
    return statistics
