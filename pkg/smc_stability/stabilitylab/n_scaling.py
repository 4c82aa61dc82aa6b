"""
Эксперимент масштабирования ошибки: RMSE по N при фиксированном n и по n при
фиксированном N.

    def rmse_cell - RMSE по повторам и его стандартная ошибка (дельта-метод).
    def n_scaling_experiment - обе таблицы, наклон log RMSE по log N и равномерность по n.
"""
import numpy as np
import pandas as pd
from scipy.stats import linregress

from smc_stability.common.config import ExperimentConfig
from smc_stability.common.constants import MIN_REPLICATES_PER_CELL, MsgForUser, Status
from smc_stability.common.exceptions import PreconditionError
from smc_stability.common.logger_config import logger
from smc_stability.oracle.exact_flow import eta_exact
from smc_stability.stabilitylab.model_builder import (build_drift, build_family, build_initial,
                                                      build_model, build_test_function,
                                                      reference_value)
from smc_stability.stabilitylab.replicate_worker import (ReplicateWorker, estimates_of,
                                                         monitored_statistics, trajectories_of)
from smc_stability.stabilitylab.reports import ScalingFit


def rmse_cell(estimates: np.ndarray, reference: float) -> tuple[float, float]:
    """ sqrt(mean e²) и SE через дисперсию e²: se(RMSE) = se(MSE) / (2 RMSE). """
    squared = (np.asarray(estimates, dtype=float) - reference) ** 2
    mse = float(squared.mean())
    rmse = float(np.sqrt(mse))
    if rmse == 0.0:
        return 0.0, 0.0
    se_mse = float(squared.std(ddof=1) / np.sqrt(squared.size))
    return rmse, se_mse / (2.0 * rmse)


class _CellRunner:
    """ Прогон ячеек сетки с общим счётчиком смещения номеров повторов. """

    def __init__(self, config: ExperimentConfig, workers: int):
        self.config = config
        self.workers = workers
        self.fam = build_family(config)
        self.initial = build_initial(config, self.fam)
        self.f = build_test_function(config, self.fam)
        self.drift = build_drift(config, self.fam)
        self.cell = 0
        self.frames = []
        self._reference = None

    def reference_for(self, model) -> tuple[float, str]:
        """ Для конечной цели - точное η_{n,n}(f), иначе π(f). """
        if self.fam.target.is_finite:
            f_values = self.f(model.state_labels())
            return eta_exact(model, model.horizon).integrate(f_values), 'exact'
        if self._reference is None:
            self._reference = reference_value(self.config, self.fam, self.f, self.initial,
                                              max(self.config.grids.N),
                                              max(self.config.grids.n))
        return self._reference

    def run(self, n: int, particles: int) -> dict:
        model = build_model(self.config, self.fam, n, self.initial)
        reference, label = self.reference_for(model)
        worker = ReplicateWorker(model, particles, self.config.seed, self.f, drift=self.drift,
                                 replicate_offset=self.cell * self.config.replicates)
        self.cell += 1
        results = worker.run_all(self.config.replicates, self.workers)
        self.frames.append(trajectories_of(results))
        estimates = estimates_of(results)
        rmse, se = rmse_cell(estimates, reference)
        logger.info('n-scaling: n = %s, N = %s, RMSE = %.4g ± %.2g', n, particles, rmse, se)
        return {'n': n, 'N': particles, 'rmse': rmse, 'se': se, 'reference': reference,
                'reference_label': label, 'replicates': int(estimates.size),
                'aborted': len(results) - int(estimates.size)}


def _slope(per_particles: pd.DataFrame) -> tuple[float, float, Status]:
    positive = per_particles[per_particles['rmse'] > 0]
    if len(positive) < 2:
        if (per_particles['rmse'] == 0).all():
            return np.nan, np.nan, Status.SUCCESS
        return np.nan, np.nan, Status.INCONCLUSIVE
    fit = linregress(np.log(positive['N'].to_numpy(dtype=float)),
                     np.log(positive['rmse'].to_numpy()))
    return float(fit.slope), float(fit.stderr), Status.SUCCESS


def _uniform_ratio(per_n: pd.DataFrame) -> tuple[float, float]:
    """ max/min RMSE по n и его осторожная нижняя оценка через ±2 SE. """
    top = per_n.loc[per_n['rmse'].idxmax()]
    low = per_n.loc[per_n['rmse'].idxmin()]
    if low['rmse'] == 0:
        return np.nan, np.nan
    lower = (top['rmse'] - 2 * top['se']) / (low['rmse'] + 2 * low['se'])
    return float(top['rmse'] / low['rmse']), float(lower)


def n_scaling_experiment(config: ExperimentConfig, workers: int = 1) -> ScalingFit:
    """ RMSE(N) при n = fixed_n и RMSE(n) при N = fixed_N. Нарушенные гипотезы теории
    записываются как предупреждения, эксперимент выполняется. """
    if config.replicates < MIN_REPLICATES_PER_CELL:
        raise PreconditionError(f'нужно не меньше {MIN_REPLICATES_PER_CELL} повторов в ячейке, '
                                f'задано {config.replicates}')
    warnings = tuple(config.warnings)
    if warnings:
        logger.warning('n-scaling: %s', MsgForUser.OUT_OF_THEORY.value)

    runner = _CellRunner(config, workers)
    per_particles = pd.DataFrame([runner.run(config.grids.fixed_n, particles)
                                  for particles in config.grids.N])
    per_n = pd.DataFrame([runner.run(n, config.grids.fixed_N) for n in config.grids.n])
    slope, slope_se, status = _slope(per_particles)
    ratio, ratio_lower = _uniform_ratio(per_n)
    trajectories = pd.concat(runner.frames, ignore_index=True)
    return ScalingFit(slope=slope, slope_se=slope_se, per_N_rmse=per_particles, per_n_rmse=per_n,
                      uniform_ratio=ratio, uniform_ratio_lower=ratio_lower, status=status,
                      warnings=warnings, trajectories=trajectories,
                      monitored=monitored_statistics(trajectories, config.g_tilde_threshold))
