"""
Эксперимент забывания начальной меры: смещение π^N_n(f) - π(f) по горизонту n.

    def fit_log_decay - МНК log|bias| ~ n по ячейкам выше шума.
    def exact_bias_table - точное смещение η_{n,n}(f) - π(f) на конечной модели.
    def finite_companion - точный вариант на 2-точечной модели с μ = δ_0.
    def bias_decay_experiment - смещение по сетке n и его аппроксимация.
"""
from typing import Callable

import numpy as np
import pandas as pd
from scipy.stats import linregress

from smc_stability.common.config import ExperimentConfig
from smc_stability.common.constants import NOISE_FLOOR_SE, Status, Tolerance
from smc_stability.common.logger_config import logger
from smc_stability.fk_core.measures import DiscreteMeasure
from smc_stability.fk_core.model import FKModel
from smc_stability.oracle.exact_flow import eta_exact
from smc_stability.oracle.fixtures import finite_tempered_model, two_state_family
from smc_stability.stabilitylab.model_builder import (build_drift, build_family, build_initial,
                                                      build_model, build_test_function,
                                                      reference_value)
from smc_stability.stabilitylab.replicate_worker import (ReplicateWorker, estimates_of,
                                                         monitored_statistics, trajectories_of)
from smc_stability.stabilitylab.reports import DecayFit
from smc_stability.tempering.schedules import TemperingSchedule
from smc_stability.tempering.tempered_family import tempered_distribution

COMPANION_N_GRID = tuple(range(1, 31))


def fit_log_decay(per_n: pd.DataFrame) -> tuple[float, float, float, Status]:
    """ Наклон, свободный член и r² по строкам с signal = True.
    Меньше двух таких строк - статус inconclusive. """
    signal = per_n[per_n['signal']]
    if len(signal) < 2:
        logger.warning('Смещение не отделяется от шума: %s ячеек выше порога', len(signal))
        return np.nan, np.nan, np.nan, Status.INCONCLUSIVE
    fit = linregress(signal['n'].to_numpy(dtype=float),
                     np.log(signal['bias'].abs().to_numpy()))
    return float(fit.slope), float(fit.intercept), float(fit.rvalue ** 2), Status.SUCCESS


def exact_bias_table(model_for: Callable[[int], FKModel], f_values: np.ndarray,
                     reference: float, n_grid) -> pd.DataFrame:
    floor = Tolerance.IDENTITY.value * max(1.0, abs(reference))
    rows = []
    for n in n_grid:
        value = eta_exact(model_for(n), n).integrate(f_values)
        bias = value - reference
        rows.append({'n': n, 'estimate': value, 'bias': bias, 'se': 0.0,
                     'signal': bool(abs(bias) > floor)})
    return pd.DataFrame(rows)


def finite_companion(schedule: TemperingSchedule) -> DecayFit:
    """ 2-точечная цель с тем же расписанием (и γ̲), μ = δ_0, f = 1_{1}, n = 1..30. """
    fam = two_state_family(schedule.gamma_floor, schedule)
    start = DiscreteMeasure.dirac(2, 0)
    f_values = np.array([0.0, 1.0])
    reference = tempered_distribution(fam, 1.0).integrate(f_values)
    per_n = exact_bias_table(lambda n: finite_tempered_model(fam, n, initial=start),
                             f_values, reference, COMPANION_N_GRID)
    slope, intercept, r_squared, status = fit_log_decay(per_n)
    return DecayFit(slope=slope, intercept=intercept, r_squared=r_squared, per_n_bias=per_n,
                    status=status, reference_label='exact', exact=True)


def _monte_carlo_table(config: ExperimentConfig, fam, initial, f, reference: float,
                       workers: int) -> tuple[pd.DataFrame, pd.DataFrame]:
    drift = build_drift(config, fam)
    rows, frames = [], []
    particles = config.grids.fixed_N
    for cell, n in enumerate(config.grids.n):
        worker = ReplicateWorker(build_model(config, fam, n, initial), particles, config.seed,
                                 f, drift=drift, replicate_offset=cell * config.replicates)
        results = worker.run_all(config.replicates, workers)
        estimates = estimates_of(results)
        mean = float(estimates.mean()) if estimates.size else np.nan
        se = float(estimates.std(ddof=1) / np.sqrt(estimates.size)) if estimates.size > 1 else np.nan
        bias = mean - reference
        rows.append({'n': n, 'estimate': mean, 'bias': bias, 'se': se,
                     'signal': bool(abs(bias) > NOISE_FLOOR_SE * se),
                     'aborted': len(results) - estimates.size})
        frames.append(trajectories_of(results))
        logger.info('bias-decay: n = %s, смещение %.4g ± %.2g', n, bias, se)
    return pd.DataFrame(rows), pd.concat(frames, ignore_index=True)


def bias_decay_experiment(config: ExperimentConfig, workers: int = 1) -> DecayFit:
    """ Для конечной цели - точное смещение по потоку оракула; иначе повторы
    сэмплера при N = fixed_N и точный компаньон на 2-точечной модели. """
    fam = build_family(config)
    initial = build_initial(config, fam)
    f = build_test_function(config, fam)
    n_max = max(config.grids.n)
    reference, label = reference_value(config, fam, f, initial, config.grids.fixed_N, n_max)

    if fam.target.is_finite:
        f_values = f(np.arange(fam.target.n_states))
        per_n = exact_bias_table(lambda n: build_model(config, fam, n, initial), f_values,
                                 reference, config.grids.n)
        slope, intercept, r_squared, status = fit_log_decay(per_n)
        return DecayFit(slope=slope, intercept=intercept, r_squared=r_squared, per_n_bias=per_n,
                        status=status, reference_label=label, exact=True)

    per_n, trajectories = _monte_carlo_table(config, fam, initial, f, reference, workers)
    slope, intercept, r_squared, status = fit_log_decay(per_n)
    return DecayFit(slope=slope, intercept=intercept, r_squared=r_squared, per_n_bias=per_n,
                    status=status, reference_label=label, exact=False,
                    companion=finite_companion(fam.schedule),
                    trajectories=trajectories,
                    monitored=monitored_statistics(trajectories, config.g_tilde_threshold))
