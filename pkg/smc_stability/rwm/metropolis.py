"""
Ядра случайного блуждания Метрополиса с инвариантным распределением π_γ.

Для конечных целей есть матричный вариант с симметричным предложением,
точно сохраняющий π_γ, - он даёт точные ядра для оракула.

  @dataclass
  class DriftProbeReport: - оценки MV(x)/V(x) на сферических оболочках.

    def rwm_move - один шаг для пачки цепей (по одному равномерному на цепь).
    def rwm_step - один шаг одной цепи.
    def rwm_kernel_family - ядра M_{n,k} с инвариантным π_{γ(k/n)}.
    def metropolis_matrix - матрица Метрополиса для конечной цели.
    def finite_metropolis_family - ядра M_{n,k} конечной цели в матричном виде.
    def drift_probe - Монте-Карло оценка коэффициента дрейфа λ̂(r).
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np
import pandas as pd
from scipy.special import logsumexp

from smc_stability.common.constants import PROBE_BAND_SE, PROBE_PROPOSALS, StreamPurpose
from smc_stability.common.exceptions import ParameterRangeError, UnsupportedModelError
from smc_stability.common.rng_streams import make_stream
from smc_stability.fk_core.drift import DriftSpec
from smc_stability.fk_core.model import FlowIndex, KernelFamily, matrix_kernel_family
from smc_stability.rwm.increments import IncrementDistribution
from smc_stability.tempering.schedules import TemperingSchedule
from smc_stability.tempering.tempered_family import TemperedFamily, check_gamma


def _log_acceptance(gamma: float, log_current: np.ndarray, log_proposed: np.ndarray) -> np.ndarray:
    """ log(1 ∧ exp[γ(log π̄(x+y) - log π̄(x))]); не конечная цель в предложении - -inf. """
    with np.errstate(invalid='ignore', over='ignore'):
        log_ratio = gamma * (log_proposed - log_current)
    log_ratio = np.where(np.isfinite(log_proposed), log_ratio, -np.inf)
    log_ratio = np.where(np.isnan(log_ratio), -np.inf, log_ratio)
    return np.minimum(log_ratio, 0.0)


def rwm_move(fam: TemperedFamily, gamma: float, q: IncrementDistribution, states,
             rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """ Предложить x + y, y ~ q, принять при log u < γ(log π̄(x+y) - log π̄(x)).
    Возвращает новые состояния и маску принятия. """
    gamma = check_gamma(fam, gamma)
    target = fam.target
    states = target.points(states)
    proposals = states + q.sample(target.dim, states.shape[0], rng)
    log_accept = _log_acceptance(gamma, target.log_unnorm(states), target.log_unnorm(proposals))
    with np.errstate(divide='ignore'):
        accepted = np.log(rng.random(states.shape[0])) < log_accept
    return np.where(accepted[:, None], proposals, states), accepted


def rwm_step(fam: TemperedFamily, gamma: float, q: IncrementDistribution, x,
             rng: np.random.Generator) -> np.ndarray:
    """ Один шаг одной цепи; при отказе возвращается x. """
    point = np.asarray(x, dtype=float).reshape(1, -1)
    moved, _ = rwm_move(fam, gamma, q, point, rng)
    return moved[0]


def rwm_kernel_family(fam: TemperedFamily, schedule: TemperingSchedule, n: int,
                      q: IncrementDistribution) -> KernelFamily:
    """ M_{n,k} - шаг Метрополиса с инвариантным π_{γ(k/n)}. """
    if n < 1:
        raise ParameterRangeError('n', n, '[1, inf)')
    if fam.target.is_finite:
        raise UnsupportedModelError('случайное блуждание задано только в R^d')
    q.check_symmetry(fam.target.dim)
    gammas = schedule(np.arange(n + 1) / n)

    def sample(idx: FlowIndex, states, rng):
        moved, _ = rwm_move(fam, gammas[idx.k], q, states, rng)
        return moved

    return KernelFamily(sample=sample)


def metropolis_matrix(log_unnorm, gamma: float, flip: float) -> np.ndarray:
    """ Предложение: с вероятностью flip равномерно одно из других состояний.
    Принятие min(1, exp[γ(log π̄(y) - log π̄(x))]). """
    table = np.asarray(log_unnorm, dtype=float)
    m = table.size
    if not 0 < flip <= 1:
        raise ParameterRangeError('flip', flip, '(0, 1]')
    if m == 1:
        return np.ones((1, 1))
    accept = np.exp(np.minimum(gamma * (table[None, :] - table[:, None]), 0.0))
    matrix = flip / (m - 1) * accept
    np.fill_diagonal(matrix, 0.0)
    np.fill_diagonal(matrix, 1.0 - matrix.sum(axis=1))
    return matrix


def finite_metropolis_family(fam: TemperedFamily, n: int, flip: float) -> KernelFamily:
    """ Матричные ядра M_{n,k} с инвариантным π_{γ(k/n)} на конечной цели. """
    if not fam.target.is_finite:
        raise UnsupportedModelError('матрица Метрополиса строится только для конечной цели')
    gammas = fam.schedule(np.arange(n + 1) / n)
    matrices = [metropolis_matrix(fam.target.table, gammas[k], flip) for k in range(n + 1)]
    return matrix_kernel_family(lambda idx: matrices[idx.k])


@dataclass(frozen=True, eq=False)
class DriftProbeReport:
    """ Таблица оценок по точкам и λ̂(r) = max по оболочке. """
    table: pd.DataFrame
    per_radius: pd.DataFrame
    contracting_radius: Optional[float]


def _shell_points(dim: int, radius: float) -> np.ndarray:
    """ Точки ±r e_i на сфере радиуса r. """
    axes = np.eye(dim)
    return radius * np.concatenate([axes, -axes])


def _log_probe_terms(log_accept: np.ndarray, log_v_ratio: np.ndarray) -> np.ndarray:
    """ log[a V(x+y)/V(x) + 1 - a] по предложениям; при a = 0 слагаемое равно 0. """
    with np.errstate(invalid='ignore', divide='ignore'):
        moved_part = np.where(np.isneginf(log_accept), -np.inf, log_accept + log_v_ratio)
        stay_part = np.log1p(-np.exp(log_accept))
    return np.logaddexp(moved_part, stay_part)


def drift_probe(fam: TemperedFamily, gamma: float, q: IncrementDistribution, drift: DriftSpec,
                radii, seed: int = 0, proposals: int = PROBE_PROPOSALS) -> DriftProbeReport:
    """ Оценить MV(x)/V(x) = E[a V(x+y)/V(x) + 1 - a] по proposals предложениям в каждой
    точке оболочек. Среднее считается в логарифмах; переполнение даёт оценку inf, а не 0.
    λ̂(r) - максимум по оболочке, полоса - PROBE_BAND_SE стандартных ошибок. """
    gamma = check_gamma(fam, gamma)
    target = fam.target
    rows = []
    for radius_index, radius in enumerate(radii):
        for point_index, point in enumerate(_shell_points(target.dim, float(radius))):
            rng = make_stream(seed, StreamPurpose.PROBE, radius_index, point_index)
            x = point[None, :]
            moved = x + q.sample(target.dim, proposals, rng)
            log_accept = _log_acceptance(gamma, target.log_unnorm(x), target.log_unnorm(moved))
            log_terms = _log_probe_terms(log_accept, drift.log_v(moved) - drift.log_v(x))
            log_estimate = float(logsumexp(log_terms) - np.log(proposals))
            with np.errstate(over='ignore', invalid='ignore'):
                estimate = float(np.exp(log_estimate))
                band = float(PROBE_BAND_SE * np.exp(log_terms).std(ddof=1) / np.sqrt(proposals))
            if not np.isfinite(band):
                band = np.inf
            rows.append({'radius': float(radius), 'point': point_index,
                         'log_estimate': log_estimate, 'estimate': estimate, 'band': band})
    table = pd.DataFrame(rows)
    table['upper'] = table['estimate'] + table['band']
    per_radius = (table.groupby('radius', sort=True)
                  .agg(lambda_hat=('estimate', 'max'), lambda_upper=('upper', 'max'))
                  .reset_index())
    contracting = per_radius.loc[per_radius['lambda_upper'] < 1.0, 'radius']
    return DriftProbeReport(table=table, per_radius=per_radius,
                            contracting_radius=float(contracting.min()) if len(contracting) else None)
