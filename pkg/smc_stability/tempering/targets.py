"""
Встроенные целевые распределения π̄, задаваемые логарифмом ненормированной плотности.

Нормировочная константа Z нигде не вычисляется, все формулы используют отношения.
Супремум log π̄ - вход модели: аналитический для встроенных целей, для остальных
заявленная оценка сверху с флагом sup_verified = False.

  @dataclass
  class LogTarget: - log π̄, sup log π̄, градиент, прямой сэмплер π_γ (если есть).

    def gaussian_target - стандартная гауссовская цель в R^d.
    def gaussian_mixture_target - смесь гауссовских горбов одинаковой ширины.
    def logistic_target - апостериорное логистической регрессии на синтетических данных.
    def finite_target - таблица log π̄ на конечном пространстве.
    def make_target - цель по имени и параметрам.
"""
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.special import expit, logsumexp

from smc_stability.common.constants import StreamPurpose
from smc_stability.common.exceptions import PreconditionError, UnsupportedModelError
from smc_stability.common.rng_streams import make_stream


@dataclass(frozen=True, eq=False)
class LogTarget:
    """ Целевое распределение. Для конечных целей n_states задано, dim = 0. """
    name: str
    dim: int
    log_unnorm: Callable[[np.ndarray], np.ndarray]
    sup_log_unnorm: float
    gradient: Optional[Callable[[np.ndarray], np.ndarray]] = None
    argmax: Optional[np.ndarray] = None
    sup_verified: bool = True
    direct_sampler: Optional[Callable[[float, int, np.random.Generator], np.ndarray]] = None
    target_mean: Optional[np.ndarray] = None
    n_states: Optional[int] = None
    table: Optional[np.ndarray] = None

    @property
    def is_finite(self) -> bool:
        return self.n_states is not None

    def points(self, states) -> np.ndarray:
        """ Пачка состояний в каноническом виде: (N,) метки или (N, d) векторы. """
        if self.is_finite:
            return np.asarray(states, dtype=int)
        states = np.asarray(states, dtype=float)
        if states.ndim == 0:
            states = states[None]
        return states.reshape(states.shape[0], -1)


def _as_points(states) -> np.ndarray:
    states = np.asarray(states, dtype=float)
    if states.ndim == 0:
        states = states[None]
    return states.reshape(states.shape[0], -1)


def gaussian_target(dim: int = 1) -> LogTarget:
    """ π̄(x) = exp(-|x|²/2), sup log π̄ = 0 в нуле, π_γ = N(0, I/γ). """

    def log_unnorm(states):
        return -0.5 * np.sum(_as_points(states) ** 2, axis=1)

    def sampler(gamma, size, rng):
        return rng.standard_normal((size, dim)) / np.sqrt(gamma)

    return LogTarget(name='gaussian', dim=dim, log_unnorm=log_unnorm, sup_log_unnorm=0.0,
                     gradient=lambda states: -_as_points(states), argmax=np.zeros(dim),
                     direct_sampler=sampler, target_mean=np.zeros(dim))


def gaussian_mixture_target(weights, means, scale: float = 1.0) -> LogTarget:
    """ π̄(x) = Σ_i w_i exp(-|x - m_i|²/(2s²)); sup log π̄ ≤ logsumexp(log w). """
    weights = np.asarray(weights, dtype=float)
    means = np.asarray(means, dtype=float)
    if means.ndim == 1:
        means = means[:, None]
    if np.any(weights <= 0) or weights.size != means.shape[0]:
        raise PreconditionError('веса смеси должны быть положительны, по одному на горб')
    dim = means.shape[1]
    log_w = np.log(weights)
    probs = weights / weights.sum()

    def log_unnorm(states):
        points = _as_points(states)
        sq = np.sum((points[:, None, :] - means[None, :, :]) ** 2, axis=2)
        return logsumexp(log_w[None, :] - sq / (2.0 * scale ** 2), axis=1)

    def sampler(gamma, size, rng):
        if gamma != 1.0:
            raise UnsupportedModelError('прямой сэмплер смеси есть только при γ = 1')
        labels = rng.choice(weights.size, size=size, p=probs)
        return means[labels] + scale * rng.standard_normal((size, dim))

    return LogTarget(name='gaussian-mixture', dim=dim, log_unnorm=log_unnorm,
                     sup_log_unnorm=float(logsumexp(log_w)), direct_sampler=sampler,
                     target_mean=probs @ means)


def logistic_target(n_obs: int = 50, dim: int = 2, seed: int = 0,
                    prior_scale: float = 1.0) -> LogTarget:
    """ Лог-вогнутое апостериорное логистической регрессии с гауссовским априорным.
    Каждое слагаемое log π̄ не больше нуля, поэтому 0 - заявленная оценка сверху. """
    rng = make_stream(seed, StreamPurpose.DATA)
    design = rng.standard_normal((n_obs, dim))
    true_theta = rng.standard_normal(dim)
    labels = (rng.random(n_obs) < expit(design @ true_theta)).astype(float)

    def log_unnorm(states):
        logits = _as_points(states) @ design.T
        loglik = np.sum(labels[None, :] * logits - np.logaddexp(0.0, logits), axis=1)
        return loglik - 0.5 * np.sum(_as_points(states) ** 2, axis=1) / prior_scale ** 2

    def gradient(states):
        points = _as_points(states)
        residual = labels[None, :] - expit(points @ design.T)
        return residual @ design - points / prior_scale ** 2

    return LogTarget(name='logistic', dim=dim, log_unnorm=log_unnorm, sup_log_unnorm=0.0,
                     gradient=gradient, sup_verified=False)


def finite_target(log_unnorm) -> LogTarget:
    """ Таблица log π̄ по меткам 0..m-1; супремум и argmax точные. """
    table = np.array(log_unnorm, dtype=float)
    if table.ndim != 1 or not np.all(np.isfinite(table)):
        raise PreconditionError('таблица log π̄ должна быть конечным вектором')
    table.setflags(write=False)

    def sampler(gamma, size, rng):
        probs = np.exp(gamma * (table - table.max()))
        return rng.choice(table.size, size=size, p=probs / probs.sum())

    return LogTarget(name='finite', dim=0,
                     log_unnorm=lambda states: table[np.asarray(states, dtype=int)],
                     sup_log_unnorm=float(table.max()), argmax=np.array(int(np.argmax(table))),
                     direct_sampler=sampler, n_states=table.size, table=table)


TARGETS = {
    'gaussian': gaussian_target,
    'gaussian-mixture': gaussian_mixture_target,
    'logistic': logistic_target,
    'finite': finite_target,
}


def make_target(name: str, **params) -> LogTarget:
    """ Цель по имени из TARGETS. """
    if name not in TARGETS:
        raise KeyError(name)
    return TARGETS[name](**params)
