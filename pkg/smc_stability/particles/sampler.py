"""
Система взаимодействующих частиц: инициализация из μ, шаг
перевзвешивание-отбор-мутация и эмпирические оценки.

    def init_ensemble - N независимых выборок из μ.
    def smc_step - предки по мультиномиальному отбору с весами G_{n,k}, затем мутация M_{n,k+1}.
    def run_sampler - n шагов из начального ансамбля со сводками по шагам.
    def estimate - η^N(f) = (1/N) Σ f(ξ^i).
    def one_step_law - точный закон частицы после smc_step на конечной модели.
    def particle_drift_regression - регрессия η^N_k(V) на η^N_{k-1}(V) по повторам.
"""
from typing import Callable, Optional

import numpy as np
import pandas as pd
from scipy.stats import linregress

from smc_stability.common.constants import StreamPurpose
from smc_stability.common.exceptions import (IndexOutOfRangeError, NonFiniteEstimateError,
                                             PotentialBoundError, UnsupportedModelError)
from smc_stability.common.rng_streams import make_stream
from smc_stability.fk_core.drift import DriftSpec
from smc_stability.fk_core.measures import DiscreteMeasure
from smc_stability.fk_core.model import FKModel, FlowIndex, reweight_log
from smc_stability.oracle.exact_flow import phi_step
from smc_stability.particles.ensemble import EmpiricalMeasure, Ensemble, StepSummary


def init_ensemble(mu_sampler: Callable[[int, np.random.Generator], np.ndarray], N: int,
                  n: int, seed: int, replicate: int = 0) -> Ensemble:
    """ ζ_{n,0}: N независимых выборок из μ, поток (seed, INIT, повтор). """
    if N < 1:
        raise IndexOutOfRangeError('N', N, 1, 'inf')
    rng = make_stream(seed, StreamPurpose.INIT, replicate)
    return Ensemble(states=np.asarray(mu_sampler(N, rng)), step=FlowIndex(n, 0),
                    seed=seed, replicate=replicate)


def _log_weights(ens: Ensemble, model: FKModel) -> np.ndarray:
    log_w = model.potentials.log_values(ens.step, ens.states)
    if np.any(np.isnan(log_w)) or np.any(log_w == np.inf):
        raise PotentialBoundError(ens.step.k, 'не конечный log-вес частицы')
    return log_w


def _advance(ens: Ensemble, model: FKModel, log_w: np.ndarray) -> Ensemble:
    """ Предки по весам, затем мутация; частица i берёт i-й элемент каждой выборки шага. """
    k = ens.step.k
    probs = reweight_log(log_w, ens.replicate, k)
    rng = make_stream(ens.seed, StreamPurpose.STEP, ens.replicate, k)
    ancestors = rng.choice(ens.N, size=ens.N, p=probs)
    next_index = FlowIndex(ens.step.n, k + 1)
    moved = model.kernels.draw(next_index, ens.states[ancestors], rng)
    return Ensemble(states=moved, step=next_index, seed=ens.seed, replicate=ens.replicate)


def smc_step(ens: Ensemble, model: FKModel) -> Ensemble:
    """ ζ_{n,k} → ζ_{n,k+1}. Все веса нулевые - TotalDegeneracyError. """
    if ens.step.n != model.horizon:
        raise IndexOutOfRangeError('n', ens.step.n, model.horizon, model.horizon)
    ens.step.require(0, model.horizon - 1)
    return _advance(ens, model, _log_weights(ens, model))


def _summary(ens: Ensemble, model: FKModel, log_w: Optional[np.ndarray],
             drift: Optional[DriftSpec]) -> StepSummary:
    summary = StepSummary(replicate=ens.replicate, n=ens.step.n, k=ens.step.k)
    if drift is not None:
        summary.eta_V = float(np.mean(drift.values(ens.states)))
    if log_w is not None:
        top = float(np.max(log_w))
        weights = np.exp(log_w - top)
        summary.ess = float(weights.sum() ** 2 / np.sum(weights ** 2))
        summary.log_w_max = top
        summary.log_w_min = float(np.min(log_w))
        summary.eta_Gtilde = float(np.mean(np.exp(log_w - model.potentials.upper_bound_log)))
    return summary


def run_sampler(model: FKModel, N: int, seed: int, replicate: int = 0,
                drift: DriftSpec = None, n_steps: int = None,
                trajectory: bool = True) -> tuple[EmpiricalMeasure, Optional[list[StepSummary]]]:
    """ n_steps шагов (по умолчанию n) из начального ансамбля.
    При n_steps = 0 возвращается начальный ансамбль. """
    n_steps = model.horizon if n_steps is None else n_steps
    if not 0 <= n_steps <= model.horizon:
        raise IndexOutOfRangeError('n_steps', n_steps, 0, model.horizon)
    ens = init_ensemble(model.initial.sampler, N, model.horizon, seed, replicate)
    summaries = [] if trajectory else None
    for _ in range(n_steps):
        log_w = _log_weights(ens, model)
        if trajectory:
            summaries.append(_summary(ens, model, log_w, drift))
        ens = _advance(ens, model, log_w)
    if trajectory:
        summaries.append(_summary(ens, model, None, drift))
    return EmpiricalMeasure(support=ens.states), summaries


def estimate(em: EmpiricalMeasure, f: Callable[[np.ndarray], np.ndarray]) -> float:
    """ (1/N) Σ f(ξ^i); не конечное значение - ошибка с индексом частицы. """
    values = np.asarray(f(em.support), dtype=float).reshape(em.N)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        raise NonFiniteEstimateError(int(bad[0]), values[bad[0]])
    return float(values.mean())


def one_step_law(model: FKModel, ens: Ensemble) -> DiscreteMeasure:
    """ Φ_{n,k+1}(η^N_{n,k}) - закон каждой новой частицы при данном ансамбле. """
    if not model.is_finite:
        raise UnsupportedModelError()
    counts = np.bincount(np.asarray(ens.states, dtype=int), minlength=model.n_states)
    return phi_step(model, DiscreteMeasure.from_unnormalized(counts), ens.step.k + 1)


def trajectories_frame(summaries: list[StepSummary]) -> pd.DataFrame:
    """ Сводки шагов в таблицу траекторий. """
    return pd.DataFrame([summary.convert_to_pd_series() for summary in summaries])


def particle_drift_regression(trajectories: pd.DataFrame) -> tuple[float, float]:
    """ Наклон и свободный член МНК η^N_k(V) ~ η^N_{k-1}(V) по всем повторам и шагам.
    Меньше двух пар или одно значение η^N_{k-1}(V) - (NaN, NaN). """
    ordered = trajectories.sort_values(['replicate', 'n', 'k'])
    previous = ordered.groupby(['replicate', 'n'])['eta_V'].shift(1)
    pairs = pd.DataFrame({'prev': previous, 'next': ordered['eta_V']}).dropna()
    if len(pairs) < 2 or pairs['prev'].nunique() < 2:
        return np.nan, np.nan
    fit = linregress(pairs['prev'].to_numpy(), pairs['next'].to_numpy())
    return float(fit.slope), float(fit.intercept)
