"""
Семейство темперированных распределений π_γ ∝ π̄^γ и построенные по нему потенциалы
G_{n,k}(x) = π̄(x)^{γ((k+1)/n) - γ(k/n)} и функция дрейфа V ∝ π^{-βγ̲}.

  @dataclass
  class TemperedFamily: - цель и расписание.

    def check_gamma - γ из [γ̲, 1].
    def tempered_log_density - γ log π̄(x).
    def build_potentials - семейство потенциалов для горизонта n.
    def drift_function - V(x) = exp[-βγ̲(log π̄(x) - sup log π̄)] ≥ 1.
    def tempered_distribution - точный вектор π_γ для конечной цели.
"""
from dataclasses import dataclass

import numpy as np

from smc_stability.common.constants import MsgForUser, Tolerance
from smc_stability.common.exceptions import ParameterRangeError, UnsupportedModelError
from smc_stability.common.logger_config import logger
from smc_stability.fk_core.drift import DriftSpec
from smc_stability.fk_core.measures import DiscreteMeasure
from smc_stability.fk_core.model import FlowIndex, PotentialFamily
from smc_stability.tempering.schedules import TemperingSchedule
from smc_stability.tempering.targets import LogTarget


@dataclass(frozen=True, eq=False)
class TemperedFamily:
    """ π_γ(dx) ∝ π̄(x)^γ dx для γ из [γ̲, 1]. """
    target: LogTarget
    schedule: TemperingSchedule

    @property
    def gamma_floor(self) -> float:
        return self.schedule.gamma_floor


def check_gamma(fam: TemperedFamily, gamma: float) -> float:
    if not fam.gamma_floor - Tolerance.IDENTITY.value <= gamma <= 1.0 + Tolerance.IDENTITY.value:
        raise ParameterRangeError('γ', gamma, f'[{fam.gamma_floor}, 1]')
    return float(gamma)


def tempered_log_density(fam: TemperedFamily, gamma: float, x) -> float:
    """ log π̄^γ(x) без нормировки. """
    gamma = check_gamma(fam, gamma)
    return float(gamma * fam.target.log_unnorm(fam.target.points(np.asarray(x)[None, ...]))[0])


def build_potentials(fam: TemperedFamily, n: int) -> PotentialFamily:
    """ log G_{n,k}(x) = (γ((k+1)/n) - γ(k/n)) log π̄(x),
    log Ḡ = C_γ/n · max(sup log π̄, 0). """
    if n < 1:
        raise ParameterRangeError('n', n, '[1, inf)')
    gammas = fam.schedule(np.arange(n + 1) / n)
    increments = np.diff(gammas)
    target = fam.target

    def eval_log(idx: FlowIndex, states) -> np.ndarray:
        return increments[idx.k] * target.log_unnorm(target.points(states))

    if not target.sup_verified:
        logger.warning('%s: %s', MsgForUser.SUP_NOT_VERIFIED.value, target.name)
    upper = fam.schedule.lipschitz_const / n * max(target.sup_log_unnorm, 0.0)
    return PotentialFamily(eval_log=eval_log, upper_bound_log=float(upper))


def drift_function(fam: TemperedFamily, beta: float) -> DriftSpec:
    """ V(x) = π̄(x)^{-βγ̲} / inf π̄^{-βγ̲}, инфимум через sup log π̄. """
    if not 0 < beta < 1:
        raise ParameterRangeError('β', beta, '(0, 1)')
    target = fam.target
    scale = beta * fam.gamma_floor
    sup = target.sup_log_unnorm

    def log_v(states) -> np.ndarray:
        return np.maximum(-scale * (target.log_unnorm(target.points(states)) - sup), 0.0)

    return DriftSpec(log_v=log_v)


def tempered_distribution(fam: TemperedFamily, gamma: float) -> DiscreteMeasure:
    """ π_γ на конечном пространстве. """
    if not fam.target.is_finite:
        raise UnsupportedModelError('π_γ вычисляется точно только для конечной цели')
    gamma = check_gamma(fam, gamma)
    return DiscreteMeasure.from_log_weights(gamma * fam.target.table)
