"""
Точные проверки условий дрейфа и минорации на конечных моделях.

  @dataclass
  class TiltedDriftObjects: - ε_{n,k}, b_{n,k}, ν_{n,k}, V_{n,k} на одном шаге.

  @dataclass
  class TiltedDriftReport: - объекты на шагах k и k-1 и поштатные результаты проверок.

  @dataclass
  class A2Report: - проверка минорации и дрейфа для самих ядер M_{n,k}.

  @dataclass
  class NormConstReport: - нижняя граница нормировки μ(Q̃_{n,k:n}(1)).

    def row_overlap_minorizer - (ε, ν) по поэлементному минимуму строк всех матриц.
    def verify_a2 - проверить M_k(x,·) ≥ εν на C и M_k V ≤ λV + b1_C.
    def tilted_drift_objects - объекты, скрученные будущей массой, и их неравенства.
    def v_norm_distance - ‖a - b‖ в норме с весом V^α.
    def u_v_norm - sup_k ‖U_{n,k}‖_V.
    def lemma3_path_bound - нижняя граница нормировки через неравенство Йенсена по пути.
    def norm_const_lower_bound_check - min_k μ(Q̃_{n,k:n}(1)) ≥ exp(-C μ(V)).
    def forgetting_profile - забывание начальной меры детерминированным потоком.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import pandas as pd

from smc_stability.common.constants import Tolerance
from smc_stability.common.exceptions import ParameterRangeError, PreconditionError
from smc_stability.common.logger_config import logger
from smc_stability.fk_core.drift import DriftSpec, Minorizer
from smc_stability.fk_core.measures import DiscreteMeasure
from smc_stability.fk_core.model import FKModel
from smc_stability.oracle.exact_flow import (_index, _potential_vector, _require_finite,
                                             flow_map, future_masses, s_kernel_matrix)


@dataclass(frozen=True, eq=False)
class TiltedDriftObjects:
    """ Константы минорации и дрейфа для ядер S_{n,k}. """
    k: int
    eps_nk: float
    b_nk: float
    nu_nk: DiscreteMeasure
    v_nk: np.ndarray


@dataclass(frozen=True, eq=False)
class TiltedDriftReport:
    """ Результат проверки на шаге k. Для k = 0 ядра S нет и проверки пусты. """
    objects: TiltedDriftObjects
    previous: Optional[TiltedDriftObjects]
    minor_pass: np.ndarray
    drift_pass_printed: np.ndarray
    drift_pass_proof: np.ndarray

    @property
    def all_pass(self) -> bool:
        """ Оба неравенства в напечатанной форме (с b_{n,k-1}). """
        return bool(np.all(self.minor_pass) and np.all(self.drift_pass_printed))

    @property
    def off_by_one_disagrees(self) -> bool:
        """ Формы с b_{n,k-1} и с b_{n,k} дают разный результат. """
        return bool(np.any(self.drift_pass_printed != self.drift_pass_proof))

    def failing_states(self) -> list[tuple[int, str]]:
        failures = [(int(x), 'minorization') for x in np.flatnonzero(~self.minor_pass)]
        failures += [(int(x), 'drift') for x in np.flatnonzero(~self.drift_pass_printed)]
        return failures


@dataclass(frozen=True, eq=False)
class A2Report:
    table: pd.DataFrame

    @property
    def all_pass(self) -> bool:
        return bool(self.table['minor_ok'].all() and self.table['drift_ok'].all())


@dataclass(frozen=True, eq=False)
class NormConstReport:
    """ Значения μ(Q̃_{n,k:n}(1)) по k и граница exp(-C μ(V)). """
    n: int
    values: np.ndarray
    path_bounds: np.ndarray
    u_norm_sup: float
    constant: float
    bound: float
    holds: bool = field(default=False)

    @property
    def minimum(self) -> float:
        return float(self.values.min())


def _leq(lhs: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    return lhs <= rhs + Tolerance.IDENTITY.value * np.maximum(1.0, np.abs(rhs))


def _small_set(drift: DriftSpec, m: int) -> np.ndarray:
    if drift.small_set is None:
        return np.ones(m, dtype=bool)
    return np.asarray(drift.small_set, dtype=bool)


def _drift_inputs(model: FKModel, drift: DriftSpec) -> tuple[np.ndarray, float, float]:
    """ V, λ, b на конечной модели с проверкой V ≥ 1. """
    if drift.lam is None or drift.b is None:
        raise PreconditionError('для проверки дрейфа нужны λ и b')
    v = drift.values(model.state_labels())
    if np.any(v < 1.0):
        raise PreconditionError('функция дрейфа должна удовлетворять V ≥ 1')
    return v, float(drift.lam), float(drift.b)


def row_overlap_minorizer(model: FKModel) -> Minorizer:
    """ ν(y) ∝ min_{k,x} M_k(x, y), ε = Σ_y min_{k,x} M_k(x, y). """
    _require_finite(model)
    overlap = np.min([model.kernels.matrix(model.index(k)).min(axis=0)
                      for k in range(1, model.horizon + 1)], axis=0)
    epsilon = float(overlap.sum())
    if not epsilon > 0:
        raise PreconditionError('строки матриц ядер не перекрываются')
    return Minorizer(epsilon=epsilon, nu=DiscreteMeasure.from_unnormalized(overlap))


def verify_a2(model: FKModel, drift: DriftSpec, minorizer: Minorizer) -> A2Report:
    """ Проверить минорацию и дрейф для всех M_{n,k} поэлементно. """
    _require_finite(model)
    v, lam, b = _drift_inputs(model, drift)
    in_c = _small_set(drift, model.n_states)
    floor = minorizer.epsilon * minorizer.nu.weights
    rows = []
    for k in range(1, model.horizon + 1):
        kernel = model.kernels.matrix(model.index(k))
        minor_ok = np.all(_leq(floor[None, :], kernel), axis=1) | ~in_c
        drift_ok = _leq(kernel @ v, lam * v + b * in_c)
        for x in range(model.n_states):
            rows.append({'k': k, 'x': x, 'minor_ok': bool(minor_ok[x]), 'drift_ok': bool(drift_ok[x])})
    return A2Report(table=pd.DataFrame(rows))


def _objects_at(model: FKModel, j: int, masses: list[np.ndarray], v: np.ndarray,
                b: float, minorizer: Minorizer) -> TiltedDriftObjects:
    """ ε_{n,j} = εν(h_j), b_{n,j} = b / ε_{n,j}, ν_{n,j} = ν h_j / ν(h_j),
    V_{n,j} = V / M_{n,j+1} h_{j+1} и V_{n,n} = V. """
    nu_mass = minorizer.nu.integrate(masses[j])
    eps_nk = minorizer.epsilon * nu_mass
    nu_nk = DiscreteMeasure.from_unnormalized(minorizer.nu.weights * masses[j])
    if j == model.horizon:
        v_nk = v.copy()
    else:
        next_mass = model.kernels.matrix(model.index(j + 1)) @ masses[j + 1]
        v_nk = v / next_mass
    if np.any(v_nk < 1.0 - Tolerance.IDENTITY.value):
        raise PreconditionError(f'V_(n,k) < 1 при k = {j}')
    return TiltedDriftObjects(k=j, eps_nk=float(eps_nk), b_nk=float(b / eps_nk),
                              nu_nk=nu_nk, v_nk=v_nk)


def tilted_drift_objects(model: FKModel, idx, drift: DriftSpec, minorizer: Minorizer,
                         masses: list[np.ndarray] = None) -> TiltedDriftReport:
    """ Объекты дрейфа на шаге k и проверка S_{n,k}(x,·) ≥ ε_{n,k}ν_{n,k} на C,
    S_{n,k}V_{n,k} ≤ λV_{n,k-1} + b_{n,k-1}1_C (напечатанная форма) и та же
    оценка с b_{n,k}. """
    _require_finite(model)
    idx = _index(model, idx)
    v, lam, b = _drift_inputs(model, drift)
    if masses is None:
        masses = future_masses(model)
    current = _objects_at(model, idx.k, masses, v, b, minorizer)
    empty = np.ones(model.n_states, dtype=bool)
    if idx.k == 0:
        return TiltedDriftReport(current, None, empty, empty, empty)

    previous = _objects_at(model, idx.k - 1, masses, v, b, minorizer)
    in_c = _small_set(drift, model.n_states)
    s_kernel = s_kernel_matrix(model, idx, masses)
    floor = current.eps_nk * current.nu_nk.weights
    minor_pass = np.all(_leq(floor[None, :], s_kernel), axis=1) | ~in_c

    s_v = s_kernel @ current.v_nk
    drift_pass_printed = _leq(s_v, lam * previous.v_nk + previous.b_nk * in_c)
    drift_pass_proof = _leq(s_v, lam * previous.v_nk + current.b_nk * in_c)
    report = TiltedDriftReport(current, previous, minor_pass, drift_pass_printed, drift_pass_proof)
    if report.off_by_one_disagrees:
        logger.warning('k = %s: оценки дрейфа с b_(n,k-1) и b_(n,k) расходятся', idx.k)
    return report


def v_norm_distance(a, b, v, alpha: float = 1.0) -> float:
    """ Σ_x |a_x - b_x| v_x^α: супремум по |φ| ≤ V^α достигается на φ = ±V^α. """
    if not 0 < alpha <= 1:
        raise ParameterRangeError('α', alpha, '(0, 1]')
    a = a.weights if isinstance(a, DiscreteMeasure) else np.asarray(a, dtype=float)
    b = b.weights if isinstance(b, DiscreteMeasure) else np.asarray(b, dtype=float)
    v = np.asarray(v, dtype=float)
    if np.any(v < 1.0):
        raise PreconditionError('вес нормы должен быть ≥ 1')
    return float(np.sum(np.abs(a - b) * v ** alpha))


def _u_matrix(model: FKModel) -> np.ndarray:
    """ Строки U_{n,k} для k = 0..n-1. """
    return np.array([-model.horizon * np.log(_potential_vector(model, k, normalized=True))
                     for k in range(model.horizon)])


def u_v_norm(model: FKModel, drift: DriftSpec) -> float:
    """ max_{k, x} U_{n,k}(x) / V(x). """
    _require_finite(model)
    v = drift.values(model.state_labels())
    return float(np.max(_u_matrix(model) / v[None, :]))


def lemma3_path_bound(model: FKModel, mu: DiscreteMeasure) -> np.ndarray:
    """ exp[-(1/n) Σ_{ℓ=k}^{n-1} μM_{k:ℓ}(U_{n,ℓ})] для k = 0..n. """
    _require_finite(model)
    u_rows = _u_matrix(model)
    bounds = np.ones(model.horizon + 1)
    for k in range(model.horizon):
        row = mu.weights.copy()
        total = 0.0
        for ell in range(k, model.horizon):
            total += float(row @ u_rows[ell])
            if ell + 1 < model.horizon:
                row = row @ model.kernels.matrix(model.index(ell + 1))
        bounds[k] = np.exp(-total / model.horizon)
    return bounds


def norm_const_lower_bound_check(model: FKModel, drift: DriftSpec, mu: DiscreteMeasure,
                                 u_norm_sup: float = None) -> NormConstReport:
    """ Сравнить min_k μ(Q̃_{n,k:n}(1)) с exp(-C μ(V)), C = sup‖U‖_V (1 + b/(1-λ)).
    u_norm_sup передаётся, когда супремум берётся по целой сетке n. """
    _require_finite(model)
    v, lam, b = _drift_inputs(model, drift)
    if not 0 <= lam < 1:
        raise ParameterRangeError('λ', lam, '[0, 1)')
    masses = future_masses(model)
    values = np.array([float(mu.weights @ masses[k]) for k in range(model.horizon)] + [1.0])
    if u_norm_sup is None:
        u_norm_sup = u_v_norm(model, drift)
    constant = u_norm_sup * (1.0 + b / (1.0 - lam))
    bound = float(np.exp(-constant * mu.integrate(v)))
    return NormConstReport(n=model.horizon, values=values,
                           path_bounds=lemma3_path_bound(model, mu),
                           u_norm_sup=float(u_norm_sup), constant=float(constant),
                           bound=bound, holds=bool(values.min() >= bound))


def forgetting_profile(model: FKModel, mu: DiscreteMeasure, mu_prime: DiscreteMeasure,
                       v, alpha: float = 1.0) -> pd.DataFrame:
    """ ‖Φ_{n,k:n}(μ) - Φ_{n,k:n}(μ')‖_{V^α} для k = 0..n. """
    rows = []
    for k in range(model.horizon + 1):
        distance = v_norm_distance(flow_map(model, mu, k, model.horizon),
                                   flow_map(model, mu_prime, k, model.horizon), v, alpha)
        rows.append({'k': k, 'steps': model.horizon - k, 'distance': distance})
    return pd.DataFrame(rows)
