"""
Отчёты экспериментов стенда устойчивости.

  @dataclass
  class DecayFit: - лог-линейная аппроксимация |смещения| по n.

  @dataclass
  class ScalingFit: - RMSE по N при фиксированном n и по n при фиксированном N.

  @dataclass
  class CounterexampleProbe: - двухточечная мера, нарушающая η(GV)/η(G) ≤ (1+δ)η(V).

  @dataclass
  class FgSufficiencyReport: - проверка η(fg) ≤ (1+δ)η(f)η(g) по парному условию.

  @dataclass
  class NormConstExperimentReport: - нижняя граница нормировки по сетке n.

  @dataclass
  class Lemma1AuditReport: - таблица проверок скрученного дрейфа по сетке (n, k).

  @dataclass
  class DriftCheckReport: - оценки дрейфа ядра и мониторинг η^N(V) частиц.

  @dataclass
  class ExperimentOutcome: - статус, таблицы для CSV и сводка для JSON.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import pandas as pd

from smc_stability.common.constants import ExitCode, Status


@dataclass(eq=False)
class DecayFit:
    """ slope и r_squared по точкам, где |bias| > 3 стандартных ошибок. """
    slope: float
    intercept: float
    r_squared: float
    per_n_bias: pd.DataFrame
    status: Status
    reference_label: str
    exact: bool
    companion: Optional['DecayFit'] = None
    trajectories: Optional[pd.DataFrame] = None
    monitored: dict = field(default_factory=dict)

    def to_summary(self) -> dict:
        summary = {'slope': self.slope, 'intercept': self.intercept,
                   'r_squared': self.r_squared, 'status': self.status.value,
                   'reference': self.reference_label, 'exact': self.exact,
                   'monitored': self.monitored}
        if self.companion is not None:
            summary['finite_companion'] = self.companion.to_summary()
        return summary


@dataclass(eq=False)
class ScalingFit:
    """ slope - наклон log RMSE по log N; ratio_* - равномерность по n. """
    slope: float
    slope_se: float
    per_N_rmse: pd.DataFrame  # pylint: disable=invalid-name
    per_n_rmse: pd.DataFrame
    uniform_ratio: float
    uniform_ratio_lower: float
    status: Status
    warnings: tuple = ()
    trajectories: Optional[pd.DataFrame] = None
    monitored: dict = field(default_factory=dict)

    def to_summary(self) -> dict:
        return {'slope': self.slope, 'slope_se': self.slope_se,
                'uniform_ratio': self.uniform_ratio,
                'uniform_ratio_lower': self.uniform_ratio_lower,
                'status': self.status.value, 'out_of_theory': bool(self.warnings),
                'warnings': list(self.warnings), 'monitored': self.monitored}


@dataclass(eq=False)
class CounterexampleProbe:
    """ При status = success выполняется lhs > rhs строго. Точки и значения G, V
    выводятся, чтобы проверку можно было повторить вручную. """
    epsilon: float
    delta: float
    witness: tuple[np.ndarray, np.ndarray]
    weights: tuple[float, float]
    lhs: float
    rhs: float
    log_lhs: float
    log_rhs: float
    psi_value: float
    radius: float
    branch: str
    status: Status
    g_values: tuple[float, float] = (np.nan, np.nan)
    v_values: tuple[float, float] = (np.nan, np.nan)

    @property
    def margin(self) -> float:
        return self.log_lhs - self.log_rhs

    def to_summary(self) -> dict:
        return {'epsilon': self.epsilon, 'delta': self.delta,
                'witness': [list(point) for point in self.witness],
                'weights': list(self.weights), 'lhs': self.lhs, 'rhs': self.rhs,
                'log_lhs': self.log_lhs, 'log_rhs': self.log_rhs, 'log_margin': self.margin,
                'psi_value': self.psi_value, 'radius': self.radius, 'branch': self.branch,
                'G_values': list(self.g_values), 'V_values': list(self.v_values),
                'status': self.status.value}


@dataclass(eq=False)
class FgSufficiencyReport:
    """ Парное условие, итог по случайным η и двухточечный свидетель при нарушении.
    Выше necessity_threshold = 3δ/(2+δ) равномерная мера на худшей паре
    гарантированно нарушает неравенство. """
    delta: float
    threshold: float
    necessity_threshold: float
    max_pair_ratio: float
    condition_holds: bool
    draws: int
    violations: int
    worst_pair: tuple[int, int]
    uniform_pair_gap: float
    witness_weight: Optional[float] = None
    witness_gap: Optional[float] = None

    @property
    def witness_violates(self) -> bool:
        return self.witness_gap is not None and self.witness_gap > 0

    @property
    def violation_guaranteed(self) -> bool:
        return self.max_pair_ratio > self.necessity_threshold

    def to_summary(self) -> dict:
        return {'delta': self.delta, 'threshold': self.threshold,
                'necessity_threshold': self.necessity_threshold,
                'max_pair_ratio': self.max_pair_ratio, 'condition_holds': self.condition_holds,
                'draws': self.draws, 'violations': self.violations,
                'worst_pair': list(self.worst_pair), 'uniform_pair_gap': self.uniform_pair_gap,
                'violation_guaranteed': self.violation_guaranteed,
                'witness_weight': self.witness_weight, 'witness_gap': self.witness_gap}


@dataclass(eq=False)
class NormConstExperimentReport:
    """ μ(Q̃_{n,k:n}(1)) по сетке (n, k) против общей границы exp(-C μ(V)). """
    table: pd.DataFrame
    u_norm_sup: float
    constant: float
    bound: float

    @property
    def holds(self) -> bool:
        return bool(self.table['holds'].all())

    def to_summary(self) -> dict:
        return {'holds': self.holds, 'u_norm_sup': self.u_norm_sup, 'constant': self.constant,
                'bound': self.bound, 'min_value': float(self.table['value'].min()),
                'min_path_bound': float(self.table['path_bound'].min())}


@dataclass(eq=False)
class Lemma1AuditReport:
    """ table - по строке на (n, k); failures - по строке на (n, k, x, неравенство). """
    table: pd.DataFrame
    failures: pd.DataFrame
    min_eps_by_n: pd.Series
    a2_pass: Optional[bool] = None

    @property
    def all_pass(self) -> bool:
        return self.failures.empty

    def to_summary(self) -> dict:
        return {'all_pass': self.all_pass, 'failures': len(self.failures), 'a2_pass': self.a2_pass,
                'inf_eps': float(self.min_eps_by_n.min()),
                'min_eps_by_n': {int(n): float(v) for n, v in self.min_eps_by_n.items()},
                'off_by_one_disagreements': int(self.table['off_by_one_disagrees'].sum())}


@dataclass(eq=False)
class DriftCheckReport:
    per_radius: pd.DataFrame
    probe_table: pd.DataFrame
    contracting_radius: Optional[float]
    per_n: pd.DataFrame
    regression_slope: float
    regression_intercept: float
    trajectories: Optional[pd.DataFrame] = None
    monitored: dict = field(default_factory=dict)

    def to_summary(self) -> dict:
        return {'contracting_radius': self.contracting_radius,
                'lambda_hat': {float(r): float(v) for r, v in
                               zip(self.per_radius['radius'], self.per_radius['lambda_hat'])},
                'regression_slope': self.regression_slope,
                'regression_intercept': self.regression_intercept,
                'monitored': self.monitored}


@dataclass(eq=False)
class ExperimentOutcome:
    """ Результат эксперимента для записи: таблицы по имени файла и сводка. """
    status: ExitCode
    tables: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)
