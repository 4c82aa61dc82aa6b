"""
Точные аудиты конечной модели по сетке горизонтов.

    def lemma1_audit - минорация и дрейф скрученных ядер S_{n,k} для всех (n, k).
    def norm_const_experiment - μ(Q̃_{n,k:n}(1)) против exp(-C μ(V)) с общим sup‖U‖_V.
"""
from typing import Callable

import numpy as np
import pandas as pd

from smc_stability.common.logger_config import logger
from smc_stability.fk_core.drift import DriftSpec, Minorizer
from smc_stability.fk_core.model import FKModel
from smc_stability.oracle.drift_objects import (norm_const_lower_bound_check,
                                                tilted_drift_objects, u_v_norm, verify_a2)
from smc_stability.oracle.exact_flow import future_masses
from smc_stability.stabilitylab.reports import Lemma1AuditReport, NormConstExperimentReport

COLS_FAILURES = ['n', 'k', 'x', 'inequality']


def lemma1_audit(model_factory: Callable[[int], FKModel], n_grid, drift: DriftSpec,
                 minorizer: Minorizer) -> Lemma1AuditReport:
    """ По строке таблицы на (n, k), k = 0..n; провалы - по строке на (n, k, x).
    inf ε_{n,k} берётся по k ≥ 1, где определено ядро S_{n,k}. """
    rows, failures = [], []
    a2_pass = True
    for n in n_grid:
        model = model_factory(n)
        a2_pass = a2_pass and verify_a2(model, drift, minorizer).all_pass
        masses = future_masses(model)
        for k in range(n + 1):
            report = tilted_drift_objects(model, k, drift, minorizer, masses)
            rows.append({'n': n, 'k': k, 'eps_nk': report.objects.eps_nk,
                         'b_nk': report.objects.b_nk,
                         'minor_pass': bool(np.all(report.minor_pass)),
                         'drift_pass': bool(np.all(report.drift_pass_printed)),
                         'drift_pass_proof_form': bool(np.all(report.drift_pass_proof)),
                         'off_by_one_disagrees': report.off_by_one_disagrees})
            failures += [{'n': n, 'k': k, 'x': x, 'inequality': inequality}
                         for x, inequality in report.failing_states()]
        logger.info('lemma1-audit: n = %s проверен', n)
    table = pd.DataFrame(rows)
    min_eps = table[table['k'] >= 1].groupby('n')['eps_nk'].min()
    return Lemma1AuditReport(table=table, failures=pd.DataFrame(failures, columns=COLS_FAILURES),
                             min_eps_by_n=min_eps, a2_pass=bool(a2_pass))


def norm_const_experiment(model_factory: Callable[[int], FKModel], n_grid,
                          drift: DriftSpec) -> NormConstExperimentReport:
    """ Граница с C, собранной по sup‖U_{n,k}‖_V на всей сетке n. Начальная мера -
    μ каждой модели. """
    models = {n: model_factory(n) for n in n_grid}
    u_sup = max(u_v_norm(model, drift) for model in models.values())
    rows = []
    constant = bound = np.nan
    for n, model in models.items():
        report = norm_const_lower_bound_check(model, drift, model.initial.measure, u_sup)
        constant, bound = report.constant, report.bound
        for k in range(n + 1):
            rows.append({'n': n, 'k': k, 'value': report.values[k],
                         'path_bound': report.path_bounds[k], 'bound': report.bound,
                         'holds': bool(report.values[k] >= report.bound)})
    return NormConstExperimentReport(table=pd.DataFrame(rows), u_norm_sup=float(u_sup),
                                     constant=float(constant), bound=float(bound))
