"""
Запуск эксперимента по конфигурации и запись результатов.

    def sampler_run - вид run: R повторов сэмплера при (fixed_n, fixed_N).
    def fg_inputs - значения f и g для fg-sufficiency (заданные или G_{n,k}, V на сетке).
    def run_experiment - выполнить эксперимент вида config.kind.
    def write_outcome - записать таблицы CSV и summary.json в директорию.
"""
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import pandas as pd

from smc_stability.common.config import ExperimentConfig
from smc_stability.common.constants import ExitCode, ExperimentKind, OutputFiles, Status
from smc_stability.common.exceptions import PreconditionError
from smc_stability.common.file_worker import csv_writer, json_writer, write_files_atomic
from smc_stability.common.logger_config import logger
from smc_stability.fk_core.model import FlowIndex
from smc_stability.stabilitylab.association import counterexample_table, eta_fg_sufficiency_check
from smc_stability.stabilitylab.bias_decay import bias_decay_experiment
from smc_stability.stabilitylab.drift_check import drift_check_experiment
from smc_stability.stabilitylab.lemma1_audit import lemma1_audit, norm_const_experiment
from smc_stability.stabilitylab.model_builder import (build_drift, build_family, build_initial,
                                                      build_minorizer, build_model,
                                                      build_test_function)
from smc_stability.stabilitylab.n_scaling import n_scaling_experiment
from smc_stability.stabilitylab.replicate_worker import (ReplicateWorker, monitored_statistics,
                                                         trajectories_of)
from smc_stability.stabilitylab.reports import ExperimentOutcome
from smc_stability.tempering.tempered_family import build_potentials, drift_function


def _exit_for(status: Status) -> ExitCode:
    return ExitCode.SUCCESS if status is Status.SUCCESS else ExitCode.INCONCLUSIVE


def _finite_factory(config: ExperimentConfig):
    fam = build_family(config)
    if not fam.target.is_finite:
        raise PreconditionError(f'{config.kind.value} выполняется только на конечной модели')
    initial = build_initial(config, fam)
    return fam, lambda n: build_model(config, fam, n, initial)


def sampler_run(config: ExperimentConfig, workers: int = 1) -> ExperimentOutcome:
    fam = build_family(config)
    initial = build_initial(config, fam)
    f = build_test_function(config, fam)
    drift = build_drift(config, fam)
    model = build_model(config, fam, config.grids.fixed_n, initial)
    worker = ReplicateWorker(model, config.grids.fixed_N, config.seed, f, drift=drift)
    results = worker.run_all(config.replicates, workers)
    estimates = pd.DataFrame([{'replicate': result.replicate, 'estimate': result.estimate,
                               'aborted': result.aborted} for result in results])
    trajectories = trajectories_of(results)
    done = estimates.loc[~estimates['aborted'], 'estimate']
    summary = {'n': config.grids.fixed_n, 'N': config.grids.fixed_N,
               'mean': float(done.mean()) if len(done) else None,
               'se': float(done.std(ddof=1) / np.sqrt(len(done))) if len(done) > 1 else None,
               'aborted': int(estimates['aborted'].sum()),
               'monitored': monitored_statistics(trajectories, config.g_tilde_threshold)}
    return ExperimentOutcome(status=ExitCode.SUCCESS,
                             tables={'estimates.csv': estimates,
                                     OutputFiles.TRAJECTORIES.value: trajectories},
                             summary=summary)


def fg_inputs(config: ExperimentConfig) -> tuple[np.ndarray, np.ndarray]:
    """ Заданные пары (f, g) или G_{n,k} и V модели на сетке точек
    (первая координата для целей в R^d, все метки для конечной цели). """
    spec = config.fg
    if spec.grid is None:
        return np.asarray(spec.f, dtype=float), np.asarray(spec.g, dtype=float)
    fam = build_family(config)
    target = fam.target
    grid = spec.grid
    if target.is_finite:
        states = np.arange(target.n_states)
    else:
        states = np.zeros((int(grid.get('points', 201)), target.dim))
        states[:, 0] = np.linspace(grid.get('low', -5.0), grid.get('high', 5.0),
                                   int(grid.get('points', 201)))
    n = int(grid.get('n', config.grids.fixed_n))
    potentials = build_potentials(fam, n)
    log_g = potentials.log_values(FlowIndex(n, int(grid.get('k', 0))), states)
    v_vals = drift_function(fam, config.model.beta).values(states)
    return np.exp(log_g), v_vals


def run_experiment(config: ExperimentConfig, workers: int = 1) -> ExperimentOutcome:
    """ Выполнить эксперимент; результат - статус, таблицы и сводка. """
    kind = config.kind
    if kind is ExperimentKind.BIAS_DECAY:
        fit = bias_decay_experiment(config, workers)
        tables = {'bias_by_n.csv': fit.per_n_bias}
        if fit.companion is not None:
            tables['bias_by_n_finite.csv'] = fit.companion.per_n_bias
        if fit.trajectories is not None:
            tables[OutputFiles.TRAJECTORIES.value] = fit.trajectories
        return ExperimentOutcome(_exit_for(fit.status), tables, fit.to_summary())

    if kind is ExperimentKind.N_SCALING:
        fit = n_scaling_experiment(config, workers)
        return ExperimentOutcome(_exit_for(fit.status),
                                 {'rmse_by_N.csv': fit.per_N_rmse, 'rmse_by_n.csv': fit.per_n_rmse,
                                  OutputFiles.TRAJECTORIES.value: fit.trajectories},
                                 fit.to_summary())

    if kind is ExperimentKind.DRIFT_CHECK:
        report = drift_check_experiment(config, workers)
        return ExperimentOutcome(ExitCode.SUCCESS,
                                 {'drift_probe.csv': report.probe_table,
                                  'drift_by_radius.csv': report.per_radius,
                                  'drift_by_n.csv': report.per_n,
                                  OutputFiles.TRAJECTORIES.value: report.trajectories},
                                 report.to_summary())

    if kind is ExperimentKind.COUNTEREXAMPLE:
        probes = counterexample_table(config.counterexample.epsilon, config.counterexample.delta)
        table = pd.DataFrame([{'epsilon': p.epsilon, 'delta': p.delta, 'radius': p.radius,
                               'log_lhs': p.log_lhs, 'log_rhs': p.log_rhs, 'margin': p.margin,
                               'psi_value': p.psi_value, 'branch': p.branch,
                               'status': p.status.value} for p in probes])
        failed = any(p.status is not Status.SUCCESS for p in probes)
        return ExperimentOutcome(ExitCode.INCONCLUSIVE if failed else ExitCode.SUCCESS,
                                 {'counterexample.csv': table},
                                 {'probes': [p.to_summary() for p in probes]})

    if kind is ExperimentKind.LEMMA1_AUDIT:
        fam, factory = _finite_factory(config)
        report = lemma1_audit(factory, config.grids.n, build_drift(config, fam),
                              build_minorizer(config))
        return ExperimentOutcome(ExitCode.SUCCESS,
                                 {'lemma1_audit.csv': report.table,
                                  'lemma1_failures.csv': report.failures},
                                 report.to_summary())

    if kind is ExperimentKind.NORM_CONST_CHECK:
        fam, factory = _finite_factory(config)
        report = norm_const_experiment(factory, config.grids.n, build_drift(config, fam))
        return ExperimentOutcome(ExitCode.SUCCESS, {'norm_const.csv': report.table},
                                 report.to_summary())

    if kind is ExperimentKind.FG_SUFFICIENCY:
        if config.fg is None:
            raise PreconditionError('для fg-sufficiency нужна секция fg')
        f_vals, g_vals = fg_inputs(config)
        report = eta_fg_sufficiency_check(f_vals, g_vals, config.fg.delta, seed=config.seed,
                                          draws=config.fg.draws)
        return ExperimentOutcome(ExitCode.SUCCESS,
                                 {'fg_points.csv': pd.DataFrame({'f': f_vals, 'g': g_vals})},
                                 report.to_summary())

    return sampler_run(config, workers)


def write_outcome(outcome: ExperimentOutcome, config: ExperimentConfig, out_dir: Path) -> list[Path]:
    """ CSV по таблицам и summary.json с эхом конфигурации, одним набором: при ошибке
    записи не появляется ни один файл. Время записи - единственное недетерминированное поле. """
    out_dir = Path(out_dir)
    writers = {out_dir / name: csv_writer(table) for name, table in outcome.tables.items()}
    summary = {'experiment': config.kind.value, 'seed': config.seed,
               'exit_code': int(outcome.status), 'warnings': list(config.warnings),
               'result': outcome.summary, 'config': config.resolved(),
               'created_at': datetime.now(timezone.utc).isoformat()}
    writers[out_dir / OutputFiles.SUMMARY.value] = json_writer(summary)
    written = write_files_atomic(writers)
    logger.info('Результаты записаны: %s', ', '.join(path.name for path in written))
    return written
