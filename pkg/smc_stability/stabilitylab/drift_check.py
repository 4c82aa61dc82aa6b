"""
Эксперимент drift-check: дрейф ядра RWM и мониторинг η^N(V) системы частиц.

    def drift_check_experiment - оценки λ̂(r) по оболочкам и регрессия η^N_k(V) по шагам.
"""
import pandas as pd

from smc_stability.common.config import ExperimentConfig
from smc_stability.common.exceptions import PreconditionError
from smc_stability.common.logger_config import logger
from smc_stability.particles.sampler import particle_drift_regression
from smc_stability.rwm.metropolis import drift_probe
from smc_stability.stabilitylab.model_builder import (build_drift, build_family, build_increment,
                                                      build_initial, build_model,
                                                      build_test_function)
from smc_stability.stabilitylab.replicate_worker import (ReplicateWorker, monitored_statistics,
                                                         trajectories_of)
from smc_stability.stabilitylab.reports import DriftCheckReport


def drift_check_experiment(config: ExperimentConfig, workers: int = 1) -> DriftCheckReport:
    """ Оценка MV/V при γ = probe.gamma (по умолчанию γ̲) и прогоны сэмплера по сетке n
    при N = fixed_N с записью траекторий. """
    fam = build_family(config)
    if fam.target.is_finite:
        raise PreconditionError('drift-check оценивает ядро RWM и требует цель в R^d')
    drift = build_drift(config, fam)
    gamma = config.probe.gamma if config.probe.gamma is not None else fam.gamma_floor
    probe = drift_probe(fam, gamma, build_increment(config), drift, config.probe.radii,
                        seed=config.seed, proposals=config.probe.proposals)
    logger.info('drift-check: радиус сжатия %s', probe.contracting_radius)

    initial = build_initial(config, fam)
    f = build_test_function(config, fam)
    rows, frames = [], []
    for cell, n in enumerate(config.grids.n):
        worker = ReplicateWorker(build_model(config, fam, n, initial), config.grids.fixed_N,
                                 config.seed, f, drift=drift,
                                 replicate_offset=cell * config.replicates)
        results = worker.run_all(config.replicates, workers)
        frame = trajectories_of(results)
        frames.append(frame)
        rows.append({'n': n, **monitored_statistics(frame),
                     'aborted': sum(result.aborted for result in results)})
    trajectories = pd.concat(frames, ignore_index=True)
    slope, intercept = particle_drift_regression(trajectories)
    return DriftCheckReport(per_radius=probe.per_radius, probe_table=probe.table,
                            contracting_radius=probe.contracting_radius, per_n=pd.DataFrame(rows),
                            regression_slope=slope, regression_intercept=intercept,
                            trajectories=trajectories,
                            monitored=monitored_statistics(trajectories, config.g_tilde_threshold))
