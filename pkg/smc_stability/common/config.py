"""
Конфигурация эксперимента: JSON-текст → проверенный ExperimentConfig.

  @dataclass
  class ExperimentConfig: - вид эксперимента, модель, сетки, seed и параметры теории.

    def parse_config - разобрать и проверить текст конфигурации.
    def read_config - прочитать конфигурацию из файла.
    def theory_warnings - проверка гипотез αtp ≤ 1 и (1+s)p(1-γ̲)/γ̲ < 1.
"""
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

from smc_stability.common.constants import (G_TILDE_THRESHOLD, PROBE_PROPOSALS, RANDOM_ETA_DRAWS,
                                            Defaults, ExperimentKind, MsgForUser)
from smc_stability.common.exceptions import ConfigError, StabilityLabError
from smc_stability.common.logger_config import logger
from smc_stability.rwm.increments import INCREMENTS
from smc_stability.tempering.schedules import make_schedule
from smc_stability.tempering.targets import make_target

ALLOWED_KEYS = {
    '': {'experiment', 'seed', 'replicates', 'workers', 'output_dir', 'model', 'initial',
         'test_function', 'grids', 'theory', 'drift', 'probe', 'counterexample', 'fg', 'monitor'},
    'model': {'target', 'schedule', 'increment', 'beta', 'flip'},
    'model.schedule': {'name', 'gamma_floor', 'lipschitz', 'knots'},
    'model.increment': {'name', 'scale'},
    'grids': {'n', 'N', 'fixed_n', 'fixed_N'},
    'theory': {'alpha', 'p', 's'},
    'drift': {'v', 'lam', 'b', 'small_set', 'epsilon', 'nu'},
    'probe': {'radii', 'proposals', 'gamma'},
    'counterexample': {'epsilon', 'delta'},
    'fg': {'f', 'g', 'delta', 'draws', 'grid'},
    'fg.grid': {'low', 'high', 'points', 'n', 'k'},
    'monitor': {'g_tilde_threshold'},
}
TARGET_PARAMS = {
    'gaussian': {'dim'},
    'gaussian-mixture': {'weights', 'means', 'scale'},
    'logistic': {'n_obs', 'dim', 'seed', 'prior_scale'},
    'finite': {'log_unnorm'},
}
INITIAL_PARAMS = {
    'tempered': set(),
    'gaussian': {'mean', 'std'},
    'dirac': {'state'},
    'finite': {'weights'},
}
TEST_FUNCTION_PARAMS = {
    'identity': set(),
    'indicator': {'states'},
    'constant': {'value'},
}


@dataclass(frozen=True)
class ScheduleSpec:
    name: str = 'linear'
    gamma_floor: float = Defaults.GAMMA_FLOOR.value
    lipschitz: Optional[float] = None
    knots: Optional[tuple] = None


@dataclass(frozen=True)
class IncrementSpec:
    name: str = 'gaussian'
    scale: float = Defaults.INCREMENT_SCALE.value


@dataclass(frozen=True)
class ModelSpec:
    """ target - имя и параметры цели, flip - вероятность предложения для конечных целей. """
    target: dict = field(default_factory=lambda: {'name': 'gaussian', 'dim': 1})
    schedule: ScheduleSpec = field(default_factory=ScheduleSpec)
    increment: IncrementSpec = field(default_factory=IncrementSpec)
    beta: float = Defaults.BETA.value
    flip: float = 0.2


@dataclass(frozen=True)
class GridSpec:
    n: tuple = Defaults.N_GRID.value
    N: tuple = Defaults.PARTICLES_GRID.value  # pylint: disable=invalid-name
    fixed_n: Optional[int] = None
    fixed_N: Optional[int] = None  # pylint: disable=invalid-name


@dataclass(frozen=True)
class TheorySpec:
    alpha: float = Defaults.ALPHA.value
    p: float = Defaults.P.value
    s: float = Defaults.S.value

    @property
    def t(self) -> float:
        return (1.0 + self.s) / self.s


@dataclass(frozen=True)
class DriftInputs:
    """ Входы условий дрейфа и минорации для конечной модели. """
    v: tuple
    lam: float
    b: float
    epsilon: float
    nu: tuple
    small_set: Optional[tuple] = None


@dataclass(frozen=True)
class ProbeSpec:
    radii: tuple = (2.0, 4.0, 6.0)
    proposals: int = PROBE_PROPOSALS
    gamma: Optional[float] = None


@dataclass(frozen=True)
class CounterexampleSpec:
    epsilon: float = 1.0
    delta: tuple = (0.0, 0.5, 0.9)


@dataclass(frozen=True)
class FgSpec:
    delta: float = 0.0
    f: Optional[tuple] = None
    g: Optional[tuple] = None
    draws: int = RANDOM_ETA_DRAWS
    grid: Optional[dict] = None


@dataclass(frozen=True)
class ExperimentConfig:
    """ Полная проверенная конфигурация; warnings - нарушенные гипотезы теории. """
    kind: ExperimentKind
    seed: int
    replicates: int = Defaults.REPLICATES.value
    workers: Optional[int] = None
    output_dir: Optional[str] = None
    model: ModelSpec = field(default_factory=ModelSpec)
    initial: dict = field(default_factory=lambda: {'name': 'tempered'})
    test_function: dict = field(default_factory=lambda: {'name': 'identity'})
    grids: GridSpec = field(default_factory=GridSpec)
    theory: TheorySpec = field(default_factory=TheorySpec)
    drift: Optional[DriftInputs] = None
    probe: ProbeSpec = field(default_factory=ProbeSpec)
    counterexample: CounterexampleSpec = field(default_factory=CounterexampleSpec)
    fg: Optional[FgSpec] = None
    g_tilde_threshold: float = G_TILDE_THRESHOLD
    warnings: tuple = ()

    def resolved(self) -> dict:
        """ Полностью разрешённая конфигурация для эха в сводке. """
        echo = asdict(self)
        echo['kind'] = self.kind.value
        return echo


def _check_keys(section: dict, path: str, allowed: set) -> None:
    if not isinstance(section, dict):
        raise ConfigError(path or '<root>', 'ожидается объект')
    for key in section:
        if key not in allowed:
            raise ConfigError(f'{path}.{key}' if path else key, 'неизвестный ключ')


def _number(value, path: str, low: float = None, high: float = None, integer: bool = False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, 'ожидается число')
    if integer and not float(value).is_integer():
        raise ConfigError(path, 'ожидается целое число')
    if (low is not None and value < low) or (high is not None and value > high):
        raise ConfigError(path, f'значение {value} вне диапазона [{low}, {high}]')
    return int(value) if integer else float(value)


def _numbers(values, path: str, low: float = None, integer: bool = False) -> tuple:
    if not isinstance(values, list) or not values:
        raise ConfigError(path, 'ожидается непустой список')
    return tuple(_number(value, f'{path}[{i}]', low=low, integer=integer)
                 for i, value in enumerate(values))


def _named(section: dict, path: str, registry: dict) -> dict:
    """ Секция вида {"name": ..., параметры}; параметры проверяются по реестру. """
    if not isinstance(section, dict) or 'name' not in section:
        raise ConfigError(f'{path}.name', 'имя обязательно')
    name = section['name']
    if name not in registry:
        raise ConfigError(f'{path}.name', f'неизвестное имя {name!r}, доступны {sorted(registry)}')
    _check_keys(section, path, registry[name] | {'name'})
    return dict(section)


def _parse_model(raw: dict) -> ModelSpec:
    _check_keys(raw, 'model', ALLOWED_KEYS['model'])
    target = _named(raw.get('target', {'name': 'gaussian', 'dim': 1}), 'model.target', TARGET_PARAMS)
    try:
        make_target(**target)
    except (TypeError, ValueError, StabilityLabError) as error:
        raise ConfigError('model.target', str(error)) from error

    schedule_raw = raw.get('schedule', {})
    _check_keys(schedule_raw, 'model.schedule', ALLOWED_KEYS['model.schedule'])
    schedule = ScheduleSpec(
        name=schedule_raw.get('name', 'linear'),
        gamma_floor=_number(schedule_raw.get('gamma_floor', Defaults.GAMMA_FLOOR.value),
                            'model.schedule.gamma_floor', low=1e-12, high=1.0),
        lipschitz=(None if schedule_raw.get('lipschitz') is None else
                   _number(schedule_raw['lipschitz'], 'model.schedule.lipschitz', low=0.0)),
        knots=(None if schedule_raw.get('knots') is None else
               tuple(tuple(knot) for knot in schedule_raw['knots'])))
    try:
        make_schedule(schedule.name, schedule.gamma_floor, schedule.lipschitz, schedule.knots)
    except StabilityLabError as error:
        raise ConfigError('model.schedule', str(error)) from error

    increment_raw = raw.get('increment', {})
    _check_keys(increment_raw, 'model.increment', ALLOWED_KEYS['model.increment'])
    increment = IncrementSpec(
        name=increment_raw.get('name', 'gaussian'),
        scale=_number(increment_raw.get('scale', Defaults.INCREMENT_SCALE.value),
                      'model.increment.scale', low=1e-12))
    if increment.name not in INCREMENTS:
        raise ConfigError('model.increment.name',
                          f'неизвестное приращение {increment.name!r}, доступны {sorted(INCREMENTS)}')
    return ModelSpec(target=target, schedule=schedule, increment=increment,
                     beta=_number(raw.get('beta', Defaults.BETA.value), 'model.beta', low=1e-12, high=1 - 1e-12),
                     flip=_number(raw.get('flip', 0.2), 'model.flip', low=1e-12, high=1.0))


def _parse_grids(raw: dict) -> GridSpec:
    _check_keys(raw, 'grids', ALLOWED_KEYS['grids'])
    n_grid = _numbers(raw.get('n', list(Defaults.N_GRID.value)), 'grids.n', low=1, integer=True)
    particles = _numbers(raw.get('N', list(Defaults.PARTICLES_GRID.value)), 'grids.N', low=1, integer=True)
    fixed_n = raw.get('fixed_n')
    fixed_particles = raw.get('fixed_N')
    return GridSpec(
        n=n_grid, N=particles,
        fixed_n=n_grid[0] if fixed_n is None else _number(fixed_n, 'grids.fixed_n', low=1, integer=True),
        fixed_N=(particles[0] if fixed_particles is None else
                 _number(fixed_particles, 'grids.fixed_N', low=1, integer=True)))


def _parse_drift(raw: dict) -> DriftInputs:
    _check_keys(raw, 'drift', ALLOWED_KEYS['drift'])
    for key in ('v', 'lam', 'b', 'epsilon', 'nu'):
        if key not in raw:
            raise ConfigError(f'drift.{key}', 'ключ обязателен')
    return DriftInputs(
        v=_numbers(raw['v'], 'drift.v', low=1.0),
        lam=_number(raw['lam'], 'drift.lam', low=0.0, high=1.0),
        b=_number(raw['b'], 'drift.b', low=0.0),
        epsilon=_number(raw['epsilon'], 'drift.epsilon', low=0.0, high=1.0),
        nu=_numbers(raw['nu'], 'drift.nu', low=0.0),
        small_set=(None if raw.get('small_set') is None else
                   _numbers(raw['small_set'], 'drift.small_set', low=0, integer=True)))


def _parse_fg(raw: dict) -> FgSpec:
    _check_keys(raw, 'fg', ALLOWED_KEYS['fg'])
    grid = raw.get('grid')
    if grid is not None:
        _check_keys(grid, 'fg.grid', ALLOWED_KEYS['fg.grid'])
    elif 'f' not in raw or 'g' not in raw:
        raise ConfigError('fg', 'нужны либо значения f и g, либо сетка grid')
    f_vals = None if grid is not None else _numbers(raw['f'], 'fg.f')
    g_vals = None if grid is not None else _numbers(raw['g'], 'fg.g')
    if f_vals is not None and len(f_vals) != len(g_vals):
        raise ConfigError('fg.g', 'длины f и g различаются')
    return FgSpec(delta=_number(raw.get('delta', 0.0), 'fg.delta', low=0.0),
                  f=f_vals, g=g_vals,
                  draws=_number(raw.get('draws', RANDOM_ETA_DRAWS), 'fg.draws', low=1, integer=True),
                  grid=grid)


def theory_warnings(theory: TheorySpec, gamma_floor: float) -> list[str]:
    """ Предупреждения о нарушенных гипотезах устойчивости. """
    warnings = []
    alpha_t_p = theory.alpha * theory.t * theory.p
    if alpha_t_p > 1:
        warnings.append(f'αtp = {alpha_t_p:.2f} > 1: {MsgForUser.OUT_OF_THEORY.value}')
    ratio = (1 + theory.s) * theory.p * (1 - gamma_floor) / gamma_floor
    if ratio >= 1:
        warnings.append(f'(1+s)p(1-γ̲)/γ̲ = {ratio:.2f} ≥ 1: {MsgForUser.OUT_OF_THEORY.value}')
    return warnings


def parse_config(text: str) -> ExperimentConfig:
    """ Разобрать JSON-текст конфигурации; ошибки - ConfigError с путём к ключу. """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as error:
        raise ConfigError('<root>', f'некорректный JSON: {error.msg}') from error
    _check_keys(raw, '', ALLOWED_KEYS[''])

    if 'experiment' not in raw:
        raise ConfigError('experiment', 'ключ обязателен')
    try:
        kind = ExperimentKind(raw['experiment'])
    except ValueError as error:
        raise ConfigError('experiment', f'неизвестный вид {raw["experiment"]!r}') from error
    if 'seed' not in raw:
        raise ConfigError('seed', 'seed обязателен')
    seed = _number(raw['seed'], 'seed', low=0, integer=True)

    model = _parse_model(raw.get('model', {}))
    initial = _named(raw.get('initial', {'name': 'tempered'}), 'initial', INITIAL_PARAMS)
    test_function = _named(raw.get('test_function', {'name': 'identity'}), 'test_function',
                           TEST_FUNCTION_PARAMS)

    theory_raw = raw.get('theory', {})
    _check_keys(theory_raw, 'theory', ALLOWED_KEYS['theory'])
    theory = TheorySpec(alpha=_number(theory_raw.get('alpha', Defaults.ALPHA.value), 'theory.alpha',
                                      low=1e-12, high=1.0),
                        p=_number(theory_raw.get('p', Defaults.P.value), 'theory.p', low=1.0),
                        s=_number(theory_raw.get('s', Defaults.S.value), 'theory.s', low=1e-12))

    probe_raw = raw.get('probe', {})
    _check_keys(probe_raw, 'probe', ALLOWED_KEYS['probe'])
    probe = ProbeSpec(
        radii=_numbers(probe_raw.get('radii', [2.0, 4.0, 6.0]), 'probe.radii', low=0.0),
        proposals=_number(probe_raw.get('proposals', PROBE_PROPOSALS), 'probe.proposals',
                          low=2, integer=True),
        gamma=(None if probe_raw.get('gamma') is None else
               _number(probe_raw['gamma'], 'probe.gamma', low=model.schedule.gamma_floor, high=1.0)))

    counter_raw = raw.get('counterexample', {})
    _check_keys(counter_raw, 'counterexample', ALLOWED_KEYS['counterexample'])
    deltas = counter_raw.get('delta', [0.0, 0.5, 0.9])
    counterexample = CounterexampleSpec(
        epsilon=_number(counter_raw.get('epsilon', 1.0), 'counterexample.epsilon', low=1e-12),
        delta=_numbers(deltas if isinstance(deltas, list) else [deltas], 'counterexample.delta',
                       low=0.0))

    monitor_raw = raw.get('monitor', {})
    _check_keys(monitor_raw, 'monitor', ALLOWED_KEYS['monitor'])

    workers = raw.get('workers')
    output_dir = raw.get('output_dir')
    if output_dir is not None and not isinstance(output_dir, str):
        raise ConfigError('output_dir', 'ожидается строка')

    config = ExperimentConfig(
        kind=kind, seed=seed,
        replicates=_number(raw.get('replicates', Defaults.REPLICATES.value), 'replicates', low=1, integer=True),
        workers=None if workers is None else _number(workers, 'workers', low=1, integer=True),
        output_dir=output_dir, model=model, initial=initial, test_function=test_function,
        grids=_parse_grids(raw.get('grids', {})), theory=theory,
        drift=None if raw.get('drift') is None else _parse_drift(raw['drift']),
        probe=probe, counterexample=counterexample,
        fg=None if raw.get('fg') is None else _parse_fg(raw['fg']),
        g_tilde_threshold=_number(monitor_raw.get('g_tilde_threshold', G_TILDE_THRESHOLD),
                                  'monitor.g_tilde_threshold', low=0.0),
        warnings=tuple(theory_warnings(theory, model.schedule.gamma_floor)))
    for warning in config.warnings:
        logger.warning(warning)
    return config


def read_config(path: Path) -> ExperimentConfig:
    """ Прочитать и разобрать конфигурацию из файла. """
    try:
        text = Path(path).read_text(encoding='utf-8')
    except OSError as error:
        raise ConfigError('<file>', f'файл {path} не прочитан: {error}') from error
    return parse_config(text)
