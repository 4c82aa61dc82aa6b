"""
Расписания темперирования γ: [0, 1] → [γ̲, 1].

  @dataclass
  class TemperingSchedule: - γ̲, вычисление γ(u), заявленная константа Липшица C_γ.

  @dataclass
  class ScheduleAudit: - результат проверки расписания на плотной сетке.

    def linear_schedule - γ̲ + (1-γ̲)u, C_γ = 1-γ̲.
    def smoothstep_schedule - γ̲ + (1-γ̲)(3u² - 2u³), C_γ = 1.5(1-γ̲).
    def piecewise_linear_schedule - линейная интерполяция по узлам.
    def make_schedule - расписание по имени с проверкой на сетке.
"""
from dataclasses import dataclass
from typing import Callable

import numpy as np

from smc_stability.common.constants import SCHEDULE_GRID_POINTS, Tolerance
from smc_stability.common.exceptions import ParameterRangeError, ScheduleError

DEFAULT_KNOTS = ((0.0, 0.0), (0.5, 0.25), (1.0, 1.0))


@dataclass(frozen=True)
class ScheduleAudit:
    endpoints_ok: bool
    monotone: bool
    within_range: bool
    max_slope: float
    lipschitz_ok: bool

    @property
    def passed(self) -> bool:
        return self.endpoints_ok and self.monotone and self.within_range and self.lipschitz_ok


@dataclass(frozen=True, eq=False)
class TemperingSchedule:
    """ Неубывающая липшицева γ с γ(0) = γ̲ и γ(1) = 1. """
    name: str
    gamma_floor: float
    eval: Callable[[np.ndarray], np.ndarray]
    lipschitz_const: float

    def __post_init__(self):
        if not 0 < self.gamma_floor <= 1:
            raise ParameterRangeError('γ̲', self.gamma_floor, '(0, 1]')
        if not self.lipschitz_const >= 0:
            raise ParameterRangeError('C_γ', self.lipschitz_const, '[0, inf)')

    def __call__(self, u):
        values = self.eval(np.asarray(u, dtype=float))
        return float(values) if np.ndim(values) == 0 else values

    def audit(self, points: int = SCHEDULE_GRID_POINTS) -> ScheduleAudit:
        """ Концы, монотонность, диапазон и константа Липшица на сетке из points узлов. """
        grid = np.linspace(0.0, 1.0, points)
        values = self.eval(grid)
        steps = np.diff(values)
        max_slope = float(np.max(np.abs(steps)) / (grid[1] - grid[0]))
        return ScheduleAudit(
            endpoints_ok=bool(abs(values[0] - self.gamma_floor) <= Tolerance.IDENTITY.value
                              and abs(values[-1] - 1.0) <= Tolerance.IDENTITY.value),
            monotone=bool(np.all(steps >= -Tolerance.IDENTITY.value)),
            within_range=bool(np.all(values >= self.gamma_floor - Tolerance.IDENTITY.value)
                              and np.all(values <= 1.0 + Tolerance.IDENTITY.value)),
            max_slope=max_slope,
            lipschitz_ok=max_slope <= (Tolerance.LIPSCHITZ_SAFETY.value * self.lipschitz_const
                                      + Tolerance.IDENTITY.value),
        )


def _pinned(gamma_floor: float, shape: Callable[[np.ndarray], np.ndarray]):
    """ γ̲ + (1-γ̲)·shape(u) с точными концами и обрезкой в [γ̲, 1]. """
    def evaluate(u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        values = np.clip(gamma_floor + (1.0 - gamma_floor) * shape(u), gamma_floor, 1.0)
        values = np.where(u <= 0.0, gamma_floor, values)
        return np.where(u >= 1.0, 1.0, values)
    return evaluate


def linear_schedule(gamma_floor: float) -> TemperingSchedule:
    return TemperingSchedule('linear', gamma_floor, _pinned(gamma_floor, lambda u: u),
                             1.0 - gamma_floor)


def smoothstep_schedule(gamma_floor: float) -> TemperingSchedule:
    return TemperingSchedule('smoothstep', gamma_floor,
                             _pinned(gamma_floor, lambda u: 3.0 * u ** 2 - 2.0 * u ** 3),
                             1.5 * (1.0 - gamma_floor))


def piecewise_linear_schedule(gamma_floor: float, knots=DEFAULT_KNOTS) -> TemperingSchedule:
    """ Узлы (u, доля) задают γ(u) = γ̲ + доля·(1-γ̲); первый узел (0, 0), последний (1, 1). """
    knots = np.asarray(knots, dtype=float)
    if (knots.ndim != 2 or knots.shape[1] != 2 or knots[0, 0] != 0.0 or knots[-1, 0] != 1.0
            or knots[0, 1] != 0.0 or knots[-1, 1] != 1.0):
        raise ScheduleError('piecewise-linear', 'узлы должны начинаться в (0, 0) и кончаться в (1, 1)')
    if np.any(np.diff(knots[:, 0]) <= 0) or np.any(np.diff(knots[:, 1]) < 0):
        raise ScheduleError('piecewise-linear', 'узлы должны возрастать')
    u_knots, fractions = knots[:, 0], knots[:, 1]
    slope = float(np.max(np.diff(fractions) / np.diff(u_knots)))
    return TemperingSchedule('piecewise-linear', gamma_floor,
                             _pinned(gamma_floor, lambda u: np.interp(u, u_knots, fractions)),
                             slope * (1.0 - gamma_floor))


SCHEDULES = {
    'linear': linear_schedule,
    'smoothstep': smoothstep_schedule,
    'piecewise-linear': piecewise_linear_schedule,
}


def make_schedule(name: str, gamma_floor: float, lipschitz: float = None,
                  knots=None) -> TemperingSchedule:
    """ Расписание по имени. Заявленная C_γ заменяет аналитическую и проверяется на сетке. """
    if name not in SCHEDULES:
        raise ScheduleError(name, f'неизвестное расписание, доступны {sorted(SCHEDULES)}')
    if name == 'piecewise-linear' and knots is not None:
        schedule = piecewise_linear_schedule(gamma_floor, knots)
    else:
        schedule = SCHEDULES[name](gamma_floor)
    if lipschitz is not None:
        schedule = TemperingSchedule(schedule.name, gamma_floor, schedule.eval, float(lipschitz))
    audit = schedule.audit()
    if not audit.passed:
        raise ScheduleError(name, f'проверка на сетке не пройдена: {audit}')
    return schedule
