"""
Распределения приращений q для случайного блуждания Метрополиса.

Классы:
    - class IncrementDistribution(ABC):
         Базовый класс симметричного приращения с профилем положительности ε_r.

    - class GaussianIncrement:
         Изотропное гауссовское приращение N(0, σ²I).

    - class UniformBallIncrement:
         Равномерное приращение в шаре радиуса R.

Функции:
    - make_increment:
        Приращение по имени и масштабу.
"""
from abc import ABC, abstractmethod

import numpy as np
from scipy.special import gammaln

from smc_stability.common.exceptions import AsymmetricIncrementError, ParameterRangeError

SYMMETRY_TOL = 1e-12


class IncrementDistribution(ABC):
    """ Базовый класс приращений. Симметричность проверяется на сетке при построении ядра. """
    name = 'increment'

    @abstractmethod
    def sample(self, dim: int, size: int, rng: np.random.Generator) -> np.ndarray:
        """ size приращений формы (size, dim). """

    @abstractmethod
    def log_density(self, y) -> np.ndarray:
        """ log q(y) для пачки (N, d). """

    @abstractmethod
    def positivity_radius_profile(self, r: float, dim: int) -> float:
        """ ε_r: q(y) ≥ ε_r при |y| ≤ r. Ноль, если такой ε_r > 0 нет. """

    @staticmethod
    def _symmetry_grid(dim: int, reach: float, points: int) -> np.ndarray:
        """ Точки на лучах вдоль осей и главной диагонали, без нуля. """
        radii = np.linspace(-reach, reach, points)
        radii = radii[radii != 0.0]
        directions = list(np.eye(dim)) + [np.ones(dim) / np.sqrt(dim)]
        return np.concatenate([radii[:, None] * direction[None, :] for direction in directions])

    def check_symmetry(self, dim: int, reach: float = 5.0, points: int = 401) -> float:
        """ max |log q(y) - log q(-y)| на сетке; несимметричное приращение отвергается. """
        grid = self._symmetry_grid(dim, reach, points)
        forward, backward = self.log_density(grid), self.log_density(-grid)
        both_zero = np.isneginf(forward) & np.isneginf(backward)
        with np.errstate(invalid='ignore'):
            gaps = np.where(both_zero, 0.0, np.abs(forward - backward))
        max_gap = float(np.max(np.where(np.isnan(gaps), np.inf, gaps)))
        if max_gap > SYMMETRY_TOL:
            raise AsymmetricIncrementError(self.name, max_gap)
        return max_gap


class GaussianIncrement(IncrementDistribution):
    """ y ~ N(0, σ²I). """
    name = 'gaussian'

    def __init__(self, scale: float = 1.0):
        if not scale > 0:
            raise ParameterRangeError('σ', scale, '(0, inf)')
        self.scale = float(scale)

    def sample(self, dim, size, rng):
        return self.scale * rng.standard_normal((size, dim))

    def log_density(self, y):
        y = np.asarray(y, dtype=float)
        y = y.reshape(y.shape[0], -1)
        dim = y.shape[1]
        return (-0.5 * np.sum(y ** 2, axis=1) / self.scale ** 2
                - 0.5 * dim * np.log(2.0 * np.pi * self.scale ** 2))

    def positivity_radius_profile(self, r, dim):
        """ Плотность на сфере радиуса r - её минимум на шаре. """
        return float(np.exp(-0.5 * r ** 2 / self.scale ** 2
                            - 0.5 * dim * np.log(2.0 * np.pi * self.scale ** 2)))


class UniformBallIncrement(IncrementDistribution):
    """ y равномерно в шаре радиуса R. Плотность положительна только при |y| ≤ R. """
    name = 'uniform-ball'

    def __init__(self, radius: float = 1.0):
        if not radius > 0:
            raise ParameterRangeError('R', radius, '(0, inf)')
        self.radius = float(radius)

    def _log_volume(self, dim: int) -> float:
        return 0.5 * dim * np.log(np.pi) + dim * np.log(self.radius) - gammaln(0.5 * dim + 1.0)

    def sample(self, dim, size, rng):
        directions = rng.standard_normal((size, dim))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
        radii = self.radius * rng.random(size) ** (1.0 / dim)
        return directions * radii[:, None]

    def log_density(self, y):
        y = np.asarray(y, dtype=float)
        y = y.reshape(y.shape[0], -1)
        inside = np.linalg.norm(y, axis=1) <= self.radius
        return np.where(inside, -self._log_volume(y.shape[1]), -np.inf)

    def positivity_radius_profile(self, r, dim):
        if r > self.radius:
            return 0.0
        return float(np.exp(-self._log_volume(dim)))


INCREMENTS = {
    'gaussian': GaussianIncrement,
    'uniform-ball': UniformBallIncrement,
}


def make_increment(name: str, scale: float = 1.0) -> IncrementDistribution:
    """ Приращение по имени; scale - σ гауссовского или радиус шара. """
    if name not in INCREMENTS:
        raise KeyError(name)
    return INCREMENTS[name](scale)
