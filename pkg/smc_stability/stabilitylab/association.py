"""
Неравенства для произведения двух функций под дискретной мерой.

    def pair_ratios - [f(x)-f(x')][g(x)-g(x')] / ([f(x)+f(x')][g(x)+g(x')]) по всем парам.
    def eta_fg_sufficiency_check - парное условие δ/(2+δ) и проверка η(fg) ≤ (1+δ)η(f)η(g).
    def r2_counterexample - двухточечная мера на плоскости, для которой
        η(GV)/η(G) > (1+δ)η(V).
"""
import numpy as np

from smc_stability.common.constants import RANDOM_ETA_DRAWS, Status, StreamPurpose
from smc_stability.common.exceptions import ParameterRangeError, PreconditionError
from smc_stability.common.logger_config import logger
from smc_stability.common.rng_streams import make_stream
from smc_stability.stabilitylab.reports import CounterexampleProbe, FgSufficiencyReport

RELATIVE_TOL = 1e-12
WITNESS_GRID = 1001
OUTWARD_FACTOR = 1.5
OUTWARD_STEPS = 60


def pair_ratios(f_vals: np.ndarray, g_vals: np.ndarray) -> np.ndarray:
    """ Матрица отношений; на диагонали нули. """
    df = f_vals[:, None] - f_vals[None, :]
    dg = g_vals[:, None] - g_vals[None, :]
    sf = f_vals[:, None] + f_vals[None, :]
    sg = g_vals[:, None] + g_vals[None, :]
    return (df * dg) / (sf * sg)


def _gap(weights: np.ndarray, f_vals: np.ndarray, g_vals: np.ndarray, delta: float) -> np.ndarray:
    """ η(fg) - (1+δ)η(f)η(g) для строк weights. """
    return weights @ (f_vals * g_vals) - (1 + delta) * (weights @ f_vals) * (weights @ g_vals)


def _witness(f_vals, g_vals, delta, pair) -> tuple[float, float]:
    """ Вес t на первой точке пары, максимизирующий разрыв по сетке t ∈ [0, 1]. """
    t = np.linspace(0.0, 1.0, WITNESS_GRID)
    i, j = pair
    gaps = _gap(np.stack([t, 1 - t], axis=1), f_vals[[i, j]], g_vals[[i, j]], delta)
    best = int(np.argmax(gaps))
    return float(t[best]), float(gaps[best])


def eta_fg_sufficiency_check(f_vals, g_vals, delta: float, seed: int = 0,
                             draws: int = RANDOM_ETA_DRAWS) -> FgSufficiencyReport:
    """ Если все парные отношения ≤ δ/(2+δ), неравенство η(fg) ≤ (1+δ)η(f)η(g)
    проверяется на draws случайных мерах Дирихле(1, ..., 1). Иначе ищется
    двухточечный свидетель на худшей паре. """
    f_vals = np.asarray(f_vals, dtype=float)
    g_vals = np.asarray(g_vals, dtype=float)
    if f_vals.shape != g_vals.shape or f_vals.ndim != 1:
        raise PreconditionError('f и g задаются парами значений на одном наборе точек')
    if np.any(f_vals <= 0) or np.any(g_vals <= 0):
        raise PreconditionError('значения f и g должны быть строго положительны')
    if delta < 0:
        raise ParameterRangeError('δ', delta, '[0, inf)')

    threshold = delta / (2 + delta)
    ratios = pair_ratios(f_vals, g_vals)
    worst = np.unravel_index(int(np.argmax(ratios)), ratios.shape)
    worst_pair = (int(worst[0]), int(worst[1]))
    max_ratio = float(ratios[worst])
    i, j = worst_pair
    uniform_gap = float(_gap(np.array([0.5, 0.5]), f_vals[[i, j]], g_vals[[i, j]], delta))
    holds = max_ratio <= threshold + RELATIVE_TOL

    report = FgSufficiencyReport(delta=float(delta), threshold=threshold,
                                 necessity_threshold=3 * delta / (2 + delta),
                                 max_pair_ratio=max_ratio, condition_holds=bool(holds),
                                 draws=0, violations=0, worst_pair=worst_pair,
                                 uniform_pair_gap=uniform_gap)
    if holds:
        rng = make_stream(seed, StreamPurpose.ETA_DRAW)
        etas = rng.dirichlet(np.ones(f_vals.size), size=draws)
        scale = (1 + delta) * (etas @ f_vals) * (etas @ g_vals)
        gaps = _gap(etas, f_vals, g_vals, delta)
        report.draws = draws
        report.violations = int(np.sum(gaps > RELATIVE_TOL * scale))
        if report.violations:
            logger.error('η(fg) ≤ (1+δ)η(f)η(g) нарушено на %s мерах из %s',
                         report.violations, draws)
    else:
        report.witness_weight, report.witness_gap = _witness(f_vals, g_vals, delta, worst_pair)
    return report


def _log_sides(epsilon: float, delta: float, r: float) -> tuple[float, float]:
    """ log η(GV)/η(G) и log (1+δ)η(V) для η = ½(δ_y + δ_y'),
    y = (0, √(r²-ε²)), y' = (-r, 0). """
    log_lhs = np.logaddexp(0.0, 4 * r * epsilon) - np.logaddexp(-r ** 2, -(r - epsilon) ** 2)
    log_rhs = np.log1p(delta) + np.logaddexp(r ** 2, (r + epsilon) ** 2) - np.log(2.0)
    return float(log_lhs), float(log_rhs)


def _contour_radius(center_x: float, radius: float, zeta: np.ndarray) -> np.ndarray:
    """ Расстояние от нуля до окружности с центром (center_x, 0) вдоль направлений zeta. """
    along = center_x * zeta[:, 0]
    return along + np.sqrt(along ** 2 - center_x ** 2 + radius ** 2)


def psi_at(epsilon: float, r: float, angles: int = 3600) -> float:
    """ sup по направлениям расстояния между линиями уровня G и V через точку
    (0, √(r²-ε²)): обе - окружности радиуса r с центрами (∓ε, 0). """
    theta = np.linspace(0.0, 2 * np.pi, angles, endpoint=False)
    zeta = np.concatenate([np.stack([np.cos(theta), np.sin(theta)], axis=1), [[-1.0, 0.0]]])
    gaps = _contour_radius(-epsilon, r, zeta) - _contour_radius(epsilon, r, zeta)
    return float(gaps.max())


def r2_counterexample(epsilon: float, delta: float) -> CounterexampleProbe:
    """ V(x) = exp((x₁-ε)² + x₂²), G(x) = exp(-[(x₁+ε)² + x₂²]).
    Радиус r = max(2ε, ε + L/(2ε)), L = log((1+√e)/(1-√e)), e = 3δ/(2+δ); если
    строгого нарушения нет, r увеличивается в OUTWARD_FACTOR раз. """
    if not 0 <= delta < 1:
        raise ParameterRangeError('δ', delta, '[0, 1)')
    if not epsilon > 0:
        raise ParameterRangeError('ε', epsilon, '(0, inf)')

    level = 3 * delta / (2 + delta)
    root = np.sqrt(level)
    spread = np.log((1 + root) / (1 - root))
    r = max(2 * epsilon, epsilon + spread / (2 * epsilon))
    branch = 'proof-radius'
    log_lhs, log_rhs = _log_sides(epsilon, delta, r)
    for _ in range(OUTWARD_STEPS):
        if log_lhs > log_rhs:
            break
        branch = 'outward-search'
        r *= OUTWARD_FACTOR
        log_lhs, log_rhs = _log_sides(epsilon, delta, r)
    status = Status.SUCCESS if log_lhs > log_rhs else Status.FAILED
    if status is Status.FAILED:
        logger.warning('Строгое нарушение не найдено при ε = %s, δ = %s', epsilon, delta)

    y = np.array([0.0, np.sqrt(r ** 2 - epsilon ** 2)])
    y_prime = np.array([-r, 0.0])
    log_g = np.array([-r ** 2, -(r - epsilon) ** 2])
    log_v = np.array([r ** 2, (r + epsilon) ** 2])
    return CounterexampleProbe(
        epsilon=float(epsilon), delta=float(delta), witness=(y, y_prime), weights=(0.5, 0.5),
        lhs=float(np.exp(log_lhs)), rhs=float(np.exp(log_rhs)),
        log_lhs=log_lhs, log_rhs=log_rhs, psi_value=psi_at(epsilon, r), radius=float(r),
        branch=branch, status=status,
        g_values=tuple(float(v) for v in np.exp(log_g)),
        v_values=tuple(float(v) for v in np.exp(log_v)))


def counterexample_table(epsilon: float, deltas) -> list[CounterexampleProbe]:
    return [r2_counterexample(epsilon, delta) for delta in deltas]
