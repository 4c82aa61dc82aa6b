"""
Точное вычисление детерминированного потока модели Фейнмана-Каца на конечном
пространстве состояний через произведения матриц.

Произведения считаются с компенсированным суммированием (Ноймайер) по индексу свёртки.
Нормированный поток не зависит от масштаба потенциалов, поэтому внутри используются
Q̃ = diag(G̃) M с G̃ = G / Ḡ.

    def compensated_matmul - произведение матриц с компенсацией ошибок округления.
    def q_matrix - Q_{n,k} = diag(G_{n,k-1}) M_{n,k}.
    def q_tilde_matrix - то же с нормированным потенциалом G̃.
    def q_semigroup - Q_{n,k:ℓ} = Q_{n,k+1} ... Q_{n,ℓ}.
    def q_tilde_semigroup - Q̃_{n,k:ℓ}.
    def m_semigroup - M_{n,k+1} ... M_{n,ℓ}.
    def future_masses - векторы Q̃_{n,k:n}(1) для всех k.
    def eta_exact - η_{n,k} = μQ_{n,0:k} / μQ_{n,0:k}(1).
    def psi_map - преобразование Больцмана-Гиббса Ψ_{n,k}.
    def phi_step - Φ_{n,k}(η) = Ψ_{n,k-1}(η) M_{n,k}.
    def flow_map - Φ_{n,k:ℓ}(η) через полугруппу Q.
    def s_kernel_matrix - ядро S_{n,k}, скрученное будущей массой.
    def flow_map_via_s - Φ_{n,k:n}(η) через ядра S.
"""
import numpy as np

from smc_stability.common.exceptions import (DegenerateModelError, IndexOutOfRangeError,
                                             UnsupportedModelError)
from smc_stability.fk_core.measures import DiscreteMeasure
from smc_stability.fk_core.model import FKModel, FlowIndex


def compensated_matmul(a, b) -> np.ndarray:
    """ a @ b с компенсированным суммированием по общему индексу. """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    total = np.zeros((a.shape[0], b.shape[1]))
    compensation = np.zeros_like(total)
    for j in range(a.shape[1]):
        term = np.outer(a[:, j], b[j, :])
        summed = total + term
        compensation += np.where(np.abs(total) >= np.abs(term),
                                 (total - summed) + term,
                                 (term - summed) + total)
        total = summed
    return total + compensation


def _require_finite(model: FKModel) -> None:
    if not model.is_finite:
        raise UnsupportedModelError()


def _index(model: FKModel, idx) -> FlowIndex:
    """ FlowIndex модели из индекса или целого k. """
    if isinstance(idx, FlowIndex):
        if idx.n != model.horizon:
            raise IndexOutOfRangeError('n', idx.n, model.horizon, model.horizon)
        return idx
    return model.index(int(idx))


def _check_pair(model: FKModel, k: int, ell: int) -> None:
    if not 0 <= k <= model.horizon:
        raise IndexOutOfRangeError('k', k, 0, model.horizon)
    if not k <= ell <= model.horizon:
        raise IndexOutOfRangeError('ℓ', ell, k, model.horizon)


def _potential_vector(model: FKModel, k: int, normalized: bool) -> np.ndarray:
    log_g = model.potentials.log_values(model.index(k), model.state_labels())
    if normalized:
        log_g = np.minimum(log_g - model.potentials.upper_bound_log, 0.0)
    return np.exp(log_g)


def q_matrix(model: FKModel, idx) -> np.ndarray:
    """ Q_{n,k}(x, y) = G_{n,k-1}(x) M_{n,k}(x, y), k из [1, n]. """
    _require_finite(model)
    idx = _index(model, idx).require(1, model.horizon)
    return _potential_vector(model, idx.k - 1, normalized=False)[:, None] * model.kernels.matrix(idx)


def q_tilde_matrix(model: FKModel, idx) -> np.ndarray:
    """ Q̃_{n,k}(x, y) = G̃_{n,k-1}(x) M_{n,k}(x, y). """
    _require_finite(model)
    idx = _index(model, idx).require(1, model.horizon)
    return _potential_vector(model, idx.k - 1, normalized=True)[:, None] * model.kernels.matrix(idx)


def _ordered_product(model: FKModel, k: int, ell: int, factor) -> np.ndarray:
    _require_finite(model)
    _check_pair(model, k, ell)
    product = np.eye(model.n_states)
    for j in range(k + 1, ell + 1):
        product = compensated_matmul(product, factor(model, j))
    return product


def q_semigroup(model: FKModel, k: int, ell: int) -> np.ndarray:
    """ Q_{n,k:ℓ}; при k = ℓ единичная матрица. """
    return _ordered_product(model, k, ell, q_matrix)


def q_tilde_semigroup(model: FKModel, k: int, ell: int) -> np.ndarray:
    """ Q̃_{n,k:ℓ}. """
    return _ordered_product(model, k, ell, q_tilde_matrix)


def m_semigroup(model: FKModel, k: int, ell: int) -> np.ndarray:
    """ M_{n,k+1} ... M_{n,ℓ}. """
    return _ordered_product(model, k, ell, lambda mdl, j: mdl.kernels.matrix(mdl.index(j)))


def future_masses(model: FKModel) -> list[np.ndarray]:
    """ [Q̃_{n,k:n}(1) для k = 0..n], обратная рекурсия h_k = Q̃_{n,k+1} h_{k+1}. """
    _require_finite(model)
    masses = [np.ones(model.n_states)]
    for j in range(model.horizon, 0, -1):
        masses.append(compensated_matmul(q_tilde_matrix(model, j), masses[-1][:, None])[:, 0])
    return masses[::-1]


def _normalize_row(row: np.ndarray, k: int) -> DiscreteMeasure:
    total = row.sum()
    if not total > 0:
        raise DegenerateModelError(k)
    return DiscreteMeasure(np.clip(row / total, 0.0, None))


def _row_times(eta: DiscreteMeasure, matrix: np.ndarray) -> np.ndarray:
    return compensated_matmul(eta.weights[None, :], matrix)[0]


def eta_exact(model: FKModel, k: int) -> DiscreteMeasure:
    """ η_{n,k} = μQ_{n,0:k} / μQ_{n,0:k}(1). """
    _require_finite(model)
    if model.initial.measure is None:
        raise UnsupportedModelError('μ не задана как DiscreteMeasure')
    return flow_map(model, model.initial.measure, 0, k)


def psi_map(model: FKModel, eta: DiscreteMeasure, k: int) -> DiscreteMeasure:
    """ Ψ_{n,k}(η)(dx) = G_{n,k}(x) η(dx) / η(G_{n,k}), k из [0, n-1]. """
    _require_finite(model)
    model.index(k).require(0, model.horizon - 1)
    return _normalize_row(eta.weights * _potential_vector(model, k, normalized=True), k)


def phi_step(model: FKModel, eta: DiscreteMeasure, k: int) -> DiscreteMeasure:
    """ Φ_{n,k}(η) = Ψ_{n,k-1}(η) M_{n,k}, k из [1, n]. """
    idx = model.index(k).require(1, model.horizon)
    reweighted = psi_map(model, eta, k - 1)
    return _normalize_row(_row_times(reweighted, model.kernels.matrix(idx)), k)


def flow_map(model: FKModel, eta: DiscreteMeasure, k: int, ell: int) -> DiscreteMeasure:
    """ Φ_{n,k:ℓ}(η) = ηQ_{n,k:ℓ} / ηQ_{n,k:ℓ}(1). """
    if k == ell:
        _check_pair(model, k, ell)
        return eta
    return _normalize_row(_row_times(eta, q_tilde_semigroup(model, k, ell)), ell)


def s_kernel_matrix(model: FKModel, idx, masses: list[np.ndarray] = None) -> np.ndarray:
    """ S_{n,k}(x, y) = M_{n,k}(x, y) h_k(y) / M_{n,k} h_k (x), h_k = Q̃_{n,k:n}(1). """
    _require_finite(model)
    idx = _index(model, idx).require(1, model.horizon)
    if masses is None:
        masses = future_masses(model)
    kernel = model.kernels.matrix(idx)
    twisted = kernel * masses[idx.k][None, :]
    row_mass = twisted.sum(axis=1)
    if np.any(row_mass <= 0):
        raise DegenerateModelError(idx.k)
    return twisted / row_mass[:, None]


def flow_map_via_s(model: FKModel, eta: DiscreteMeasure, k: int) -> DiscreteMeasure:
    """ Φ_{n,k:n}(η) = η(h_k S_{n,k+1} ... S_{n,n}(·)) / η(h_k). """
    _require_finite(model)
    _check_pair(model, k, model.horizon)
    if k == model.horizon:
        return eta
    masses = future_masses(model)
    row = eta.weights * masses[k]
    total = row.sum()
    if not total > 0:
        raise DegenerateModelError(k)
    row = row / total
    for j in range(k + 1, model.horizon + 1):
        row = compensated_matmul(row[None, :], s_kernel_matrix(model, j, masses))[0]
    return DiscreteMeasure(np.clip(row, 0.0, None) / np.clip(row, 0.0, None).sum())
