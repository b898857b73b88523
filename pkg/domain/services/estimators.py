"""
Métodos de reconstrucción: mínimos cuadrados sobre un diccionario (con
truncamiento T_M) y Orthogonal Matching Pursuit sobre un diccionario
sobrecompleto.
"""
import logging
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy import linalg

from ..entities.dictionary_spec import DictionarySpec
from ..entities.fit_result import FitResult
from .dictionaries import evaluate_atoms

logger = logging.getLogger(__name__)

SVD_RCOND = 1e-12
OMP_RESIDUAL_RTOL = 1e-14


def build_design_matrix(points, spec: DictionarySpec) -> np.ndarray:
    """
    Matriz (n x dim) con entrada (l, j) = atom_j(x_l)
    """
    matrix = evaluate_atoms(spec, points)
    if matrix.shape[0] == 0:
        raise ValueError("design matrix requires at least one point")
    return matrix


def _residual(A: np.ndarray, coefficients: np.ndarray, y: np.ndarray) -> float:
    return float(np.mean(np.abs(y - A @ coefficients) ** 2))


def least_squares_fit(A: np.ndarray, y: np.ndarray, spec: Optional[DictionarySpec] = None,
                      rcond: float = SVD_RCOND) -> FitResult:
    """
    Minimiza ||A c - y||_2 por SVD con umbral relativo rcond; devuelve la
    solución de norma mínima y marca la deficiencia de rango
    """
    y = np.asarray(y, dtype=complex)
    coefficients, _, rank, singular = linalg.lstsq(A, y, cond=rcond, lapack_driver='gelsd')
    dimension = A.shape[1]
    s_min = singular[-1] if len(singular) == dimension else 0.0
    condition = float(singular[0] / s_min) if s_min > 0 else float('inf')
    rank_deficient = int(rank) < dimension

    if rank_deficient:
        logger.debug(f"Least squares rank deficient: rank {rank} < {dimension} (cond={condition:.3e})")
    return FitResult(spec=spec, coefficients=coefficients, condition_number=condition,
                     empirical_residual=_residual(A, coefficients, y), rank=int(rank),
                     rank_deficient=rank_deficient)


def truncate_field(values: np.ndarray, M: float) -> np.ndarray:
    """
    T_M(v) = v * min(1, M / |v|): recorte del módulo conservando la fase
    """
    if M <= 0:
        raise ValueError(f"truncation bound must be positive, got {M}")
    values = np.asarray(values)
    modulus = np.abs(values)
    scale = np.minimum(1.0, M / np.where(modulus > 0, modulus, 1.0))
    return values * scale


def truncation_bound(y: np.ndarray, factor: float = 1.2) -> float:
    """
    Cota por defecto M = factor * max_l |y_l|
    """
    bound = factor * float(np.max(np.abs(y)))
    return bound if bound > 0 else 1.0


def empirical_norm(values: np.ndarray) -> float:
    return float(np.sqrt(np.mean(np.abs(np.asarray(values)) ** 2)))


def add_noise(values: np.ndarray, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """
    Ruido gaussiano complejo circular de desviación típica sigma
    """
    if sigma == 0:
        return np.asarray(values, dtype=complex)
    n = len(values)
    noise = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) * (sigma / np.sqrt(2.0))
    return np.asarray(values, dtype=complex) + noise


# ---------------------------------------------------------------------------
# Orthogonal Matching Pursuit
# ---------------------------------------------------------------------------

class _GreedyState:
    """
    Base ortonormal incremental (Gram-Schmidt con reortogonalización) de las
    columnas seleccionadas
    """

    def __init__(self, A: np.ndarray, y: np.ndarray):
        self.A = A
        self.y = y
        self.column_norms = np.linalg.norm(A, axis=0)
        self.Q = np.zeros((A.shape[0], 0), dtype=complex)
        self.R = np.zeros((0, 0), dtype=complex)
        self.support: List[int] = []
        self.residual = y.copy()

    def select(self) -> Optional[int]:
        safe = np.where(self.column_norms > 0, self.column_norms, np.inf)
        scores = np.abs(self.A.conj().T @ self.residual) / safe
        scores[self.support] = -1.0
        # argmax devuelve el primer índice ante empates
        best = int(np.argmax(scores))
        return best if scores[best] > 0 else None

    def add(self, column: int) -> bool:
        a = self.A[:, column]
        projection = self.Q.conj().T @ a
        v = a - self.Q @ projection
        correction = self.Q.conj().T @ v
        v = v - self.Q @ correction
        projection = projection + correction
        norm = np.linalg.norm(v)
        if norm <= 1e-14 * max(self.column_norms[column], 1e-300):
            return False
        k = len(self.support)
        R = np.zeros((k + 1, k + 1), dtype=complex)
        R[:k, :k] = self.R
        R[:k, k] = projection
        R[k, k] = norm
        self.R = R
        self.Q = np.column_stack((self.Q, v / norm))
        self.support.append(column)
        self.residual = self.y - self.Q @ (self.Q.conj().T @ self.y)
        return True

    def snapshot(self, spec: Optional[DictionarySpec]) -> FitResult:
        local = linalg.solve_triangular(self.R, self.Q.conj().T @ self.y) if self.support else np.zeros(0)
        coefficients = np.zeros(self.A.shape[1], dtype=complex)
        coefficients[self.support] = local
        diagonal = np.abs(np.diag(self.R))
        condition = float(np.linalg.cond(self.R)) if self.support else 1.0
        return FitResult(spec=spec, coefficients=coefficients, condition_number=condition,
                         empirical_residual=float(np.mean(np.abs(self.residual) ** 2)),
                         rank=int(np.sum(diagonal > 0)), iterations=len(self.support),
                         support=list(self.support))


def omp_path(A: np.ndarray, y: np.ndarray, max_iterations: int,
             spec: Optional[DictionarySpec] = None) -> Dict[int, FitResult]:
    """
    Ajustes anidados de OMP para k = 1..max_iterations en una sola pasada
    voraz; si el residuo se anula antes, las claves restantes repiten el
    último ajuste con las iteraciones reales
    """
    A = np.asarray(A, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if max_iterations < 1:
        raise ValueError(f"iterations must be positive, got {max_iterations}")
    if max_iterations > A.shape[0]:
        raise ValueError(f"iterations ({max_iterations}) exceed sample count ({A.shape[0]})")

    state = _GreedyState(A, y)
    y_norm = np.linalg.norm(y)
    path: Dict[int, FitResult] = {}
    last: Optional[FitResult] = None
    for k in range(1, max_iterations + 1):
        stalled = np.linalg.norm(state.residual) <= OMP_RESIDUAL_RTOL * y_norm
        if not stalled:
            column = state.select()
            stalled = column is None or not state.add(column)
            if not stalled:
                last = state.snapshot(spec)
        if stalled:
            if last is None:
                last = state.snapshot(spec)
            logger.debug(f"OMP stopped after {last.iterations} iterations (requested {max_iterations})")
            for remaining in range(k, max_iterations + 1):
                path[remaining] = last
            break
        path[k] = last
    return path


def omp_fit(A: np.ndarray, y: np.ndarray, iterations: int,
            spec: Optional[DictionarySpec] = None) -> FitResult:
    """
    OMP estándar: selección voraz de la columna de mayor correlación
    normalizada y reajuste por mínimos cuadrados sobre el soporte
    """
    return omp_path(A, y, iterations, spec)[iterations]


def omp_fits(A: np.ndarray, y: np.ndarray, iterations: Sequence[int],
             spec: Optional[DictionarySpec] = None) -> Dict[int, FitResult]:
    """
    Ajustes OMP para una lista de iteraciones, extraídos de un único camino
    """
    path = omp_path(A, y, max(iterations), spec)
    return {k: path[k] for k in iterations}
