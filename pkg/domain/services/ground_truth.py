"""
Campos de referencia u y medida del error en L2(Omega, dx)
"""
import logging
from typing import Callable

import numpy as np

from ..entities.dictionary_spec import DictionarySpec
from ..entities.experiment import GroundTruthKind, GroundTruthSpec
from ..entities.geometry import DiskQuadrature, QuadratureMeasure, as_point_array
from ..exceptions import UndefinedErrorMetric
from .dictionaries import evaluate_expansion
from .sampling import make_rng
from .stability import EVALUATION_CHUNK, frame_values, orthonormal_frame

logger = logging.getLogger(__name__)

Field = Callable[[np.ndarray], np.ndarray]


class PlaneWaveField:
    """
    u(x) = sum_l c_l e^{i k_l . x} con |k_l| = lambda
    """

    def __init__(self, wavenumber: float, directions: np.ndarray, amplitudes: np.ndarray):
        self.wavenumber = wavenumber
        self.directions = np.asarray(directions, dtype=float)
        self.amplitudes = np.asarray(amplitudes, dtype=complex)
        self._k = wavenumber * np.column_stack((np.cos(self.directions), np.sin(self.directions)))

    def __call__(self, points) -> np.ndarray:
        xy = as_point_array(points)
        return np.exp(1j * xy @ self._k.T) @ self.amplitudes


class ExpansionField:
    """
    u(x) = sum_j c_j atom_j(x) sobre un diccionario dado
    """

    def __init__(self, spec: DictionarySpec, coefficients: np.ndarray):
        self.spec = spec
        self.coefficients = np.asarray(coefficients, dtype=complex)

    def __call__(self, points) -> np.ndarray:
        return evaluate_expansion(self.spec, self.coefficients, points)


def synth_solution(spec: GroundTruthSpec) -> Field:
    """
    Superposición aleatoria de ondas planas con direcciones uniformes en el
    círculo (fuera de la rejilla de los diccionarios) y amplitudes gaussianas
    complejas circulares de varianza unidad; o expansión explícita
    """
    if spec.kind == GroundTruthKind.COEFFICIENTS:
        return ExpansionField(spec.dictionary, spec.coefficients)

    rng = make_rng(spec.seed, spec.rng_algorithm)
    directions = rng.uniform(-np.pi, np.pi, spec.count)
    amplitudes = (rng.standard_normal(spec.count) + 1j * rng.standard_normal(spec.count)) / np.sqrt(2.0)
    return PlaneWaveField(spec.wavenumber, directions, amplitudes)


def _norm(values: np.ndarray, quad: DiskQuadrature) -> float:
    return float(np.sqrt(quad.integrate(np.abs(values) ** 2)))


def l2_error(u: Field, u_hat: Field, quad: DiskQuadrature) -> float:
    """
    ||u - u_hat|| / ||u|| por cuadratura (medida de área en los experimentos)
    """
    reference = u(quad.nodes)
    reference_norm = _norm(reference, quad)
    if reference_norm == 0:
        raise UndefinedErrorMetric("relative error undefined for a vanishing reference field")
    return _norm(reference - u_hat(quad.nodes), quad) / reference_norm


def best_approximation_error(u: Field, spec: DictionarySpec, quad: DiskQuadrature,
                             chunk_size: int = EVALUATION_CHUNK) -> float:
    """
    sigma_m(u): norma del residuo de la proyección ortogonal de u sobre el
    espacio de spec, en la medida de la regla de cuadratura
    """
    alpha = 0.0 if quad.measure == QuadratureMeasure.AREA else quad.alpha
    frame = orthonormal_frame(spec, alpha, quad)
    values = u(quad.nodes)
    weights = quad.weights / quad.total_mass

    projection = np.zeros(frame.dimension, dtype=complex)
    for start in range(0, len(quad), chunk_size):
        block = frame_values(frame, quad.nodes[start:start + chunk_size])
        projection += block.conj().T @ (weights[start:start + chunk_size] * values[start:start + chunk_size])

    residual = np.empty_like(values)
    for start in range(0, len(quad), chunk_size):
        block = frame_values(frame, quad.nodes[start:start + chunk_size])
        residual[start:start + chunk_size] = values[start:start + chunk_size] - block @ projection
    return _norm(residual, quad)
