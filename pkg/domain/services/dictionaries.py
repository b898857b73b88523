"""
Evaluación de las familias de aproximación: funciones de Fourier-Bessel,
ondas planas sobre la rejilla uniforme de direcciones, el marco de ondas
planas combinado por la DFT y los modos de Fourier del cuadrado envolvente.

Convención de orden de los átomos: j = -m..m ascendente en las familias 1-D,
(kx, ky) por filas en los modos del cuadrado.
"""
import logging
import math
from functools import lru_cache
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy import fft

from ..entities.dictionary_spec import DictionaryKind, DictionarySpec
from ..entities.geometry import Point2, as_point_array
from .special_functions import MAX_BESSEL_ORDER, bessel_j, bessel_j_orders, fb_log_norm_sq, i_power

logger = logging.getLogger(__name__)

FieldEvaluator = Callable[[np.ndarray], np.ndarray]

DEFAULT_CHUNK_SIZE = 8192
# corte relativo (en norma al cuadrado) de la serie de alias
ALIAS_RTOL = 1e-32


def _polar(xy: np.ndarray):
    return np.hypot(xy[:, 0], xy[:, 1]), np.arctan2(xy[:, 1], xy[:, 0])


def direction_angles(m: int) -> np.ndarray:
    """
    Ángulos 2 pi j / (2m+1) de los vectores de onda k_j, j = -m..m
    """
    return 2.0 * np.pi * np.arange(-m, m + 1) / (2 * m + 1)


# ---------------------------------------------------------------------------
# Evaluación puntual
# ---------------------------------------------------------------------------

def eval_fourier_bessel(j: int, wavenumber: float, p: Point2) -> complex:
    return complex(bessel_j(j, wavenumber * p.r) * np.exp(1j * j * p.theta))


def eval_plane_wave(j_index: int, m: int, wavenumber: float, p: Point2) -> complex:
    if abs(j_index) > m:
        raise ValueError(f"plane wave index {j_index} outside [-{m}, {m}]")
    phi = 2.0 * np.pi * j_index / (2 * m + 1)
    return complex(np.exp(1j * wavenumber * (p.x * np.cos(phi) + p.y * np.sin(phi))))


def eval_aliased_fb(j: int, m: int, wavenumber: float, p: Point2) -> complex:
    """
    b_j^m(x) = (1/((2m+1) i^j)) sum_l e^{i j phi_l} e^{i k(phi_l) . x}
    """
    if abs(j) > m:
        raise ValueError(f"aliased index {j} outside [-{m}, {m}]")
    phi = direction_angles(m)
    waves = np.exp(1j * wavenumber * (p.x * np.cos(phi) + p.y * np.sin(phi)))
    return complex(np.sum(np.exp(1j * j * phi) * waves) / ((2 * m + 1) * i_power(j)))


def eval_square_fourier(kx: int, ky: int, a: float, p: Point2) -> complex:
    return complex(np.exp(1j * a * (kx * p.x + ky * p.y)))


# ---------------------------------------------------------------------------
# Evaluación vectorizada (matrices puntos x átomos)
# ---------------------------------------------------------------------------

def fourier_bessel_atoms(orders: Sequence[int], wavenumber: float, points) -> np.ndarray:
    xy = as_point_array(points)
    r, theta = _polar(xy)
    orders = np.asarray(orders, dtype=int)
    # rejillas polares: factores radial y angular sobre los valores distintos
    unique_r, r_index = np.unique(r, return_inverse=True)
    unique_theta, theta_index = np.unique(theta, return_inverse=True)
    radial = bessel_j_orders(orders, wavenumber * unique_r).T
    angular = np.exp(1j * np.outer(unique_theta, orders))
    return radial[r_index.ravel()] * angular[theta_index.ravel()]


def plane_wave_atoms(m: int, wavenumber: float, points) -> np.ndarray:
    xy = as_point_array(points)
    phi = direction_angles(m)
    k = wavenumber * np.column_stack((np.cos(phi), np.sin(phi)))
    return np.exp(1j * xy @ k.T)


def alias_orders(j: int, m: int, wavenumber: float, alpha: float = 0.0) -> Tuple[np.ndarray, float]:
    """
    Órdenes j + p(2m+1) que contribuyen a b_j^m y log ||b_j^m||^2 bajo
    nu_alpha; la serie se corta cuando la norma del término cae por debajo
    de ALIAS_RTOL relativo
    """
    if abs(j) > m:
        raise ValueError(f"aliased index {j} outside [-{m}, {m}]")
    orders, log_total = _alias_order_table(int(j), int(m), float(wavenumber), float(alpha))
    return np.array(orders), log_total


@lru_cache(maxsize=4096)
def _alias_order_table(j: int, m: int, wavenumber: float, alpha: float) -> Tuple[Tuple[int, ...], float]:
    period = 2 * m + 1
    log_rtol = math.log(ALIAS_RTOL)
    orders = [j]
    log_total = fb_log_norm_sq(j, wavenumber, alpha)
    for direction in (1, -1):
        order = j + direction * period
        while abs(order) <= MAX_BESSEL_ORDER:
            term = fb_log_norm_sq(order, wavenumber, alpha)
            if abs(order) > wavenumber and term <= log_rtol + log_total:
                break
            log_total = float(np.logaddexp(log_total, term))
            orders.append(order)
            order += direction * period
    return tuple(sorted(orders)), log_total


def aliased_atoms(m: int, wavenumber: float, points, method: str = "series") -> np.ndarray:
    """
    Marco b_j^m, j = -m..m.

    series: suma de alias sum_p i^{p(2m+1)} b_{j+p(2m+1)}, con precisión
    relativa también cuando b_j^m es diminuto (|j| muy por encima de lambda).
    fft: DFT inversa de las ondas planas de la rejilla; el error es absoluto,
    del orden del redondeo.
    """
    if method == "fft":
        waves = plane_wave_atoms(m, wavenumber, points)
        spectrum = fft.fftshift(fft.ifft(fft.ifftshift(waves, axes=1), axis=1), axes=1)
        return spectrum / i_power(np.arange(-m, m + 1))[None, :]
    if method != "series":
        raise ValueError(f"Unsupported aliased evaluation method: {method}")

    xy = as_point_array(points)
    indices = np.arange(-m, m + 1)
    per_index = [alias_orders(int(j), m, wavenumber)[0] for j in indices]
    union = np.unique(np.concatenate(per_index))
    columns = fourier_bessel_atoms(union, wavenumber, xy)
    atoms = np.empty((len(xy), len(indices)), dtype=complex)
    for k, (j, orders) in enumerate(zip(indices, per_index)):
        positions = np.searchsorted(union, orders)
        atoms[:, k] = columns[:, positions] @ i_power(orders - j)
    return atoms


def square_fourier_atoms(order: int, scale: float, points, pairs: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Modos e^{i a (kx x + ky y)} como producto de factores 1-D; pairs
    selecciona un subconjunto de (kx, ky)
    """
    xy = as_point_array(points)
    span = np.arange(-order, order + 1)
    if pairs is None:
        kx = np.repeat(span, len(span))
        ky = np.tile(span, len(span))
    else:
        pairs = np.asarray(pairs, dtype=int).reshape(-1, 2)
        kx, ky = pairs[:, 0], pairs[:, 1]
    ex = np.exp(1j * scale * np.outer(xy[:, 0], span))
    ey = np.exp(1j * scale * np.outer(xy[:, 1], span))
    return ex[:, kx + order] * ey[:, ky + order]


def evaluate_atoms(spec: DictionarySpec, points, columns: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Matriz de átomos del diccionario en el orden fijado; columns restringe a
    un subconjunto de índices de columna
    """
    xy = as_point_array(points)
    if spec.kind == DictionaryKind.FOURIER_BESSEL:
        orders = np.arange(-spec.order, spec.order + 1)
        if columns is not None:
            orders = orders[columns]
        return fourier_bessel_atoms(orders, spec.wavenumber, xy)
    if spec.kind == DictionaryKind.PLANE_WAVE:
        atoms = plane_wave_atoms(spec.order, spec.wavenumber, xy)
    elif spec.kind == DictionaryKind.ALIASED_PW:
        atoms = aliased_atoms(spec.order, spec.wavenumber, xy)
    elif spec.kind == DictionaryKind.SQUARE_FOURIER:
        pairs = None if columns is None else np.array(spec.square_indices())[columns]
        return square_fourier_atoms(spec.order, spec.square_scale, xy, pairs)
    else:
        raise ValueError(f"Unsupported dictionary kind: {spec.kind}")
    return atoms if columns is None else atoms[:, columns]


def evaluate_expansion(spec: DictionarySpec, coefficients: np.ndarray, points,
                       chunk_size: int = DEFAULT_CHUNK_SIZE) -> np.ndarray:
    """
    Evalúa sum_j c_j atom_j por bloques de puntos, omitiendo coeficientes nulos
    """
    xy = as_point_array(points)
    coefficients = np.asarray(coefficients, dtype=complex)
    support = np.flatnonzero(coefficients)
    values = np.zeros(len(xy), dtype=complex)
    if support.size == 0:
        return values
    columns = None if support.size == len(coefficients) else support
    active = coefficients[support]
    for start in range(0, len(xy), chunk_size):
        block = evaluate_atoms(spec, xy[start:start + chunk_size], columns=columns)
        values[start:start + chunk_size] = block @ active
    return values


def atom_evaluator(spec: DictionarySpec, column: int) -> FieldEvaluator:
    """
    Evaluador de un único átomo, apto para helmholtz_residual
    """
    def evaluate(xy: np.ndarray) -> np.ndarray:
        return evaluate_atoms(spec, xy, columns=np.array([column]))[:, 0]
    return evaluate


# ---------------------------------------------------------------------------
# Identidades
# ---------------------------------------------------------------------------

def jacobi_anger_plane_wave(phi: float, wavenumber: float, points, q_max: int) -> np.ndarray:
    """
    e^{i k_phi . x} = sum_q i^q J_q(lambda r) e^{i q (theta - phi)}, truncada en |q| <= q_max
    """
    xy = as_point_array(points)
    orders = np.arange(-q_max, q_max + 1)
    atoms = fourier_bessel_atoms(orders, wavenumber, xy)
    weights = i_power(orders) * np.exp(-1j * orders * phi)
    return atoms @ weights


def alias_series(j: int, m: int, wavenumber: float, points, p_max: int) -> np.ndarray:
    """
    sum_{|p| <= p_max} i^{p(2m+1)} b_{j + p(2m+1)}(x)
    """
    xy = as_point_array(points)
    period = 2 * m + 1
    shifts = np.arange(-p_max, p_max + 1)
    orders = j + shifts * period
    atoms = fourier_bessel_atoms(orders, wavenumber, xy)
    return atoms @ i_power(shifts * period)


def helmholtz_residual(evaluator: FieldEvaluator, wavenumber: float, h: float = 1e-3,
                       grid_size: int = 21, radius: float = 0.9) -> float:
    """
    max |Delta_h v + lambda^2 v| / max |v| sobre una rejilla interior, con el
    laplaciano discreto de 5 puntos
    """
    axis = np.linspace(-radius, radius, grid_size)
    gx, gy = np.meshgrid(axis, axis, indexing='ij')
    inside = np.hypot(gx, gy) <= radius
    centre = np.column_stack((gx[inside], gy[inside]))

    offsets = np.array([[h, 0.0], [-h, 0.0], [0.0, h], [0.0, -h]])
    v = evaluator(centre)
    neighbours = sum(evaluator(centre + offset) for offset in offsets)
    laplacian = (neighbours - 4.0 * v) / h ** 2

    scale = np.max(np.abs(v))
    if scale == 0:
        logger.warning("Helmholtz residual requested for a field vanishing on the test grid")
        return float('inf')
    residual = float(np.max(np.abs(laplacian + wavenumber ** 2 * v)) / scale)
    logger.debug(f"Helmholtz residual {residual:.3e} (lambda={wavenumber}, h={h})")
    return residual
