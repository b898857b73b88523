"""
Funciones de Bessel de primera especie de orden entero y normas de las
funciones de Fourier-Bessel bajo las medidas nu_alpha del disco unidad
"""
import logging
import math
from typing import Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import special

from ..exceptions import BesselOrderRangeError

logger = logging.getLogger(__name__)

MAX_BESSEL_ORDER = 200
NORM_SERIES_RTOL = 1e-18
DEFAULT_RADIAL_NODES = 400
# por debajo de este valor J_j(x) se evalúa en escala logarítmica
LOG_SERIES_GUARD = 1e-280


_I_POWERS = np.array([1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j])


def i_power(j):
    """
    i^j exacto para enteros (escalares o arrays)
    """
    return _I_POWERS[np.mod(j, 4)]


def _check_order(j: int) -> int:
    if abs(j) > MAX_BESSEL_ORDER:
        raise BesselOrderRangeError(j, MAX_BESSEL_ORDER)
    return int(j)


def _parity_sign(orders: np.ndarray) -> np.ndarray:
    # J_{-j} = (-1)^j J_j
    return np.where((orders < 0) & (np.abs(orders) % 2 == 1), -1.0, 1.0)


def bessel_j(j: int, x):
    """
    J_j(x) para x >= 0; los órdenes negativos se resuelven por simetría
    """
    j = _check_order(j)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("bessel_j is defined here for nonnegative arguments only")
    value = special.jv(abs(j), x)
    if j < 0 and abs(j) % 2 == 1:
        value = -value
    return float(value) if value.ndim == 0 else value


def bessel_j_orders(orders: Sequence[int], x: np.ndarray) -> np.ndarray:
    """
    Tabla J_j(x) de forma (len(orders), len(x))
    """
    orders = np.asarray(orders, dtype=int)
    if orders.size and np.max(np.abs(orders)) > MAX_BESSEL_ORDER:
        bad = int(orders[np.argmax(np.abs(orders))])
        raise BesselOrderRangeError(bad, MAX_BESSEL_ORDER)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    table = special.jv(np.abs(orders)[:, None], x[None, :])
    return table * _parity_sign(orders)[:, None]


def _log_abs_jv(order: int, x: float) -> float:
    # sin comprobación de rango: la serie de normas pasa de MAX_BESSEL_ORDER
    value = float(special.jv(order, x))
    if abs(value) >= LOG_SERIES_GUARD or order <= x:
        with np.errstate(divide='ignore'):
            return float(np.log(abs(value)))
    if x == 0.0:
        return -math.inf
    # J_j(x) = (x/2)^j / j! * 0F1(; j+1; -x^2/4), serie positiva para j > x
    series = float(special.hyp0f1(order + 1, -0.25 * x * x))
    return order * math.log(0.5 * x) - float(special.gammaln(order + 1)) + math.log(series)


def log_abs_bessel_j(j: int, x: float) -> float:
    """
    log |J_j(x)|, sin desbordamiento por abajo para órdenes altos
    """
    j = _check_order(j)
    if x < 0:
        raise ValueError("bessel_j is defined here for nonnegative arguments only")
    return _log_abs_jv(abs(j), float(x))


def log_radial_norm_series(j: int, wavenumber: float) -> float:
    """
    log de 2 * int_0^1 r J_j(lambda r)^2 dr por la identidad de
    Abramowitz-Stegun (4/lambda^2) * sum_p (j+1+2p) J_{j+1+2p}(lambda)^2,
    acumulada en escala logarítmica
    """
    j = abs(_check_order(j))
    log_rtol = math.log(NORM_SERIES_RTOL)
    total = -math.inf
    order = j + 1
    while True:
        if order > MAX_BESSEL_ORDER + 2 * wavenumber + 200:
            logger.warning(f"Norm series for j={j} stopped at order {order} without convergence")
            break
        term = math.log(order) + 2.0 * _log_abs_jv(order, wavenumber)
        total = float(np.logaddexp(total, term))
        # solo se corta en la cola monótona, pasado lambda
        if order > wavenumber and term <= log_rtol + total:
            break
        order += 2
    return math.log(4.0 / wavenumber ** 2) + total


def radial_norm_series(j: int, wavenumber: float) -> float:
    """
    2 * int_0^1 r J_j(lambda r)^2 dr por la serie de Abramowitz-Stegun
    """
    return math.exp(log_radial_norm_series(j, wavenumber))


def radial_norm_quadrature(j: int, wavenumber: float, n_nodes: int = DEFAULT_RADIAL_NODES) -> float:
    """
    2 * int_0^1 r J_j(lambda r)^2 dr por Gauss-Legendre en [0, 1]
    """
    j = _check_order(j)
    t, w = leggauss(n_nodes)
    r = 0.5 * (t + 1.0)
    values = special.jv(abs(j), wavenumber * r) ** 2
    return float(2.0 * np.sum(0.5 * w * r * values))


def fb_log_norm_sq(j: int, wavenumber: float, alpha: float) -> float:
    """
    log ||b_j||^2 bajo nu_alpha, válido en todo el rango de órdenes
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    parts = []
    if alpha < 1.0:
        parts.append(math.log1p(-alpha) + log_radial_norm_series(j, wavenumber))
    if alpha > 0.0:
        parts.append(math.log(alpha) + 2.0 * log_abs_bessel_j(j, wavenumber))
    return float(np.logaddexp.reduce(parts))


def fb_norm_sq(j: int, wavenumber: float, alpha: float, method: str = "series") -> float:
    """
    ||b_j||^2 bajo nu_alpha:
    (1 - alpha) * 2 int_0^1 r J_j(lambda r)^2 dr + alpha * J_j(lambda)^2

    Si la norma no es representable en doble precisión se lanza
    BesselOrderRangeError; fb_log_norm_sq cubre esos órdenes.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    if method == "series":
        value = math.exp(fb_log_norm_sq(j, wavenumber, alpha))
    elif method == "quadrature":
        radial = radial_norm_quadrature(j, wavenumber)
        value = (1.0 - alpha) * radial + alpha * bessel_j(j, wavenumber) ** 2
    else:
        raise ValueError(f"Unsupported norm method: {method}")
    if not value >= np.finfo(float).tiny:
        raise BesselOrderRangeError(j, MAX_BESSEL_ORDER,
                                    reason=f"norm underflows double precision at lambda={wavenumber}")
    return value


def fb_norms_sq(orders: Sequence[int], wavenumber: float, alpha: float) -> np.ndarray:
    """
    Vector de normas ||b_j||^2 para una lista de órdenes (|b_j| = |b_{-j}|)
    """
    cache = {}
    result = np.empty(len(orders), dtype=float)
    for i, j in enumerate(orders):
        key = abs(int(j))
        if key not in cache:
            cache[key] = fb_norm_sq(key, wavenumber, alpha)
        result[i] = cache[key]
    return result


def bessel_integral(j: int, wavenumber: float, x: float, y: float, n_nodes: int = 256) -> complex:
    """
    Integral de Bessel: (1/(2 pi i^j)) int e^{i k_phi . x} e^{i j phi} dphi,
    evaluada con la regla del trapecio (exacta para integrandos periódicos
    de banda limitada)
    """
    j = _check_order(j)
    phi = -np.pi + 2.0 * np.pi * np.arange(n_nodes) / n_nodes
    phase = wavenumber * (x * np.cos(phi) + y * np.sin(phi)) + j * phi
    mean = np.mean(np.exp(1j * phase))
    return complex(mean / i_power(j))
