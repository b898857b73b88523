"""
Muestreo aleatorio de las medidas nu_alpha del disco unidad y reglas de
cuadratura deterministas para el disco y su frontera
"""
import logging
from typing import Union

import numpy as np
from numpy.polynomial.legendre import leggauss

from ..entities.geometry import (
    DiskQuadrature,
    PointCloud,
    QuadratureMeasure,
    SamplingConfig,
    SamplingMode,
)
from ..exceptions import ConfigurationError

logger = logging.getLogger(__name__)

RNG_ALGORITHMS = {
    'philox': np.random.Philox,
    'pcg64': np.random.PCG64,
}


def derive_seed(seed: int, *indices: Union[int, str]) -> int:
    """
    Semilla de 64 bits derivada de (seed, índices) con SeedSequence; las
    etiquetas de texto separan flujos independientes
    """
    entropy = [int(seed)]
    for index in indices:
        if isinstance(index, str):
            entropy.extend(index.encode('utf-8'))
        else:
            entropy.append(int(index))
    state = np.random.SeedSequence(entropy).generate_state(2, dtype=np.uint32)
    return int(state[0]) | (int(state[1]) << 32)


def make_rng(seed: int, algorithm: str = "philox") -> np.random.Generator:
    try:
        bit_generator = RNG_ALGORITHMS[algorithm.lower()]
    except KeyError:
        raise ConfigurationError(
            f"unknown RNG algorithm '{algorithm}', expected one of {sorted(RNG_ALGORITHMS)}",
            field="rng.algorithm",
        )
    return np.random.Generator(bit_generator(np.random.SeedSequence(int(seed))))


def sample_nu_alpha(config: SamplingConfig) -> PointCloud:
    """
    Extrae n puntos de nu_alpha = (1 - alpha) dx/|Omega| + alpha dsigma/|dOmega|.

    Interior: radio por transformación de raíz cuadrada, ángulo uniforme.
    Frontera: ángulo uniforme sobre el círculo unidad.
    """
    rng = make_rng(config.seed, config.rng_algorithm)
    n = config.n

    if config.mode == SamplingMode.IID_MIXTURE:
        on_boundary = rng.random(n) < config.alpha
    else:
        on_boundary = np.zeros(n, dtype=bool)
        on_boundary[:config.boundary_count] = True
        on_boundary = rng.permutation(on_boundary)

    radius = np.sqrt(rng.random(n))
    theta = rng.uniform(-np.pi, np.pi, n)
    radius[on_boundary] = 1.0

    logger.debug(
        f"Drew {n} points from nu_alpha (alpha={config.alpha}, mode={config.mode.value}, "
        f"boundary={int(on_boundary.sum())})"
    )
    return PointCloud.from_polar(radius, theta, on_boundary=on_boundary)


def disk_quadrature(n_r: int = 200, n_theta: int = 512, alpha: float = 0.0,
                    measure: QuadratureMeasure = QuadratureMeasure.PROBABILITY) -> DiskQuadrature:
    """
    Regla tensorial: Gauss-Legendre en r sobre [0, 1] con peso r y trapecio
    uniforme en theta. Con alpha > 0 se añaden n_theta nodos equiespaciados en
    la frontera con masa total alpha y el interior se escala por (1 - alpha).
    """
    if n_r < 2 or n_theta < 2:
        raise ConfigurationError(f"quadrature needs n_r >= 2 and n_theta >= 2, got ({n_r}, {n_theta})")
    if not 0.0 <= alpha <= 1.0:
        raise ConfigurationError(f"alpha must lie in [0, 1], got {alpha}", field="alpha")
    if measure == QuadratureMeasure.AREA and alpha > 0:
        raise ConfigurationError("the area measure carries no boundary mass", field="alpha")

    t, w = leggauss(n_r)
    r = 0.5 * (t + 1.0)
    w_r = 0.5 * w * r
    theta = -np.pi + 2.0 * np.pi * np.arange(n_theta) / n_theta
    w_theta = 2.0 * np.pi / n_theta

    rr, tt = np.meshgrid(r, theta, indexing='ij')
    interior_weights = np.outer(w_r, np.full(n_theta, w_theta)).ravel()
    nodes = np.column_stack((rr.ravel() * np.cos(tt.ravel()), rr.ravel() * np.sin(tt.ravel())))

    if measure == QuadratureMeasure.AREA:
        return DiskQuadrature(nodes=nodes, weights=interior_weights, alpha=0.0, measure=measure,
                              n_r=n_r, n_theta=n_theta)

    # área del disco = pi
    weights = interior_weights * (1.0 - alpha) / np.pi
    boundary_mask = np.zeros(len(weights), dtype=bool)
    if alpha > 0:
        boundary_nodes = np.column_stack((np.cos(theta), np.sin(theta)))
        nodes = np.vstack((nodes, boundary_nodes))
        weights = np.concatenate((weights, np.full(n_theta, alpha / n_theta)))
        boundary_mask = np.concatenate((boundary_mask, np.ones(n_theta, dtype=bool)))
        if alpha == 1.0:
            keep = weights > 0
            nodes, weights, boundary_mask = nodes[keep], weights[keep], boundary_mask[keep]

    return DiskQuadrature(nodes=nodes, weights=weights, alpha=alpha, measure=measure,
                          n_r=n_r, n_theta=n_theta, boundary_mask=boundary_mask)


def boundary_nodes(n_theta: int) -> PointCloud:
    """
    n_theta puntos equiespaciados sobre el círculo unidad
    """
    theta = -np.pi + 2.0 * np.pi * np.arange(n_theta) / n_theta
    return PointCloud.from_polar(np.ones(n_theta), theta, on_boundary=np.ones(n_theta, dtype=bool))
