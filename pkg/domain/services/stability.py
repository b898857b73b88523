"""
Ortonormalización de diccionarios bajo nu_alpha, cálculo de la función de
estabilidad K(m) = max_x sum_j |L_j(x)|^2 y selección de la mayor dimensión
admisible bajo la condición K <= kappa * n / log n.
"""
import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg, optimize

from ..entities.dictionary_spec import DictionaryKind, DictionarySpec
from ..entities.geometry import DiskQuadrature, QuadratureMeasure
from ..entities.stability_report import (
    AdmissibleDimension,
    FrameMethod,
    OrthonormalFrame,
    StabilityReport,
)
from ..exceptions import BesselOrderRangeError, ConfigurationError, RankDeficiencyError
from .dictionaries import alias_orders, aliased_atoms, direction_angles, evaluate_atoms
from .sampling import boundary_nodes, disk_quadrature
from .special_functions import MAX_BESSEL_ORDER, bessel_j_orders, fb_norms_sq, i_power

logger = logging.getLogger(__name__)

GRAM_RANK_TOL = 1e-12
DEFAULT_RADIAL_GRID = 4096
EVALUATION_CHUNK = 8192

Maximizer = Tuple[float, float]


# ---------------------------------------------------------------------------
# Normas
# ---------------------------------------------------------------------------

def aliased_norm_sq(j: int, m: int, wavenumber: float, alpha: float) -> float:
    """
    ||b_j^m||^2 = sum_p ||b_{j + p(2m+1)}||^2 bajo nu_alpha
    """
    value = math.exp(alias_orders(j, m, wavenumber, alpha)[1])
    if not value >= np.finfo(float).tiny:
        raise BesselOrderRangeError(j, MAX_BESSEL_ORDER,
                                    reason=f"aliased norm underflows double precision at lambda={wavenumber}")
    return value


# ---------------------------------------------------------------------------
# Marcos ortonormales
# ---------------------------------------------------------------------------

def _diagonal_frame(spec: DictionarySpec, alpha: float, norms_sq: np.ndarray,
                    method: FrameMethod) -> OrthonormalFrame:
    labels = spec.atom_labels()
    for label, norm in zip(labels, norms_sq):
        if not np.isfinite(norm) or norm <= 0:
            raise RankDeficiencyError(label, rank=int(np.sum(norms_sq > 0)), dimension=spec.dimension)
    return OrthonormalFrame(spec=spec, alpha=alpha, method=method,
                            coefficients=np.diag(1.0 / np.sqrt(norms_sq)).astype(complex),
                            norms_sq=norms_sq, labels=labels)


def _gram_matrix(spec: DictionarySpec, quad: DiskQuadrature) -> np.ndarray:
    weights = quad.weights / quad.total_mass
    gram = np.zeros((spec.dimension, spec.dimension), dtype=complex)
    for start in range(0, len(quad), EVALUATION_CHUNK):
        block = evaluate_atoms(spec, quad.nodes[start:start + EVALUATION_CHUNK])
        w = weights[start:start + EVALUATION_CHUNK]
        gram += block.conj().T @ (block * w[:, None])
    return 0.5 * (gram + gram.conj().T)


def _gram_cholesky_frame(spec: DictionarySpec, alpha: float, quad: DiskQuadrature) -> OrthonormalFrame:
    gram = _gram_matrix(spec, quad)
    labels = spec.atom_labels()
    diagonal = np.real(np.diag(gram))

    pstrf, = linalg.get_lapack_funcs(('pstrf',), (gram,))
    factor, piv, rank, info = pstrf(gram, tol=GRAM_RANK_TOL * float(np.max(diagonal)), lower=0)
    piv = np.asarray(piv) - 1
    if rank < spec.dimension:
        raise RankDeficiencyError(labels[piv[rank]], rank=int(rank), dimension=spec.dimension)

    upper = np.triu(factor)
    inverse = linalg.solve_triangular(upper, np.eye(spec.dimension, dtype=complex))
    coefficients = np.zeros_like(inverse)
    coefficients[piv, :] = inverse
    return OrthonormalFrame(spec=spec, alpha=alpha, method=FrameMethod.GRAM_CHOLESKY,
                            coefficients=coefficients, norms_sq=diagonal,
                            labels=[labels[k] for k in piv])


def orthonormal_frame(spec: DictionarySpec, alpha: float,
                      quad: Optional[DiskQuadrature] = None) -> OrthonormalFrame:
    """
    Base ortonormal en L2(nu_alpha) del espacio generado por spec.

    Fourier-Bessel: normalización diagonal (nu_alpha es invariante por
    rotaciones). Ondas planas: combinación DFT y normalización con las normas
    de alias. Resto: Gram por cuadratura y Cholesky con pivoteo.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ConfigurationError(f"alpha must lie in [0, 1], got {alpha}", field="alpha")

    if spec.kind == DictionaryKind.FOURIER_BESSEL:
        norms = fb_norms_sq(spec.indices(), spec.wavenumber, alpha)
        return _diagonal_frame(spec, alpha, norms, FrameMethod.DIAGONAL)

    if spec.kind in (DictionaryKind.PLANE_WAVE, DictionaryKind.ALIASED_PW):
        m = spec.order
        norms = np.array([aliased_norm_sq(j, m, spec.wavenumber, alpha) for j in spec.indices()])
        if spec.kind == DictionaryKind.ALIASED_PW:
            return _diagonal_frame(spec, alpha, norms, FrameMethod.DIAGONAL)
        frame = _diagonal_frame(spec, alpha, norms, FrameMethod.DFT_ALIASED)
        # b_j^m = (1/((2m+1) i^j)) sum_l e^{i j phi_l} e_l
        orders = np.arange(-m, m + 1)
        dft = np.exp(1j * np.outer(direction_angles(m), orders)) / ((2 * m + 1) * i_power(orders))[None, :]
        frame.coefficients = dft / np.sqrt(norms)[None, :]
        return frame

    if quad is None:
        quad = disk_quadrature(alpha=alpha)
    elif quad.measure == QuadratureMeasure.PROBABILITY and not math.isclose(quad.alpha, alpha):
        raise ConfigurationError(f"quadrature built for alpha={quad.alpha}, frame requested for {alpha}",
                                 field="alpha")
    logger.debug(f"Orthonormalizing {spec.kind.value} (dim={spec.dimension}) by Gram matrix on {len(quad)} nodes")
    return _gram_cholesky_frame(spec, alpha, quad)


def frame_values(frame: OrthonormalFrame, points) -> np.ndarray:
    """
    Valores L_j(x) de las funciones ortonormales, matriz puntos x dimensión
    """
    if frame.method == FrameMethod.DFT_ALIASED:
        m = frame.spec.order
        return aliased_atoms(m, frame.spec.wavenumber, points) / np.sqrt(frame.norms_sq)[None, :]
    if frame.method == FrameMethod.DIAGONAL:
        return evaluate_atoms(frame.spec, points) * np.real(np.diag(frame.coefficients))[None, :]
    return evaluate_atoms(frame.spec, points) @ frame.coefficients


# ---------------------------------------------------------------------------
# K(m)
# ---------------------------------------------------------------------------

def _radial_profile(frame: OrthonormalFrame):
    orders = np.asarray(frame.spec.indices())
    weights = 1.0 / frame.norms_sq

    def profile(r):
        table = bessel_j_orders(orders, frame.spec.wavenumber * np.atleast_1d(r))
        return weights @ table ** 2

    return profile


def _radial_K(frame: OrthonormalFrame, radial_grid: int, refine: bool) -> Tuple[float, Maximizer]:
    profile = _radial_profile(frame)
    grid = np.linspace(0.0, 1.0, radial_grid)
    values = profile(grid)
    best = int(np.argmax(values))
    K, r_star = float(values[best]), float(grid[best])

    if refine and 0 < best < radial_grid - 1:
        try:
            result = optimize.minimize_scalar(
                lambda r: -float(profile(r)[0]),
                bracket=(grid[best - 1], grid[best], grid[best + 1]),
                method='golden',
            )
            if -result.fun > K and 0.0 <= result.x <= 1.0:
                K, r_star = float(-result.fun), float(result.x)
        except ValueError:
            # meseta en la rejilla: sin bracket estricto
            pass
    return K, (r_star, 0.0)


def k_search_points(n_r: int = 200, n_theta: int = 512) -> np.ndarray:
    """
    Nodos de cuadratura del disco más nodos equiespaciados de la frontera
    """
    interior = disk_quadrature(n_r=n_r, n_theta=n_theta, alpha=0.0).nodes
    return np.vstack((interior, boundary_nodes(n_theta).xy))


def _pointwise_sums(frame: OrthonormalFrame, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    totals = np.empty(len(points))
    column_sup = np.zeros(frame.dimension)
    for start in range(0, len(points), EVALUATION_CHUNK):
        squared = np.abs(frame_values(frame, points[start:start + EVALUATION_CHUNK])) ** 2
        totals[start:start + EVALUATION_CHUNK] = squared.sum(axis=1)
        column_sup = np.maximum(column_sup, squared.max(axis=0))
    return totals, column_sup


def compute_K_with_maximizer(frame: OrthonormalFrame, radial_grid: int = DEFAULT_RADIAL_GRID,
                             refine: bool = True,
                             points: Optional[np.ndarray] = None) -> Tuple[float, Maximizer]:
    """
    K como cota inferior sobre una rejilla y el punto (r, theta) donde se alcanza
    """
    if frame.rotation_invariant:
        return _radial_K(frame, radial_grid, refine)
    if points is None:
        points = k_search_points()
    totals, _ = _pointwise_sums(frame, points)
    best = int(np.argmax(totals))
    x, y = points[best]
    return float(totals[best]), (float(math.hypot(x, y)), float(math.atan2(y, x)))


def compute_K(frame: OrthonormalFrame, radial_grid: int = DEFAULT_RADIAL_GRID, refine: bool = True,
              points: Optional[np.ndarray] = None) -> float:
    return compute_K_with_maximizer(frame, radial_grid, refine, points)[0]


def compute_K_upper(frame: OrthonormalFrame, radial_grid: int = DEFAULT_RADIAL_GRID,
                    points: Optional[np.ndarray] = None) -> float:
    """
    sum_j sup_x |L_j(x)|^2 sobre el mismo conjunto de evaluación que compute_K
    """
    if frame.rotation_invariant:
        grid = np.linspace(0.0, 1.0, radial_grid)
        table = bessel_j_orders(frame.spec.indices(), frame.spec.wavenumber * grid) ** 2
        return float(np.sum(table.max(axis=1) / frame.norms_sq))
    if points is None:
        points = k_search_points()
    _, column_sup = _pointwise_sums(frame, points)
    return float(column_sup.sum())


# ---------------------------------------------------------------------------
# Condición de estabilidad
# ---------------------------------------------------------------------------

def kappa(r_exponent: float = 1.0) -> float:
    """
    kappa = (1 - log 2) / (2 + 2r)
    """
    if r_exponent <= 0:
        raise ConfigurationError(f"r exponent must be positive, got {r_exponent}", field="r_exponent")
    return (1.0 - math.log(2.0)) / (2.0 + 2.0 * r_exponent)


def stability_threshold(n: int, r_exponent: float = 1.0) -> float:
    if n < 2:
        raise ConfigurationError(f"sample budget must be at least 2, got {n}", field="n")
    return kappa(r_exponent) * n / math.log(n)


def epsilon_n(n: int, r_exponent: float = 1.0) -> float:
    return 4.0 * kappa(r_exponent) / math.log(n)


def expected_error_bound(sigma_m: float, n: int, r_exponent: float, M: float) -> float:
    """
    (1 + eps(n)) sigma_m^2 + 8 M^2 n^{-r}
    """
    return (1.0 + epsilon_n(n, r_exponent)) * sigma_m ** 2 + 8.0 * M ** 2 * n ** (-r_exponent)


def fb_boundary_ratio_lower_bound(j: int, wavenumber: float) -> float:
    """
    Cota inferior analítica de J_j(lambda)^2 / ||b_j||^2 bajo nu_0, válida para j > lambda
    """
    j = abs(j)
    if j <= wavenumber:
        raise ValueError(f"bound requires j > lambda, got j={j}, lambda={wavenumber}")
    q = (wavenumber / j) ** 4
    series = 1.0 / (1.0 - q) + 2.0 * q / ((j + 1) * (1.0 - q) ** 2)
    return j ** 2 / (4.0 * (j + 1)) / series


def max_admissible_dim(profile: Sequence[Tuple[int, int, float]], n: int,
                       r_exponent: float = 1.0) -> AdmissibleDimension:
    """
    Mayor dimensión del perfil (m, dim, K) con K <= kappa * n / log n
    """
    k = kappa(r_exponent)
    threshold = stability_threshold(n, r_exponent)
    admissible = [(dim, m) for m, dim, K in profile if K <= threshold]
    if not admissible:
        logger.warning(f"No admissible dimension for n={n}, r={r_exponent} (threshold {threshold:.4f})")
        return AdmissibleDimension(m_star=None, dimension=0, kappa=k, threshold=threshold,
                                   n=n, r_exponent=r_exponent, none_admissible=True)
    dimension, m_star = max(admissible)
    return AdmissibleDimension(m_star=m_star, dimension=dimension, kappa=k, threshold=threshold,
                               n=n, r_exponent=r_exponent)


def growth_fit(m_values: Sequence[int], K_values: Sequence[float]) -> Tuple[float, float]:
    """
    Pendiente y ordenada en el origen de log K frente a log m
    """
    pairs = [(m, K) for m, K in zip(m_values, K_values) if m > 0 and K > 0]
    if len(pairs) < 2:
        return float('nan'), float('nan')
    m, K = np.array(pairs).T
    slope, intercept = np.polyfit(np.log(m), np.log(K), 1)
    return float(slope), float(intercept)


def build_stability_report(kind: DictionaryKind, wavenumber: float, alpha: float,
                           m_values: Sequence[int], n: int, r_exponent: float = 1.0,
                           radial_grid: int = DEFAULT_RADIAL_GRID,
                           points: Optional[np.ndarray] = None,
                           quad: Optional[DiskQuadrature] = None,
                           square_scale: float = math.pi) -> StabilityReport:
    m_values = list(m_values)
    dimensions: List[int] = []
    K_values: List[float] = []
    K_upper: List[float] = []
    maximizers: List[Maximizer] = []

    for m in m_values:
        spec = DictionarySpec(kind=kind, order=m, wavenumber=wavenumber, square_scale=square_scale)
        frame = orthonormal_frame(spec, alpha, quad)
        K, maximizer = compute_K_with_maximizer(frame, radial_grid=radial_grid, points=points)
        dimensions.append(spec.dimension)
        K_values.append(K)
        K_upper.append(compute_K_upper(frame, radial_grid=radial_grid, points=points))
        maximizers.append(maximizer)
        logger.debug(f"K({kind.value}, m={m}, alpha={alpha}) = {K:.6g} at r={maximizer[0]:.4f}")

    admissible = max_admissible_dim(list(zip(m_values, dimensions, K_values)), n, r_exponent)
    report = StabilityReport(spec=DictionarySpec(kind=kind, order=max(m_values, default=0),
                                                 wavenumber=wavenumber, square_scale=square_scale),
                             alpha=alpha, m_values=m_values, dimensions=dimensions,
                             K_values=K_values, K_upper=K_upper, maximizers=maximizers,
                             growth_fit=growth_fit(m_values, K_values), admissible=admissible)
    logger.info(
        f"Stability sweep {kind.value} alpha={alpha}: slope={report.growth_fit[0]:.3f}, "
        f"m*={admissible.m_star}"
    )
    return report
