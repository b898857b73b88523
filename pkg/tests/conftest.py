import numpy as np
import pytest

from domain.entities.experiment import ExperimentConfig, MethodName
from domain.entities.geometry import QuadratureMeasure
from domain.services.sampling import disk_quadrature

WAVENUMBER = 12.0


@pytest.fixture
def wavenumber() -> float:
    return WAVENUMBER


@pytest.fixture(scope="session")
def probability_quadrature():
    return disk_quadrature(n_r=200, n_theta=512, alpha=0.0)


@pytest.fixture(scope="session")
def area_quadrature():
    return disk_quadrature(n_r=200, n_theta=512, measure=QuadratureMeasure.AREA)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def disk_points(rng):
    """
    50 puntos uniformes en el disco cerrado, incluido un punto de frontera
    """
    r = np.sqrt(rng.random(49))
    theta = rng.uniform(-np.pi, np.pi, 49)
    xy = np.column_stack((r * np.cos(theta), r * np.sin(theta)))
    return np.vstack((xy, [[1.0, 0.0]]))


@pytest.fixture
def small_experiment_config() -> ExperimentConfig:
    return ExperimentConfig(
        wavenumber=WAVENUMBER,
        n=120,
        alphas=[0.0, 0.9],
        m_values=[4, 8, 12],
        square_orders=[1, 2, 3, 5, 6],
        omp_order=6,
        omp_iterations=[5, 10, 200],
        trials=2,
        method=MethodName.FOURIER_BESSEL_LS,
        seed=11,
        ground_truth_count=5,
        quadrature_n_r=60,
        quadrature_n_theta=128,
    )
