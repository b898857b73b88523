import pytest
import yaml

TINY_CONFIG = {
    'schema_version': 1,
    'rng': {'algorithm': 'philox', 'seed': 4},
    'experiment': {
        'wavenumber': 12.0,
        'n': 60,
        'alphas': [0.0, 0.5],
        'm_values': [2, 4],
        'trials': 2,
        'square_orders': [1, 2],
        'omp_order': 5,
        'omp_iterations': [5, 10],
    },
    'ground_truth': {'count': 4},
    'quadrature': {'n_r': 30, 'n_theta': 64},
    'stability': {
        'alphas': [0.0],
        'm_values': {'start': 1, 'stop': 3},
        'radial_grid': 256,
        'search_n_r': 10,
        'search_n_theta': 32,
    },
    'gcv': {'alphas': [0.5], 'm_values': [1, 2, 3], 'repetitions': 2, 'n_values': [40], 'trials': 2},
    'best': {'n_values': [40, 60], 'methods': ['fourier_bessel_ls', 'omp']},
    'database': {'path': None},
    'logging': {'level': 'INFO'},
    'workers': {'max_concurrent_trials': 2},
}


@pytest.fixture
def tiny_config(tmp_path):
    """
    Configuración mínima con base de datos en el directorio temporal
    """
    data = yaml.safe_load(yaml.safe_dump(TINY_CONFIG))
    data['database'] = {'path': str(tmp_path / "runs.db"), 'cleanup_days': 30}
    return data


@pytest.fixture
def tiny_config_file(tmp_path, tiny_config):
    path = tmp_path / "config.yaml"
    path.write_text(yaml.safe_dump(tiny_config))
    return path
