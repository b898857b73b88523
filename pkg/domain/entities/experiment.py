import hashlib
import json
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np

from ..exceptions import ConfigurationError
from .dictionary_spec import DictionarySpec
from .geometry import SamplingMode


class MethodName(Enum):
    FOURIER_BESSEL_LS = "fourier_bessel_ls"
    PLANE_WAVE_LS = "plane_wave_ls"
    SQUARE_FOURIER_LS = "square_fourier_ls"
    OMP = "omp"


class GroundTruthKind(Enum):
    RANDOM_PLANE_WAVES = "random_plane_waves"
    COEFFICIENTS = "coefficients"


@dataclass
class GroundTruthSpec:
    """
    Campo de referencia u: superposición aleatoria de ondas planas o
    combinación explícita de átomos de un diccionario
    """
    kind: GroundTruthKind
    wavenumber: float = 12.0
    count: int = 20
    seed: int = 0
    dictionary: Optional[DictionarySpec] = None
    coefficients: Optional[np.ndarray] = None
    rng_algorithm: str = "philox"

    def __post_init__(self):
        if self.kind == GroundTruthKind.RANDOM_PLANE_WAVES and self.count < 1:
            raise ConfigurationError(f"plane wave count must be positive, got {self.count}", field="count")
        if self.kind == GroundTruthKind.COEFFICIENTS:
            if self.dictionary is None or self.coefficients is None:
                raise ConfigurationError("coefficient ground truth needs a dictionary and coefficients")
            self.coefficients = np.asarray(self.coefficients, dtype=complex)
            if len(self.coefficients) != self.dictionary.dimension:
                raise ConfigurationError(
                    f"expected {self.dictionary.dimension} coefficients, got {len(self.coefficients)}",
                    field="coefficients",
                )


@dataclass
class ExperimentConfig:
    wavenumber: float = 12.0
    n: int = 400
    alphas: List[float] = field(default_factory=lambda: [0.0, 0.1, 0.5, 0.9, 1.0])
    m_values: List[int] = field(default_factory=lambda: list(range(1, 61)))
    square_orders: List[int] = field(default_factory=lambda: list(range(1, 10)))
    omp_order: int = 40
    omp_iterations: List[int] = field(default_factory=lambda: list(range(10, 401, 10)))
    trials: int = 10
    method: MethodName = MethodName.FOURIER_BESSEL_LS
    seed: int = 0
    noise_sigma: float = 0.0
    sampling_mode: SamplingMode = SamplingMode.IID_MIXTURE
    rng_algorithm: str = "philox"
    truncation_factor: float = 1.2
    truncate_all: bool = False
    ground_truth_count: int = 20
    redraw_truth_per_trial: bool = True
    quadrature_n_r: int = 200
    quadrature_n_theta: int = 512
    square_scale: float = float(np.pi)
    n_values: List[int] = field(default_factory=lambda: list(range(100, 801, 100)))
    record_best_approximation: bool = True
    output: Optional[str] = None

    def __post_init__(self):
        if self.n < 1:
            raise ConfigurationError(f"n must be positive, got {self.n}", field="n")
        if self.trials < 1:
            raise ConfigurationError(f"trials must be positive, got {self.trials}", field="trials")
        if any(not 0.0 <= a <= 1.0 for a in self.alphas):
            raise ConfigurationError(f"alphas must lie in [0, 1], got {self.alphas}", field="alphas")
        if self.noise_sigma < 0:
            raise ConfigurationError("noise_sigma must be nonnegative", field="noise_sigma")
        if self.method == MethodName.SQUARE_FOURIER_LS and all(
                (2 * k + 1) ** 2 >= self.n for k in self.square_orders):
            raise ConfigurationError(
                f"square_fourier_ls requires (2K+1)^2 < n = {self.n} for some K in {self.square_orders}",
                field="square_orders",
            )
        if self.method == MethodName.OMP and (2 * self.omp_order + 1) ** 2 <= self.n:
            raise ConfigurationError(
                f"omp requires an overcomplete dictionary, (2K+1)^2 = {(2 * self.omp_order + 1) ** 2} <= n = {self.n}",
                field="omp_order",
            )

    def replace(self, **changes: Any) -> 'ExperimentConfig':
        values = {name: getattr(self, name) for name in self.__dataclass_fields__}
        values.update(changes)
        return ExperimentConfig(**values)


@dataclass
class TrialRecord:
    """
    Resultado de un ensayo: un método, una proporción alpha, un valor del
    parámetro (dimensión o iteraciones) y una realización del muestreo
    """
    method: MethodName
    alpha: float
    n: int
    dimension: int
    trial: int
    rel_l2: float
    best_approx_rel_l2: Optional[float] = None
    condition_number: Optional[float] = None

    def sort_key(self):
        return (self.method.value, self.alpha, self.n, self.dimension, self.trial)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'method': self.method.value,
            'alpha': self.alpha,
            'n': self.n,
            'dim': self.dimension,
            'trial': self.trial,
            'rel_l2': self.rel_l2,
            'best_approx_rel_l2': self.best_approx_rel_l2,
            'condition_number': self.condition_number,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'TrialRecord':
        return cls(
            method=MethodName(data['method']),
            alpha=float(data['alpha']),
            n=int(data['n']),
            dimension=int(data['dim']),
            trial=int(data['trial']),
            rel_l2=float(data['rel_l2']),
            best_approx_rel_l2=(float(data['best_approx_rel_l2'])
                                if data.get('best_approx_rel_l2') is not None else None),
            condition_number=(float(data['condition_number'])
                              if data.get('condition_number') is not None else None),
        )


@dataclass
class ErrorCurveRow:
    method: MethodName
    alpha: float
    dimension: int
    mean_rel_l2: float
    std_rel_l2: float
    trials: int
    errors: List[float] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'method': self.method.value,
            'alpha': self.alpha,
            'dim': self.dimension,
            'mean_rel_l2': self.mean_rel_l2,
            'std_rel_l2': self.std_rel_l2,
            'trials': self.trials,
        }


@dataclass
class BestRow:
    method: MethodName
    n: int
    best_err: float
    best_dim_or_iters: int
    best_alpha: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            'method': self.method.value,
            'n': self.n,
            'best_err': self.best_err,
            'best_dim_or_iters': self.best_dim_or_iters,
            'best_alpha': self.best_alpha,
        }


@dataclass
class GcvConfig:
    m_values: List[int]
    holdout_fraction: float = 0.1
    repetitions: int = 10
    seed: int = 0
    stratified: bool = False
    rng_algorithm: str = "philox"

    def __post_init__(self):
        if not 0.0 < self.holdout_fraction < 1.0:
            raise ConfigurationError(
                f"holdout fraction must lie in (0, 1), got {self.holdout_fraction}", field="holdout_fraction"
            )
        if self.repetitions < 1:
            raise ConfigurationError("repetitions must be positive", field="repetitions")
        if not self.m_values:
            raise ConfigurationError("candidate m-range is empty", field="m_values")


@dataclass
class GcvResult:
    m_selected: int
    m_values: List[int]
    dimensions: List[int]
    validation_mse: List[float]
    final_fit: Any
    split_mse: Dict[int, List[float]] = field(default_factory=dict)

    def rows(self) -> List[Dict[str, Any]]:
        return [
            {'m': m, 'dim': dim, 'val_mse': mse, 'selected': int(m == self.m_selected)}
            for m, dim, mse in zip(self.m_values, self.dimensions, self.validation_mse)
        ]


@dataclass
class GcvComparisonRow:
    n: int
    alpha: float
    gcv_m: int
    gcv_err: float
    oracle_m: int
    oracle_err: float
    trial: int = 0

    @property
    def ratio(self) -> float:
        return self.gcv_err / self.oracle_err if self.oracle_err > 0 else float('inf')

    def to_dict(self) -> Dict[str, Any]:
        return {
            'n': self.n,
            'alpha': self.alpha,
            'trial': self.trial,
            'gcv_m': self.gcv_m,
            'gcv_err': self.gcv_err,
            'oracle_m': self.oracle_m,
            'oracle_err': self.oracle_err,
            'ratio': self.ratio,
        }


class RunStatus(Enum):
    RUNNING = "running"
    COMPLETED = "completed"
    FAILED = "failed"


@dataclass
class ExperimentRun:
    """
    Registro de una ejecución de comando; run_id es un hash del contenido
    (comando, configuración resuelta, semilla)
    """
    command: str
    config: Dict[str, Any]
    seed: int
    run_id: str = ""
    created_at: datetime = field(default_factory=datetime.now)
    status: RunStatus = RunStatus.RUNNING
    output: Optional[str] = None

    def __post_init__(self):
        if not self.run_id:
            self.run_id = self.content_hash(self.command, self.config, self.seed)

    @staticmethod
    def content_hash(command: str, config: Dict[str, Any], seed: int) -> str:
        payload = json.dumps({'command': command, 'config': config, 'seed': seed}, sort_keys=True, default=str)
        return hashlib.sha256(payload.encode('utf-8')).hexdigest()[:16]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'run_id': self.run_id,
            'command': self.command,
            'config': self.config,
            'seed': self.seed,
            'created_at': self.created_at.isoformat(),
            'status': self.status.value,
            'output': self.output,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ExperimentRun':
        return cls(
            command=data['command'],
            config=data.get('config') or {},
            seed=int(data['seed']),
            run_id=data['run_id'],
            created_at=datetime.fromisoformat(data['created_at']),
            status=RunStatus(data.get('status', 'running')),
            output=data.get('output'),
        )
