"""
Esquema validado del archivo de configuración (schema_version 1)
"""
import math
from typing import List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from domain.entities.dictionary_spec import DictionaryKind
from domain.entities.experiment import ExperimentConfig, GcvConfig, MethodName
from domain.entities.geometry import SamplingMode

SCHEMA_VERSION = 1


class IntRange(BaseModel):
    """
    Rango entero {start, stop, step} con stop inclusivo
    """
    model_config = ConfigDict(extra='forbid')

    start: int
    stop: int
    step: int = 1

    @model_validator(mode='after')
    def _check(self) -> 'IntRange':
        if self.step < 1:
            raise ValueError(f"range step must be positive, got {self.step}")
        if self.stop < self.start:
            raise ValueError(f"range stop {self.stop} lies below start {self.start}")
        return self

    def values(self) -> List[int]:
        return list(range(self.start, self.stop + 1, self.step))


RangeSpec = Union[List[int], IntRange]


def expand_range(value: RangeSpec) -> List[int]:
    return value.values() if isinstance(value, IntRange) else list(value)


class Section(BaseModel):
    model_config = ConfigDict(extra='forbid')


class RngSection(Section):
    algorithm: Literal['philox', 'pcg64'] = 'philox'
    seed: int = Field(default=0, ge=0, lt=2 ** 64)


class ExperimentSection(Section):
    wavenumber: float = Field(default=12.0, gt=0)
    n: int = Field(default=400, ge=1)
    alphas: List[float] = Field(default_factory=lambda: [0.0, 0.1, 0.5, 0.9, 1.0])
    m_values: RangeSpec = Field(default_factory=lambda: IntRange(start=1, stop=60))
    trials: int = Field(default=10, ge=1)
    method: MethodName = MethodName.FOURIER_BESSEL_LS
    noise_sigma: float = Field(default=0.0, ge=0)
    sampling_mode: SamplingMode = SamplingMode.IID_MIXTURE
    truncation_factor: float = Field(default=1.2, gt=0)
    truncate_all: bool = False
    square_orders: RangeSpec = Field(default_factory=lambda: IntRange(start=1, stop=9))
    square_scale: float = Field(default=math.pi, gt=0)
    omp_order: int = Field(default=40, ge=1)
    omp_iterations: RangeSpec = Field(default_factory=lambda: IntRange(start=10, stop=400, step=10))
    record_best_approximation: bool = True

    @field_validator('alphas')
    @classmethod
    def _alphas_in_unit_interval(cls, value: List[float]) -> List[float]:
        if not value:
            raise ValueError("at least one alpha is required")
        if any(not 0.0 <= a <= 1.0 for a in value):
            raise ValueError(f"alphas must lie in [0, 1], got {value}")
        return value


class GroundTruthSection(Section):
    count: int = Field(default=20, ge=1)
    redraw_per_trial: bool = True


class QuadratureSection(Section):
    n_r: int = Field(default=200, ge=2)
    n_theta: int = Field(default=512, ge=2)


class StabilitySection(Section):
    family: DictionaryKind = DictionaryKind.FOURIER_BESSEL
    alphas: List[float] = Field(default_factory=lambda: [0.0, 0.5])
    m_values: RangeSpec = Field(default_factory=lambda: IntRange(start=1, stop=60))
    n: int = Field(default=400, ge=2)
    r_exponent: float = Field(default=1.0, gt=0)
    radial_grid: int = Field(default=4096, ge=16)
    search_n_r: int = Field(default=200, ge=2)
    search_n_theta: int = Field(default=512, ge=2)


class GcvSection(Section):
    alphas: List[float] = Field(default_factory=lambda: [0.9])
    m_values: RangeSpec = Field(default_factory=lambda: IntRange(start=1, stop=60))
    holdout_fraction: float = Field(default=0.1, gt=0, lt=1)
    repetitions: int = Field(default=10, ge=1)
    stratified: bool = False
    n_values: RangeSpec = Field(default_factory=lambda: IntRange(start=100, stop=800, step=100))
    trials: int = Field(default=10, ge=1)


class BestSection(Section):
    n_values: RangeSpec = Field(default_factory=lambda: IntRange(start=100, stop=800, step=100))
    methods: List[MethodName] = Field(
        default_factory=lambda: [MethodName.FOURIER_BESSEL_LS, MethodName.SQUARE_FOURIER_LS, MethodName.OMP]
    )


class DatabaseSection(Section):
    path: Optional[str] = "experiments.db"
    cleanup_days: Optional[int] = Field(default=30, ge=1)


class LoggingSection(Section):
    model_config = ConfigDict(extra='forbid', populate_by_name=True)

    level: Literal['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'] = 'INFO'
    render_json: bool = Field(default=False, alias='json')
    file: Optional[str] = None

    @field_validator('level', mode='before')
    @classmethod
    def _upper(cls, value):
        return value.upper() if isinstance(value, str) else value


class WorkersSection(Section):
    max_concurrent_trials: int = Field(default=4, ge=1)


class ExperimentFile(BaseModel):
    """
    Raíz del archivo config.yaml
    """
    model_config = ConfigDict(extra='forbid')

    schema_version: Literal[1] = SCHEMA_VERSION
    rng: RngSection = Field(default_factory=RngSection)
    experiment: ExperimentSection = Field(default_factory=ExperimentSection)
    ground_truth: GroundTruthSection = Field(default_factory=GroundTruthSection)
    quadrature: QuadratureSection = Field(default_factory=QuadratureSection)
    stability: StabilitySection = Field(default_factory=StabilitySection)
    gcv: GcvSection = Field(default_factory=GcvSection)
    best: BestSection = Field(default_factory=BestSection)
    database: DatabaseSection = Field(default_factory=DatabaseSection)
    logging: LoggingSection = Field(default_factory=LoggingSection)
    workers: WorkersSection = Field(default_factory=WorkersSection)

    def to_experiment_config(self, output: Optional[str] = None) -> ExperimentConfig:
        experiment = self.experiment
        return ExperimentConfig(
            wavenumber=experiment.wavenumber,
            n=experiment.n,
            alphas=list(experiment.alphas),
            m_values=expand_range(experiment.m_values),
            square_orders=expand_range(experiment.square_orders),
            omp_order=experiment.omp_order,
            omp_iterations=expand_range(experiment.omp_iterations),
            trials=experiment.trials,
            method=experiment.method,
            seed=self.rng.seed,
            noise_sigma=experiment.noise_sigma,
            sampling_mode=experiment.sampling_mode,
            rng_algorithm=self.rng.algorithm,
            truncation_factor=experiment.truncation_factor,
            truncate_all=experiment.truncate_all,
            ground_truth_count=self.ground_truth.count,
            redraw_truth_per_trial=self.ground_truth.redraw_per_trial,
            quadrature_n_r=self.quadrature.n_r,
            quadrature_n_theta=self.quadrature.n_theta,
            square_scale=experiment.square_scale,
            n_values=expand_range(self.best.n_values),
            record_best_approximation=experiment.record_best_approximation,
            output=output,
        )

    def to_gcv_config(self) -> GcvConfig:
        return GcvConfig(
            m_values=expand_range(self.gcv.m_values),
            holdout_fraction=self.gcv.holdout_fraction,
            repetitions=self.gcv.repetitions,
            seed=self.rng.seed,
            stratified=self.gcv.stratified,
            rng_algorithm=self.rng.algorithm,
        )
