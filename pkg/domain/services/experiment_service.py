"""
Experimentos de reconstrucción: ensayos por (método, alpha, n, realización),
agregación de curvas de error, mejor resultado por método y comparación
GCV frente al oráculo
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..entities.dictionary_spec import DictionaryKind, DictionarySpec
from ..entities.experiment import (
    BestRow,
    ErrorCurveRow,
    ExperimentConfig,
    GcvComparisonRow,
    GcvConfig,
    GcvResult,
    GroundTruthKind,
    GroundTruthSpec,
    MethodName,
    TrialRecord,
)
from ..entities.fit_result import FitResult, SampleSet
from ..entities.geometry import DiskQuadrature, QuadratureMeasure, SamplingConfig
from ..exceptions import ConfigurationError
from .dictionaries import evaluate_expansion
from .estimators import (
    add_noise,
    build_design_matrix,
    least_squares_fit,
    omp_fits,
    truncate_field,
    truncation_bound,
)
from .ground_truth import Field, best_approximation_error, l2_error, synth_solution
from .model_selection import gcv_select
from .sampling import derive_seed, disk_quadrature, make_rng, sample_nu_alpha

logger = logging.getLogger(__name__)

LEAST_SQUARES_METHODS = (MethodName.FOURIER_BESSEL_LS, MethodName.PLANE_WAVE_LS, MethodName.SQUARE_FOURIER_LS)
TRUNCATED_METHODS = (MethodName.FOURIER_BESSEL_LS, MethodName.PLANE_WAVE_LS)
# errores medios por debajo de este valor son redondeo y empatan entre sí
BEST_ERROR_FLOOR = 1e-10


@dataclass(frozen=True)
class TrialWork:
    method: MethodName
    alpha: float
    n: int
    trial: int


def _alpha_key(alpha: float) -> int:
    return int(round(alpha * 1_000_000))


class ExperimentService:
    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.logger = logging.getLogger(__name__)
        self._error_quadrature: Optional[DiskQuadrature] = None

        # Mapeo de método a familia de aproximación
        self.method_kinds = {
            MethodName.FOURIER_BESSEL_LS: DictionaryKind.FOURIER_BESSEL,
            MethodName.PLANE_WAVE_LS: DictionaryKind.PLANE_WAVE,
            MethodName.SQUARE_FOURIER_LS: DictionaryKind.SQUARE_FOURIER,
            MethodName.OMP: DictionaryKind.SQUARE_FOURIER,
        }

    @property
    def error_quadrature(self) -> DiskQuadrature:
        if self._error_quadrature is None:
            self._error_quadrature = disk_quadrature(self.config.quadrature_n_r, self.config.quadrature_n_theta,
                                                     measure=QuadratureMeasure.AREA)
        return self._error_quadrature

    def dictionary(self, method: MethodName, order: int) -> DictionarySpec:
        return DictionarySpec(kind=self.method_kinds[method], order=order,
                              wavenumber=self.config.wavenumber, square_scale=self.config.square_scale)

    def least_squares_specs(self, method: MethodName, n: int) -> List[DictionarySpec]:
        """
        Espacios de la curva de error, omitiendo los inviables para n muestras
        """
        orders = self.config.square_orders if method == MethodName.SQUARE_FOURIER_LS else self.config.m_values
        specs = []
        for order in orders:
            spec = self.dictionary(method, order)
            feasible = spec.dimension < n if method == MethodName.SQUARE_FOURIER_LS else spec.dimension <= n
            if feasible:
                specs.append(spec)
            else:
                self.logger.info(f"Skipping {method.value} order {order}: dimension {spec.dimension} infeasible for n={n}")
        return specs

    def omp_iterations(self, n: int) -> List[int]:
        iterations = [k for k in self.config.omp_iterations if 1 <= k <= n]
        skipped = sorted(set(self.config.omp_iterations) - set(iterations))
        if skipped:
            self.logger.info(f"Skipping OMP iteration counts {skipped}: more than n={n}")
        return iterations

    # -----------------------------------------------------------------------
    # Datos de un ensayo
    # -----------------------------------------------------------------------

    def truth_spec(self, trial: int) -> GroundTruthSpec:
        tags = ("truth", trial) if self.config.redraw_truth_per_trial else ("truth",)
        return GroundTruthSpec(kind=GroundTruthKind.RANDOM_PLANE_WAVES, wavenumber=self.config.wavenumber,
                               count=self.config.ground_truth_count,
                               seed=derive_seed(self.config.seed, *tags),
                               rng_algorithm=self.config.rng_algorithm)

    def draw_sample(self, u: Field, alpha: float, n: int, trial: int) -> SampleSet:
        key = _alpha_key(alpha)
        sampling = SamplingConfig(alpha=alpha, n=n, seed=derive_seed(self.config.seed, "sample", n, key, trial),
                                  mode=self.config.sampling_mode, rng_algorithm=self.config.rng_algorithm)
        points = sample_nu_alpha(sampling)
        noise_rng = make_rng(derive_seed(self.config.seed, "noise", n, key, trial), self.config.rng_algorithm)
        values = add_noise(u(points.xy), self.config.noise_sigma, noise_rng)
        return SampleSet(points=points, values=values, noise_sigma=self.config.noise_sigma,
                         seed=sampling.seed)

    def synthesize(self, alpha: float, n: int, trial: int = 0) -> SampleSet:
        u = synth_solution(self.truth_spec(trial))
        return self.draw_sample(u, alpha, n, trial)

    def estimate_field(self, method: MethodName, fit: FitResult, bound: Optional[float]) -> Field:
        truncate = bound is not None and (method in TRUNCATED_METHODS or self.config.truncate_all)

        def field(points) -> np.ndarray:
            values = evaluate_expansion(fit.spec, fit.coefficients, points)
            return truncate_field(values, bound) if truncate else values

        return field

    # -----------------------------------------------------------------------
    # Ensayos
    # -----------------------------------------------------------------------

    def run_trial(self, work: TrialWork) -> List[TrialRecord]:
        """
        Un muestreo y un campo de referencia compartidos por todos los
        valores del parámetro del método
        """
        quad = self.error_quadrature
        u = synth_solution(self.truth_spec(work.trial))
        sample = self.draw_sample(u, work.alpha, work.n, work.trial)
        bound = truncation_bound(sample.values, self.config.truncation_factor)
        records: List[TrialRecord] = []

        if work.method == MethodName.OMP:
            iterations = self.omp_iterations(work.n)
            if not iterations:
                return records
            spec = self.dictionary(MethodName.OMP, self.config.omp_order)
            A = build_design_matrix(sample.points, spec)
            for k, fit in omp_fits(A, sample.values, iterations, spec).items():
                error = l2_error(u, self.estimate_field(work.method, fit, bound), quad)
                records.append(self._record(work, k, error, None, fit))
            return records

        reference_norm = None
        for spec in self.least_squares_specs(work.method, work.n):
            fit = least_squares_fit(build_design_matrix(sample.points, spec), sample.values, spec)
            fit.truncation_bound = bound
            error = l2_error(u, self.estimate_field(work.method, fit, bound), quad)
            best = None
            if self.config.record_best_approximation and spec.solves_helmholtz:
                if reference_norm is None:
                    reference_norm = float(np.sqrt(quad.integrate(np.abs(u(quad.nodes)) ** 2)))
                best = best_approximation_error(u, spec, quad) / reference_norm
            records.append(self._record(work, spec.dimension, error, best, fit))
        return records

    def _record(self, work: TrialWork, knob: int, error: float, best: Optional[float],
                fit: FitResult) -> TrialRecord:
        self.logger.debug(
            f"{work.method.value} alpha={work.alpha} n={work.n} knob={knob} trial={work.trial}: "
            f"rel_l2={error:.6e} cond={fit.condition_number:.3e}"
        )
        return TrialRecord(method=work.method, alpha=work.alpha, n=work.n, dimension=knob, trial=work.trial,
                           rel_l2=error, best_approx_rel_l2=best, condition_number=fit.condition_number)

    def work_items(self, method: Optional[MethodName] = None, n: Optional[int] = None) -> List[TrialWork]:
        method = method or self.config.method
        n = n or self.config.n
        return [TrialWork(method=method, alpha=alpha, n=n, trial=trial)
                for alpha in self.config.alphas for trial in range(self.config.trials)]

    def run_trials(self, items: Sequence[TrialWork]) -> List[TrialRecord]:
        records = [record for work in items for record in self.run_trial(work)]
        return sorted(records, key=TrialRecord.sort_key)

    # -----------------------------------------------------------------------
    # GCV
    # -----------------------------------------------------------------------

    def _gcv_method(self) -> MethodName:
        if self.config.method not in LEAST_SQUARES_METHODS:
            raise ConfigurationError(f"GCV needs a least-squares method, got {self.config.method.value}",
                                     field="method")
        return self.config.method

    def run_gcv(self, gcv_config: GcvConfig, alpha: float, n: Optional[int] = None,
                trial: int = 0) -> Tuple[GcvResult, Field, SampleSet]:
        method = self._gcv_method()
        n = n or self.config.n
        u = synth_solution(self.truth_spec(trial))
        sample = self.draw_sample(u, alpha, n, trial)
        bound = truncation_bound(sample.values, self.config.truncation_factor)
        truncate = method in TRUNCATED_METHODS or self.config.truncate_all
        result = gcv_select(sample, self.method_kinds[method], self.config.wavenumber, gcv_config,
                            truncation_bound=bound if truncate else None,
                            square_scale=self.config.square_scale)
        return result, u, sample

    def gcv_versus_oracle(self, gcv_config: GcvConfig, alpha: float, n: int, trial: int = 0) -> GcvComparisonRow:
        """
        Error de la dimensión elegida por GCV frente al de la mejor dimensión
        a posteriori sobre los mismos candidatos y la misma muestra
        """
        method = self._gcv_method()
        result, u, sample = self.run_gcv(gcv_config, alpha, n, trial)
        bound = result.final_fit.truncation_bound
        quad = self.error_quadrature

        errors: Dict[int, float] = {}
        for m in result.m_values:
            spec = self.dictionary(method, m)
            fit = least_squares_fit(build_design_matrix(sample.points, spec), sample.values, spec)
            errors[m] = l2_error(u, self.estimate_field(method, fit, bound), quad)
        oracle_m = min(result.m_values, key=lambda m: (errors[m], m))
        return GcvComparisonRow(n=n, alpha=alpha, gcv_m=result.m_selected, gcv_err=errors[result.m_selected],
                                oracle_m=oracle_m, oracle_err=errors[oracle_m], trial=trial)


# ---------------------------------------------------------------------------
# Agregación
# ---------------------------------------------------------------------------

def aggregate_rows(records: Sequence[TrialRecord]) -> List[ErrorCurveRow]:
    """
    Media y desviación típica poblacional del error por (método, alpha, parámetro)
    """
    if not records:
        return []
    frame = pd.DataFrame([record.to_dict() for record in records])
    rows = []
    for (method, alpha, dim), group in frame.groupby(['method', 'alpha', 'dim'], sort=True):
        errors = group.sort_values('trial')['rel_l2'].to_list()
        rows.append(ErrorCurveRow(method=MethodName(method), alpha=float(alpha), dimension=int(dim),
                                  mean_rel_l2=float(np.mean(errors)), std_rel_l2=float(np.std(errors, ddof=0)),
                                  trials=len(errors), errors=errors))
    return rows


def best_row(rows: Sequence[ErrorCurveRow], method: MethodName, n: int,
             floor: float = BEST_ERROR_FLOOR) -> Optional[BestRow]:
    """
    Mínimo del error medio sobre el parámetro del método y alpha.

    Los errores por debajo de floor se tratan como empate; el empate se
    resuelve por el menor alpha y después por la menor dimensión.
    """
    candidates = [row for row in rows if row.method == method]
    if not candidates:
        return None
    best = min(candidates, key=lambda row: (max(row.mean_rel_l2, floor), row.alpha, row.dimension))
    if best.mean_rel_l2 < floor:
        logger.debug(f"{method.value} at n={n} reaches the error floor {floor:g}; best alpha resolved by tie-break")
    return BestRow(method=method, n=n, best_err=best.mean_rel_l2, best_dim_or_iters=best.dimension,
                   best_alpha=best.alpha)


def run_error_curve(config: ExperimentConfig) -> List[ErrorCurveRow]:
    service = ExperimentService(config)
    return aggregate_rows(service.run_trials(service.work_items()))


def run_best_comparison(config: ExperimentConfig, methods: Sequence[MethodName]) -> List[BestRow]:
    service = ExperimentService(config)
    rows: List[BestRow] = []
    for method in methods:
        for n in config.n_values:
            curve = aggregate_rows(service.run_trials(service.work_items(method, n)))
            row = best_row(curve, method, n)
            if row is not None:
                rows.append(row)
    return rows
