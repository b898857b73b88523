"""
Selección de la dimensión por validación cruzada repetida (holdout 90/10)
"""
import logging
import math
from typing import Dict, List, Optional

import numpy as np

from ..entities.dictionary_spec import DictionaryKind, DictionarySpec
from ..entities.experiment import GcvConfig, GcvResult
from ..entities.fit_result import SampleSet
from ..exceptions import ConfigurationError
from .estimators import build_design_matrix, least_squares_fit, truncate_field
from .sampling import derive_seed, make_rng

logger = logging.getLogger(__name__)


def holdout_size(n: int, fraction: float) -> int:
    return max(1, int(math.floor(fraction * n + 0.5)))


def draw_split(sample: SampleSet, config: GcvConfig, repetition: int):
    """
    Partición aleatoria (entrenamiento, validación) sin reemplazamiento; en
    modo estratificado se reparte por separado interior y frontera
    """
    n = sample.n
    n_val = holdout_size(n, config.holdout_fraction)
    rng = make_rng(derive_seed(config.seed, "gcv", repetition), config.rng_algorithm)

    if not config.stratified:
        order = rng.permutation(n)
        return np.sort(order[n_val:]), np.sort(order[:n_val])

    validation = []
    for stratum in (~sample.points.on_boundary, sample.points.on_boundary):
        members = np.flatnonzero(stratum)
        if members.size == 0:
            continue
        share = int(math.floor(n_val * members.size / n + 0.5))
        validation.extend(rng.permutation(members)[:share])
    if not validation:
        validation = list(rng.permutation(n)[:n_val])
    validation = np.sort(np.asarray(validation, dtype=int))
    training = np.setdiff1d(np.arange(n), validation)
    return training, validation


def feasible_orders(kind: DictionaryKind, wavenumber: float, m_values: List[int], n_train: int,
                    square_scale: float = math.pi) -> List[int]:
    feasible = []
    for m in m_values:
        dimension = DictionarySpec(kind=kind, order=m, wavenumber=wavenumber,
                                   square_scale=square_scale).dimension
        if dimension <= n_train:
            feasible.append(m)
        else:
            logger.info(f"GCV candidate m={m} skipped: dimension {dimension} exceeds training size {n_train}")
    return feasible


def gcv_select(sample: SampleSet, kind: DictionaryKind, wavenumber: float, config: GcvConfig,
               truncation_bound: Optional[float] = None, square_scale: float = math.pi) -> GcvResult:
    """
    Para cada repetición: ajuste sobre el 90%, MSE empírico sobre el 10%;
    media por m, argmin (empates hacia el menor m) y reajuste final con
    todas las muestras
    """
    n_val = holdout_size(sample.n, config.holdout_fraction)
    n_train = sample.n - n_val
    candidates = feasible_orders(kind, wavenumber, sorted(set(config.m_values)), n_train, square_scale)
    if not candidates:
        raise ConfigurationError(
            f"no candidate order fits a training set of {n_train} points", field="m_values"
        )

    specs = {m: DictionarySpec(kind=kind, order=m, wavenumber=wavenumber, square_scale=square_scale)
             for m in candidates}
    split_mse: Dict[int, List[float]] = {m: [] for m in candidates}

    for repetition in range(config.repetitions):
        training, validation = draw_split(sample, config, repetition)
        train_points = sample.points.subset(training)
        val_points = sample.points.subset(validation)
        for m in candidates:
            fit = least_squares_fit(build_design_matrix(train_points, specs[m]),
                                    sample.values[training], specs[m])
            predicted = build_design_matrix(val_points, specs[m]) @ fit.coefficients
            if truncation_bound is not None:
                predicted = truncate_field(predicted, truncation_bound)
            split_mse[m].append(float(np.mean(np.abs(sample.values[validation] - predicted) ** 2)))

    mean_mse = [float(np.mean(split_mse[m])) for m in candidates]
    # np.argmin toma el primer mínimo: empate hacia el menor m
    selected = candidates[int(np.argmin(mean_mse))]
    final_spec = specs[selected]
    final_fit = least_squares_fit(build_design_matrix(sample.points, final_spec), sample.values, final_spec)
    final_fit.truncation_bound = truncation_bound

    logger.info(f"GCV selected m={selected} (dim={final_spec.dimension}) among {len(candidates)} candidates")
    return GcvResult(m_selected=selected, m_values=candidates,
                     dimensions=[specs[m].dimension for m in candidates],
                     validation_mse=mean_mse, final_fit=final_fit, split_mse=split_mse)
