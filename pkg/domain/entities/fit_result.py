from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .dictionary_spec import DictionarySpec
from .geometry import PointCloud


@dataclass
class SampleSet:
    """
    Muestras y_l = u(x_l) + eta_l sobre puntos del disco
    """
    points: PointCloud
    values: np.ndarray
    noise_sigma: float = 0.0
    seed: Optional[int] = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if len(self.points) < 1:
            raise ValueError("sample set must contain at least one point")
        if len(self.points) != len(self.values):
            raise ValueError(
                f"points and values differ in length: {len(self.points)} != {len(self.values)}"
            )
        if self.noise_sigma < 0:
            raise ValueError(f"noise level must be nonnegative, got {self.noise_sigma}")

    @property
    def n(self) -> int:
        return len(self.values)

    def subset(self, indices: np.ndarray) -> 'SampleSet':
        return SampleSet(points=self.points.subset(indices), values=self.values[indices],
                         noise_sigma=self.noise_sigma, seed=self.seed)


@dataclass
class FitResult:
    spec: Optional[DictionarySpec]
    coefficients: np.ndarray
    condition_number: float
    empirical_residual: float
    truncation_bound: Optional[float] = None
    rank: Optional[int] = None
    rank_deficient: bool = False
    iterations: Optional[int] = None
    support: List[int] = field(default_factory=list)

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=complex)

    @property
    def dimension(self) -> int:
        return len(self.coefficients)
