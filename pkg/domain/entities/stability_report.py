from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .dictionary_spec import DictionaryKind, DictionarySpec


class FrameMethod(Enum):
    DIAGONAL = "diagonal"  # átomos ya ortogonales: solo normalización
    DFT_ALIASED = "dft_aliased"  # ondas planas combinadas por la DFT
    GRAM_CHOLESKY = "gram_cholesky"  # Gram por cuadratura + Cholesky con pivoteo


@dataclass
class OrthonormalFrame:
    """
    Base ortonormal en L2(nu_alpha) del espacio generado por un diccionario.

    coefficients mapea los átomos crudos a las funciones ortonormales:
    L = A @ coefficients, con A la matriz de átomos evaluados.
    """
    spec: DictionarySpec
    alpha: float
    method: FrameMethod
    coefficients: np.ndarray
    norms_sq: np.ndarray
    labels: List[str] = field(default_factory=list)

    @property
    def dimension(self) -> int:
        return self.coefficients.shape[1]

    @property
    def rotation_invariant(self) -> bool:
        return self.method == FrameMethod.DIAGONAL and self.spec.kind == DictionaryKind.FOURIER_BESSEL


@dataclass
class AdmissibleDimension:
    """
    Mayor dimensión que satisface K <= kappa * n / log n
    """
    m_star: Optional[int]
    dimension: int
    kappa: float
    threshold: float
    n: int
    r_exponent: float
    none_admissible: bool = False


@dataclass
class StabilityReport:
    spec: DictionarySpec
    alpha: float
    m_values: List[int]
    dimensions: List[int]
    K_values: List[float]
    K_upper: List[float]
    maximizers: List[Tuple[float, float]]
    growth_fit: Tuple[float, float]
    admissible: AdmissibleDimension

    @property
    def m_star(self) -> Optional[int]:
        return self.admissible.m_star

    @property
    def kappa(self) -> float:
        return self.admissible.kappa

    def to_dict(self) -> Dict[str, Any]:
        return {
            'family': self.spec.kind.value,
            'wavenumber': float(self.spec.wavenumber),
            'alpha': float(self.alpha),
            'm_range': [int(self.m_values[0]), int(self.m_values[-1])] if self.m_values else [],
            'growth_fit': {
                'slope': float(self.growth_fit[0]),
                'intercept': float(self.growth_fit[1]),
            },
            'admissible': {
                'm_star': self.admissible.m_star,
                'dimension': int(self.admissible.dimension),
                'kappa': float(self.admissible.kappa),
                'threshold': float(self.admissible.threshold),
                'n': int(self.admissible.n),
                'r_exponent': float(self.admissible.r_exponent),
                'none_admissible': bool(self.admissible.none_admissible),
            },
            'K_upper': [float(v) for v in self.K_upper],
        }
