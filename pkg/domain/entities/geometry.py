import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Optional, Sequence

import numpy as np

from ..exceptions import ConfigurationError


class SamplingMode(Enum):
    IID_MIXTURE = "iid_mixture"
    FIXED_PROPORTION = "fixed_proportion"


class QuadratureMeasure(Enum):
    PROBABILITY = "probability"  # nu_alpha, masa total 1
    AREA = "area"  # dx sobre el disco, masa total pi


@dataclass(frozen=True)
class Point2:
    x: float
    y: float

    @property
    def r(self) -> float:
        return math.hypot(self.x, self.y)

    @property
    def theta(self) -> float:
        """
        Ángulo polar en [-pi, pi)
        """
        angle = math.atan2(self.y, self.x)
        return -math.pi if angle >= math.pi else angle

    @classmethod
    def from_polar(cls, r: float, theta: float) -> 'Point2':
        return cls(x=r * math.cos(theta), y=r * math.sin(theta))


@dataclass
class PointCloud:
    """
    Conjunto de puntos del disco en forma vectorial (n x 2)
    """
    xy: np.ndarray
    on_boundary: Optional[np.ndarray] = None

    def __post_init__(self):
        self.xy = np.atleast_2d(np.asarray(self.xy, dtype=float))
        if self.xy.shape[1] != 2:
            raise ValueError(f"Point array must have shape (n, 2), got {self.xy.shape}")
        if self.on_boundary is None:
            self.on_boundary = np.zeros(len(self.xy), dtype=bool)
        else:
            self.on_boundary = np.asarray(self.on_boundary, dtype=bool)

    def __len__(self) -> int:
        return len(self.xy)

    def __iter__(self) -> Iterator[Point2]:
        for x, y in self.xy:
            yield Point2(float(x), float(y))

    @property
    def r(self) -> np.ndarray:
        return np.hypot(self.xy[:, 0], self.xy[:, 1])

    @property
    def theta(self) -> np.ndarray:
        angle = np.arctan2(self.xy[:, 1], self.xy[:, 0])
        return np.where(angle >= np.pi, -np.pi, angle)

    def subset(self, indices: np.ndarray) -> 'PointCloud':
        return PointCloud(xy=self.xy[indices], on_boundary=self.on_boundary[indices])

    @classmethod
    def from_points(cls, points: Sequence[Point2]) -> 'PointCloud':
        return cls(xy=np.array([[p.x, p.y] for p in points], dtype=float))

    @classmethod
    def from_polar(cls, r: np.ndarray, theta: np.ndarray,
                   on_boundary: Optional[np.ndarray] = None) -> 'PointCloud':
        xy = np.column_stack((r * np.cos(theta), r * np.sin(theta)))
        return cls(xy=xy, on_boundary=on_boundary)


def as_point_array(points) -> np.ndarray:
    """
    Normaliza Point2, secuencias de Point2, PointCloud o arrays a un array (n, 2)
    """
    if isinstance(points, PointCloud):
        return points.xy
    if isinstance(points, Point2):
        return np.array([[points.x, points.y]], dtype=float)
    if isinstance(points, np.ndarray):
        return np.atleast_2d(points.astype(float, copy=False))
    points = list(points)
    if points and isinstance(points[0], Point2):
        return np.array([[p.x, p.y] for p in points], dtype=float)
    return np.atleast_2d(np.asarray(points, dtype=float))


@dataclass(frozen=True)
class SamplingConfig:
    alpha: float
    n: int
    seed: int
    mode: SamplingMode = SamplingMode.IID_MIXTURE
    rng_algorithm: str = "philox"

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigurationError(f"alpha must lie in [0, 1], got {self.alpha}", field="alpha")
        if self.n < 1:
            raise ConfigurationError(f"sample count must be positive, got {self.n}", field="n")
        if self.seed < 0 or self.seed >= 2 ** 64:
            raise ConfigurationError(f"seed must be a 64-bit unsigned integer, got {self.seed}", field="seed")

    @property
    def boundary_count(self) -> int:
        """
        Número exacto de puntos de frontera en modo de proporción fija
        """
        return int(math.floor(self.alpha * self.n + 0.5))


@dataclass
class DiskQuadrature:
    nodes: np.ndarray
    weights: np.ndarray
    alpha: float = 0.0
    measure: QuadratureMeasure = QuadratureMeasure.PROBABILITY
    n_r: int = 0
    n_theta: int = 0
    boundary_mask: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.boundary_mask is None:
            self.boundary_mask = np.zeros(len(self.weights), dtype=bool)

    def __len__(self) -> int:
        return len(self.weights)

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.weights))

    @property
    def points(self) -> PointCloud:
        return PointCloud(xy=self.nodes, on_boundary=self.boundary_mask)

    def integrate(self, values: np.ndarray) -> complex:
        """
        Integra valores nodales contra la medida de la regla
        """
        result = np.tensordot(self.weights, np.asarray(values), axes=(0, 0))
        if np.ndim(result) == 0 and np.isrealobj(result):
            return float(result)
        return result
