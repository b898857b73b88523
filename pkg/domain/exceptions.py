from typing import Optional


class ReconstructionError(Exception):
    """
    Error base de la librería de reconstrucción
    """


class BesselOrderRangeError(ReconstructionError, ValueError):
    """
    Orden de Bessel fuera del rango soportado
    """

    def __init__(self, order: int, max_order: int, reason: Optional[str] = None):
        self.order = order
        self.max_order = max_order
        self.reason = reason
        message = f"Bessel order {order} outside supported range |j| <= {max_order}"
        super().__init__(f"Bessel order {order}: {reason}" if reason else message)


class RankDeficiencyError(ReconstructionError):
    """
    Matriz de Gram numéricamente singular durante la ortonormalización
    """

    def __init__(self, atom_label: str, rank: int, dimension: int):
        self.atom_label = atom_label
        self.rank = rank
        self.dimension = dimension
        super().__init__(
            f"Gram matrix is rank deficient ({rank} < {dimension}); "
            f"first dependent atom: {atom_label}"
        )


class ConfigurationError(ReconstructionError):
    """
    Configuración inválida o inviable
    """

    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class UndefinedErrorMetric(ReconstructionError):
    """
    Error relativo indefinido (campo de referencia nulo)
    """
