from abc import ABC, abstractmethod
from typing import Any, Dict, List, Sequence


class IResultWriter(ABC):

    @abstractmethod
    def write_rows(self, path: str, columns: Sequence[str], rows: List[Dict[str, Any]]) -> str:
        """
        Escribe filas con la cabecera exacta dada y devuelve la ruta final
        """
        pass

    @abstractmethod
    def write_summary(self, path: str, summary: Dict[str, Any]) -> str:
        pass
