import logging
from pathlib import Path
from typing import Any, Dict, List, Sequence

import pandas as pd
import yaml

from domain.interfaces.result_writer import IResultWriter

FLOAT_FORMAT = "%.17g"


def sidecar_path(path: str, suffix: str) -> str:
    """
    Ruta hermana <stem><suffix>, p. ej. curve.csv -> curve_trials.csv
    """
    target = Path(path)
    return str(target.with_name(f"{target.stem}{suffix}"))


class CsvResultWriter(IResultWriter):
    """
    CSV UTF-8 con cabecera exacta, 17 cifras significativas y fin de línea \\n
    """

    def __init__(self):
        self.logger = logging.getLogger(__name__)

    def _prepare(self, path: str) -> Path:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        return target

    def write_rows(self, path: str, columns: Sequence[str], rows: List[Dict[str, Any]]) -> str:
        target = self._prepare(path)
        frame = pd.DataFrame(rows, columns=list(columns))
        for column in frame.columns:
            if frame[column].dtype == bool:
                frame[column] = frame[column].astype(int)
        frame.to_csv(target, index=False, float_format=FLOAT_FORMAT, lineterminator="\n", encoding="utf-8")
        self.logger.info(f"Wrote {len(frame)} rows to {target}")
        return str(target)

    def write_summary(self, path: str, summary: Dict[str, Any]) -> str:
        target = self._prepare(path)
        with open(target, 'w', encoding='utf-8', newline='\n') as handle:
            yaml.safe_dump(summary, handle, sort_keys=False, default_flow_style=False)
        self.logger.info(f"Wrote summary to {target}")
        return str(target)
