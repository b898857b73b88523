from abc import ABC, abstractmethod
from datetime import datetime
from typing import List, Optional

from ..entities.experiment import ExperimentRun, RunStatus, TrialRecord


class ITrialRepository(ABC):

    @abstractmethod
    async def save_run(self, run: ExperimentRun) -> bool:
        pass

    @abstractmethod
    async def get_run(self, run_id: str) -> Optional[ExperimentRun]:
        pass

    @abstractmethod
    async def mark_run(self, run_id: str, status: RunStatus, output: Optional[str] = None) -> bool:
        pass

    @abstractmethod
    async def save_trials(self, run_id: str, records: List[TrialRecord]) -> bool:
        pass

    @abstractmethod
    async def get_trials(self, run_id: str) -> List[TrialRecord]:
        pass

    @abstractmethod
    async def cleanup_old_runs(self, older_than: datetime) -> int:
        pass
