import asyncio
import logging
from typing import List, Sequence

from domain.entities.experiment import TrialRecord
from domain.services.experiment_service import ExperimentService, TrialWork


class TrialHandler:
    def __init__(self, experiment_service: ExperimentService, max_concurrent_trials: int = 4):
        self.experiment_service = experiment_service
        self.max_concurrent_trials = max_concurrent_trials
        self.logger = logging.getLogger(__name__)

    async def run_trials(self, items: Sequence[TrialWork]) -> List[TrialRecord]:
        """
        Ejecuta los ensayos en hilos con concurrencia acotada y fusiona los
        resultados por (método, alpha, n, parámetro, ensayo)
        """
        if not items:
            return []

        semaphore = asyncio.Semaphore(self.max_concurrent_trials)
        completed = 0

        async def run_one(work: TrialWork) -> List[TrialRecord]:
            nonlocal completed
            async with semaphore:
                records = await asyncio.to_thread(self.experiment_service.run_trial, work)
            completed += 1
            self.logger.debug(
                f"Trial {work.method.value} alpha={work.alpha} n={work.n} #{work.trial} done "
                f"({completed}/{len(items)})"
            )
            return records

        self.logger.info(f"Running {len(items)} trials with up to {self.max_concurrent_trials} workers")
        results = await asyncio.gather(*(run_one(work) for work in items))

        records = [record for batch in results for record in batch]
        records.sort(key=TrialRecord.sort_key)
        self.logger.info(f"Collected {len(records)} trial records")
        return records
