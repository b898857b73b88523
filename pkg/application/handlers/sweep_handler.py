import asyncio
import dataclasses
import logging
from typing import List, Sequence, Tuple

from domain.entities.experiment import BestRow, GcvComparisonRow, GcvConfig, MethodName, TrialRecord
from domain.services.experiment_service import ExperimentService, aggregate_rows, best_row
from domain.services.sampling import derive_seed

from .trial_handler import TrialHandler


class SweepHandler:
    """
    Barridos sobre el número de muestras n
    """

    def __init__(self, experiment_service: ExperimentService, trial_handler: TrialHandler):
        self.experiment_service = experiment_service
        self.trial_handler = trial_handler
        self.logger = logging.getLogger(__name__)

    async def best_comparison(self, methods: Sequence[MethodName],
                              n_values: Sequence[int]) -> Tuple[List[BestRow], List[TrialRecord]]:
        """
        Mejor error medio de cada método por n, minimizando sobre su parámetro y alpha
        """
        rows: List[BestRow] = []
        all_records: List[TrialRecord] = []

        for method in methods:
            for n in n_values:
                self.logger.info(f"Best-of sweep: {method.value} n={n}")
                records = await self.trial_handler.run_trials(self.experiment_service.work_items(method, n))
                row = best_row(aggregate_rows(records), method, n)
                if row is None:
                    self.logger.warning(f"No feasible setting for {method.value} at n={n}")
                    continue
                rows.append(row)
                all_records.extend(records)

        all_records.sort(key=TrialRecord.sort_key)
        return rows, all_records

    async def gcv_comparison(self, gcv_config: GcvConfig, alphas: Sequence[float], n_values: Sequence[int],
                             trials: int) -> List[GcvComparisonRow]:
        """
        GCV frente al oráculo para cada (n, alpha, ensayo); cada ensayo usa
        particiones con semilla propia
        """
        semaphore = asyncio.Semaphore(self.trial_handler.max_concurrent_trials)

        async def compare(n: int, alpha: float, trial: int) -> GcvComparisonRow:
            config = dataclasses.replace(gcv_config, seed=derive_seed(gcv_config.seed, "gcv-split", n, trial))
            async with semaphore:
                row = await asyncio.to_thread(self.experiment_service.gcv_versus_oracle, config, alpha, n, trial)
            self.logger.debug(f"GCV n={n} alpha={alpha} trial={trial}: gcv m={row.gcv_m}, oracle m={row.oracle_m}")
            return row

        jobs = [compare(n, alpha, trial) for n in n_values for alpha in alphas for trial in range(trials)]
        self.logger.info(f"Running {len(jobs)} GCV-versus-oracle comparisons")
        rows = await asyncio.gather(*jobs)
        return sorted(rows, key=lambda row: (row.n, row.alpha, row.trial))
