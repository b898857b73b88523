import json
import logging
from datetime import datetime
from typing import List, Optional

import aiosqlite

from domain.entities.experiment import ExperimentRun, RunStatus, TrialRecord
from domain.interfaces.trial_repository import ITrialRepository


class TrialRepositoryImpl(ITrialRepository):
    def __init__(self, db_path: str = "experiments.db"):
        self.db_path = db_path
        self.logger = logging.getLogger(__name__)
        self._initialized = False

    async def _ensure_initialized(self):
        if not self._initialized:
            await self._initialize_database()
            self._initialized = True

    async def _initialize_database(self):
        try:
            async with aiosqlite.connect(self.db_path) as db:
                await db.execute("""
                    CREATE TABLE IF NOT EXISTS experiment_runs (
                        run_id TEXT PRIMARY KEY,
                        command TEXT NOT NULL,
                        config TEXT NOT NULL,
                        seed INTEGER NOT NULL,
                        status TEXT DEFAULT 'running',
                        output TEXT,
                        created_at TEXT NOT NULL,
                        updated_at TEXT NOT NULL
                    )
                """)

                await db.execute("""
                    CREATE TABLE IF NOT EXISTS trial_results (
                        id INTEGER PRIMARY KEY AUTOINCREMENT,
                        run_id TEXT NOT NULL REFERENCES experiment_runs(run_id) ON DELETE CASCADE,
                        method TEXT NOT NULL,
                        alpha REAL NOT NULL,
                        n INTEGER NOT NULL,
                        knob INTEGER NOT NULL,
                        trial INTEGER NOT NULL,
                        rel_l2 REAL NOT NULL,
                        best_approx_rel_l2 REAL,
                        condition_number REAL
                    )
                """)

                await db.execute("""
                    CREATE INDEX IF NOT EXISTS idx_trial_run ON trial_results(run_id)
                """)

                await db.execute("""
                    CREATE INDEX IF NOT EXISTS idx_run_created ON experiment_runs(created_at)
                """)

                await db.commit()

            self.logger.info(f"Database initialized at {self.db_path}")

        except Exception as e:
            self.logger.error(f"Failed to initialize database: {str(e)}")
            raise

    async def save_run(self, run: ExperimentRun) -> bool:
        try:
            await self._ensure_initialized()

            now = datetime.now().isoformat()

            async with aiosqlite.connect(self.db_path) as db:
                # un run repetido reemplaza sus ensayos anteriores
                await db.execute("DELETE FROM trial_results WHERE run_id = ?", (run.run_id,))
                await db.execute("""
                    INSERT OR REPLACE INTO experiment_runs
                    (run_id, command, config, seed, status, output, created_at, updated_at)
                    VALUES (?, ?, ?, ?, ?, ?, ?, ?)
                """, (
                    run.run_id,
                    run.command,
                    json.dumps(run.config, sort_keys=True, default=str),
                    run.seed,
                    run.status.value,
                    run.output,
                    run.created_at.isoformat(),
                    now
                ))

                await db.commit()

            self.logger.debug(f"Saved run {run.run_id} ({run.command})")
            return True

        except Exception as e:
            self.logger.error(f"Failed to save run {run.run_id}: {str(e)}")
            return False

    async def get_run(self, run_id: str) -> Optional[ExperimentRun]:
        try:
            await self._ensure_initialized()

            async with aiosqlite.connect(self.db_path) as db:
                db.row_factory = aiosqlite.Row
                cursor = await db.execute("""
                    SELECT * FROM experiment_runs WHERE run_id = ?
                """, (run_id,))

                row = await cursor.fetchone()

                if row:
                    return self._row_to_run(row)
                return None

        except Exception as e:
            self.logger.error(f"Failed to get run {run_id}: {str(e)}")
            return None

    async def mark_run(self, run_id: str, status: RunStatus, output: Optional[str] = None) -> bool:
        try:
            await self._ensure_initialized()

            async with aiosqlite.connect(self.db_path) as db:
                await db.execute("""
                    UPDATE experiment_runs
                    SET status = ?, output = COALESCE(?, output), updated_at = ?
                    WHERE run_id = ?
                """, (status.value, output, datetime.now().isoformat(), run_id))

                await db.commit()

            self.logger.debug(f"Marked run {run_id} as {status.value}")
            return True

        except Exception as e:
            self.logger.error(f"Failed to mark run {run_id} as {status.value}: {str(e)}")
            return False

    async def save_trials(self, run_id: str, records: List[TrialRecord]) -> bool:
        try:
            await self._ensure_initialized()

            async with aiosqlite.connect(self.db_path) as db:
                await db.executemany("""
                    INSERT INTO trial_results
                    (run_id, method, alpha, n, knob, trial, rel_l2, best_approx_rel_l2, condition_number)
                    VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?)
                """, [
                    (
                        run_id,
                        record.method.value,
                        record.alpha,
                        record.n,
                        record.dimension,
                        record.trial,
                        record.rel_l2,
                        record.best_approx_rel_l2,
                        record.condition_number
                    )
                    for record in records
                ])

                await db.commit()

            self.logger.debug(f"Saved {len(records)} trial records for run {run_id}")
            return True

        except Exception as e:
            self.logger.error(f"Failed to save trials for run {run_id}: {str(e)}")
            return False

    async def get_trials(self, run_id: str) -> List[TrialRecord]:
        try:
            await self._ensure_initialized()

            async with aiosqlite.connect(self.db_path) as db:
                db.row_factory = aiosqlite.Row
                cursor = await db.execute("""
                    SELECT * FROM trial_results
                    WHERE run_id = ?
                    ORDER BY method, alpha, n, knob, trial
                """, (run_id,))

                rows = await cursor.fetchall()

                return [self._row_to_trial(row) for row in rows]

        except Exception as e:
            self.logger.error(f"Failed to get trials for run {run_id}: {str(e)}")
            return []

    async def cleanup_old_runs(self, older_than: datetime) -> int:
        try:
            await self._ensure_initialized()

            async with aiosqlite.connect(self.db_path) as db:
                await db.execute("""
                    DELETE FROM trial_results WHERE run_id IN
                    (SELECT run_id FROM experiment_runs WHERE created_at < ?)
                """, (older_than.isoformat(),))
                cursor = await db.execute("""
                    DELETE FROM experiment_runs WHERE created_at < ?
                """, (older_than.isoformat(),))

                await db.commit()

                deleted_count = cursor.rowcount
                self.logger.info(f"Cleaned up {deleted_count} old runs")
                return deleted_count

        except Exception as e:
            self.logger.error(f"Failed to cleanup old runs: {str(e)}")
            return 0

    def _row_to_run(self, row) -> ExperimentRun:
        return ExperimentRun(
            command=row['command'],
            config=json.loads(row['config']),
            seed=row['seed'],
            run_id=row['run_id'],
            created_at=datetime.fromisoformat(row['created_at']),
            status=RunStatus(row['status']),
            output=row['output']
        )

    def _row_to_trial(self, row) -> TrialRecord:
        return TrialRecord.from_dict({
            'method': row['method'],
            'alpha': row['alpha'],
            'n': row['n'],
            'dim': row['knob'],
            'trial': row['trial'],
            'rel_l2': row['rel_l2'],
            'best_approx_rel_l2': row['best_approx_rel_l2'],
            'condition_number': row['condition_number'],
        })
