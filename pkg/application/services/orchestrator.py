import asyncio
import logging
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from typing import Any, Dict, List, Optional

from config.experiment_config import ExperimentFile, expand_range
from domain.entities.dictionary_spec import DictionaryKind
from domain.entities.experiment import ExperimentRun, RunStatus, TrialRecord
from domain.entities.stability_report import StabilityReport
from domain.interfaces.result_writer import IResultWriter
from domain.interfaces.trial_repository import ITrialRepository
from domain.services.experiment_service import ExperimentService, aggregate_rows
from domain.services.stability import build_stability_report, k_search_points
from infrastructure.csv.csv_writer import CsvResultWriter, sidecar_path
from infrastructure.persistence.trial_repository_impl import TrialRepositoryImpl

from ..handlers.sweep_handler import SweepHandler
from ..handlers.trial_handler import TrialHandler

KBOUND_COLUMNS = ['m', 'dim', 'K', 'alpha', 'lambda']
CURVE_COLUMNS = ['method', 'alpha', 'dim', 'mean_rel_l2', 'std_rel_l2', 'trials']
BEST_COLUMNS = ['method', 'n', 'best_err', 'best_dim_or_iters', 'best_alpha']
GCV_COLUMNS = ['m', 'dim', 'val_mse', 'selected']
GCV_COMPARE_COLUMNS = ['n', 'alpha', 'trial', 'gcv_m', 'gcv_err', 'oracle_m', 'oracle_err', 'ratio']
SYNTH_COLUMNS = ['x', 'y', 'r', 'theta', 'on_boundary', 're_y', 'im_y']
TRIAL_COLUMNS = ['method', 'alpha', 'n', 'dim', 'trial', 'rel_l2', 'best_approx_rel_l2', 'condition_number']


@dataclass
class CommandResult:
    success: bool
    message: Optional[str] = None
    outputs: List[str] = field(default_factory=list)
    run_id: Optional[str] = None


class ExperimentOrchestrator:
    def __init__(self, config: ExperimentFile, repository: Optional[ITrialRepository] = None,
                 writer: Optional[IResultWriter] = None):
        self.config = config
        self.logger = logging.getLogger(__name__)

        # Infraestructura
        self.repository = repository
        self.writer = writer

        # Servicios y handlers
        self.experiment_service: Optional[ExperimentService] = None
        self.trial_handler: Optional[TrialHandler] = None
        self.sweep_handler: Optional[SweepHandler] = None

        self.commands = {
            'kbound': self.run_kbound,
            'curve': self.run_curve,
            'best': self.run_best,
            'gcv': self.run_gcv,
            'gcv-compare': self.run_gcv_compare,
            'synth': self.run_synth,
        }

    async def initialize(self) -> bool:
        """
        Inicializa repositorio, escritor, servicio y handlers
        """
        try:
            self.logger.info("Initializing Experiment Orchestrator")

            if self.repository is None and self.config.database.path:
                self.repository = TrialRepositoryImpl(db_path=self.config.database.path)
            if self.writer is None:
                self.writer = CsvResultWriter()

            self.experiment_service = ExperimentService(self.config.to_experiment_config())
            self.trial_handler = TrialHandler(self.experiment_service,
                                              self.config.workers.max_concurrent_trials)
            self.sweep_handler = SweepHandler(self.experiment_service, self.trial_handler)

            if self.repository is not None and self.config.database.cleanup_days:
                older_than = datetime.now() - timedelta(days=self.config.database.cleanup_days)
                await self.repository.cleanup_old_runs(older_than)

            self.logger.info("Experiment Orchestrator initialized successfully")
            return True

        except Exception as e:
            self.logger.error(f"Failed to initialize Experiment Orchestrator: {str(e)}", exc_info=True)
            return False

    async def execute(self, command: str, output: Optional[str] = None, **options: Any) -> CommandResult:
        """
        Ejecuta un subcomando registrando el run; cualquier excepción se
        convierte en un CommandResult fallido
        """
        handler = self.commands.get(command)
        if handler is None:
            return CommandResult(success=False, message=f"Unsupported command: {command}")
        if self.experiment_service is None and not await self.initialize():
            return CommandResult(success=False, message="Failed to initialize orchestrator")

        output = output or f"results/{command}.csv"
        run = ExperimentRun(command=command,
                            config={'file': self.config.model_dump(mode='json', by_alias=True),
                                    'options': options, 'output': output},
                            seed=self.config.rng.seed)
        if self.repository is not None:
            await self.repository.save_run(run)

        started = datetime.now()
        self.logger.info(f"Command {command} started (run {run.run_id})")
        try:
            outputs, records = await handler(output, **options)
            if self.repository is not None:
                if records:
                    await self.repository.save_trials(run.run_id, records)
                await self.repository.mark_run(run.run_id, RunStatus.COMPLETED, output=outputs[0])
            elapsed = (datetime.now() - started).total_seconds()
            self.logger.info(f"Command {command} finished in {elapsed:.1f}s: {', '.join(outputs)}")
            return CommandResult(success=True, message=f"{command} completed", outputs=outputs, run_id=run.run_id)

        except Exception as e:
            error_msg = f"Command {command} failed: {str(e)}"
            self.logger.error(error_msg, exc_info=True)
            if self.repository is not None:
                await self.repository.mark_run(run.run_id, RunStatus.FAILED)
            return CommandResult(success=False, message=error_msg, run_id=run.run_id)

    async def stop(self) -> None:
        self.experiment_service = None
        self.trial_handler = None
        self.sweep_handler = None
        self.logger.info("Experiment Orchestrator stopped")

    # -----------------------------------------------------------------------
    # Subcomandos
    # -----------------------------------------------------------------------

    def _write_trials(self, output: str, records: List[TrialRecord]) -> str:
        return self.writer.write_rows(sidecar_path(output, "_trials.csv"), TRIAL_COLUMNS,
                                      [record.to_dict() for record in records])

    async def run_kbound(self, output: str, family: Optional[str] = None, **_: Any):
        stability = self.config.stability
        kind = DictionaryKind(family) if family else stability.family
        wavenumber = self.config.experiment.wavenumber
        m_values = expand_range(stability.m_values)
        points = None if kind == DictionaryKind.FOURIER_BESSEL else k_search_points(
            stability.search_n_r, stability.search_n_theta)

        semaphore = asyncio.Semaphore(self.config.workers.max_concurrent_trials)

        async def sweep(alpha: float) -> StabilityReport:
            async with semaphore:
                return await asyncio.to_thread(
                    build_stability_report, kind, wavenumber, alpha, m_values, stability.n,
                    stability.r_exponent, stability.radial_grid, points, None,
                    self.config.experiment.square_scale,
                )

        reports = await asyncio.gather(*(sweep(alpha) for alpha in stability.alphas))

        rows = [
            {'m': m, 'dim': dim, 'K': K, 'alpha': report.alpha, 'lambda': wavenumber}
            for report in reports
            for m, dim, K in zip(report.m_values, report.dimensions, report.K_values)
        ]
        summary = {
            'family': kind.value,
            'wavenumber': wavenumber,
            'n': stability.n,
            'r_exponent': stability.r_exponent,
            'reports': [report.to_dict() for report in reports],
        }
        outputs = [
            self.writer.write_rows(output, KBOUND_COLUMNS, rows),
            self.writer.write_summary(sidecar_path(output, "_summary.yaml"), summary),
        ]
        return outputs, []

    async def run_curve(self, output: str, **_: Any):
        service = self.experiment_service
        records = await self.trial_handler.run_trials(service.work_items())
        rows = aggregate_rows(records)
        outputs = [
            self.writer.write_rows(output, CURVE_COLUMNS, [row.to_dict() for row in rows]),
            self._write_trials(output, records),
        ]
        return outputs, records

    async def run_best(self, output: str, **_: Any):
        rows, records = await self.sweep_handler.best_comparison(
            self.config.best.methods, expand_range(self.config.best.n_values)
        )
        outputs = [
            self.writer.write_rows(output, BEST_COLUMNS, [row.to_dict() for row in rows]),
            self._write_trials(output, records),
        ]
        return outputs, records

    async def run_gcv(self, output: str, alpha: Optional[float] = None, **_: Any):
        alpha = self.config.gcv.alphas[0] if alpha is None else alpha
        result, _, _ = await asyncio.to_thread(
            self.experiment_service.run_gcv, self.config.to_gcv_config(), alpha, self.config.experiment.n
        )
        self.logger.info(f"GCV selected m={result.m_selected} at alpha={alpha}")
        return [self.writer.write_rows(output, GCV_COLUMNS, result.rows())], []

    async def run_gcv_compare(self, output: str, **_: Any):
        gcv = self.config.gcv
        rows = await self.sweep_handler.gcv_comparison(
            self.config.to_gcv_config(), gcv.alphas, expand_range(gcv.n_values), gcv.trials
        )
        return [self.writer.write_rows(output, GCV_COMPARE_COLUMNS, [row.to_dict() for row in rows])], []

    async def run_synth(self, output: str, alpha: Optional[float] = None, **_: Any):
        alpha = self.config.experiment.alphas[0] if alpha is None else alpha
        sample = self.experiment_service.synthesize(alpha, self.config.experiment.n)
        points = sample.points
        rows = [
            {
                'x': float(x), 'y': float(y), 'r': float(r), 'theta': float(theta),
                'on_boundary': int(boundary), 're_y': float(value.real), 'im_y': float(value.imag),
            }
            for (x, y), r, theta, boundary, value in zip(points.xy, points.r, points.theta,
                                                         points.on_boundary, sample.values)
        ]
        return [self.writer.write_rows(output, SYNTH_COLUMNS, rows)], []

    def describe(self) -> Dict[str, Any]:
        """
        Resumen de la configuración activa para el arranque
        """
        experiment = self.config.experiment
        return {
            'wavenumber': experiment.wavenumber,
            'n': experiment.n,
            'alphas': experiment.alphas,
            'method': experiment.method.value,
            'trials': experiment.trials,
            'seed': self.config.rng.seed,
            'rng': self.config.rng.algorithm,
            'database': self.config.database.path,
            'workers': self.config.workers.max_concurrent_trials,
            'quadrature': [self.config.quadrature.n_r, self.config.quadrature.n_theta],
            'noise_sigma': experiment.noise_sigma,
        }
