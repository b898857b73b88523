import pytest
import yaml

from application.services.orchestrator import (
    CURVE_COLUMNS,
    GCV_COLUMNS,
    GCV_COMPARE_COLUMNS,
    KBOUND_COLUMNS,
    SYNTH_COLUMNS,
    TRIAL_COLUMNS,
    ExperimentOrchestrator,
)
from config.experiment_config import ExperimentFile
from domain.entities.experiment import RunStatus
from infrastructure.persistence.trial_repository_impl import TrialRepositoryImpl


def read_lines(path):
    with open(path, encoding='utf-8') as handle:
        return handle.read().splitlines()


@pytest.fixture
def experiment_file(tiny_config):
    return ExperimentFile.model_validate(tiny_config)


@pytest.fixture
async def orchestrator(experiment_file):
    orchestrator = ExperimentOrchestrator(experiment_file)
    assert await orchestrator.initialize()
    yield orchestrator
    await orchestrator.stop()


async def test_synth(orchestrator, tmp_path):
    result = await orchestrator.execute('synth', output=str(tmp_path / "sample.csv"), alpha=0.5)
    assert result.success
    lines = read_lines(result.outputs[0])
    assert lines[0] == ",".join(SYNTH_COLUMNS)
    assert len(lines) == 61
    assert {line.split(',')[4] for line in lines[1:]} <= {'0', '1'}


async def test_kbound_writes_table_and_summary(orchestrator, tmp_path):
    result = await orchestrator.execute('kbound', output=str(tmp_path / "kbound.csv"))
    assert result.success
    csv_path, summary_path = result.outputs
    lines = read_lines(csv_path)
    assert lines[0] == ",".join(KBOUND_COLUMNS)
    assert [line.split(',')[:2] for line in lines[1:]] == [['1', '3'], ['2', '5'], ['3', '7']]
    summary = yaml.safe_load(open(summary_path, encoding='utf-8'))
    assert summary_path.endswith("kbound_summary.yaml")
    assert summary['family'] == 'fourier_bessel'
    assert summary['reports'][0]['admissible']['n'] == 400


async def test_kbound_family_override(orchestrator, tmp_path):
    result = await orchestrator.execute('kbound', output=str(tmp_path / "pw.csv"), family='plane_wave')
    assert result.success
    assert yaml.safe_load(open(result.outputs[1], encoding='utf-8'))['family'] == 'plane_wave'


async def test_curve_persists_trials(orchestrator, experiment_file, tmp_path):
    result = await orchestrator.execute('curve', output=str(tmp_path / "curve.csv"))
    assert result.success
    curve_path, trials_path = result.outputs
    assert read_lines(curve_path)[0] == ",".join(CURVE_COLUMNS)
    # 2 alphas x 2 dimensiones
    assert len(read_lines(curve_path)) == 5
    assert read_lines(trials_path)[0] == ",".join(TRIAL_COLUMNS)
    assert trials_path.endswith("curve_trials.csv")

    repository = TrialRepositoryImpl(experiment_file.database.path)
    run = await repository.get_run(result.run_id)
    assert run.status == RunStatus.COMPLETED
    assert run.output == curve_path
    assert len(await repository.get_trials(result.run_id)) == 8


async def test_curve_is_reproducible(orchestrator, tmp_path):
    first = await orchestrator.execute('curve', output=str(tmp_path / "a" / "curve.csv"))
    second = await orchestrator.execute('curve', output=str(tmp_path / "b" / "curve.csv"))
    assert open(first.outputs[0], 'rb').read() == open(second.outputs[0], 'rb').read()
    assert first.run_id != second.run_id


async def test_gcv(orchestrator, tmp_path):
    result = await orchestrator.execute('gcv', output=str(tmp_path / "gcv.csv"))
    assert result.success
    lines = read_lines(result.outputs[0])
    assert lines[0] == ",".join(GCV_COLUMNS)
    assert sum(int(line.split(',')[3]) for line in lines[1:]) == 1


async def test_gcv_compare(orchestrator, tmp_path):
    result = await orchestrator.execute('gcv-compare', output=str(tmp_path / "compare.csv"))
    assert result.success
    lines = read_lines(result.outputs[0])
    assert lines[0] == ",".join(GCV_COMPARE_COLUMNS)
    assert len(lines) == 3
    assert all(float(line.split(',')[-1]) >= 1.0 for line in lines[1:])


async def test_best(orchestrator, tmp_path):
    result = await orchestrator.execute('best', output=str(tmp_path / "best.csv"))
    assert result.success
    lines = read_lines(result.outputs[0])
    assert [line.split(',')[:2] for line in lines[1:]] == [
        ['fourier_bessel_ls', '40'], ['fourier_bessel_ls', '60'], ['omp', '40'], ['omp', '60'],
    ]


async def test_unknown_command(orchestrator):
    result = await orchestrator.execute('plot')
    assert not result.success
    assert "Unsupported command" in result.message


async def test_failure_marks_run(orchestrator, experiment_file, tmp_path, mocker):
    orchestrator.commands['synth'] = mocker.AsyncMock(side_effect=RuntimeError("boom"))
    result = await orchestrator.execute('synth', output=str(tmp_path / "never.csv"))
    assert not result.success
    assert "boom" in result.message
    run = await TrialRepositoryImpl(experiment_file.database.path).get_run(result.run_id)
    assert run.status == RunStatus.FAILED


async def test_runs_without_database(tiny_config, tmp_path):
    tiny_config['database'] = {'path': None}
    orchestrator = ExperimentOrchestrator(ExperimentFile.model_validate(tiny_config))
    result = await orchestrator.execute('synth', output=str(tmp_path / "synth.csv"))
    assert result.success
    assert orchestrator.repository is None


def test_describe(experiment_file):
    summary = ExperimentOrchestrator(experiment_file).describe()
    assert summary['n'] == 60
    assert summary['seed'] == 4
    assert summary['quadrature'] == [30, 64]
