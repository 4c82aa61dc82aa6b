import json

import pandas as pd
import pytest

from conftest import TWO_STATE_MODEL, make_raw
from smc_stability.common.config import TheorySpec, read_config, theory_warnings
from smc_stability.common.constants import (CONFIGS_DIR, Defaults, ExitCode, ExperimentKind,
                                           MsgForUser)
from smc_stability.common.exceptions import ConfigError
from smc_stability.common.file_worker import (dict_from_json_file, matrix_from_csv,
                                              matrix_to_csv, write_json_atomic)
from smc_stability.launch_stability_lab import main
from smc_stability.stabilitylab.experiment_runner import write_outcome
from smc_stability.stabilitylab.reports import ExperimentOutcome


class TestParseConfig:

    def test_seed_is_required(self, config_from):
        with pytest.raises(ConfigError) as error:
            config_from({'experiment': 'run'})
        assert error.value.path == 'seed'

    def test_unknown_key(self, config_from):
        with pytest.raises(ConfigError) as error:
            config_from(make_raw('run', grids={'n': [5], 'm': [1]}))
        assert error.value.path == 'grids.m'

    def test_unknown_experiment(self, config_from):
        with pytest.raises(ConfigError) as error:
            config_from(make_raw('sweep'))
        assert error.value.path == 'experiment'

    def test_unknown_target(self, config_from):
        with pytest.raises(ConfigError) as error:
            config_from(make_raw('run', model={'target': {'name': 'banana'}}))
        assert error.value.path == 'model.target.name'

    def test_beta_range(self, config_from):
        with pytest.raises(ConfigError):
            config_from(make_raw('run', model={'beta': 1.0}))

    def test_invalid_json(self, tmp_path):
        path = tmp_path / 'broken.json'
        path.write_text('{"experiment": ', encoding='utf-8')
        with pytest.raises(ConfigError):
            read_config(path)

    def test_defaults(self, config_from):
        config = config_from(make_raw('run'))
        assert config.kind is ExperimentKind.RUN
        assert config.grids.fixed_n == config.grids.n[0]
        assert config.model.schedule.gamma_floor == 0.7
        assert config.warnings == ()
        assert config.replicates == Defaults.REPLICATES.value
        assert config.grids.n == Defaults.N_GRID.value
        assert config.grids.N == Defaults.PARTICLES_GRID.value
        assert config.model.beta == Defaults.BETA.value

    def test_low_gamma_floor_warns(self, config_from):
        config = config_from(make_raw('run', model={'schedule': {'gamma_floor': 0.3}}))
        assert len(config.warnings) == 1
        assert config.warnings[0].startswith('(1+s)p(1-γ̲)/γ̲ = 4.67 ≥ 1')

    def test_theory_warnings(self):
        warnings = theory_warnings(TheorySpec(alpha=1.0, p=1.0, s=1.0), 0.9)
        assert warnings[0].startswith('αtp = 2.00')
        assert theory_warnings(TheorySpec(), 0.9) == []

    @pytest.mark.parametrize('path', sorted(CONFIGS_DIR.glob('*.json')), ids=lambda path: path.stem)
    def test_shipped_configs_parse(self, path):
        config = read_config(path)
        assert config.kind.value == dict_from_json_file(path)['experiment']


def test_matrix_csv_keeps_all_digits():
    matrix = [[0.1, 1 / 3], [2 / 3, 0.9]]
    assert (matrix_from_csv(matrix_to_csv(matrix)) == pd.DataFrame(matrix).to_numpy()).all()


def test_json_replaces_non_finite(tmp_path):
    path = write_json_atomic({'value': float('nan'), 'kind': ExperimentKind.RUN},
                             tmp_path / 'x.json')
    assert json.loads(path.read_text(encoding='utf-8')) == {'value': None, 'kind': 'run'}


class TestCommandLine:

    def test_validate(self, config_file, capsys):
        assert main(['validate', str(config_file(make_raw('run', model=TWO_STATE_MODEL)))]) == 0
        assert MsgForUser.CONFIG_IS_VALID.value in capsys.readouterr().out

    def test_validate_malformed(self, config_file):
        assert main(['validate', str(config_file({'experiment': 'run'}))]) == 1

    def test_run_writes_outputs(self, config_file, tmp_path):
        raw = make_raw('counterexample', counterexample={'epsilon': 1.0, 'delta': [0.0, 0.5]})
        out_dir = tmp_path / 'out'
        assert main(['run', str(config_file(raw)), '--out', str(out_dir), '--workers', '1']) == 0
        summary = dict_from_json_file(out_dir / 'summary.json')
        assert summary['exit_code'] == 0
        assert len(summary['result']['probes']) == 2
        assert (out_dir / 'counterexample.csv').is_file()
        assert (out_dir / 'log_file.log').is_file()

    def test_failed_precondition_exit_code(self, config_file, tmp_path):
        raw = make_raw('drift-check', model=TWO_STATE_MODEL)
        assert main(['run', str(config_file(raw)), '--out', str(tmp_path / 'out')]) == 1

    def test_default_output_dir(self, config_file, tmp_path):
        raw = make_raw('fg-sufficiency', output_dir=str(tmp_path / 'fg'),
                       fg={'f': [1.0, 2.0], 'g': [2.0, 1.0]})
        assert main(['run', str(config_file(raw)), '--workers', '1']) == 0
        assert (tmp_path / 'fg' / 'fg_points.csv').is_file()

    def test_unexpected_error_exit_code(self, config_file, tmp_path, monkeypatch):
        def broken_experiment(config, workers):
            raise ValueError('linregress: мало точек')

        monkeypatch.setattr('smc_stability.launch_stability_lab.run_experiment', broken_experiment)
        out_dir = tmp_path / 'out'
        raw = make_raw('counterexample', counterexample={'epsilon': 1.0, 'delta': [0.0]})
        assert main(['run', str(config_file(raw)), '--out', str(out_dir)]) == 1
        assert 'ValueError' in (out_dir / 'log_file.log').read_text(encoding='utf-8')
        assert not (out_dir / 'summary.json').exists()


def test_outcome_files_are_written_together(config_from, tmp_path):
    config = config_from(make_raw('counterexample',
                                  counterexample={'epsilon': 1.0, 'delta': [0.0]}))
    tables = {'first.csv': pd.DataFrame({'a': [1.0]})}
    outcome = ExperimentOutcome(ExitCode.SUCCESS, tables=tables, summary={'broken': object()})
    with pytest.raises(TypeError):
        write_outcome(outcome, config, tmp_path)
    assert list(tmp_path.iterdir()) == []

    outcome = ExperimentOutcome(ExitCode.SUCCESS, tables=tables)
    written = write_outcome(outcome, config, tmp_path)
    assert sorted(path.name for path in written) == ['first.csv', 'summary.json']
    assert sorted(path.name for path in tmp_path.iterdir()) == ['first.csv', 'summary.json']
