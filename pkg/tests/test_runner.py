import json
import math
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from core.errors import ConfigError, LabError, ScenarioError
from core.grid import gaussian_packet
from experiments.data_models import ExperimentReport
from runner.acceptance import AcceptanceSuite
from runner.config import RunConfig, SweepSpec, parse_config, serialize_config
from runner.pipeline import LabPipeline
from runner.sweep import SweepResult, fit_loglog, run_sweep, with_value
from runner.writers import dumps_report, write_csv, write_density_csv, write_json

BOX_SWEEP = """
scenario = "box_model"
grid_points = 16

[params]
packet_width = 0.5

[sweep]
parameter = "box_length"
values = [8.0, 4.0, 16.0]
"""


class TestParseConfig:
    def test_toml_document(self):
        cfg = parse_config(BOX_SWEEP)
        assert cfg.scenario == "box_model"
        assert cfg.sweep.resolved_values() == [4.0, 8.0, 16.0]
        assert cfg.effective_params() == {'packet_width': 0.5, 'grid_points': 16}

    def test_json_document(self):
        cfg = parse_config('{"scenario": "spin_epr", "hbar": 2.0}')
        assert cfg.effective_params() == {'hbar': 2.0}

    def test_sweep_in_reduced_wavelengths(self):
        cfg = parse_config('{"scenario": "diffraction", "params": {"momentum": 2.0}, '
                           '"sweep": {"parameter": "screen_distance", "values": [1e2, 1e3, 1e4], '
                           '"in_reduced_wavelengths": true}}')
        assert cfg.sweep.in_reduced_wavelengths
        assert cfg.sweep.resolved_values() == [1e2, 1e3, 1e4]

    def test_negative_detector_size_names_the_field(self):
        with pytest.raises(ConfigError, match="params.detector_size"):
            parse_config('{"scenario": "diffraction", "params": {"detector_size": -1.0}}')

    @pytest.mark.parametrize("text, fragment", [
        ('{"scenario": "double_slit"}', "scenario"),
        ('{"scenario": "spin_epr", "colour": "red"}', "colour"),
        ('{"scenario": "box_model", "sweep": {"parameter": "box_length"}}', "sweep"),
        ('{"scenario": "box_model", "sweep": {"parameter": "box_length", "values": [1.0, -2.0]}}', "greater than 0"),
        ('{"scenario": "box_model", "sweep": {"parameter": "packet_width", "values": [0.1, 0.3]}}', "sweep.values"),
        ('{"scenario": "box_model", "sweep": {"parameter": "width", "values": [1.0, 2.0]}}', "sweep.parameter"),
        ('scenario = ', "not valid"),
        ('[1, 2]', "not valid"),
    ])
    def test_rejects_bad_documents(self, text, fragment):
        with pytest.raises(ConfigError, match=fragment):
            parse_config(text)

    def test_detector_position_may_start_at_zero(self):
        cfg = parse_config('{"scenario": "diffraction", "params": {"simulate_grid": false}, '
                           '"sweep": {"parameter": "detector_position", "values": [0.0, 5.0, 10.0]}}')
        result = run_sweep(cfg, jobs=1)
        assert result.values == [0.0, 5.0, 10.0]
        assert result.rows[0]['eq_2_10_ring_probability'] == 0.0
        assert result.rows[2]['eq_2_10_ring_probability'] > 0.0

    def test_signed_parameter_may_cross_zero(self):
        spec = SweepSpec(parameter="c", start=-1.0, stop=1.0, points=3, log=False)
        assert spec.resolved_values() == [-1.0, 0.0, 1.0]

    def test_log_range(self):
        spec = SweepSpec(parameter="box_length", start=1.0, stop=100.0, points=3)
        assert spec.resolved_values() == pytest.approx([1.0, 10.0, 100.0])

    def test_nested_overrides(self):
        cfg = RunConfig(scenario="slit_two_body", hbar=2.0, params={'diffraction': {'momentum': 4.0}})
        params = cfg.effective_params()
        assert params['hbar'] == 2.0
        assert params['diffraction'] == {'momentum': 4.0, 'hbar': 2.0}
        parse_config(serialize_config(cfg.model_copy(update={
            'sweep': SweepSpec(parameter="diffraction.screen_distance", values=[100.0, 1000.0]),
        })))

    def test_serialized_config_round_trips(self):
        cfg = parse_config(BOX_SWEEP)
        assert parse_config(serialize_config(cfg)).model_dump() == cfg.model_dump()
        assert json.loads(serialize_config(cfg))['sweep']['parameter'] == "box_length"


class TestFitLogLog:
    @pytest.mark.parametrize("power", [-1.0, -2.0, 0.5])
    def test_exact_power_laws(self, power):
        rows = [{'L': x, 'y': 3.0 * x ** power} for x in (1.0, 10.0, 100.0, 1000.0)]
        slope, intercept, r2 = fit_loglog(rows, 'y', 'L')
        assert slope == pytest.approx(power, abs=1e-12)
        assert intercept == pytest.approx(math.log10(3.0), abs=1e-12)
        assert r2 == pytest.approx(1.0, abs=1e-12)

    def test_first_column_is_the_default_abscissa(self):
        frame = pd.DataFrame({'L': [1.0, 2.0, 4.0], 'y': [1.0, 0.5, 0.25]})
        assert fit_loglog(frame, 'y')[0] == pytest.approx(-1.0)

    def test_constant_series(self):
        slope, _, r2 = fit_loglog([{'L': x, 'y': 2.0} for x in (1.0, 2.0, 3.0)], 'y', 'L')
        assert slope == pytest.approx(0.0, abs=1e-12)
        assert r2 == 1.0

    @pytest.mark.parametrize("rows", [
        [{'L': 1.0, 'y': 1.0}, {'L': 2.0, 'y': 2.0}],
        [{'L': 1.0, 'y': 1.0}, {'L': 2.0, 'y': -2.0}, {'L': 3.0, 'y': 3.0}],
        [{'L': 1.0, 'y': 1.0}, {'L': 2.0, 'y': None}, {'L': 3.0, 'y': 3.0}],
        [{'L': 1.0}, {'L': 2.0}, {'L': 3.0}],
    ])
    def test_rejects_unfittable_rows(self, rows):
        with pytest.raises(LabError):
            fit_loglog(rows, 'y', 'L')


def test_with_value_handles_dotted_paths():
    params = {'diffraction': {'momentum': 2.0}, 'c': 0.0}
    updated = with_value(params, "diffraction.screen_distance", 10.0)
    assert updated == {'diffraction': {'momentum': 2.0, 'screen_distance': 10.0}, 'c': 0.0}
    assert params == {'diffraction': {'momentum': 2.0}, 'c': 0.0}


class TestWriters:
    def test_json_is_sorted_with_trailing_newline(self, tmp_path):
        path = write_json(tmp_path / "out" / "report.json", {'b': 1, 'a': [1.5, None]})
        text = path.read_text()
        assert text.endswith("}\n")
        assert text.index('"a"') < text.index('"b"')

    def test_failed_write_keeps_previous_file(self, tmp_path):
        path = write_json(tmp_path / "report.json", {'value': 1.0})
        with pytest.raises(ValueError):
            write_json(path, {'value': float("nan")})
        assert json.loads(path.read_text()) == {'value': 1.0}
        assert [p.name for p in tmp_path.iterdir()] == ["report.json"]

    def test_dumps_report_rejects_nan(self):
        with pytest.raises(ValueError):
            dumps_report({'x': float("inf")})

    def test_csv(self, tmp_path):
        path = write_csv(tmp_path / "rows.csv", pd.DataFrame({'L': [1.0, 2.0], 'y': [3.0, 4.0]}))
        assert path.read_text() == "L,y\n1.0,3.0\n2.0,4.0\n"

    def test_density_csv(self, tmp_path, grid):
        wf = gaussian_packet(grid, 0.0, 2.0)
        frame = pd.read_csv(write_density_csv(tmp_path / "density.csv", wf, "momentum"))
        assert list(frame.columns) == ['p', 'density']
        assert len(frame) == grid.n_points
        assert frame['density'].sum() * grid.momentum_spacing == pytest.approx(1.0, abs=1e-9)


class TestSweep:
    @pytest.fixture(scope="class")
    def result(self):
        return run_sweep(parse_config(BOX_SWEEP), jobs=2)

    def test_rows_are_sorted_by_value(self, result):
        assert result.values == [4.0, 8.0, 16.0]
        assert list(result.frame.columns)[0] == "box_length"
        assert [report.inputs['box_length'] for report in result.reports] == [4.0, 8.0, 16.0]

    def test_power_law_fits(self, result):
        assert result.fits['eq_2_27_product_conditioned']['slope'] == pytest.approx(-1.0, abs=1e-6)
        assert result.fits['eq_2_27_sector_probability']['slope'] == pytest.approx(-1.0, abs=1e-9)

    def test_parallel_matches_serial(self, result):
        serial = run_sweep(parse_config(BOX_SWEEP), jobs=1)
        assert serial.rows == result.rows
        assert serial.to_dict()['fits'] == result.to_dict()['fits']

    def test_reduced_wavelength_scaling(self):
        cfg = RunConfig(scenario="diffraction",
                        params={'momentum': 2.0, 'detector_position': 0.0, 'simulate_grid': False},
                        sweep={'parameter': "screen_distance", 'values': [1e2, 1e3, 1e4], 'in_reduced_wavelengths': True})
        result = run_sweep(cfg)
        assert result.values == pytest.approx([50.0, 500.0, 5000.0])
        assert result.fits['eq_2_3_product']['slope'] == pytest.approx(-1.0, abs=1e-9)
        assert 'eq_2_10_ring_probability' not in result.fits

    def test_needs_a_sweep(self):
        with pytest.raises(LabError):
            run_sweep(RunConfig(scenario="spin_epr"))


class TestPipeline:
    def test_scenario_report_file(self, tmp_path):
        written = LabPipeline(output_dir=tmp_path, log_to_file=False).run(RunConfig(scenario="spin_epr"))
        payload = json.loads(written['report'].read_text())
        assert written['report'].name == "spin_epr.json"
        assert payload['scenario'] == "spin_epr"
        assert payload['schema_version'] == 1
        assert payload['evasion']['flag'] is False

    def test_sweep_files(self, tmp_path):
        written = LabPipeline(output_dir=tmp_path, log_to_file=False).run(parse_config(BOX_SWEEP))
        assert written['report'].name == "box_model_sweep_box_length.json"
        frame = pd.read_csv(written['csv'])
        assert frame['box_length'].tolist() == [4.0, 8.0, 16.0]
        np.testing.assert_allclose(frame['eq_2_27_sector_probability'], 0.5 / frame['box_length'])

    def test_output_dir_precedence(self, tmp_path):
        cfg = RunConfig(scenario="spin_epr", output_dir=str(tmp_path / "from_config"))
        assert LabPipeline(log_to_file=False).resolve_output_dir(cfg) == tmp_path / "from_config"
        assert LabPipeline(tmp_path, log_to_file=False).resolve_output_dir(cfg) == tmp_path

    def test_failures_become_scenario_errors(self, tmp_path):
        cfg = RunConfig(scenario="box_model", params={'box_length': 8.0, 'packet_width': 0.5, 'c': 5.0,
                                                      'grid_points': 16})
        with pytest.raises(ScenarioError, match="box_model failed"):
            LabPipeline(output_dir=tmp_path, log_to_file=False).run(cfg)
        assert not list(tmp_path.iterdir())


class TestAcceptance:
    @pytest.mark.parametrize("criterion", ["spin_exactness", "reduction_consistency", "entanglement"])
    def test_quick_criteria_pass(self, criterion):
        result = getattr(AcceptanceSuite(), criterion)()
        assert result['passed'], result['failures']
        assert set(result) == {'criterion', 'name', 'passed', 'details', 'failures'}

    def test_box_model_criterion_checks_the_measured_product(self, monkeypatch):
        def measured_above_bound(**params):
            report = ExperimentReport(scenario="box_model", inputs=params)
            report.record('eq_2_25_product', 1.8)
            report.record('eq_2_27_product_conditioned', 0.2)
            return report

        sweep = SweepResult(scenario="box_model", parameter="box_length",
                            rows=[{'box_length': 64.0, 'eq_2_27_product_conditioned': 0.01}],
                            fits={'eq_2_27_product_conditioned': {'slope': -1.0}})
        monkeypatch.setattr("runner.acceptance.run_box_model", measured_above_bound)
        monkeypatch.setattr(AcceptanceSuite, "sweep", lambda self, *args, **kwargs: sweep)
        result = AcceptanceSuite().box_model()
        assert not result['passed']
        assert any("measured conditioned product 0.200000 not within" in failure for failure in result['failures'])

    def test_box_model_criterion_flags_a_shallow_slope(self, monkeypatch):
        def measured_below_bound(**params):
            report = ExperimentReport(scenario="box_model", inputs=params)
            report.record('eq_2_25_product', 1.8)
            report.record('eq_2_27_product_conditioned', 0.01)
            return report

        sweep = SweepResult(scenario="box_model", parameter="box_length",
                            rows=[{'box_length': 64.0, 'eq_2_27_product_conditioned': 0.01}],
                            fits={'eq_2_27_product_conditioned': {'slope': -0.5}})
        monkeypatch.setattr("runner.acceptance.run_box_model", measured_below_bound)
        monkeypatch.setattr(AcceptanceSuite, "sweep", lambda self, *args, **kwargs: sweep)
        result = AcceptanceSuite().box_model()
        assert result['failures'] == ["measured conditioned product slope -0.5000 is not -1"]

    @pytest.mark.slow
    @pytest.mark.parametrize("criterion", ["box_model", "slit_two_body"])
    def test_full_size_criteria_pass(self, criterion):
        result = getattr(AcceptanceSuite(), criterion)()
        assert result['passed'], result['failures']


@pytest.mark.parametrize("path", sorted((Path(__file__).parent.parent / "configs").glob("*.*")), ids=lambda p: p.name)
def test_example_configs_parse(path):
    cfg = parse_config(path.read_text())
    assert cfg.scenario in path.name
