import json
import os

import pytest

from exporters import (METRIC_FILES, export_metrics, read_csv, read_events, read_manifest, read_metrics,
                       write_history, write_sweep)
from forecast import TrainReport
from simulation import SimulationMetrics, SweepRow, run


@pytest.fixture
def peak_metrics(early_peak_config, early_peak_arrivals):
    return run(early_peak_config, early_peak_arrivals)


def test_export_writes_six_files(peak_metrics, tmp_path):
    manifest = export_metrics(peak_metrics, str(tmp_path), scenario_hash='abc')
    assert len(manifest['files']) == 6
    assert manifest['scenario_hash'] == 'abc'
    assert sorted(os.listdir(tmp_path)) == sorted(manifest['files'])
    assert read_manifest(str(tmp_path)) == manifest


def test_headers_are_exact(peak_metrics, tmp_path):
    export_metrics(peak_metrics, str(tmp_path))
    for name, columns in METRIC_FILES.items():
        with open(tmp_path / name) as f:
            assert f.readline().rstrip('\n') == ','.join(columns)


def test_round_trip_is_exact(peak_metrics, tmp_path):
    export_metrics(peak_metrics, str(tmp_path))
    restored = read_metrics(str(tmp_path))
    assert restored.relocations_per_hour == peak_metrics.relocations_per_hour
    assert restored.served_per_hospital == peak_metrics.served_per_hospital
    assert restored.cumulative_cost_series == peak_metrics.cumulative_cost_series
    assert restored.acuity_counts_relocated == peak_metrics.acuity_counts_relocated
    assert restored.utilization_series == peak_metrics.utilization_series
    assert restored.capacities == peak_metrics.capacities
    assert restored.overflow_count == peak_metrics.overflow_count


def test_empty_metrics_write_headers_only(early_peak_config, tmp_path):
    metrics = SimulationMetrics.empty(early_peak_config.build_hospitals(), 0)
    export_metrics(metrics, str(tmp_path))
    with open(tmp_path / 'relocations.csv') as f:
        assert f.read() == 'hour,count\n'
    assert read_metrics(str(tmp_path)).relocations_per_hour == []


def test_reexport_replaces_files(peak_metrics, early_peak_config, tmp_path):
    export_metrics(peak_metrics, str(tmp_path), event_log=True)
    assert (tmp_path / 'events.csv').exists()
    empty = SimulationMetrics.empty(early_peak_config.build_hospitals(), 24)
    manifest = export_metrics(empty, str(tmp_path))
    assert not (tmp_path / 'events.csv').exists()
    assert not (tmp_path / 'assignments.csv').exists()
    assert 'events.csv' not in manifest['files']
    assert read_metrics(str(tmp_path)).relocations_per_hour == [0] * 24
    assert not [name for name in os.listdir(tmp_path) if name.endswith('.tmp')]


def test_event_log_files(peak_metrics, tmp_path):
    manifest = export_metrics(peak_metrics, str(tmp_path), event_log=True)
    assert manifest['files'][-2:] == ['assignments.csv', 'events.csv']
    assignments = read_csv(str(tmp_path / 'assignments.csv'))
    assert list(assignments.columns) == ['patient_id', 'hospital_id', 'cost', 'hour', 'acuity']
    assert len(assignments) == len(peak_metrics.assignments)
    assert read_events(str(tmp_path / 'events.csv')) == peak_metrics.events


def test_missing_manifest(tmp_path):
    with pytest.raises(FileNotFoundError):
        read_metrics(str(tmp_path))


def test_unwritable_path(peak_metrics, tmp_path):
    blocker = tmp_path / 'file'
    blocker.write_text('x')
    with pytest.raises(OSError):
        export_metrics(peak_metrics, str(blocker / 'out'))


def test_history_csv(tmp_path):
    report = TrainReport(train_loss=[0.5, 0.25], val_loss=[0.6, 0.3])
    write_history(report, str(tmp_path / 'history.csv'))
    frame = read_csv(str(tmp_path / 'history.csv'))
    assert list(frame.columns) == ['epoch', 'train_loss', 'val_loss']
    assert frame['epoch'].tolist() == [1, 2]
    assert frame['val_loss'].tolist() == [0.6, 0.3]


def test_sweep_csv(tmp_path):
    rows = [SweepRow(seed=1, relocated=3, overflow=0, total_cost=30.0, peak_hour=2, front_line_served=10),
            SweepRow(seed=2, relocated=0, overflow=0, total_cost=0.0, peak_hour=None, front_line_served=4)]
    write_sweep(rows, str(tmp_path / 'sweep.csv'))
    text = (tmp_path / 'sweep.csv').read_text().splitlines()
    assert text[0] == 'seed,relocated,overflow,total_cost,peak_hour,h1_served'
    assert text[2] == '2,0,0,0.0,,4'


def test_manifest_is_valid_json(peak_metrics, tmp_path):
    export_metrics(peak_metrics, str(tmp_path), warnings=['w'])
    with open(tmp_path / 'manifest.json') as f:
        assert json.load(f)['warnings'] == ['w']
