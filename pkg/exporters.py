"""CSV and manifest export of simulation metrics, training histories and forecasts."""
import json
import logging
import os
import tempfile
from typing import Iterable, List, Sequence

import pandas as pd

from allocation import ACUITY_LEVELS
from event_handler import EVENT_LOG_COLUMNS, LoggedEvent
from forecast import ArrivalSeries, TrainReport
from simulation import SimulationMetrics, SweepRow

logger = logging.getLogger(__name__)

MANIFEST = 'manifest.json'
METRIC_FILES = {
    'relocations.csv': ('hour', 'count'),
    'distribution.csv': ('hospital', 'served'),
    'cost.csv': ('hour', 'cumulative_cost'),
    'acuity.csv': ('level', 'count'),
    'utilization.csv': ('hour', 'hospital', 'utilization'),
}
ASSIGNMENTS_FILE = 'assignments.csv'
ASSIGNMENT_COLUMNS = ('patient_id', 'hospital_id', 'cost', 'hour', 'acuity')
EVENTS_FILE = 'events.csv'
HISTORY_COLUMNS = ('epoch', 'train_loss', 'val_loss')
SWEEP_COLUMNS = ('seed', 'relocated', 'overflow', 'total_cost', 'peak_hour', 'h1_served')


def _atomic_write(path: str, text: str):
    """Write text to path through a temporary file in the same directory."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix='.export-', suffix='.tmp')
    try:
        with os.fdopen(fd, 'w', newline='') as f:
            f.write(text)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise


def write_csv(path: str, columns: Sequence[str], rows: Iterable[Sequence]):
    """Write rows under a fixed header; floats keep full round-trip precision."""
    frame = pd.DataFrame(list(rows), columns=list(columns))
    _atomic_write(path, frame.to_csv(index=False, lineterminator='\n'))


def read_csv(path: str) -> pd.DataFrame:
    return pd.read_csv(path, float_precision='round_trip', keep_default_na=False)


def _metric_rows(metrics: SimulationMetrics) -> dict:
    hours = range(metrics.horizon_hours)
    return {
        'relocations.csv': [(h, int(metrics.relocations_per_hour[h])) for h in hours],
        'distribution.csv': [(hid, int(metrics.served_per_hospital.get(hid, 0))) for hid in metrics.hospital_ids],
        'cost.csv': [(h, float(metrics.cumulative_cost_series[h])) for h in hours],
        'acuity.csv': [(a.value, int(metrics.acuity_counts_relocated.get(a.value, 0))) for a in ACUITY_LEVELS],
        'utilization.csv': [(h, hid, float(metrics.utilization_series[hid][h]))
                            for h in hours for hid in metrics.hospital_ids],
    }


def export_metrics(metrics: SimulationMetrics, out_dir: str, scenario_hash: str = '',
                   warnings: Sequence[str] = (), event_log: bool = False) -> dict:
    """
    Write metric CSVs and manifest.json to a directory.

    Existing files of the same name are replaced atomically. With
    event_log, assignments.csv and events.csv are written too; otherwise
    stale copies left by an earlier export are removed.

    Args:
        metrics: Run metrics
        out_dir: Output directory (created if missing)
        scenario_hash: Hash of the scenario that produced the metrics
        warnings: Messages to record in the manifest
        event_log: Also write the assignment and event audit files

    Returns:
        The manifest written
    """
    os.makedirs(out_dir, exist_ok=True)
    files = []
    for name, rows in _metric_rows(metrics).items():
        write_csv(os.path.join(out_dir, name), METRIC_FILES[name], rows)
        files.append(name)
    files.append(MANIFEST)

    audit_files = (ASSIGNMENTS_FILE, EVENTS_FILE)
    if event_log:
        write_csv(os.path.join(out_dir, ASSIGNMENTS_FILE), ASSIGNMENT_COLUMNS,
                  [(a.patient_id, a.hospital_id, a.cost, a.hour, a.acuity.value) for a in metrics.assignments])
        write_events(metrics.events, os.path.join(out_dir, EVENTS_FILE))
        files.extend(audit_files)
    else:
        for name in audit_files:
            stale = os.path.join(out_dir, name)
            if os.path.exists(stale):
                os.remove(stale)

    manifest = {
        'files': files,
        'scenario_hash': scenario_hash,
        'warnings': list(warnings),
        'front_line_id': metrics.front_line_id,
        'capacities': {hid: int(metrics.capacities.get(hid, 0)) for hid in metrics.hospital_ids},
        'arrivals': int(metrics.arrivals_total),
        'overflow': int(metrics.overflow_count),
    }
    write_manifest(out_dir, manifest)
    logger.info(f"Exported {len(files)} files to {out_dir}")
    return manifest


def write_manifest(out_dir: str, manifest: dict):
    _atomic_write(os.path.join(out_dir, MANIFEST), json.dumps(manifest, indent=2) + '\n')


def read_manifest(out_dir: str) -> dict:
    path = os.path.join(out_dir, MANIFEST)
    if not os.path.exists(path):
        raise FileNotFoundError(f"no {MANIFEST} in {out_dir}")
    with open(path) as f:
        try:
            return json.load(f)
        except json.JSONDecodeError as e:
            raise ValueError(f"{path}: invalid JSON at line {e.lineno}: {e.msg}")


def read_metrics(out_dir: str) -> SimulationMetrics:
    """
    Rebuild metrics from an export directory.

    Args:
        out_dir: Directory written by export_metrics

    Returns:
        SimulationMetrics with the exported values (assignments and events are not restored)
    """
    manifest = read_manifest(out_dir)
    frames = {}
    for name, columns in METRIC_FILES.items():
        path = os.path.join(out_dir, name)
        if not os.path.exists(path):
            raise FileNotFoundError(f"{path} listed in the manifest is missing")
        frame = read_csv(path)
        if tuple(frame.columns) != columns:
            raise ValueError(f"{path}: expected header {','.join(columns)}, got {','.join(frame.columns)}")
        frames[name] = frame

    hospital_ids = [str(h) for h in frames['distribution.csv']['hospital']]
    horizon = len(frames['relocations.csv'])
    utilization = {hid: [0.0] * horizon for hid in hospital_ids}
    for hour, hid, value in frames['utilization.csv'].itertuples(index=False):
        utilization[str(hid)][int(hour)] = float(value)

    return SimulationMetrics(
        hospital_ids=hospital_ids,
        capacities={hid: int(manifest.get('capacities', {}).get(hid, 0)) for hid in hospital_ids},
        front_line_id=manifest.get('front_line_id', hospital_ids[0] if hospital_ids else ''),
        relocations_per_hour=[int(v) for v in frames['relocations.csv']['count']],
        served_per_hospital={hid: int(v) for hid, v in zip(hospital_ids, frames['distribution.csv']['served'])},
        cumulative_cost_series=[float(v) for v in frames['cost.csv']['cumulative_cost']],
        acuity_counts_relocated={str(k): int(v) for k, v in frames['acuity.csv'].itertuples(index=False)},
        utilization_series=utilization,
        overflow_count=int(manifest.get('overflow', 0)),
        arrivals_total=int(manifest.get('arrivals', 0)),
    )


def write_events(events: Iterable[LoggedEvent], path: str):
    rows = [(e.time, e.event, '' if e.patient_id is None else e.patient_id,
             e.hospital_id or '', e.detail) for e in events]
    write_csv(path, EVENT_LOG_COLUMNS, rows)


def read_events(path: str) -> List[LoggedEvent]:
    """Parse an events.csv back into LoggedEvent records."""
    frame = read_csv(path)
    events = []
    for time, event, patient_id, hospital_id, detail in frame.itertuples(index=False):
        events.append(LoggedEvent(
            time=float(time),
            event=str(event),
            patient_id=None if patient_id == '' else int(patient_id),
            hospital_id=None if hospital_id == '' else str(hospital_id),
            detail=str(detail),
        ))
    return events


def write_history(report: TrainReport, path: str):
    """Write per-epoch losses as ``epoch,train_loss,val_loss``."""
    rows = [(i + 1, t, v) for i, (t, v) in enumerate(zip(report.train_loss, report.val_loss))]
    write_csv(path, HISTORY_COLUMNS, rows)


def write_forecast(values: Sequence[float], path: str):
    """Write forecast rates as ``hour,predicted_arrivals`` with hour 0 the first forecast hour."""
    write_csv(path, ('hour', 'predicted_arrivals'), [(h, float(v)) for h, v in enumerate(values)])


def write_series(series: ArrivalSeries, path: str):
    write_csv(path, ('hour', 'arrivals'), [(h, float(v)) for h, v in enumerate(series.values)])


def write_sweep(rows: Iterable[SweepRow], path: str):
    write_csv(path, SWEEP_COLUMNS, [(r.seed, r.relocated, r.overflow, r.total_cost,
                                     '' if r.peak_hour is None else r.peak_hour, r.front_line_served)
                                    for r in rows])
