"""Input handlers for hourly arrival series, forecasts and scenario arrival sources."""
import logging
import os
from dataclasses import fields
from typing import Optional

import numpy as np
import pandas as pd

from forecast import ArrivalSeries
from scenario import ArrivalSource, ScenarioValidationError
from synthetic import SyntheticSpec, generate_synthetic

logger = logging.getLogger(__name__)

SERIES_COLUMNS = ('hour', 'arrivals')
FORECAST_COLUMNS = ('hour', 'predicted_arrivals')


class DataValidationError(ValueError):
    """A data file is malformed; carries the file path and, when known, the line number."""

    def __init__(self, path: str, message: str, line: Optional[int] = None):
        location = f"{path}:{line}" if line is not None else path
        super().__init__(f"{location}: {message}")
        self.path = path
        self.line = line


def _read_hourly(path: str, columns) -> ArrivalSeries:
    if not os.path.exists(path):
        raise FileNotFoundError(f"input file not found: {path}")
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skip_blank_lines=False)
    except pd.errors.EmptyDataError:
        raise DataValidationError(path, f"empty file, expected header {','.join(columns)}")
    except pd.errors.ParserError as e:
        raise DataValidationError(path, f"malformed CSV: {e}")

    header = tuple(c.strip() for c in frame.columns)
    if header != tuple(columns):
        raise DataValidationError(path, f"expected header {','.join(columns)}, got {','.join(header)}", line=1)

    value_column = frame.columns[1]
    values = np.empty(len(frame), dtype=np.float64)
    for idx, (hour_text, value_text) in enumerate(zip(frame[frame.columns[0]], frame[value_column])):
        line = idx + 2  # header is line 1
        if all(pd.isna(v) or not str(v).strip() for v in (hour_text, value_text)):
            raise DataValidationError(path, "blank line", line=line)
        try:
            hour = int(str(hour_text).strip())
            value = float(str(value_text).strip())
        except ValueError:
            raise DataValidationError(path, f"malformed row {hour_text!r},{value_text!r}", line=line)
        if hour != idx:
            if hour > idx:
                raise DataValidationError(path, f"gap in hour index: expected hour {idx}, found {hour}", line=line)
            raise DataValidationError(path, f"hour index out of order: expected hour {idx}, found {hour}", line=line)
        if not np.isfinite(value):
            raise DataValidationError(path, f"non-finite {columns[1]} {value_text!r}", line=line)
        if value < 0:
            raise DataValidationError(path, f"negative {columns[1]} {value!r} at hour {hour}", line=line)
        values[idx] = value

    if values.size == 0:
        raise DataValidationError(path, "no data rows")
    logger.info(f"Loaded {values.size} hourly values from {path}")
    return ArrivalSeries(values)


def load_series(path: str) -> ArrivalSeries:
    """
    Load a historical arrival series.

    Args:
        path: CSV with header ``hour,arrivals``, hours contiguous from 0

    Returns:
        ArrivalSeries
    """
    return _read_hourly(path, SERIES_COLUMNS)


def load_forecast(path: str) -> ArrivalSeries:
    """
    Load forecast output written by the forecast command.

    Args:
        path: CSV with header ``hour,predicted_arrivals``; hour 0 is the first forecast hour

    Returns:
        ArrivalSeries of predicted rates
    """
    return _read_hourly(path, FORECAST_COLUMNS)


def _synthetic_spec(params: dict, seed: int) -> SyntheticSpec:
    known = {f.name for f in fields(SyntheticSpec)}
    for key in params:
        if key not in known:
            raise ScenarioValidationError(f"arrival_source.params.{key}", "unknown synthetic parameter")
    kwargs = dict(params)
    kwargs.setdefault('seed', seed)
    try:
        return SyntheticSpec(**kwargs)
    except (TypeError, ValueError) as e:
        raise ScenarioValidationError('arrival_source.params', str(e))


def load_arrivals(source: ArrivalSource, seed: int) -> ArrivalSeries:
    """
    Resolve a scenario's arrival source to an hourly series.

    Args:
        source: Scenario arrival source
        seed: Scenario seed, used by the synthetic generator unless params override it

    Returns:
        ArrivalSeries
    """
    if source.kind == 'csv':
        return load_series(source.path)
    if source.kind == 'forecast':
        return load_forecast(source.path)
    if source.kind == 'synthetic':
        return generate_synthetic(_synthetic_spec(source.params, seed))
    if source.kind == 'profile':
        try:
            return ArrivalSeries(source.params['rates'])
        except (TypeError, ValueError) as e:
            raise ScenarioValidationError('arrival_source.params.rates', str(e))
    raise ScenarioValidationError('arrival_source.kind', f"unsupported kind {source.kind!r}")
