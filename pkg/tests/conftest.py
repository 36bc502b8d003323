"""Shared fixtures."""
import os

import numpy as np
import pytest

from forecast import ArrivalSeries
from scenario import load_scenario, reference_scenario
from synthetic import SyntheticSpec, generate_synthetic

REPO_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
SCENARIO_DIR = os.path.join(REPO_ROOT, 'scenarios')


@pytest.fixture
def reference_config():
    return load_scenario(os.path.join(SCENARIO_DIR, 'reference.json'))


@pytest.fixture
def early_peak_config():
    return load_scenario(os.path.join(SCENARIO_DIR, 'early_peak.json'))


@pytest.fixture
def early_peak_arrivals(early_peak_config):
    return ArrivalSeries(early_peak_config.arrival_source.params['rates'])


@pytest.fixture
def reference_arrivals():
    return generate_synthetic(SyntheticSpec(days=1))


@pytest.fixture(scope='session')
def synthetic_month():
    return generate_synthetic(SyntheticSpec())


@pytest.fixture
def zero_arrivals():
    return ArrivalSeries(np.zeros(24))


@pytest.fixture
def small_config():
    return reference_scenario()


@pytest.fixture
def write_csv(tmp_path):
    """Factory writing an hourly CSV under tmp_path and returning its path."""
    def _write(name, values, header='hour,arrivals'):
        path = tmp_path / name
        lines = [header] + [f"{h},{v}" for h, v in enumerate(values)]
        path.write_text('\n'.join(lines) + '\n')
        return str(path)
    return _write
