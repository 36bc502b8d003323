import numpy as np
import pytest

from queueing import (QueueParams, RelocationPolicy, expected_queue_length, expected_wait,
                      service_rate_from_minutes, should_relocate, utilization_factor, wq_table)


def test_no_arrivals_no_wait():
    assert expected_wait(QueueParams(lam=0.0, mu=6.0)) == 0.0


def test_direct_substitution():
    assert expected_wait(QueueParams(lam=3.0, mu=6.0)) == pytest.approx(3.0 / 18.0, abs=1e-15)


def test_unstable_queue():
    with pytest.raises(ValueError, match='unstable queue'):
        expected_wait(QueueParams(lam=6.0, mu=6.0))


@pytest.mark.parametrize('mu', [0.0, -1.0])
def test_invalid_service_rate(mu):
    with pytest.raises(ValueError, match='invalid service rate'):
        expected_wait(QueueParams(lam=0.0, mu=mu))


def test_negative_arrival_rate_rejected():
    with pytest.raises(ValueError):
        QueueParams(lam=-1.0, mu=6.0)


def test_random_stable_pairs_match_arithmetic_oracle():
    rng = np.random.default_rng(2024)
    for _ in range(20):
        mu = float(rng.uniform(1.0, 20.0))
        lam = float(rng.uniform(0.0, mu * 0.99))
        oracle = lam / mu / (mu - lam)
        assert expected_wait(QueueParams(lam=lam, mu=mu)) == pytest.approx(oracle, rel=1e-12, abs=1e-12)


def test_wait_strictly_increases_in_lambda():
    waits = [expected_wait(QueueParams(lam=lam, mu=6.0)) for lam in np.linspace(0.0, 5.9, 60)]
    assert all(b > a for a, b in zip(waits, waits[1:]))


def test_wait_strictly_decreases_in_mu():
    waits = [expected_wait(QueueParams(lam=3.0, mu=mu)) for mu in np.linspace(3.1, 12.0, 60)]
    assert all(b < a for a, b in zip(waits, waits[1:]))


def test_wait_diverges_near_saturation():
    assert expected_wait(QueueParams(lam=6.0 - 1e-9, mu=6.0)) > 1e6


def test_companion_metrics():
    params = QueueParams(lam=3.0, mu=6.0)
    assert utilization_factor(params) == 0.5
    assert expected_queue_length(params) == pytest.approx(0.5)
    assert service_rate_from_minutes(10.0) == 6.0
    with pytest.raises(ValueError):
        service_rate_from_minutes(0.0)


@pytest.mark.parametrize('wait, occupancy, expected', [
    (0.6, 10, True),
    (0.0, 100, True),
    (0.2, 10, False),
    (0.5, 10, False),
])
def test_should_relocate(wait, occupancy, expected):
    assert should_relocate(wait, RelocationPolicy(w_max=0.5), occupancy, 100) is expected


def test_policy_requires_positive_threshold():
    with pytest.raises(ValueError):
        RelocationPolicy(w_max=0.0)


def test_wq_table_skips_unstable_rates():
    rows = wq_table(6.0, [3.0, 6.0, 7.0])
    assert rows == [(3.0, 6.0, pytest.approx(1.0 / 6.0))]
