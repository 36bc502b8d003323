"""Closed-form M/M/1 analytics for the front-line hospital and the relocation trigger."""
from dataclasses import dataclass
from typing import Iterable, List, Tuple

from config import Config


@dataclass(frozen=True)
class QueueParams:
    """Arrival and service rates in patients/hour."""
    lam: float
    mu: float

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError(f"arrival rate must be >= 0, got {self.lam}")


@dataclass(frozen=True)
class RelocationPolicy:
    """Waiting-time threshold in hours."""
    w_max: float = Config.W_MAX_HOURS

    def __post_init__(self):
        if not self.w_max > 0:
            raise ValueError(f"w_max must be > 0, got {self.w_max}")


def _check_stable(params: QueueParams):
    if params.mu <= 0:
        raise ValueError(f"invalid service rate: mu={params.mu}")
    if params.lam >= params.mu:
        raise ValueError(f"unstable queue: lambda={params.lam} >= mu={params.mu}")


def expected_wait(params: QueueParams) -> float:
    """
    Expected time in queue, Wq = lambda / (mu (mu - lambda)).

    Args:
        params: Stable queue rates (lambda < mu)

    Returns:
        Expected wait in hours
    """
    _check_stable(params)
    return params.lam / (params.mu * (params.mu - params.lam))


def utilization_factor(params: QueueParams) -> float:
    """Server utilization rho = lambda / mu."""
    _check_stable(params)
    return params.lam / params.mu


def expected_queue_length(params: QueueParams) -> float:
    """Mean number waiting, Lq = lambda * Wq."""
    return params.lam * expected_wait(params)


def service_rate_from_minutes(mean_service_min: float) -> float:
    """Convert a mean service time in minutes to a rate in patients/hour."""
    if mean_service_min <= 0:
        raise ValueError(f"mean service time must be > 0, got {mean_service_min}")
    return 60.0 / mean_service_min


def should_relocate(wait_so_far: float, policy: RelocationPolicy, occupancy: int, capacity: int) -> bool:
    """
    Decide whether a front-line patient must be relocated.

    Args:
        wait_so_far: Realized waiting time in hours
        policy: Relocation threshold
        occupancy: Beds currently in use at the front-line hospital
        capacity: Bed capacity of the front-line hospital

    Returns:
        True when the wait strictly exceeds w_max or the hospital is full
    """
    return wait_so_far > policy.w_max or occupancy >= capacity


def wq_table(mu: float, lambdas: Iterable[float]) -> List[Tuple[float, float, float]]:
    """
    Tabulate expected waits for a fixed service rate, skipping unstable rates.

    Returns:
        Rows of (lambda, mu, wq_hours)
    """
    rows = []
    for lam in lambdas:
        params = QueueParams(lam=float(lam), mu=float(mu))
        if params.lam >= params.mu:
            continue
        rows.append((params.lam, params.mu, expected_wait(params)))
    return rows
