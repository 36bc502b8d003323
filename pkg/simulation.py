"""Discrete-event simulation of the front-line hospital and its relocation network."""
import logging
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from allocation import (ACUITY_LEVELS, Assignment, Hospital, Patient, PatientStatus,
                        allocate_batch, utilization)
from event_handler import EventHandler, LoggedEvent, parse_detail
from event_queue import EventQueue, EventType
from forecast import ArrivalSeries
from queueing import RelocationPolicy, should_relocate
from rng import Stream, stream
from scenario import HospitalSpec, ScenarioConfig

logger = logging.getLogger(__name__)

REASON_WAIT = 'wait_exceeded'
REASON_FULL = 'front_line_full'


class InvariantViolation(RuntimeError):
    """The engine's bookkeeping broke a capacity or conservation invariant."""


def generate_arrivals(rate_per_hour: float, hour_index: int, rng: np.random.Generator,
                      deterministic: bool = False) -> np.ndarray:
    """
    Sample arrival times within one hour at a constant rate.

    Args:
        rate_per_hour: Poisson rate for the hour
        hour_index: Hour being sampled; times fall in [hour_index, hour_index + 1)
        rng: Arrival random stream
        deterministic: Emit round(rate) evenly spaced arrivals instead of sampling

    Returns:
        Sorted arrival times in hours
    """
    if not np.isfinite(rate_per_hour) or rate_per_hour < 0:
        raise ValueError(f"arrival rate must be a finite value >= 0, got {rate_per_hour}")
    if deterministic:
        n = int(round(rate_per_hour))
        times = hour_index + (np.arange(n) + 0.5) / max(n, 1)
    else:
        n = int(rng.poisson(rate_per_hour))
        times = np.sort(hour_index + rng.random(n))
    # hour_index + u can round up to the next hour for u just below 1
    return np.minimum(times, np.nextafter(float(hour_index + 1), -np.inf))


def sample_service_time(mean_min: float, sd_min: float, rng: np.random.Generator) -> float:
    """
    Draw a triage duration from a normal distribution truncated at zero.

    Args:
        mean_min: Mean in minutes (> 0)
        sd_min: Standard deviation in minutes (>= 0)
        rng: Service random stream

    Returns:
        Strictly positive duration in minutes
    """
    if mean_min <= 0:
        raise ValueError(f"mean service time must be > 0, got {mean_min}")
    if sd_min < 0:
        raise ValueError(f"service time sd must be >= 0, got {sd_min}")
    if sd_min == 0:
        return float(mean_min)
    while True:
        draw = rng.normal(mean_min, sd_min)
        if draw > 0:
            return float(draw)


def hourly_discharge(hospital: Hospital, rate: float, rng: np.random.Generator,
                     eligible: Optional[int] = None) -> int:
    """
    Release Binomial(beds, rate) patients and free their beds.

    Args:
        hospital: Hospital whose occupancy is reduced in place
        rate: Per-patient discharge probability for the hour
        rng: Discharge random stream
        eligible: Beds that may be discharged (default: all occupied beds)

    Returns:
        Number of patients discharged
    """
    if not 0.0 <= rate <= 1.0:
        raise ValueError(f"discharge rate must be in [0, 1], got {rate}")
    pool = hospital.occupancy if eligible is None else min(eligible, hospital.occupancy)
    if pool <= 0:
        return 0
    discharged = int(rng.binomial(pool, rate))
    hospital.occupancy -= discharged
    return discharged


def breach_time(wait_start: float, w_max: float) -> float:
    """First representable time at which the realized wait strictly exceeds w_max."""
    t = wait_start + w_max
    while t - wait_start <= w_max:
        t = float(np.nextafter(t, np.inf))
    return t


@dataclass
class SimulationMetrics:
    """Per-hour and per-hospital results of one run."""
    hospital_ids: List[str]
    capacities: Dict[str, int]
    front_line_id: str
    relocations_per_hour: List[int]
    served_per_hospital: Dict[str, int]
    cumulative_cost_series: List[float]
    acuity_counts_relocated: Dict[str, int]
    utilization_series: Dict[str, List[float]]
    overflow_count: int = 0
    overflow_per_hour: List[int] = field(default_factory=list)
    arrivals_total: int = 0
    assignments: List[Assignment] = field(default_factory=list)
    events: List[LoggedEvent] = field(default_factory=list)

    @classmethod
    def empty(cls, hospitals: Sequence, horizon_hours: int, front_line_id: str = 'H1') -> 'SimulationMetrics':
        ids = [h.id for h in hospitals]
        return cls(
            hospital_ids=ids,
            capacities={h.id: h.capacity for h in hospitals},
            front_line_id=front_line_id,
            relocations_per_hour=[0] * horizon_hours,
            served_per_hospital={hid: 0 for hid in ids},
            cumulative_cost_series=[0.0] * horizon_hours,
            acuity_counts_relocated={a.value: 0 for a in ACUITY_LEVELS},
            utilization_series={hid: [0.0] * horizon_hours for hid in ids},
            overflow_per_hour=[0] * horizon_hours,
        )

    @property
    def horizon_hours(self) -> int:
        return len(self.relocations_per_hour)

    @property
    def total_cost(self) -> float:
        return self.cumulative_cost_series[-1] if self.cumulative_cost_series else 0.0

    @property
    def total_relocated(self) -> int:
        return int(sum(self.relocations_per_hour))

    @property
    def front_line_served(self) -> int:
        return self.served_per_hospital.get(self.front_line_id, 0)

    @property
    def peak_hour(self) -> Optional[int]:
        if not self.relocations_per_hour or not any(self.relocations_per_hour):
            return None
        return int(np.argmax(self.relocations_per_hour))


class Simulation:
    """Event-driven model of arrivals, triage, relocation and discharge."""

    def __init__(self, config: ScenarioConfig, arrivals: ArrivalSeries,
                 check_invariants: bool = True, record_events: bool = True):
        """
        Prepare one run.

        Args:
            config: Validated scenario
            arrivals: Hourly arrival rates covering start_hour .. start_hour + horizon
            check_invariants: Verify capacity and conservation after every event
            record_events: Keep the audit event log in the returned metrics
        """
        self.config = config
        self.rates = arrivals.window(config.start_hour, config.horizon_hours)
        self.check_invariants = check_invariants
        self.policy = RelocationPolicy(w_max=config.w_max_hours)

        self.hospitals = config.build_hospitals()
        self.front = next(h for h in self.hospitals if h.front_line)
        self.metrics = SimulationMetrics.empty(self.hospitals, config.horizon_hours, self.front.id)
        self.log = EventHandler(enabled=record_events)
        self.events = EventQueue()

        self.arrival_rng = stream(config.seed, Stream.ARRIVALS)
        self.service_rng = stream(config.seed, Stream.SERVICE)
        self.discharge_rng = stream(config.seed, Stream.DISCHARGE)
        self.acuity_rng = stream(config.seed, Stream.ACUITY)

        self.patients: List[Patient] = []
        self.queue = deque()
        self.in_triage = 0
        self.admitted: List[int] = []
        self.front_background = self.front.occupancy
        self.status_counts = {status: 0 for status in PatientStatus}
        self.cumulative_cost = 0.0
        self.hour = 0

    def run(self) -> SimulationMetrics:
        """Process every event before the horizon and return the metrics."""
        horizon = self.config.horizon_hours
        deterministic = self.config.arrival_mode == 'deterministic'
        for h in range(horizon):
            for t in generate_arrivals(float(self.rates[h]), h, self.arrival_rng, deterministic):
                self.events.schedule(t, EventType.ARRIVAL)
        for h in range(horizon):
            self.events.schedule(float(h), EventType.HOURLY_DISCHARGE, h)

        handlers = {
            EventType.ARRIVAL: self._on_arrival,
            EventType.SERVICE_COMPLETE: self._on_service_complete,
            EventType.HOURLY_DISCHARGE: self._on_discharge,
            EventType.WAIT_THRESHOLD_BREACH: self._on_breach,
        }
        while len(self.events) and self.events.peek_time() < horizon:
            event = self.events.pop()
            self._close_hours(event.time)
            handlers[event.kind](event.time, event.payload)
            if self.check_invariants:
                self._verify(event.time)
        self._close_hours(float(horizon))

        self.metrics.events = self.log.get_events()
        logger.info(f"Simulation finished: {self.metrics.arrivals_total} arrivals, "
                    f"{self.metrics.total_relocated} relocated, {self.metrics.overflow_count} overflow, "
                    f"cost {self.metrics.total_cost:g}")
        return self.metrics

    # -- event handlers -------------------------------------------------

    def _on_arrival(self, t: float, _payload):
        acuity = ACUITY_LEVELS[int(self.acuity_rng.choice(len(ACUITY_LEVELS), p=self.config.acuity_mix))]
        patient = Patient(id=len(self.patients), acuity=acuity, arrival_hour=t)
        self.patients.append(patient)
        self.status_counts[PatientStatus.WAITING] += 1
        self.metrics.arrivals_total += 1
        self.log.arrival(t, patient.id, acuity.value)

        if should_relocate(0.0, self.policy, self.front.occupancy, self.front.capacity):
            self._relocate(patient, t, REASON_FULL)
            return
        self.queue.append(patient.id)
        self.events.schedule(breach_time(patient.wait_start, self.policy.w_max),
                             EventType.WAIT_THRESHOLD_BREACH, patient.id)
        self._start_service(t)

    def _on_service_complete(self, t: float, patient_id: int):
        self.in_triage -= 1
        self.admitted.append(patient_id)
        self.log.service_complete(t, patient_id, self.front.id)
        self._start_service(t)

    def _on_discharge(self, t: float, _hour):
        rate = self.config.discharge_rate
        for hospital in self.hospitals:
            if hospital is self.front:
                count = self._discharge_front(rate)
            else:
                count = hourly_discharge(hospital, rate, self.discharge_rng)
            self.log.discharge(t, hospital.id, count, hospital.occupancy)
        self._start_service(t)

    def _on_breach(self, t: float, patient_id: int):
        patient = self.patients[patient_id]
        if patient.status is not PatientStatus.WAITING:
            return
        wait = t - patient.wait_start
        if should_relocate(wait, self.policy, self.front.occupancy, self.front.capacity):
            self._relocate(patient, t, REASON_WAIT)

    # -- helpers --------------------------------------------------------

    def _set_status(self, patient: Patient, status: PatientStatus):
        self.status_counts[patient.status] -= 1
        patient.transition(status)
        self.status_counts[status] += 1

    def _start_service(self, t: float):
        while (self.queue and self.in_triage < self.config.triage_servers
               and self.front.occupancy < self.front.capacity):
            patient = self.patients[self.queue.popleft()]
            if patient.status is not PatientStatus.WAITING:
                continue  # relocated while queued
            self._set_status(patient, PatientStatus.IN_SERVICE)
            patient.hospital_id = self.front.id
            self.front.occupancy += 1
            self.in_triage += 1
            self.metrics.served_per_hospital[self.front.id] += 1
            duration = sample_service_time(self.config.service_mean_min, self.config.service_sd_min,
                                           self.service_rng)
            self.log.service_start(t, patient.id, self.front.id, duration)
            self.events.schedule(t + duration / 60.0, EventType.SERVICE_COMPLETE, patient.id)

    def _discharge_front(self, rate: float) -> int:
        # patients still in triage keep their beds; only admitted and background beds are released
        eligible = self.front_background + len(self.admitted)
        count = hourly_discharge(self.front, rate, self.discharge_rng, eligible=eligible)
        if count == 0:
            return 0
        picked = np.sort(self.discharge_rng.choice(eligible, size=count, replace=False))
        from_background = int(np.sum(picked < self.front_background))
        chosen = {int(i) - self.front_background for i in picked if i >= self.front_background}
        self.front_background -= from_background
        kept = []
        for pos, patient_id in enumerate(self.admitted):
            if pos in chosen:
                self._set_status(self.patients[patient_id], PatientStatus.DISCHARGED)
            else:
                kept.append(patient_id)
        self.admitted = kept
        return count

    def _relocate(self, patient: Patient, t: float, reason: str):
        wait = t - patient.wait_start
        occupancy, capacity = self.front.occupancy, self.front.capacity
        self.status_counts[PatientStatus.WAITING] -= 1
        assignments, overflow = allocate_batch([patient], self.hospitals, hour=t)
        self.status_counts[patient.status] += 1
        hour = min(int(t), self.config.horizon_hours - 1)
        if overflow:
            self.metrics.overflow_count += 1
            self.metrics.overflow_per_hour[hour] += 1
            self.log.overflow(t, patient.id, reason, wait, occupancy, capacity)
            if self.metrics.overflow_count == 1:
                logger.warning(f"Hour {hour}: no secondary hospital could take patient {patient.id}; "
                               f"further overflow is counted without warning")
            return
        assignment = assignments[0]
        self.cumulative_cost += assignment.cost
        self.metrics.assignments.append(assignment)
        self.metrics.relocations_per_hour[hour] += 1
        self.metrics.served_per_hospital[assignment.hospital_id] += 1
        self.metrics.acuity_counts_relocated[patient.acuity.value] += 1
        self.log.relocation(t, patient.id, assignment.hospital_id, reason, wait, assignment.cost,
                            occupancy, capacity)

    def _close_hours(self, t: float):
        while self.hour < self.config.horizon_hours and t >= self.hour + 1:
            self._snapshot(self.hour)
            self.hour += 1

    def _snapshot(self, hour: int):
        self.metrics.cumulative_cost_series[hour] = self.cumulative_cost
        for hospital in self.hospitals:
            self.metrics.utilization_series[hospital.id][hour] = hospital.current_utilization

    def _verify(self, t: float):
        for hospital in self.hospitals:
            if not 0 <= hospital.occupancy <= hospital.capacity:
                raise InvariantViolation(
                    f"t={t}: hospital {hospital.id} occupancy {hospital.occupancy} outside [0, {hospital.capacity}]")
        in_service = self.in_triage + len(self.admitted)
        if self.status_counts[PatientStatus.IN_SERVICE] != in_service:
            raise InvariantViolation(
                f"t={t}: {self.status_counts[PatientStatus.IN_SERVICE]} patients in service, "
                f"bed bookkeeping says {in_service}")
        if self.front.occupancy != self.front_background + in_service:
            raise InvariantViolation(
                f"t={t}: front-line occupancy {self.front.occupancy} != background "
                f"{self.front_background} + in service {in_service}")
        accounted = sum(self.status_counts.values())
        if accounted != self.metrics.arrivals_total:
            raise InvariantViolation(f"t={t}: {self.metrics.arrivals_total} arrivals but {accounted} accounted for")
        if self.status_counts[PatientStatus.RELOCATED] != len(self.metrics.assignments):
            raise InvariantViolation(f"t={t}: relocated count does not match assignments")
        if self.status_counts[PatientStatus.OVERFLOW] != self.metrics.overflow_count:
            raise InvariantViolation(f"t={t}: overflow count does not match patient statuses")


def run(config: ScenarioConfig, arrivals: ArrivalSeries, check_invariants: bool = True,
        record_events: bool = True) -> SimulationMetrics:
    """
    Simulate one scenario.

    Args:
        config: Validated scenario
        arrivals: Hourly arrival rates (historical series or forecast)
        check_invariants: Verify capacity and conservation after every event
        record_events: Keep the event log in the metrics

    Returns:
        Metrics of the run; identical inputs give identical metrics
    """
    needed = config.start_hour + config.horizon_hours
    if len(arrivals) < needed:
        raise ValueError(f"arrival data covers {len(arrivals)} hours but the scenario needs {needed} "
                         f"(start_hour={config.start_hour}, horizon_hours={config.horizon_hours})")
    return Simulation(config, arrivals, check_invariants, record_events).run()


@dataclass
class SummaryReport:
    """Tabular datasets behind the result charts."""
    relocations: List[Tuple[int, int]]
    distribution: List[Tuple[str, int]]
    cost: List[Tuple[int, float]]
    acuity: List[Tuple[str, int]]
    utilization: List[Tuple[int, str, float]]
    utilization_spread: float
    total_cost: float
    total_relocated: int
    overflow: int

    @property
    def total_served(self) -> int:
        return sum(served for _, served in self.distribution)


def summarize(metrics: SimulationMetrics, hospitals: Iterable = None) -> SummaryReport:
    """
    Turn run metrics into report rows.

    Utilization spread is max minus min of served/capacity across the
    receiving (non front-line) hospitals.

    Args:
        metrics: Run metrics
        hospitals: Hospitals or HospitalSpecs (default: ids and capacities stored in metrics)

    Returns:
        SummaryReport
    """
    if hospitals is None:
        hospitals = [Hospital(id=hid, capacity=metrics.capacities.get(hid, 0))
                     for hid in metrics.hospital_ids]
    hospitals = [h.build(front_line=h.id == metrics.front_line_id) if isinstance(h, HospitalSpec) else h
                 for h in hospitals]

    receivers = [h for h in hospitals if h.id != metrics.front_line_id and h.capacity > 0]
    shares = [utilization(h, metrics.served_per_hospital.get(h.id, 0)) for h in receivers]
    spread = (max(shares) - min(shares)) if shares else 0.0

    hours = range(metrics.horizon_hours)
    return SummaryReport(
        relocations=[(h, int(metrics.relocations_per_hour[h])) for h in hours],
        distribution=[(h.id, int(metrics.served_per_hospital.get(h.id, 0))) for h in hospitals],
        cost=[(h, float(metrics.cumulative_cost_series[h])) for h in hours],
        acuity=[(a.value, int(metrics.acuity_counts_relocated.get(a.value, 0))) for a in ACUITY_LEVELS],
        utilization=[(h, hid, float(metrics.utilization_series[hid][h]))
                     for h in hours for hid in metrics.hospital_ids if hid in metrics.utilization_series],
        utilization_spread=float(spread),
        total_cost=float(metrics.total_cost),
        total_relocated=metrics.total_relocated,
        overflow=int(metrics.overflow_count),
    )


def audit_relocations(events: Iterable[LoggedEvent], w_max: float) -> List[str]:
    """
    Re-check every logged relocation against its recorded trigger.

    Returns:
        Descriptions of relocations whose trigger does not hold (empty when sound)
    """
    problems = []
    for event in events:
        if event.event not in ('relocate', 'overflow'):
            continue
        detail = parse_detail(event.detail)
        reason = detail.get('reason')
        wait = float(detail.get('wait', 'nan'))
        occupancy = int(detail.get('front_occupancy', -1))
        capacity = int(detail.get('front_capacity', -1))
        if reason == REASON_WAIT and not wait > w_max:
            problems.append(f"patient {event.patient_id}: wait {wait} does not exceed {w_max}")
        elif reason == REASON_FULL and occupancy != capacity:
            problems.append(f"patient {event.patient_id}: front line at {occupancy}/{capacity}, not full")
        elif reason not in (REASON_WAIT, REASON_FULL):
            problems.append(f"patient {event.patient_id}: unknown relocation reason {reason!r}")
    return problems


@dataclass(frozen=True)
class SweepRow:
    seed: int
    relocated: int
    overflow: int
    total_cost: float
    peak_hour: Optional[int]
    front_line_served: int


def _run_seed(args) -> Tuple[int, SimulationMetrics]:
    config, arrivals, seed, check_invariants = args
    return seed, run(config.with_overrides(seed=seed), arrivals, check_invariants=check_invariants)


def run_sweep(config: ScenarioConfig, arrivals: ArrivalSeries, seeds: Iterable[int], jobs: int = 1,
              check_invariants: bool = False) -> List[Tuple[SweepRow, SimulationMetrics]]:
    """
    Run independent replications of a scenario, one per seed.

    Args:
        config: Scenario (its own seed is replaced by each sweep seed)
        arrivals: Arrival data shared by every run
        seeds: Seeds to run
        jobs: Worker processes (1 runs in-process)
        check_invariants: Verify invariants inside every run

    Returns:
        (summary row, metrics) per seed, in seed order
    """
    tasks = [(config, arrivals, int(seed), check_invariants) for seed in seeds]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_seed, tasks))
    else:
        results = [_run_seed(task) for task in tasks]
    rows = []
    for seed, metrics in results:
        rows.append((SweepRow(seed=seed, relocated=metrics.total_relocated, overflow=metrics.overflow_count,
                              total_cost=metrics.total_cost, peak_hour=metrics.peak_hour,
                              front_line_served=metrics.front_line_served), metrics))
    return rows
