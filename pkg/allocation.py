"""Min-cost relocation of flagged patients to secondary hospitals."""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import FrozenSet, Iterable, List, Optional, Tuple

logger = logging.getLogger(__name__)


class Acuity(str, Enum):
    LOW = 'Low'
    MEDIUM = 'Medium'
    HIGH = 'High'


ACUITY_LEVELS = (Acuity.LOW, Acuity.MEDIUM, Acuity.HIGH)


class PatientStatus(str, Enum):
    WAITING = 'Waiting'
    IN_SERVICE = 'InService'
    DISCHARGED = 'Discharged'
    RELOCATED = 'Relocated'
    OVERFLOW = 'Overflow'


_TRANSITIONS = {
    PatientStatus.WAITING: {PatientStatus.IN_SERVICE, PatientStatus.RELOCATED, PatientStatus.OVERFLOW},
    PatientStatus.IN_SERVICE: {PatientStatus.DISCHARGED},
    PatientStatus.DISCHARGED: set(),
    PatientStatus.RELOCATED: set(),
    PatientStatus.OVERFLOW: set(),
}


class InconsistentStateError(ValueError):
    """A hospital reports more occupied beds than it has."""


@dataclass
class Hospital:
    """A hospital in the network with live bed occupancy."""
    id: str
    capacity: int
    transfer_cost: float = 0.0
    acuity_capabilities: FrozenSet[Acuity] = frozenset(ACUITY_LEVELS)
    occupancy: int = 0
    front_line: bool = False

    def __post_init__(self):
        self.acuity_capabilities = frozenset(Acuity(a) for a in self.acuity_capabilities)
        if self.capacity < 0:
            raise ValueError(f"hospital {self.id}: capacity must be >= 0, got {self.capacity}")
        if self.transfer_cost < 0:
            raise ValueError(f"hospital {self.id}: transfer_cost must be >= 0, got {self.transfer_cost}")
        if not self.acuity_capabilities:
            raise ValueError(f"hospital {self.id}: acuity_capabilities must not be empty")
        if not 0 <= self.occupancy <= self.capacity:
            raise InconsistentStateError(
                f"hospital {self.id}: occupancy {self.occupancy} outside [0, {self.capacity}]")

    @property
    def free_beds(self) -> int:
        return self.capacity - self.occupancy

    @property
    def current_utilization(self) -> float:
        return self.occupancy / self.capacity if self.capacity else 1.0

    def accepts(self, acuity: Acuity) -> bool:
        return acuity in self.acuity_capabilities and self.free_beds > 0


@dataclass
class Patient:
    """A patient arriving at the front-line hospital."""
    id: int
    acuity: Acuity
    arrival_hour: float
    wait_start: Optional[float] = None
    status: PatientStatus = PatientStatus.WAITING
    hospital_id: Optional[str] = None

    def __post_init__(self):
        self.acuity = Acuity(self.acuity)
        if self.wait_start is None:
            self.wait_start = self.arrival_hour

    def transition(self, new_status: PatientStatus):
        """Move to new_status, refusing any transition outside the lifecycle."""
        if new_status not in _TRANSITIONS[self.status]:
            raise ValueError(f"patient {self.id}: illegal transition {self.status.value} -> {new_status.value}")
        self.status = new_status


@dataclass(frozen=True)
class Assignment:
    """One relocation decision."""
    patient_id: int
    hospital_id: str
    cost: float
    hour: float = 0.0
    acuity: Acuity = Acuity.LOW


def _pick_hospital(patient: Patient, candidates: List[Hospital]) -> Optional[Hospital]:
    feasible = [h for h in candidates if h.accepts(patient.acuity)]
    if not feasible:
        return None
    # cheapest first, then least utilized, then lowest id
    return min(feasible, key=lambda h: (h.transfer_cost, h.current_utilization, h.id))


def allocate_batch(patients: Iterable[Patient], hospitals: Iterable[Hospital],
                   hour: float = 0.0) -> Tuple[List[Assignment], List[int]]:
    """
    Place flagged patients one by one at the cheapest compatible hospital.

    Occupancy of the chosen hospital is updated after every placement, so
    later patients in the batch see the reduced capacity.

    Args:
        patients: Patients flagged for relocation, in flag order
        hospitals: Hospital network; front-line hospitals are never chosen
        hour: Simulation time stamped on the assignments

    Returns:
        (assignments, ids of patients no hospital could take)
    """
    patients = list(patients)
    hospitals = list(hospitals)

    seen = set()
    for patient in patients:
        if patient.id in seen:
            raise ValueError(f"duplicate patient id {patient.id}")
        seen.add(patient.id)
    for hospital in hospitals:
        if not 0 <= hospital.occupancy <= hospital.capacity:
            raise InconsistentStateError(
                f"inconsistent state: hospital {hospital.id} occupancy {hospital.occupancy} "
                f"exceeds capacity {hospital.capacity}")

    receivers = [h for h in hospitals if not h.front_line]
    assignments = []
    overflow = []
    for patient in patients:
        chosen = _pick_hospital(patient, receivers)
        if chosen is None:
            overflow.append(patient.id)
            if patient.status is PatientStatus.WAITING:
                patient.transition(PatientStatus.OVERFLOW)
            logger.debug(f"Patient {patient.id} ({patient.acuity.value}) overflowed: no compatible bed")
            continue
        chosen.occupancy += 1
        if patient.status is PatientStatus.WAITING:
            patient.transition(PatientStatus.RELOCATED)
        patient.hospital_id = chosen.id
        assignments.append(Assignment(patient_id=patient.id, hospital_id=chosen.id,
                                      cost=chosen.transfer_cost, hour=hour, acuity=patient.acuity))
    return assignments, overflow


def assignment_cost(assignments: Iterable[Assignment]) -> float:
    """Total transfer cost of a set of assignments."""
    return float(sum(a.cost for a in assignments))


def utilization(hospital: Hospital, served_count: int) -> float:
    """
    Patients allocated to a hospital divided by its bed capacity.

    Args:
        hospital: Hospital
        served_count: Patients allocated to it

    Returns:
        Dimensionless utilization
    """
    if hospital.capacity <= 0:
        raise ValueError(f"hospital {hospital.id}: capacity must be > 0 to compute utilization")
    return served_count / hospital.capacity
