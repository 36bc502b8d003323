"""Event log for simulation runs (arrivals, service, relocations, discharges)."""
import logging
from dataclasses import astuple, dataclass
from typing import List, Optional

from config import Config

logging.basicConfig(
    level=getattr(logging, Config.LOG_LEVEL.upper(), logging.INFO),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

EVENT_LOG_COLUMNS = ('time', 'event', 'patient_id', 'hospital_id', 'detail')


@dataclass(frozen=True)
class LoggedEvent:
    """One row of the audit log."""
    time: float
    event: str
    patient_id: Optional[int] = None
    hospital_id: Optional[str] = None
    detail: str = ''


class EventHandler:
    """Collect simulation events in memory for audit and export."""

    def __init__(self, enabled: bool = True):
        """
        Initialize event handler.

        Args:
            enabled: When False, events are counted but not stored
        """
        self.enabled = enabled
        self.events: List[LoggedEvent] = []
        self.count = 0

    def log_event(self, time: float, event_type: str, patient_id: int = None,
                  hospital_id: str = None, detail: str = ''):
        """
        Log an event.

        Args:
            time: Simulation time in hours
            event_type: Type of event ('arrival', 'relocate', 'discharge', ...)
            patient_id: Patient involved, if any
            hospital_id: Hospital involved, if any
            detail: Free-form detail (reason, counts, waits)
        """
        self.count += 1
        if not self.enabled:
            return
        event = LoggedEvent(time, event_type, patient_id, hospital_id, detail)
        self.events.append(event)
        logger.debug(f"Event: t={time:.4f} {event_type} patient={patient_id} hospital={hospital_id} {detail}")

    def arrival(self, time: float, patient_id: int, acuity: str):
        self.log_event(time, 'arrival', patient_id, None, f"acuity={acuity}")

    def service_start(self, time: float, patient_id: int, hospital_id: str, duration_min: float):
        self.log_event(time, 'service_start', patient_id, hospital_id, f"duration_min={duration_min!r}")

    def service_complete(self, time: float, patient_id: int, hospital_id: str):
        self.log_event(time, 'service_complete', patient_id, hospital_id)

    def relocation(self, time: float, patient_id: int, hospital_id: str, reason: str, wait: float,
                   cost: float, front_occupancy: int, front_capacity: int):
        """
        Log a placed relocation.

        Args:
            time: Simulation time in hours
            patient_id: Relocated patient
            hospital_id: Receiving hospital
            reason: 'wait_exceeded' or 'front_line_full'
            wait: Realized wait in hours when flagged
            cost: Transfer cost charged
            front_occupancy: Front-line beds in use when the patient was flagged
            front_capacity: Front-line bed capacity
        """
        self.log_event(time, 'relocate', patient_id, hospital_id,
                       f"reason={reason};wait={wait!r};cost={cost!r};"
                       f"front_occupancy={front_occupancy};front_capacity={front_capacity}")

    def overflow(self, time: float, patient_id: int, reason: str, wait: float,
                 front_occupancy: int, front_capacity: int):
        self.log_event(time, 'overflow', patient_id, None,
                       f"reason={reason};wait={wait!r};"
                       f"front_occupancy={front_occupancy};front_capacity={front_capacity}")

    def discharge(self, time: float, hospital_id: str, count: int, occupancy: int):
        self.log_event(time, 'discharge', None, hospital_id, f"count={count};occupancy={occupancy}")

    def get_events(self, event_type: str = None, limit: int = None) -> List[LoggedEvent]:
        """
        Get logged events.

        Args:
            event_type: Filter by event type (optional)
            limit: Keep only the most recent N events (optional)

        Returns:
            List of events in log order
        """
        events = self.events
        if event_type:
            events = [e for e in events if e.event == event_type]
        return events[-limit:] if limit else list(events)

    def rows(self) -> List[tuple]:
        """Events as tuples in EVENT_LOG_COLUMNS order."""
        return [astuple(e) for e in self.events]

    def clear_events(self):
        """Clear all events."""
        self.events = []
        self.count = 0


def parse_detail(detail: str) -> dict:
    """Split a 'key=value;key=value' detail string into a dict of strings."""
    if not detail:
        return {}
    return dict(part.split('=', 1) for part in detail.split(';') if '=' in part)
