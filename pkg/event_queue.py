"""Time-ordered event list for the discrete-event engine."""
import heapq
import itertools
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Any, Optional


class EventType(IntEnum):
    """Event kinds; the value is the tie-break priority at equal times."""
    SERVICE_COMPLETE = 0
    HOURLY_DISCHARGE = 1
    ARRIVAL = 2
    WAIT_THRESHOLD_BREACH = 3


@dataclass(order=True, frozen=True)
class Event:
    time: float
    kind: EventType
    seq: int
    payload: Any = field(default=None, compare=False)


class EventQueue:
    """
    Priority queue of events.

    Events come out in non-decreasing time; equal times are ordered by event
    type priority and then by insertion order. Scheduling an event earlier
    than the last one removed is an error.
    """

    def __init__(self):
        self._heap = []
        self._counter = itertools.count()
        self.now = float('-inf')

    def __len__(self):
        return len(self._heap)

    def schedule(self, time: float, kind: EventType, payload: Any = None) -> Event:
        if time < self.now:
            raise ValueError(f"cannot schedule {kind.name} at {time}: clock already at {self.now}")
        event = Event(float(time), EventType(kind), next(self._counter), payload)
        heapq.heappush(self._heap, event)
        return event

    def peek_time(self) -> Optional[float]:
        return self._heap[0].time if self._heap else None

    def pop(self) -> Event:
        if not self._heap:
            raise IndexError("pop from empty event queue")
        event = heapq.heappop(self._heap)
        self.now = event.time
        return event
