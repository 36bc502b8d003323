"""Seeded random-number streams, one independent stream per consumer."""
from dataclasses import dataclass
from enum import IntEnum

import numpy as np


class Stream(IntEnum):
    """Stream ids handed out to each random consumer."""
    ARRIVALS = 0
    SERVICE = 1
    DISCHARGE = 2
    ACUITY = 3
    TRAINING_SHUFFLE = 4
    WEIGHT_INIT = 5
    SYNTHETIC = 6


@dataclass(frozen=True)
class RngStream:
    """
    A reproducible random stream identified by (seed, stream_id).

    The stream is a PCG64 generator seeded from a SeedSequence whose spawn key
    is the stream id, so streams sharing a seed are statistically independent
    and the same pair always replays the same sequence.
    """
    seed: int
    stream_id: int

    def __post_init__(self):
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")
        if self.stream_id < 0:
            raise ValueError(f"stream_id must be non-negative, got {self.stream_id}")

    def generator(self) -> np.random.Generator:
        """
        Build a fresh generator positioned at the start of the stream.

        Returns:
            numpy Generator backed by PCG64
        """
        seq = np.random.SeedSequence(entropy=self.seed, spawn_key=(int(self.stream_id),))
        return np.random.Generator(np.random.PCG64(seq))


def stream(seed: int, stream_id: int) -> np.random.Generator:
    """Shortcut for ``RngStream(seed, stream_id).generator()``."""
    return RngStream(seed, int(stream_id)).generator()
