"""Synthetic hourly arrival series with daily troughs, peaks and a weekend dip."""
import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from config import Config
from forecast import ArrivalSeries
from rng import Stream, stream

logger = logging.getLogger(__name__)

HOURS_PER_DAY = 24
WEEKEND = (5, 6)  # Saturday, Sunday with Monday = 0


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters of the synthetic arrival generator."""
    days: int = Config.SYNTH_DAYS
    base_low: float = Config.SYNTH_BASE_LOW
    base_high: float = Config.SYNTH_BASE_HIGH
    trough_hours: Tuple[int, ...] = Config.SYNTH_TROUGH_HOURS
    peak_hours: Tuple[int, ...] = Config.SYNTH_PEAK_HOURS
    weekend_scale: float = Config.SYNTH_WEEKEND_SCALE
    noise_sd: float = Config.SYNTH_NOISE_SD
    seed: int = Config.SEED
    start_weekday: int = Config.SYNTH_START_WEEKDAY

    def __post_init__(self):
        object.__setattr__(self, 'trough_hours', tuple(sorted(int(h) for h in self.trough_hours)))
        object.__setattr__(self, 'peak_hours', tuple(sorted(int(h) for h in self.peak_hours)))
        if not isinstance(self.days, int) or self.days < 1:
            raise ValueError(f"days must be an integer >= 1, got {self.days!r}")
        if not self.base_low > 0:
            raise ValueError(f"base_low must be > 0, got {self.base_low}")
        if self.base_high < self.base_low:
            raise ValueError(f"base_high ({self.base_high}) must be >= base_low ({self.base_low})")
        for name in ('trough_hours', 'peak_hours'):
            hours = getattr(self, name)
            if any(not 0 <= h < HOURS_PER_DAY for h in hours):
                raise ValueError(f"{name} must lie in 0..23, got {list(hours)}")
        if set(self.trough_hours) & set(self.peak_hours):
            raise ValueError("trough_hours and peak_hours must not overlap")
        if not self.weekend_scale > 0:
            raise ValueError(f"weekend_scale must be > 0, got {self.weekend_scale}")
        if self.noise_sd < 0:
            raise ValueError(f"noise_sd must be >= 0, got {self.noise_sd}")
        if not 0 <= self.start_weekday <= 6:
            raise ValueError(f"start_weekday must be in 0..6, got {self.start_weekday}")


def daily_shape(spec: SyntheticSpec) -> np.ndarray:
    """
    Relative intensity of each hour of the day in [0, 1].

    Trough hours sit at 0 and peak hours at 1. Other hours follow a slow
    sinusoid between roughly 0.3 and 0.6, raised next to a peak and lowered
    next to a trough so the transitions are gradual.
    """
    hours = np.arange(HOURS_PER_DAY)
    shape = 0.45 + 0.15 * np.sin(2.0 * np.pi * (hours - 9) / HOURS_PER_DAY)
    for h in spec.peak_hours:
        for neighbour in ((h - 1) % HOURS_PER_DAY, (h + 1) % HOURS_PER_DAY):
            shape[neighbour] = max(shape[neighbour], 0.8)
    for h in spec.trough_hours:
        for neighbour in ((h - 1) % HOURS_PER_DAY, (h + 1) % HOURS_PER_DAY):
            shape[neighbour] = min(shape[neighbour], 0.15)
    shape[list(spec.trough_hours)] = 0.0
    shape[list(spec.peak_hours)] = 1.0
    return shape


def base_curve(spec: SyntheticSpec) -> np.ndarray:
    """Noise-free arrivals for every hour of the series."""
    level = spec.base_low + (spec.base_high - spec.base_low) * daily_shape(spec)
    weekdays = (np.arange(spec.days) + spec.start_weekday) % 7
    day_scale = np.where(np.isin(weekdays, WEEKEND), spec.weekend_scale, 1.0)
    return (day_scale[:, None] * level[None, :]).reshape(-1)


def generate_synthetic(spec: SyntheticSpec = None) -> ArrivalSeries:
    """
    Generate an hourly arrival series.

    Args:
        spec: Generator parameters (defaults give 31 days = 744 hours)

    Returns:
        ArrivalSeries of length days * 24, clamped at zero
    """
    spec = spec or SyntheticSpec()
    values = base_curve(spec)
    if spec.noise_sd > 0:
        values = values + stream(spec.seed, Stream.SYNTHETIC).normal(0.0, spec.noise_sd, values.size)
    values = np.maximum(values, 0.0)
    logger.info(f"Generated synthetic series: {spec.days} days, {values.size} hours, "
                f"range {values.min():.1f}-{values.max():.1f}")
    return ArrivalSeries(values)
