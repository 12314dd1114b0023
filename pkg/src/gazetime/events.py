"""Saccade derivation and window slicing of trials.

Saccades are operationalized as the gaps between consecutive fixations,
the standard reading when only dispersion-based fixation events are
recorded.  Amplitude is the Euclidean distance between the two fixation
centroids in normalized screen units, so speed is in units of 1/s.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import WindowLongerThanTrial
from .records import FixationTable, GazeStream, TrialRecord, _readonly

WINDOW_SIZES_S = (1.0, 2.0, 5.0, 10.0, 15.0, 20.0, 30.0, 45.0, 60.0)


@dataclass(frozen=True)
class SaccadeEvent:
    start: float
    duration: float
    amplitude: float
    speed: float


class SaccadeTable:
    FIELDS = ("start", "duration", "amplitude", "speed")

    def __init__(self, start, duration, amplitude, speed):
        self.start = _readonly(start)
        self.duration = _readonly(duration)
        self.amplitude = _readonly(amplitude)
        self.speed = _readonly(speed)

    @classmethod
    def empty(cls) -> "SaccadeTable":
        return cls([], [], [], [])

    def __len__(self) -> int:
        return len(self.start)

    def __getitem__(self, i: int) -> SaccadeEvent:
        return SaccadeEvent(*(float(getattr(self, f)[i]) for f in self.FIELDS))

    def __iter__(self) -> Iterator[SaccadeEvent]:
        return (self[i] for i in range(len(self)))

    def start_slice(self, t0: float, t1: float) -> "SaccadeTable":
        lo = int(np.searchsorted(self.start, t0, side="left"))
        hi = int(np.searchsorted(self.start, t1, side="left"))
        return SaccadeTable(*(getattr(self, f)[lo:hi] for f in self.FIELDS))


def derive_saccades(fixations: FixationTable) -> SaccadeTable:
    """One saccade per adjacent fixation pair with a positive gap."""
    if len(fixations) < 2:
        return SaccadeTable.empty()
    gap_start = fixations.end[:-1]
    gaps = fixations.start[1:] - gap_start
    dx = np.diff(fixations.fix_x_norm)
    dy = np.diff(fixations.fix_y_norm)
    keep = gaps > 0
    amplitude = np.hypot(dx[keep], dy[keep])
    duration = gaps[keep]
    return SaccadeTable(gap_start[keep], duration, amplitude,
                        amplitude / duration)


@dataclass(frozen=True)
class WindowSlice:
    """One non-overlapping window of a trial with views of its streams."""

    trial: TrialRecord
    t_start: float
    t_w: float
    gaze: GazeStream
    fixations: FixationTable
    saccades: SaccadeTable


def slice_count(span: float, t_w: float) -> int:
    return int(np.floor(span / t_w + 1e-9))


def slice_trial(trial: TrialRecord, t_w: float,
                saccades: SaccadeTable | None = None) -> list[WindowSlice]:
    """Non-overlapping windows of width t_w, contiguous from 0.

    The trial span is its planned duration (sampled streams stop one sample
    short of the nominal end, which must not cost a window).  The trailing
    remainder shorter than t_w is discarded.  Gaze samples are assigned by
    timestamp in [t_start, t_start + t_w); fixations and saccades by their
    start timestamp.
    """
    if t_w <= 0:
        raise ValueError("t_w must be positive")
    if saccades is None:
        saccades = derive_saccades(trial.fixations)
    n = slice_count(trial.planned_duration, t_w)
    if n == 0:
        warnings.warn(
            f"window of {t_w}s exceeds the {trial.planned_duration}s trial "
            f"{trial.trial_id}", WindowLongerThanTrial, stacklevel=2)
        return []
    out = []
    for k in range(n):
        t0 = k * t_w
        t1 = t0 + t_w
        out.append(WindowSlice(
            trial=trial, t_start=t0, t_w=float(t_w),
            gaze=trial.gaze.time_slice(t0, t1),
            fixations=trial.fixations.start_slice(t0, t1),
            saccades=saccades.start_slice(t0, t1)))
    return out
