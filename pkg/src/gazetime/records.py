"""Core data model: gaze streams, fixation tables, trials and datasets.

Streams are stored as parallel read-only numpy arrays so that a loaded
dataset can be shared freely across threads.  Row views (``GazeSample``,
``FixationEvent``) are provided for convenience and for tests that talk
about individual samples.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

PLANNED_DURATIONS = (60.0, 180.0, 300.0)
ACTIVE_ROBOT_COUNTS = (1, 3, 5, 7, 9, 11, 13, 15)
MAX_ESTIMATED_DURATION = 600.0
BASELINE_MAX_SPAN = 120.0


def _readonly(values, dtype=np.float64):
    arr = np.asarray(values, dtype=dtype).copy()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class GazeSample:
    timestamp: float
    pupil_x_norm: float
    pupil_y_norm: float
    diam2d_left: float
    diam2d_right: float
    diam3d_left: float
    diam3d_right: float
    confidence: float


class GazeStream:
    """Columnar store of gaze samples ordered by acquisition time."""

    FIELDS = (
        "timestamp",
        "pupil_x_norm",
        "pupil_y_norm",
        "diam2d_left",
        "diam2d_right",
        "diam3d_left",
        "diam3d_right",
        "confidence",
    )

    def __init__(self, timestamp, pupil_x_norm, pupil_y_norm, diam2d_left,
                 diam2d_right, diam3d_left, diam3d_right, confidence):
        self.timestamp = _readonly(timestamp)
        self.pupil_x_norm = _readonly(pupil_x_norm)
        self.pupil_y_norm = _readonly(pupil_y_norm)
        self.diam2d_left = _readonly(diam2d_left)
        self.diam2d_right = _readonly(diam2d_right)
        self.diam3d_left = _readonly(diam3d_left)
        self.diam3d_right = _readonly(diam3d_right)
        self.confidence = _readonly(confidence)
        n = len(self.timestamp)
        for name in self.FIELDS:
            if len(getattr(self, name)) != n:
                raise ValueError(f"gaze column {name!r} has mismatched length")

    @classmethod
    def empty(cls) -> "GazeStream":
        return cls(*([[]] * len(cls.FIELDS)))

    @classmethod
    def from_samples(cls, samples) -> "GazeStream":
        cols = list(zip(*[(s.timestamp, s.pupil_x_norm, s.pupil_y_norm,
                           s.diam2d_left, s.diam2d_right, s.diam3d_left,
                           s.diam3d_right, s.confidence) for s in samples]))
        if not cols:
            return cls.empty()
        return cls(*cols)

    def __len__(self) -> int:
        return len(self.timestamp)

    def __getitem__(self, i: int) -> GazeSample:
        return GazeSample(*(getattr(self, f)[i] for f in self.FIELDS))

    def __iter__(self) -> Iterator[GazeSample]:
        return (self[i] for i in range(len(self)))

    @property
    def span(self) -> float:
        """Recorded duration: last minus first timestamp (0 if < 2 samples)."""
        if len(self) < 2:
            return 0.0
        return float(self.timestamp[-1] - self.timestamp[0])

    @property
    def extent(self) -> float:
        """Span plus one median sample period.

        An N-sample stream at rate r covers N/r seconds of recording, not
        (N-1)/r; using the extent as the denominator of rate features makes
        a full-stream window agree exactly with the same stream treated as
        a baseline.
        """
        if len(self) < 2:
            return 0.0
        return self.span + float(np.median(np.diff(self.timestamp)))

    def shifted(self, offset: float) -> "GazeStream":
        cols = [self.timestamp + offset] + [getattr(self, f) for f in self.FIELDS[1:]]
        return GazeStream(*cols)

    def time_slice(self, t0: float, t1: float) -> "GazeStream":
        """Samples with timestamp in [t0, t1). Requires monotone timestamps."""
        lo = int(np.searchsorted(self.timestamp, t0, side="left"))
        hi = int(np.searchsorted(self.timestamp, t1, side="left"))
        return GazeStream(*(getattr(self, f)[lo:hi] for f in self.FIELDS))

    def problems(self) -> list[str]:
        out = []
        if len(self) and np.any(np.diff(self.timestamp) < 0):
            out.append("timestamps regress")
        for name, lo, hi in (("pupil_x_norm", 0, 1), ("pupil_y_norm", 0, 1),
                             ("confidence", 0, 1)):
            col = getattr(self, name)
            if len(col) and (np.any(col < lo) or np.any(col > hi)):
                out.append(f"{name} outside [{lo},{hi}]")
        for name in ("diam2d_left", "diam2d_right", "diam3d_left", "diam3d_right"):
            if len(self) and np.any(getattr(self, name) < 0):
                out.append(f"{name} negative")
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, GazeStream):
            return NotImplemented
        return all(np.array_equal(getattr(self, f), getattr(other, f))
                   for f in self.FIELDS)


@dataclass(frozen=True)
class FixationEvent:
    fixation_id: int
    start: float
    duration: float
    dispersion: float
    fix_x_norm: float
    fix_y_norm: float


class FixationTable:
    """Columnar store of fixation events ordered by start time."""

    FIELDS = ("fixation_id", "start", "duration", "dispersion",
              "fix_x_norm", "fix_y_norm")

    def __init__(self, fixation_id, start, duration, dispersion,
                 fix_x_norm, fix_y_norm):
        self.fixation_id = _readonly(fixation_id, dtype=np.int64)
        self.start = _readonly(start)
        self.duration = _readonly(duration)
        self.dispersion = _readonly(dispersion)
        self.fix_x_norm = _readonly(fix_x_norm)
        self.fix_y_norm = _readonly(fix_y_norm)
        n = len(self.fixation_id)
        for name in self.FIELDS:
            if len(getattr(self, name)) != n:
                raise ValueError(f"fixation column {name!r} has mismatched length")

    @classmethod
    def empty(cls) -> "FixationTable":
        return cls(*([[]] * len(cls.FIELDS)))

    @classmethod
    def from_events(cls, events) -> "FixationTable":
        cols = list(zip(*[(e.fixation_id, e.start, e.duration, e.dispersion,
                           e.fix_x_norm, e.fix_y_norm) for e in events]))
        if not cols:
            return cls.empty()
        return cls(*cols)

    def __len__(self) -> int:
        return len(self.start)

    def __getitem__(self, i: int) -> FixationEvent:
        return FixationEvent(int(self.fixation_id[i]), *(
            float(getattr(self, f)[i]) for f in self.FIELDS[1:]))

    def __iter__(self) -> Iterator[FixationEvent]:
        return (self[i] for i in range(len(self)))

    @property
    def end(self) -> np.ndarray:
        return self.start + self.duration

    def shifted(self, offset: float) -> "FixationTable":
        return FixationTable(self.fixation_id, self.start + offset,
                             self.duration, self.dispersion,
                             self.fix_x_norm, self.fix_y_norm)

    def start_slice(self, t0: float, t1: float) -> "FixationTable":
        """Events whose start lies in [t0, t1)."""
        lo = int(np.searchsorted(self.start, t0, side="left"))
        hi = int(np.searchsorted(self.start, t1, side="left"))
        return FixationTable(*(getattr(self, f)[lo:hi] for f in self.FIELDS))

    def problems(self) -> list[str]:
        out = []
        if len(self) == 0:
            return out
        if np.any(self.duration <= 0):
            out.append("non-positive fixation duration")
        if np.any(np.diff(self.fixation_id) <= 0):
            out.append("fixation ids not strictly increasing")
        if np.any(np.diff(self.start) < 0):
            out.append("fixation starts regress")
        if len(self) > 1 and np.any(self.start[1:] < self.end[:-1]):
            out.append("fixations overlap")
        if np.any(self.dispersion < 0):
            out.append("negative dispersion")
        for name in ("fix_x_norm", "fix_y_norm"):
            col = getattr(self, name)
            if np.any(col < 0) or np.any(col > 1):
                out.append(f"{name} outside [0,1]")
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, FixationTable):
            return NotImplemented
        return all(np.array_equal(getattr(self, f), getattr(other, f))
                   for f in self.FIELDS)


@dataclass
class TrialRecord:
    """One experiment run with its baseline streams and questionnaire answers.

    Timestamps are trial-relative seconds: experiment streams start near 0,
    baseline streams start near 0 on their own clock.
    """

    participant_id: str
    trial_id: str
    planned_duration: float
    n_active: int
    gaze: GazeStream
    fixations: FixationTable
    baseline_gaze: GazeStream
    baseline_fixations: FixationTable
    estimated_duration: float
    ppot_likert: int

    def problems(self) -> list[str]:
        """Type-invariant violations (empty list when the record is sound)."""
        out = []
        if self.planned_duration not in PLANNED_DURATIONS:
            out.append(f"planned_duration {self.planned_duration} not in "
                       f"{PLANNED_DURATIONS}")
        if self.n_active not in ACTIVE_ROBOT_COUNTS:
            out.append(f"n_active {self.n_active} not in {ACTIVE_ROBOT_COUNTS}")
        if not 0.0 <= self.estimated_duration <= MAX_ESTIMATED_DURATION:
            out.append("estimated_duration outside [0, 600]")
        if self.ppot_likert not in (1, 2, 3, 4, 5):
            out.append("ppot_likert outside 1..5")
        if self.baseline_gaze.span > BASELINE_MAX_SPAN + 1e-6:
            out.append("baseline longer than the two-minute video")
        for label, table in (("gaze", self.gaze),
                             ("fixations", self.fixations),
                             ("baseline gaze", self.baseline_gaze),
                             ("baseline fixations", self.baseline_fixations)):
            out.extend(f"{label}: {p}" for p in table.problems())
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, TrialRecord):
            return NotImplemented
        return (self.participant_id == other.participant_id
                and self.trial_id == other.trial_id
                and self.planned_duration == other.planned_duration
                and self.n_active == other.n_active
                and self.estimated_duration == other.estimated_duration
                and self.ppot_likert == other.ppot_likert
                and self.gaze == other.gaze
                and self.fixations == other.fixations
                and self.baseline_gaze == other.baseline_gaze
                and self.baseline_fixations == other.baseline_fixations)


@dataclass(frozen=True)
class ExclusionRecord:
    participant_id: str
    trial_id: str
    reason: str


@dataclass
class Dataset:
    trials: list[TrialRecord] = field(default_factory=list)
    screening_log: list[ExclusionRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.trials)

    def participants(self) -> list[str]:
        seen = dict.fromkeys(t.participant_id for t in self.trials)
        return list(seen)

    def trial_by_id(self, trial_id: str) -> TrialRecord:
        for t in self.trials:
            if t.trial_id == trial_id:
                return t
        raise KeyError(trial_id)
