"""Shared builders for the test suite."""

import numpy as np
import pytest

from gazetime.records import Dataset, FixationTable, GazeStream, TrialRecord


def make_gaze(timestamps, diam=3.0, confidence=0.95, x=0.5, y=0.5,
              diam2d=None):
    """Uniform gaze stream with constant columns unless overridden."""
    t = np.asarray(timestamps, dtype=float)
    n = len(t)

    def col(value):
        arr = np.asarray(value, dtype=float)
        return np.full(n, arr) if arr.ndim == 0 else arr

    d3 = col(diam)
    d2 = col(diam2d) if diam2d is not None else 10.0 * d3
    return GazeStream(t, col(x), col(y), d2, d2, d3, d3, col(confidence))


def make_fixations(rows):
    """Rows of (start, duration, x, y[, dispersion]); ids are sequential."""
    if not rows:
        return FixationTable.empty()
    ids = list(range(1, len(rows) + 1))
    starts = [r[0] for r in rows]
    durs = [r[1] for r in rows]
    xs = [r[2] for r in rows]
    ys = [r[3] for r in rows]
    disps = [r[4] if len(r) > 4 else 1.0 for r in rows]
    return FixationTable(ids, starts, durs, disps, xs, ys)


def regular_fixations(span, period=0.5, duration=0.3):
    rows = []
    t = 0.05
    while t + duration <= span:
        rows.append((t, duration, 0.4, 0.6))
        t += period
    return make_fixations(rows)


def make_trial(duration=60.0, rate=60.0, participant="p01", trial="p01_t01",
               n_active=1, estimated=30.0, likert=3, diam=3.0,
               baseline_diam=3.0, baseline_duration=120.0):
    """Well-formed trial with uniform streams and a full baseline."""
    n = int(duration * rate)
    nb = int(baseline_duration * rate)
    return TrialRecord(
        participant_id=participant,
        trial_id=trial,
        planned_duration=float(duration),
        n_active=n_active,
        gaze=make_gaze(np.arange(n) / rate, diam=diam),
        fixations=regular_fixations(duration),
        baseline_gaze=make_gaze(np.arange(nb) / rate, diam=baseline_diam),
        baseline_fixations=regular_fixations(baseline_duration),
        estimated_duration=float(estimated),
        ppot_likert=likert,
    )


@pytest.fixture
def small_dataset():
    trials = [
        make_trial(trial=f"p0{p}_t0{i}", participant=f"p0{p}",
                   estimated=[30.0, 90.0][i % 2], likert=[2, 4][i % 2])
        for p in (1, 2) for i in (1, 2)
    ]
    return Dataset(trials=trials, screening_log=[])
