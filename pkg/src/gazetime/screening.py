"""Trial validity screening.

The recording pipeline can lose calibration or drop streams mid-trial, so
every trial passes a deterministic screen before analysis.  Reasons form a
closed set; each check can be toggled off.  Disordered or overlapping
fixations are reported under the timestamp reason since they are ordering
violations of the same clock.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .records import TrialRecord

REASON_EMPTY_STREAM = "empty stream"
REASON_NON_MONOTONE = "non-monotone timestamps"
REASON_LOW_CONFIDENCE = "low confidence"
REASON_MISSING_BASELINE = "missing baseline"

SCREENING_REASONS = (REASON_EMPTY_STREAM, REASON_NON_MONOTONE,
                     REASON_LOW_CONFIDENCE, REASON_MISSING_BASELINE)

DEFAULT_CONFIDENCE_CUTOFF = 0.6  # customary eye-tracker quality cutoff


@dataclass(frozen=True)
class ScreeningPolicy:
    check_empty_streams: bool = True
    check_monotone_timestamps: bool = True
    min_mean_confidence: float | None = DEFAULT_CONFIDENCE_CUTOFF
    require_baseline: bool = True


def _gaze_monotone(stream) -> bool:
    return len(stream) < 2 or bool(np.all(np.diff(stream.timestamp) >= 0))


def _fixations_ordered(table) -> bool:
    if len(table) < 2:
        return True
    return (bool(np.all(np.diff(table.fixation_id) > 0))
            and bool(np.all(np.diff(table.start) >= 0))
            and bool(np.all(table.start[1:] >= table.end[:-1])))


def screen_trial(trial: TrialRecord,
                 policy: ScreeningPolicy = ScreeningPolicy()) -> str | None:
    """Return the exclusion reason, or None when the trial is retained."""
    if policy.check_empty_streams and (len(trial.gaze) == 0
                                       or len(trial.fixations) == 0):
        return REASON_EMPTY_STREAM
    if policy.check_monotone_timestamps:
        if not (_gaze_monotone(trial.gaze)
                and _gaze_monotone(trial.baseline_gaze)):
            return REASON_NON_MONOTONE
        if not (_fixations_ordered(trial.fixations)
                and _fixations_ordered(trial.baseline_fixations)):
            return REASON_NON_MONOTONE
    if policy.min_mean_confidence is not None and len(trial.gaze):
        if float(np.mean(trial.gaze.confidence)) < policy.min_mean_confidence:
            return REASON_LOW_CONFIDENCE
    if policy.require_baseline and len(trial.baseline_gaze) < 2:
        return REASON_MISSING_BASELINE
    return None
