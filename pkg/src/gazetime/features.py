"""The 26 window features and per-trial baseline subtraction.

Feature vocabulary (fixed order): 10 eye-movement features computed from
fixation and saccade events, 12 pupil-diameter statistics (mean, max,
population std per eye and per 2d/3d modality) and 4 pupillary-activity
rates.  Every window feature is reported after subtracting the same
feature computed once over the trial's full baseline recording.

Empty aggregates (a window without fixations, saccades or confident
samples) yield 0 before subtraction; setting ``drop_empty_windows``
removes such windows instead.
"""

from __future__ import annotations

import numpy as np
import pandas as pd

from ._parallel import thread_map
from .errors import MissingBaselineError, SchemaMismatchError
from .events import SaccadeTable, WindowSlice, derive_saccades, slice_trial
from .ipa import GRID_RATE_HZ, activity_rate
from .records import Dataset, FixationTable, GazeStream, TrialRecord

EYE_MOVEMENT_FEATURES = (
    "fixation_freq",
    "fixation_dur_mean",
    "fixation_dur_max",
    "fixation_disp_mean",
    "fixation_disp_max",
    "saccade_freq",
    "saccade_dur_mean",
    "saccade_dur_max",
    "saccade_speed_mean",
    "saccade_speed_max",
)
PUPIL_STAT_FEATURES = tuple(
    f"diam{dim}_{eye}_{stat}"
    for dim in ("2d", "3d")
    for eye in ("left", "right")
    for stat in ("mean", "max", "std")
)
IPA_FEATURES = ("ipa_2d_left", "ipa_2d_right", "ipa_3d_left", "ipa_3d_right")

FEATURE_NAMES = EYE_MOVEMENT_FEATURES + PUPIL_STAT_FEATURES + IPA_FEATURES

PROVENANCE_COLUMNS = ("participant_id", "trial_id", "t_start_s", "t_w_s",
                      "planned_duration_s", "n_active")
FEATURES_CSV_COLUMNS = PROVENANCE_COLUMNS + FEATURE_NAMES

DEFAULT_MIN_CONFIDENCE = 0.6


def _mean_max(values: np.ndarray) -> tuple[float, float]:
    if len(values) == 0:
        return 0.0, 0.0
    return float(np.mean(values)), float(np.max(values))


def eye_movement_features(fixations: FixationTable, saccades: SaccadeTable,
                          span: float) -> np.ndarray:
    """Frequencies are event counts over the window span; empty sets give 0."""
    fix_mean, fix_max = _mean_max(fixations.duration)
    disp_mean, disp_max = _mean_max(fixations.dispersion)
    sac_mean, sac_max = _mean_max(saccades.duration)
    speed_mean, speed_max = _mean_max(saccades.speed)
    return np.array([
        len(fixations) / span, fix_mean, fix_max, disp_mean, disp_max,
        len(saccades) / span, sac_mean, sac_max, speed_mean, speed_max,
    ])


def pupil_stat_features(gaze: GazeStream,
                        min_confidence: float = DEFAULT_MIN_CONFIDENCE) -> np.ndarray:
    """Mean/max/population-std per eye and modality over confident samples."""
    valid = gaze.confidence >= min_confidence
    out = np.zeros(12)
    for i, column in enumerate(("diam2d_left", "diam2d_right",
                                "diam3d_left", "diam3d_right")):
        values = getattr(gaze, column)[valid]
        if len(values) == 0:
            continue
        out[3 * i] = np.mean(values)
        out[3 * i + 1] = np.max(values)
        out[3 * i + 2] = np.std(values)
    return out


def ipa_features(gaze: GazeStream, t_start: float, span: float,
                 min_confidence: float = DEFAULT_MIN_CONFIDENCE,
                 rate: float = GRID_RATE_HZ) -> np.ndarray:
    valid = gaze.confidence >= min_confidence
    t = gaze.timestamp[valid]
    out = np.zeros(4)
    for i, column in enumerate(("diam2d_left", "diam2d_right",
                                "diam3d_left", "diam3d_right")):
        out[i] = activity_rate(t, getattr(gaze, column)[valid], t_start, span,
                               rate=rate)
    return out


def window_features(window: WindowSlice,
                    min_confidence: float = DEFAULT_MIN_CONFIDENCE) -> np.ndarray:
    """Raw (not baseline-subtracted) feature vector of one window."""
    return np.concatenate([
        eye_movement_features(window.fixations, window.saccades, window.t_w),
        pupil_stat_features(window.gaze, min_confidence),
        ipa_features(window.gaze, window.t_start, window.t_w, min_confidence),
    ])


def baseline_profile(trial: TrialRecord,
                     min_confidence: float = DEFAULT_MIN_CONFIDENCE) -> np.ndarray:
    """The 26 features over the entire baseline recording as one window."""
    gaze = trial.baseline_gaze
    if len(gaze) < 2 or gaze.extent <= 0:
        raise MissingBaselineError(
            f"trial {trial.trial_id} has no usable baseline recording")
    span = gaze.extent
    saccades = derive_saccades(trial.baseline_fixations)
    return np.concatenate([
        eye_movement_features(trial.baseline_fixations, saccades, span),
        pupil_stat_features(gaze, min_confidence),
        ipa_features(gaze, float(gaze.timestamp[0]), span, min_confidence),
    ])


def _window_is_empty(window: WindowSlice, min_confidence: float) -> bool:
    no_valid = not np.any(window.gaze.confidence >= min_confidence)
    return len(window.fixations) == 0 or len(window.saccades) == 0 or no_valid


def extract_trial(trial: TrialRecord, t_w: float,
                  min_confidence: float = DEFAULT_MIN_CONFIDENCE,
                  drop_empty_windows: bool = False) -> list[dict]:
    baseline = baseline_profile(trial, min_confidence)
    rows = []
    for window in slice_trial(trial, t_w):
        if drop_empty_windows and _window_is_empty(window, min_confidence):
            continue
        values = window_features(window, min_confidence) - baseline
        row = {
            "participant_id": trial.participant_id,
            "trial_id": trial.trial_id,
            "t_start_s": window.t_start,
            "t_w_s": window.t_w,
            "planned_duration_s": trial.planned_duration,
            "n_active": trial.n_active,
        }
        row.update(zip(FEATURE_NAMES, values))
        rows.append(row)
    return rows


def extract_all(dataset: Dataset, t_w: float,
                min_confidence: float = DEFAULT_MIN_CONFIDENCE,
                drop_empty_windows: bool = False,
                threads: int = 1) -> pd.DataFrame:
    """Baseline-subtracted features for every window of every trial.

    Row count is sum over trials of floor(duration / t_w) unless
    ``drop_empty_windows`` removes degenerate windows.  Extraction is a
    pure per-trial map, so the thread count cannot change the result.
    """
    per_trial = thread_map(
        lambda t: extract_trial(t, t_w, min_confidence, drop_empty_windows),
        dataset.trials, threads)
    rows = [row for chunk in per_trial for row in chunk]
    frame = pd.DataFrame(rows, columns=list(FEATURES_CSV_COLUMNS))
    bad = ~np.isfinite(frame[list(FEATURE_NAMES)].to_numpy(dtype=np.float64))
    if bad.any():
        raise ValueError("non-finite feature values after baseline subtraction")
    return frame


def write_features_csv(frame: pd.DataFrame, path) -> None:
    frame.to_csv(path, index=False, columns=list(FEATURES_CSV_COLUMNS))


def read_features_csv(path) -> pd.DataFrame:
    frame = pd.read_csv(path, dtype={"participant_id": str, "trial_id": str})
    if set(frame.columns) != set(FEATURES_CSV_COLUMNS):
        raise SchemaMismatchError(path, FEATURES_CSV_COLUMNS, frame.columns)
    return frame[list(FEATURES_CSV_COLUMNS)]
