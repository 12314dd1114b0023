"""CSV ingestion and serialization of the four-file dataset layout.

Files are UTF-8 with a mandatory header and '.' decimal separator:

* gaze.csv: participant_id,trial_id,phase,timestamp_s,pupil_x_norm,
  pupil_y_norm,diam2d_left_px,diam2d_right_px,diam3d_left_mm,
  diam3d_right_mm,confidence
* fixations.csv: participant_id,trial_id,phase,fixation_id,start_s,
  duration_s,dispersion_deg,fix_x_norm,fix_y_norm
* trials.csv: participant_id,trial_id,planned_duration_s,n_active
* questionnaire.csv: participant_id,trial_id,estimated_duration_s,
  ppot_likert

``phase`` is "experiment" or "baseline".  Timestamps are normalized to
trial-relative seconds on load (experiment and baseline clocks separately),
which is idempotent, so save/load round-trips reproduce the dataset
field-by-field.
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np
import pandas as pd

from .errors import (
    CrossReferenceError,
    MissingFileError,
    RowParseError,
    SchemaMismatchError,
)
from .records import (
    ACTIVE_ROBOT_COUNTS,
    Dataset,
    ExclusionRecord,
    FixationTable,
    GazeStream,
    MAX_ESTIMATED_DURATION,
    PLANNED_DURATIONS,
    TrialRecord,
)
from .screening import ScreeningPolicy, screen_trial

GAZE_COLUMNS = ("participant_id", "trial_id", "phase", "timestamp_s",
                "pupil_x_norm", "pupil_y_norm", "diam2d_left_px",
                "diam2d_right_px", "diam3d_left_mm", "diam3d_right_mm",
                "confidence")
FIXATION_COLUMNS = ("participant_id", "trial_id", "phase", "fixation_id",
                    "start_s", "duration_s", "dispersion_deg", "fix_x_norm",
                    "fix_y_norm")
TRIAL_COLUMNS = ("participant_id", "trial_id", "planned_duration_s",
                 "n_active")
QUESTIONNAIRE_COLUMNS = ("participant_id", "trial_id",
                         "estimated_duration_s", "ppot_likert")

PHASES = ("experiment", "baseline")

# value constraints checked per row: column -> (low, high) inclusive
_GAZE_RANGES = {
    "pupil_x_norm": (0.0, 1.0),
    "pupil_y_norm": (0.0, 1.0),
    "diam2d_left_px": (0.0, np.inf),
    "diam2d_right_px": (0.0, np.inf),
    "diam3d_left_mm": (0.0, np.inf),
    "diam3d_right_mm": (0.0, np.inf),
    "confidence": (0.0, 1.0),
}
_FIXATION_RANGES = {
    "duration_s": (np.nextafter(0.0, 1.0), np.inf),
    "dispersion_deg": (0.0, np.inf),
    "fix_x_norm": (0.0, 1.0),
    "fix_y_norm": (0.0, 1.0),
}


def _read_table(path, columns) -> pd.DataFrame:
    path = Path(path)
    if not path.is_file():
        raise MissingFileError(f"input file not found: {path}")
    frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    if set(frame.columns) != set(columns):
        raise SchemaMismatchError(path, columns, frame.columns)
    return frame


def _numeric(frame: pd.DataFrame, path, column: str,
             integer: bool = False) -> np.ndarray:
    values = pd.to_numeric(frame[column], errors="coerce")
    bad = values.isna().to_numpy()
    if bad.any():
        line = int(np.flatnonzero(bad)[0]) + 2  # header is line 1
        raise RowParseError(path, line,
                            f"column {column!r} is not numeric: "
                            f"{frame[column].iloc[line - 2]!r}")
    out = values.to_numpy(dtype=np.float64)
    if integer:
        if np.any(out != np.floor(out)):
            line = int(np.flatnonzero(out != np.floor(out))[0]) + 2
            raise RowParseError(path, line, f"column {column!r} must be integer")
        return out.astype(np.int64)
    return out


def _check_range(values, lo, hi, path, column) -> None:
    bad = (values < lo) | (values > hi)
    if np.any(bad):
        line = int(np.flatnonzero(bad)[0]) + 2
        raise RowParseError(path, line,
                            f"column {column!r} value {values[bad][0]} "
                            f"outside [{lo}, {hi}]")


def _check_membership(values, allowed, path, column) -> None:
    bad = ~np.isin(values, allowed)
    if np.any(bad):
        line = int(np.flatnonzero(bad)[0]) + 2
        raise RowParseError(path, line,
                            f"column {column!r} value {values[bad][0]} "
                            f"not one of {list(allowed)}")


def _parse_gaze(path) -> pd.DataFrame:
    frame = _read_table(path, GAZE_COLUMNS)
    out = frame[["participant_id", "trial_id", "phase"]].copy()
    _check_membership(frame["phase"].to_numpy(), PHASES, path, "phase")
    out["timestamp_s"] = _numeric(frame, path, "timestamp_s")
    for column, (lo, hi) in _GAZE_RANGES.items():
        values = _numeric(frame, path, column)
        _check_range(values, lo, hi, path, column)
        out[column] = values
    return out

def _parse_fixations(path) -> pd.DataFrame:
    frame = _read_table(path, FIXATION_COLUMNS)
    out = frame[["participant_id", "trial_id", "phase"]].copy()
    _check_membership(frame["phase"].to_numpy(), PHASES, path, "phase")
    out["fixation_id"] = _numeric(frame, path, "fixation_id", integer=True)
    out["start_s"] = _numeric(frame, path, "start_s")
    for column, (lo, hi) in _FIXATION_RANGES.items():
        values = _numeric(frame, path, column)
        _check_range(values, lo, hi, path, column)
        out[column] = values
    return out


def _parse_trials(path) -> pd.DataFrame:
    frame = _read_table(path, TRIAL_COLUMNS)
    out = frame[["participant_id", "trial_id"]].copy()
    durations = _numeric(frame, path, "planned_duration_s")
    _check_membership(durations, PLANNED_DURATIONS, path, "planned_duration_s")
    active = _numeric(frame, path, "n_active", integer=True)
    _check_membership(active, ACTIVE_ROBOT_COUNTS, path, "n_active")
    out["planned_duration_s"] = durations
    out["n_active"] = active
    dupes = out.duplicated("trial_id")
    if dupes.any():
        line = int(np.flatnonzero(dupes.to_numpy())[0]) + 2
        raise RowParseError(path, line, "duplicate trial_id")
    return out


def _parse_questionnaire(path) -> pd.DataFrame:
    frame = _read_table(path, QUESTIONNAIRE_COLUMNS)
    out = frame[["participant_id", "trial_id"]].copy()
    estimated = _numeric(frame, path, "estimated_duration_s")
    _check_range(estimated, 0.0, MAX_ESTIMATED_DURATION, path,
                 "estimated_duration_s")
    likert = _numeric(frame, path, "ppot_likert", integer=True)
    _check_membership(likert, (1, 2, 3, 4, 5), path, "ppot_likert")
    out["estimated_duration_s"] = estimated
    out["ppot_likert"] = likert
    return out


def read_questionnaire_csv(path) -> pd.DataFrame:
    """Parsed questionnaire table (validated values, original row order)."""
    return _parse_questionnaire(path)


def _gaze_stream(rows: pd.DataFrame) -> GazeStream:
    if len(rows) == 0:
        return GazeStream.empty()
    t = rows["timestamp_s"].to_numpy()
    t0 = t[0] if len(t) else 0.0
    return GazeStream(t - t0, rows["pupil_x_norm"].to_numpy(),
                      rows["pupil_y_norm"].to_numpy(),
                      rows["diam2d_left_px"].to_numpy(),
                      rows["diam2d_right_px"].to_numpy(),
                      rows["diam3d_left_mm"].to_numpy(),
                      rows["diam3d_right_mm"].to_numpy(),
                      rows["confidence"].to_numpy())


def _fixation_table(rows: pd.DataFrame, t0: float) -> FixationTable:
    if len(rows) == 0:
        return FixationTable.empty()
    return FixationTable(rows["fixation_id"].to_numpy(),
                         rows["start_s"].to_numpy() - t0,
                         rows["duration_s"].to_numpy(),
                         rows["dispersion_deg"].to_numpy(),
                         rows["fix_x_norm"].to_numpy(),
                         rows["fix_y_norm"].to_numpy())


def load_dataset(gaze_path, fixation_path, trials_path, questionnaire_path,
                 policy: ScreeningPolicy = ScreeningPolicy()) -> Dataset:
    """Load and screen the four-file dataset.

    Malformed rows raise per-row diagnostics (RowParseError with the line
    number); rows referencing unknown trials, or trials lacking
    questionnaire answers, raise CrossReferenceError.  Trials failing the
    screening policy are excluded and logged, never silently dropped.
    """
    gaze = _parse_gaze(gaze_path)
    fixations = _parse_fixations(fixation_path)
    trials = _parse_trials(trials_path)
    questionnaire = _parse_questionnaire(questionnaire_path)

    known = set(trials["trial_id"])
    for name, frame, path in (("gaze", gaze, gaze_path),
                              ("fixation", fixations, fixation_path),
                              ("questionnaire", questionnaire,
                               questionnaire_path)):
        unknown = set(frame["trial_id"]) - known
        if unknown:
            raise CrossReferenceError(
                f"{path}: {name} rows reference unknown trial(s) "
                f"{sorted(unknown)[:5]}")
    answered = set(questionnaire["trial_id"])
    unanswered = known - answered
    if unanswered:
        raise CrossReferenceError(
            f"{questionnaire_path}: no questionnaire answers for trial(s) "
            f"{sorted(unanswered)[:5]}")

    gaze_groups = dict(tuple(gaze.groupby(["trial_id", "phase"], sort=False)))
    fix_groups = dict(tuple(fixations.groupby(["trial_id", "phase"],
                                              sort=False)))
    answers = questionnaire.set_index("trial_id")

    empty_gaze = gaze.iloc[0:0]
    empty_fix = fixations.iloc[0:0]
    retained, log = [], []
    for row in trials.itertuples(index=False):
        exp_gaze = gaze_groups.get((row.trial_id, "experiment"), empty_gaze)
        base_gaze = gaze_groups.get((row.trial_id, "baseline"), empty_gaze)
        exp_fix = fix_groups.get((row.trial_id, "experiment"), empty_fix)
        base_fix = fix_groups.get((row.trial_id, "baseline"), empty_fix)
        exp_t0 = exp_gaze["timestamp_s"].iloc[0] if len(exp_gaze) else 0.0
        base_t0 = base_gaze["timestamp_s"].iloc[0] if len(base_gaze) else 0.0
        answer = answers.loc[row.trial_id]
        trial = TrialRecord(
            participant_id=row.participant_id,
            trial_id=row.trial_id,
            planned_duration=float(row.planned_duration_s),
            n_active=int(row.n_active),
            gaze=_gaze_stream(exp_gaze),
            fixations=_fixation_table(exp_fix, exp_t0),
            baseline_gaze=_gaze_stream(base_gaze),
            baseline_fixations=_fixation_table(base_fix, base_t0),
            estimated_duration=float(answer["estimated_duration_s"]),
            ppot_likert=int(answer["ppot_likert"]),
        )
        reason = screen_trial(trial, policy)
        if reason is None:
            retained.append(trial)
        else:
            log.append(ExclusionRecord(trial.participant_id, trial.trial_id,
                                       reason))
    return Dataset(trials=retained, screening_log=log)


def _stream_frames(trial: TrialRecord):
    for phase, gaze, fix in (("experiment", trial.gaze, trial.fixations),
                             ("baseline", trial.baseline_gaze,
                              trial.baseline_fixations)):
        gaze_frame = pd.DataFrame({
            "participant_id": trial.participant_id,
            "trial_id": trial.trial_id,
            "phase": phase,
            "timestamp_s": gaze.timestamp,
            "pupil_x_norm": gaze.pupil_x_norm,
            "pupil_y_norm": gaze.pupil_y_norm,
            "diam2d_left_px": gaze.diam2d_left,
            "diam2d_right_px": gaze.diam2d_right,
            "diam3d_left_mm": gaze.diam3d_left,
            "diam3d_right_mm": gaze.diam3d_right,
            "confidence": gaze.confidence,
        })
        fix_frame = pd.DataFrame({
            "participant_id": trial.participant_id,
            "trial_id": trial.trial_id,
            "phase": phase,
            "fixation_id": fix.fixation_id,
            "start_s": fix.start,
            "duration_s": fix.duration,
            "dispersion_deg": fix.dispersion,
            "fix_x_norm": fix.fix_x_norm,
            "fix_y_norm": fix.fix_y_norm,
        })
        yield gaze_frame, fix_frame


def save_dataset(dataset: Dataset, gaze_path, fixation_path, trials_path,
                 questionnaire_path) -> None:
    """Serialize retained trials back to the four CSV files."""
    gaze_parts, fix_parts, trial_rows, answer_rows = [], [], [], []
    for trial in dataset.trials:
        for gaze_frame, fix_frame in _stream_frames(trial):
            gaze_parts.append(gaze_frame)
            fix_parts.append(fix_frame)
        trial_rows.append({"participant_id": trial.participant_id,
                           "trial_id": trial.trial_id,
                           "planned_duration_s": trial.planned_duration,
                           "n_active": trial.n_active})
    for trial in dataset.trials:
        answer_rows.append({"participant_id": trial.participant_id,
                            "trial_id": trial.trial_id,
                            "estimated_duration_s": trial.estimated_duration,
                            "ppot_likert": trial.ppot_likert})
    gaze = (pd.concat(gaze_parts, ignore_index=True) if gaze_parts
            else pd.DataFrame(columns=list(GAZE_COLUMNS)))
    fixations = (pd.concat(fix_parts, ignore_index=True) if fix_parts
                 else pd.DataFrame(columns=list(FIXATION_COLUMNS)))
    gaze.to_csv(gaze_path, index=False)
    fixations.to_csv(fixation_path, index=False)
    pd.DataFrame(trial_rows, columns=list(TRIAL_COLUMNS)).to_csv(
        trials_path, index=False)
    pd.DataFrame(answer_rows, columns=list(QUESTIONNAIRE_COLUMNS)).to_csv(
        questionnaire_path, index=False)


def dataset_paths(directory) -> dict[str, Path]:
    directory = Path(directory)
    return {"gaze": directory / "gaze.csv",
            "fixations": directory / "fixations.csv",
            "trials": directory / "trials.csv",
            "questionnaire": directory / "questionnaire.csv"}


def load_dataset_dir(directory,
                     policy: ScreeningPolicy = ScreeningPolicy()) -> Dataset:
    paths = dataset_paths(directory)
    return load_dataset(paths["gaze"], paths["fixations"], paths["trials"],
                        paths["questionnaire"], policy)


def save_dataset_dir(dataset: Dataset, directory) -> dict[str, Path]:
    paths = dataset_paths(directory)
    os.makedirs(directory, exist_ok=True)
    save_dataset(dataset, paths["gaze"], paths["fixations"], paths["trials"],
                 paths["questionnaire"])
    return paths
