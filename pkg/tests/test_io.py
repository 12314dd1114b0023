import numpy as np
import pytest

from gazetime.errors import (
    CrossReferenceError,
    MissingFileError,
    RowParseError,
    SchemaMismatchError,
)
from gazetime.io import dataset_paths, load_dataset_dir, save_dataset_dir
from gazetime.records import Dataset, TrialRecord

from conftest import make_fixations, make_gaze, make_trial


def tiny_trial(trial_id, participant="p01", break_timestamps=False):
    t = np.array([0.0, 0.1, 0.2, 0.3, 0.4])
    if break_timestamps:
        t = np.array([0.0, 0.2, 0.1, 0.3, 0.4])
    return TrialRecord(
        participant_id=participant, trial_id=trial_id,
        planned_duration=60.0, n_active=1,
        gaze=make_gaze(t),
        fixations=make_fixations([(0.0, 0.1, 0.5, 0.5), (0.2, 0.1, 0.4, 0.4)]),
        baseline_gaze=make_gaze([0.0, 0.1, 0.2]),
        baseline_fixations=make_fixations([(0.0, 0.1, 0.5, 0.5)]),
        estimated_duration=45.0, ppot_likert=3,
    )


def test_round_trip_identity(tmp_path, small_dataset):
    save_dataset_dir(small_dataset, tmp_path)
    reloaded = load_dataset_dir(tmp_path)
    assert reloaded.screening_log == []
    assert len(reloaded.trials) == len(small_dataset.trials)
    for a, b in zip(small_dataset.trials, reloaded.trials):
        assert a == b
    # serializing again reproduces the files byte for byte
    again = tmp_path / "again"
    save_dataset_dir(reloaded, again)
    for name, path in dataset_paths(tmp_path).items():
        assert path.read_bytes() == (again / path.name).read_bytes()


def test_two_well_formed_trials_load_cleanly(tmp_path):
    ds = Dataset(trials=[tiny_trial("t01"), tiny_trial("t02")])
    save_dataset_dir(ds, tmp_path)
    loaded = load_dataset_dir(tmp_path)
    assert len(loaded.trials) == 2
    assert loaded.screening_log == []


def test_timestamp_regression_is_excluded_and_logged(tmp_path):
    ds = Dataset(trials=[tiny_trial("t01"),
                         tiny_trial("t02", break_timestamps=True)])
    save_dataset_dir(ds, tmp_path)
    loaded = load_dataset_dir(tmp_path)
    assert [t.trial_id for t in loaded.trials] == ["t01"]
    assert len(loaded.screening_log) == 1
    assert loaded.screening_log[0].reason == "non-monotone timestamps"


def test_paper_scale_screening_counts(tmp_path):
    # 504 trials of which 99 fail screening leave 405
    trials = []
    for i in range(504):
        trial = tiny_trial(f"t{i:03d}", participant=f"p{i % 21:02d}",
                           break_timestamps=i < 99)
        trials.append(trial)
    save_dataset_dir(Dataset(trials=trials), tmp_path)
    loaded = load_dataset_dir(tmp_path)
    assert len(loaded.trials) == 405
    assert len(loaded.screening_log) == 99
    assert len(loaded.trials) + len(loaded.screening_log) == 504


def test_missing_file(tmp_path):
    with pytest.raises(MissingFileError):
        load_dataset_dir(tmp_path)


def test_schema_mismatch(tmp_path, small_dataset):
    paths = save_dataset_dir(small_dataset, tmp_path)
    text = paths["gaze"].read_text().replace("pupil_x_norm", "pupil_x")
    paths["gaze"].write_text(text)
    with pytest.raises(SchemaMismatchError):
        load_dataset_dir(tmp_path)


def test_row_parse_error_reports_line_number(tmp_path, small_dataset):
    paths = save_dataset_dir(small_dataset, tmp_path)
    lines = paths["questionnaire"].read_text().splitlines()
    lines[2] = lines[2].replace("90.0", "ninety")
    paths["questionnaire"].write_text("\n".join(lines) + "\n")
    with pytest.raises(RowParseError) as err:
        load_dataset_dir(tmp_path)
    assert err.value.line == 3


def test_out_of_range_value_is_a_row_error(tmp_path, small_dataset):
    paths = save_dataset_dir(small_dataset, tmp_path)
    lines = paths["questionnaire"].read_text().splitlines()
    first = lines[1].rsplit(",", 1)[0]
    lines[1] = first + ",9"  # likert outside 1..5
    paths["questionnaire"].write_text("\n".join(lines) + "\n")
    with pytest.raises(RowParseError) as err:
        load_dataset_dir(tmp_path)
    assert err.value.line == 2


def test_questionnaire_without_trial_is_cross_reference_error(tmp_path,
                                                              small_dataset):
    paths = save_dataset_dir(small_dataset, tmp_path)
    with open(paths["questionnaire"], "a") as fh:
        fh.write("p09,p09_t99,30.0,3\n")
    with pytest.raises(CrossReferenceError):
        load_dataset_dir(tmp_path)


def test_trial_without_questionnaire_is_cross_reference_error(tmp_path,
                                                              small_dataset):
    paths = save_dataset_dir(small_dataset, tmp_path)
    with open(paths["trials"], "a") as fh:
        fh.write("p09,p09_t99,60.0,1\n")
    with pytest.raises(CrossReferenceError):
        load_dataset_dir(tmp_path)
