import numpy as np
import pytest

from gazetime.errors import MissingBaselineError
from gazetime.events import SaccadeTable, WindowSlice, derive_saccades, slice_trial
from gazetime.features import (
    EYE_MOVEMENT_FEATURES,
    FEATURE_NAMES,
    FEATURES_CSV_COLUMNS,
    baseline_profile,
    extract_all,
    eye_movement_features,
    ipa_features,
    pupil_stat_features,
    read_features_csv,
    window_features,
    write_features_csv,
)
from gazetime.ipa import activity_rate
from gazetime.records import Dataset, FixationTable, GazeStream

from conftest import make_fixations, make_gaze, make_trial, regular_fixations


def test_feature_vocabulary_is_fixed():
    assert len(FEATURE_NAMES) == 26
    assert len(set(FEATURE_NAMES)) == 26
    assert FEATURE_NAMES[:10] == EYE_MOVEMENT_FEATURES
    assert FEATURE_NAMES[10] == "diam2d_left_mean"
    assert FEATURE_NAMES[-1] == "ipa_3d_right"


def test_fixation_frequency_twelve_in_ten_seconds():
    fixations = make_fixations([(i * 0.8, 0.3, 0.5, 0.5) for i in range(12)])
    values = eye_movement_features(fixations, SaccadeTable.empty(), span=10.0)
    assert values[0] == pytest.approx(1.2)


def test_empty_window_yields_all_zero_eye_movement_features():
    values = eye_movement_features(FixationTable.empty(),
                                   SaccadeTable.empty(), span=10.0)
    assert values.tolist() == [0.0] * 10


def test_duration_mean_and_max():
    fixations = make_fixations([(0.0, 0.2, 0.5, 0.5), (0.5, 0.4, 0.5, 0.5)])
    values = eye_movement_features(fixations, derive_saccades(fixations), 2.0)
    assert values[1] == pytest.approx(0.3)
    assert values[2] == pytest.approx(0.4)


def test_pupil_stats_constant_series():
    gaze = make_gaze(np.arange(10) / 10.0, diam=3.0)
    values = pupil_stat_features(gaze)
    # 3d left block: mean, max, std
    assert values[6] == pytest.approx(3.0)
    assert values[7] == pytest.approx(3.0)
    assert values[8] == 0.0


def test_pupil_stats_population_convention():
    gaze = make_gaze([0.0, 1.0], diam=np.array([2.0, 4.0]))
    values = pupil_stat_features(gaze)
    assert values[6] == pytest.approx(3.0)   # mean
    assert values[7] == pytest.approx(4.0)   # max
    assert values[8] == pytest.approx(1.0)   # population std


def test_pupil_stats_match_direct_recomputation():
    rng = np.random.default_rng(42)
    diam = rng.uniform(2.0, 5.0, size=1000)
    conf = rng.uniform(0.0, 1.0, size=1000)
    gaze = make_gaze(np.arange(1000) / 120.0, diam=diam, confidence=conf)
    values = pupil_stat_features(gaze, min_confidence=0.6)
    kept = diam[conf >= 0.6]
    mean = sum(kept) / len(kept)
    std = (sum((v - mean) ** 2 for v in kept) / len(kept)) ** 0.5
    assert values[6] == pytest.approx(mean, rel=1e-12)
    assert values[7] == pytest.approx(max(kept), rel=1e-12)
    assert values[8] == pytest.approx(std, rel=1e-12)


def test_confidence_gate_excludes_low_confidence_samples():
    diam = np.array([3.0, 3.0, 99.0])
    conf = np.array([0.9, 0.9, 0.1])
    gaze = make_gaze([0.0, 0.5, 1.0], diam=diam, confidence=conf)
    values = pupil_stat_features(gaze, min_confidence=0.6)
    assert values[7] == pytest.approx(3.0)


def test_no_confident_samples_yield_zero_stats():
    gaze = make_gaze([0.0, 1.0], diam=3.0, confidence=0.1)
    assert pupil_stat_features(gaze, min_confidence=0.6).tolist() == [0.0] * 12


def test_activity_rate_constant_series_is_zero():
    t = np.arange(480) / 120.0
    assert activity_rate(t, np.full(480, 3.0), 0.0, 4.0) == 0.0


def _step_signal(span=8.0, rate=120.0, k=6, amplitude=0.5, noise=0.02,
                 seed=0):
    rng = np.random.default_rng(seed)
    n = int(span * rate)
    t = np.arange(n) / rate
    v = 3.0 + noise * rng.standard_normal(n)
    for j, pos in enumerate(np.linspace(0.6, span - 0.6, k)):
        v[t >= pos] += amplitude * (1.0 if j % 2 == 0 else -1.0)
    return t, v


def test_activity_rate_counts_step_discontinuities():
    span, k = 8.0, 6
    t, v = _step_signal(span=span, k=k)
    rate = activity_rate(t, v, 0.0, span)
    assert abs(rate - k / span) <= 1.0 / span


def test_activity_rate_is_invariant_to_signal_repetition():
    span, k = 8.0, 6
    t, v = _step_signal(span=span, k=k)
    rate_once = activity_rate(t, v, 0.0, span)
    t2 = np.concatenate([t, t + span])
    v2 = np.concatenate([v, v])
    rate_twice = activity_rate(t2, v2, 0.0, 2 * span)
    assert abs(rate_twice - rate_once) <= 1.0 / span


def test_activity_rate_short_series_is_zero_with_warning(caplog):
    with caplog.at_level("WARNING"):
        rate = activity_rate(np.array([0.0, 0.05]), np.array([3.0, 3.1]),
                             0.0, 0.1)
    assert rate == 0.0
    assert any("too short" in r.message for r in caplog.records)


def _identity_trial(duration=60.0, rate=60.0, diam=None):
    trial = make_trial(duration=duration, rate=rate)
    if diam is not None:
        trial.gaze = make_gaze(np.arange(int(duration * rate)) / rate,
                               diam=diam)
    trial.baseline_gaze = trial.gaze
    trial.baseline_fixations = trial.fixations
    return trial


def test_baseline_identical_to_slice_gives_equal_profile():
    trial = _identity_trial()
    window = slice_trial(trial, 60.0)[0]
    raw = window_features(window)
    profile = baseline_profile(trial)
    assert np.array_equal(raw, profile)


def test_missing_baseline_raises():
    trial = make_trial()
    trial.baseline_gaze = GazeStream.empty()
    with pytest.raises(MissingBaselineError):
        baseline_profile(trial)


def test_subtraction_identity_yields_all_zero_features():
    dataset = Dataset(trials=[_identity_trial()])
    frame = extract_all(dataset, t_w=60.0)
    values = frame[list(FEATURE_NAMES)].to_numpy()
    assert values.shape == (1, 26)
    assert np.max(np.abs(values)) == 0.0


def test_constant_diameter_columns_cancel_at_any_window():
    dataset = Dataset(trials=[_identity_trial()])
    frame = extract_all(dataset, t_w=10.0)
    pupil_cols = [n for n in FEATURE_NAMES if n.startswith("diam")]
    assert np.max(np.abs(frame[pupil_cols].to_numpy())) < 1e-9


def test_simple_subtraction_arithmetic():
    trial = make_trial(duration=60.0, diam=3.1, baseline_diam=2.9)
    frame = extract_all(Dataset(trials=[trial]), t_w=60.0)
    assert frame["diam3d_left_mean"].iloc[0] == pytest.approx(0.2)


def test_illumination_shift_cancels():
    rng = np.random.default_rng(5)
    duration, rate = 60.0, 60.0
    diam = 3.0 + 0.2 * rng.standard_normal(int(duration * rate))
    base_diam = 3.0 + 0.2 * rng.standard_normal(int(120.0 * rate))

    def build(offset):
        trial = make_trial(duration=duration, rate=rate)
        trial.gaze = make_gaze(np.arange(int(duration * rate)) / rate,
                               diam=diam + offset)
        trial.baseline_gaze = make_gaze(np.arange(int(120 * rate)) / rate,
                                        diam=base_diam + offset)
        return extract_all(Dataset(trials=[trial]), t_w=10.0)

    plain = build(0.0)[list(FEATURE_NAMES)].to_numpy()
    shifted = build(1.0)[list(FEATURE_NAMES)].to_numpy()
    assert np.max(np.abs(plain - shifted)) < 1e-9


def test_extract_all_row_count_formula():
    trials = [make_trial(duration=d, trial=f"t{i}", participant="p01")
              for i, d in enumerate((60.0, 180.0, 300.0))]
    dataset = Dataset(trials=trials)
    frame = extract_all(dataset, t_w=45.0)
    assert len(frame) == sum(int(d // 45) for d in (60, 180, 300))
    assert list(frame.columns) == list(FEATURES_CSV_COLUMNS)


def test_extraction_is_thread_count_invariant():
    trials = [make_trial(duration=60.0, trial=f"t{i}", participant="p01")
              for i in range(4)]
    dataset = Dataset(trials=trials)
    sequential = extract_all(dataset, t_w=10.0, threads=1)
    parallel = extract_all(dataset, t_w=10.0, threads=4)
    assert sequential.equals(parallel)


def test_features_csv_round_trip(tmp_path):
    frame = extract_all(Dataset(trials=[make_trial()]), t_w=10.0)
    path = tmp_path / "features.csv"
    write_features_csv(frame, path)
    back = read_features_csv(path)
    assert np.allclose(back[list(FEATURE_NAMES)].to_numpy(),
                       frame[list(FEATURE_NAMES)].to_numpy())
    assert list(back.columns) == list(FEATURES_CSV_COLUMNS)


def test_drop_empty_windows_option():
    trial = make_trial(duration=60.0)
    # strip all fixations in [20, 40): those windows become empty aggregates
    keep = (trial.fixations.start < 20.0) | (trial.fixations.start >= 40.0)
    trial.fixations = FixationTable(
        *(getattr(trial.fixations, f)[keep] for f in FixationTable.FIELDS))
    full = extract_all(Dataset(trials=[trial]), t_w=10.0)
    dropped = extract_all(Dataset(trials=[trial]), t_w=10.0,
                          drop_empty_windows=True)
    assert len(full) == 6
    assert len(dropped) == 4
