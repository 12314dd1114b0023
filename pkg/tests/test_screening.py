import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gazetime.records import FixationTable, GazeStream
from gazetime.screening import (
    REASON_EMPTY_STREAM,
    REASON_LOW_CONFIDENCE,
    REASON_MISSING_BASELINE,
    REASON_NON_MONOTONE,
    ScreeningPolicy,
    screen_trial,
)

from conftest import make_gaze, make_trial


def test_clean_trial_passes():
    assert screen_trial(make_trial()) is None


def test_empty_fixations_is_empty_stream():
    trial = make_trial()
    trial.fixations = FixationTable.empty()
    assert screen_trial(trial) == REASON_EMPTY_STREAM


def test_mean_confidence_thresholds():
    good = make_trial()
    good.gaze = make_gaze(np.arange(10) / 10.0, confidence=0.95)
    assert screen_trial(good) is None
    bad = make_trial()
    bad.gaze = make_gaze(np.arange(10) / 10.0, confidence=0.3)
    assert screen_trial(bad) == REASON_LOW_CONFIDENCE


def test_confidence_check_is_toggleable():
    trial = make_trial()
    trial.gaze = make_gaze(np.arange(10) / 10.0, confidence=0.3)
    policy = ScreeningPolicy(min_mean_confidence=None)
    assert screen_trial(trial, policy) is None


def test_regressing_gaze_timestamps():
    trial = make_trial()
    trial.gaze = make_gaze([0.0, 0.2, 0.1])
    assert screen_trial(trial) == REASON_NON_MONOTONE


def test_overlapping_fixations_count_as_timestamp_problem():
    trial = make_trial()
    trial.fixations = FixationTable([1, 2], [0.0, 0.1], [0.5, 0.5],
                                    [1.0, 1.0], [0.5, 0.5], [0.5, 0.5])
    assert screen_trial(trial) == REASON_NON_MONOTONE


def test_missing_baseline():
    trial = make_trial()
    trial.baseline_gaze = GazeStream.empty()
    assert screen_trial(trial) == REASON_MISSING_BASELINE
    relaxed = dataclasses.replace(ScreeningPolicy(), require_baseline=False)
    assert screen_trial(trial, relaxed) is None


@settings(max_examples=25, deadline=None)
@given(st.permutations(list(range(6))))
def test_screening_is_order_independent(order):
    # permuting the trial list never changes the retained set
    trials = [make_trial(trial=f"t{i}", estimated=30.0) for i in range(6)]
    trials[2].gaze = make_gaze([0.0, 0.2, 0.1])
    trials[4].fixations = FixationTable.empty()
    verdicts = {t.trial_id: screen_trial(t) for t in trials}
    permuted = [trials[i] for i in order]
    assert {t.trial_id: screen_trial(t) for t in permuted} == verdicts


def test_screening_is_idempotent():
    trial = make_trial()
    assert screen_trial(trial) == screen_trial(trial)
