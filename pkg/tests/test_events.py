import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gazetime.errors import WindowLongerThanTrial
from gazetime.events import derive_saccades, slice_count, slice_trial

from conftest import make_fixations, make_trial


def test_single_gap_is_a_three_four_five_triangle():
    fixations = make_fixations([(0.0, 1.0, 0.2, 0.2), (1.2, 0.8, 0.5, 0.6)])
    saccades = derive_saccades(fixations)
    assert len(saccades) == 1
    s = saccades[0]
    assert s.start == pytest.approx(1.0)
    assert s.duration == pytest.approx(0.2)
    assert s.amplitude == pytest.approx(0.5)
    assert s.speed == pytest.approx(2.5)


def test_single_fixation_yields_no_saccades():
    assert len(derive_saccades(make_fixations([(0.0, 1.0, 0.5, 0.5)]))) == 0


def test_touching_fixations_yield_no_saccade():
    fixations = make_fixations([(0.0, 1.0, 0.2, 0.2), (1.0, 0.5, 0.4, 0.4)])
    assert len(derive_saccades(fixations)) == 0


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.floats(0.05, 0.6), st.floats(0.01, 0.4),
                          st.floats(0, 1), st.floats(0, 1)),
                min_size=10, max_size=10))
def test_ten_random_fixations_give_nine_saccades(raw):
    # build strictly gapped fixations, then check every pair by brute force
    rows, t = [], 0.0
    for dur, gap, x, y in raw:
        rows.append((t, dur, x, y))
        t += dur + gap + 1e-3
    fixations = make_fixations(rows)
    saccades = derive_saccades(fixations)
    assert len(saccades) == 9
    for i, s in enumerate(saccades):
        end_prev = rows[i][0] + rows[i][1]
        gap = rows[i + 1][0] - end_prev
        assert s.duration == pytest.approx(gap)
        expected_amp = np.hypot(rows[i + 1][2] - rows[i][2],
                                rows[i + 1][3] - rows[i][3])
        assert s.amplitude == pytest.approx(expected_amp)
        assert s.speed == pytest.approx(expected_amp / gap)


def test_saccades_are_translation_invariant():
    rows = [(0.1, 0.3, 0.2, 0.2), (0.6, 0.2, 0.8, 0.5), (1.1, 0.4, 0.3, 0.9)]
    base = derive_saccades(make_fixations(rows))
    shifted = derive_saccades(
        make_fixations([(s + 5.0, d, x, y) for s, d, x, y in rows]))
    assert np.allclose(shifted.start, base.start + 5.0)
    assert np.array_equal(shifted.duration, base.duration)
    assert np.array_equal(shifted.amplitude, base.amplitude)
    assert np.array_equal(shifted.speed, base.speed)


@pytest.mark.parametrize("duration,t_w,expected", [
    (60.0, 60.0, 1),
    (60.0, 45.0, 1),
    (300.0, 45.0, 6),
    (180.0, 7.0, 25),
    (60.0, 1.0, 60),
])
def test_slice_counts(duration, t_w, expected):
    trial = make_trial(duration=duration)
    assert slice_count(duration, t_w) == expected
    assert len(slice_trial(trial, t_w)) == expected


def test_window_longer_than_trial_warns_and_returns_empty():
    trial = make_trial(duration=60.0)
    with pytest.warns(WindowLongerThanTrial):
        assert slice_trial(trial, 90.0) == []


def test_slices_are_contiguous_and_cover_events_once():
    trial = make_trial(duration=60.0)
    windows = slice_trial(trial, 7.0)
    assert [w.t_start for w in windows] == [7.0 * k for k in range(8)]
    covered = 8 * 7.0
    seen = []
    for w in windows:
        assert np.all(w.fixations.start >= w.t_start)
        assert np.all(w.fixations.start < w.t_start + w.t_w)
        seen.extend(w.fixations.start.tolist())
    expected = [s for s in trial.fixations.start if s < covered]
    assert sorted(seen) == sorted(expected)
    assert len(seen) == len(set(seen))


def test_gaze_assignment_is_half_open():
    trial = make_trial(duration=60.0, rate=1.0)
    windows = slice_trial(trial, 10.0)
    assert all(len(w.gaze) == 10 for w in windows)
    total = sum(len(w.gaze) for w in windows)
    assert total == len(trial.gaze)


def test_slice_requires_positive_width():
    with pytest.raises(ValueError):
        slice_trial(make_trial(), 0.0)
