import numpy as np
import pytest

from gazetime.records import FixationTable, GazeStream

from conftest import make_fixations, make_gaze


def test_gaze_stream_row_view():
    stream = make_gaze([0.0, 0.5, 1.0], diam=3.0)
    sample = stream[1]
    assert sample.timestamp == 0.5
    assert sample.diam3d_left == 3.0
    assert len(stream) == 3


def test_gaze_stream_is_immutable():
    stream = make_gaze([0.0, 1.0])
    with pytest.raises(ValueError):
        stream.timestamp[0] = 5.0


def test_gaze_time_slice_is_half_open():
    stream = make_gaze([0.0, 1.0, 2.0, 3.0])
    window = stream.time_slice(1.0, 3.0)
    assert window.timestamp.tolist() == [1.0, 2.0]


def test_gaze_span_and_extent():
    stream = make_gaze(np.arange(120) / 60.0)
    assert stream.span == pytest.approx(119 / 60.0)
    assert stream.extent == pytest.approx(2.0)
    assert make_gaze([0.0]).extent == 0.0


def test_gaze_problems_detects_range_violations():
    bad = GazeStream([0.0], [1.5], [0.5], [30.0], [30.0], [3.0], [3.0], [0.9])
    assert any("pupil_x_norm" in p for p in bad.problems())
    ok = make_gaze([0.0, 1.0])
    assert ok.problems() == []


def test_fixation_table_ordering_checks():
    overlapping = make_fixations([(0.0, 1.0, 0.5, 0.5), (0.5, 1.0, 0.5, 0.5)])
    assert any("overlap" in p for p in overlapping.problems())
    ordered = make_fixations([(0.0, 0.4, 0.5, 0.5), (0.5, 0.4, 0.5, 0.5)])
    assert ordered.problems() == []


def test_fixation_ids_must_increase():
    table = FixationTable([2, 1], [0.0, 1.0], [0.5, 0.5], [1.0, 1.0],
                          [0.5, 0.5], [0.5, 0.5])
    assert any("ids" in p for p in table.problems())


def test_stream_equality_is_field_wise():
    a = make_gaze([0.0, 1.0], diam=3.0)
    b = make_gaze([0.0, 1.0], diam=3.0)
    c = make_gaze([0.0, 1.0], diam=3.1)
    assert a == b
    assert a != c
