"""Definition-level feature recomputation for the test suite.

Every feature is recomputed here directly from its definition using plain
Python loops, the statistics module and an explicit wavelet analysis
matrix.  Nothing is shared with the production extractor except the data
containers and the published filter coefficient table, so agreement
between the two paths is meaningful evidence.
"""

from __future__ import annotations

import math
import statistics

import numpy as np

from .errors import UnknownFeatureError
from .records import FixationTable, GazeStream
from .wavelets import SYM16_DEC_LO

_DIAM_COLUMNS = {"2d_left": "diam2d_left", "2d_right": "diam2d_right",
                 "3d_left": "diam3d_left", "3d_right": "diam3d_right"}


def oracle_baseline_span(gaze: GazeStream) -> float:
    """Recorded extent: span plus one median sample period."""
    times = [float(t) for t in gaze.timestamp]
    diffs = sorted(times[i + 1] - times[i] for i in range(len(times) - 1))
    mid = len(diffs) // 2
    if len(diffs) % 2 == 1:
        median = diffs[mid]
    else:
        median = 0.5 * (diffs[mid - 1] + diffs[mid])
    return (times[-1] - times[0]) + median


def _saccades(fixations: FixationTable) -> list[tuple[float, float, float, float]]:
    events = list(fixations)
    out = []
    for a, b in zip(events, events[1:]):
        gap = b.start - (a.start + a.duration)
        if gap <= 0:
            continue
        amp = math.hypot(b.fix_x_norm - a.fix_x_norm,
                         b.fix_y_norm - a.fix_y_norm)
        out.append((a.start + a.duration, gap, amp, amp / gap))
    return out


def _mean(values) -> float:
    values = list(values)
    return sum(values) / len(values) if values else 0.0


def _max(values) -> float:
    values = list(values)
    return max(values) if values else 0.0


def _population_std(values) -> float:
    values = list(values)
    if not values:
        return 0.0
    mu = sum(values) / len(values)
    return math.sqrt(sum((v - mu) ** 2 for v in values) / len(values))


def _confident_pairs(gaze: GazeStream, column: str, min_confidence: float):
    series = getattr(gaze, column)
    return [(float(t), float(v))
            for t, v, c in zip(gaze.timestamp, series, gaze.confidence)
            if c >= min_confidence]


def _interpolate(pairs, grid) -> list[float]:
    """Piecewise-linear interpolation clamped to the end values."""
    out = []
    j = 0
    for t in grid:
        while j + 1 < len(pairs) and pairs[j + 1][0] <= t:
            j += 1
        if t <= pairs[0][0]:
            out.append(pairs[0][1])
        elif j + 1 >= len(pairs):
            out.append(pairs[-1][1])
        else:
            (t0, v0), (t1, v1) = pairs[j], pairs[j + 1]
            if t1 == t0:
                out.append(v0)
            else:
                out.append(v0 + (v1 - v0) * (t - t0) / (t1 - t0))
    return out


def _circular_correlate_downsample(x: np.ndarray, filt) -> np.ndarray:
    """y[k] = sum_m filt[m] * x[(2k + m) mod n], via rolled copies."""
    if len(x) % 2 == 1:
        x = np.append(x, x[-1])
    acc = np.zeros(len(x))
    for m, c in enumerate(filt):
        acc += c * np.roll(x, -m)
    return acc[::2]


def _oracle_activity_rate(pairs, t_start: float, span: float,
                          rate: float) -> float:
    n_grid = int(round(span * rate))
    if len(pairs) < 2 or n_grid < len(SYM16_DEC_LO):
        return 0.0
    grid = [t_start + k / rate for k in range(n_grid)]
    signal = _interpolate(pairs, grid)
    lo = [float(c) for c in SYM16_DEC_LO]
    length = len(lo)
    hi = [((-1) ** k) * lo[length - 1 - k] for k in range(length)]

    a1 = _circular_correlate_downsample(np.asarray(signal), lo)
    d2 = _circular_correlate_downsample(a1, hi).tolist()

    mags = [abs(c) for c in d2]
    maxima = [i for i in range(1, len(mags) - 1)
              if mags[i] > mags[i - 1] and mags[i] > mags[i + 1]]
    if not maxima:
        return 0.0
    sigma = statistics.median(mags) / 0.6745
    lam = sigma * math.sqrt(2.0 * math.log(len(d2)))
    return sum(1 for i in maxima if mags[i] >= lam) / span


def oracle_feature(name: str, gaze: GazeStream, fixations: FixationTable,
                   t_start: float, span: float, min_confidence: float = 0.6,
                   rate: float = 120.0) -> float:
    """Recompute one raw (pre-subtraction) feature for a window or baseline."""
    if name == "fixation_freq":
        return len(fixations) / span
    if name == "fixation_dur_mean":
        return _mean(e.duration for e in fixations)
    if name == "fixation_dur_max":
        return _max(e.duration for e in fixations)
    if name == "fixation_disp_mean":
        return _mean(e.dispersion for e in fixations)
    if name == "fixation_disp_max":
        return _max(e.dispersion for e in fixations)
    if name.startswith("saccade_"):
        events = _saccades(fixations)
        if name == "saccade_freq":
            return len(events) / span
        values = {"saccade_dur_mean": [e[1] for e in events],
                  "saccade_dur_max": [e[1] for e in events],
                  "saccade_speed_mean": [e[3] for e in events],
                  "saccade_speed_max": [e[3] for e in events]}.get(name)
        if values is None:
            raise UnknownFeatureError(name)
        return _max(values) if name.endswith("max") else _mean(values)
    if name.startswith("diam"):
        stem, stat = name[len("diam"):].rsplit("_", 1)
        column = _DIAM_COLUMNS.get(stem)
        if column is None or stat not in ("mean", "max", "std"):
            raise UnknownFeatureError(name)
        values = [v for _, v in _confident_pairs(gaze, column, min_confidence)]
        if stat == "mean":
            return _mean(values)
        if stat == "max":
            return _max(values)
        return _population_std(values)
    if name.startswith("ipa_"):
        column = _DIAM_COLUMNS.get(name[len("ipa_"):])
        if column is None:
            raise UnknownFeatureError(name)
        pairs = _confident_pairs(gaze, column, min_confidence)
        return _oracle_activity_rate(pairs, t_start, span, rate)
    raise UnknownFeatureError(name)


def oracle_vector(gaze: GazeStream, fixations: FixationTable, t_start: float,
                  span: float, min_confidence: float = 0.6,
                  rate: float = 120.0) -> dict[str, float]:
    from .features import FEATURE_NAMES

    return {name: oracle_feature(name, gaze, fixations, t_start, span,
                                 min_confidence, rate)
            for name in FEATURE_NAMES}
