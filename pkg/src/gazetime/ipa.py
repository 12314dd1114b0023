"""Pupillary-activity rate from abrupt diameter changes.

The rate is the count of wavelet modulus maxima that survive a universal
hard threshold, divided by the window span.  Pipeline, fixed so results
are bit-reproducible:

1. linearly interpolate the (timestamp, diameter) series onto a uniform
   grid at ``GRID_RATE_HZ``;
2. two-level periodized wavelet decomposition (symlet-16 pair);
3. modulus maxima of the level-2 detail coefficients: interior points
   whose magnitude strictly exceeds both neighbors;
4. hard threshold lambda = sigma * sqrt(2 ln n) with
   sigma = median(|coeffs|) / 0.6745 and n the coefficient count;
5. rate = surviving maxima / span.

Series shorter than one filter length after interpolation (or with fewer
than two input samples) yield rate 0 with a logged warning.
"""

from __future__ import annotations

import logging

import numpy as np

from .wavelets import FILTER_LENGTH, wavedec2_detail

logger = logging.getLogger(__name__)

GRID_RATE_HZ = 120.0
_MAD_TO_SIGMA = 0.6745


def modulus_maxima(coeffs: np.ndarray) -> np.ndarray:
    """Indices of interior strict local maxima of |coeffs|."""
    mag = np.abs(coeffs)
    if len(mag) < 3:
        return np.zeros(0, dtype=np.int64)
    inner = mag[1:-1]
    keep = (inner > mag[:-2]) & (inner > mag[2:])
    return np.flatnonzero(keep) + 1


def universal_threshold(coeffs: np.ndarray) -> float:
    mag = np.abs(coeffs)
    sigma = float(np.median(mag)) / _MAD_TO_SIGMA
    return sigma * float(np.sqrt(2.0 * np.log(len(coeffs))))


def activity_rate(timestamps, values, t_start: float, span: float,
                  rate: float = GRID_RATE_HZ) -> float:
    """Thresholded modulus-maxima count per second over [t_start, t_start+span)."""
    if span <= 0:
        raise ValueError("span must be positive")
    timestamps = np.asarray(timestamps, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    n_grid = int(round(span * rate))
    if len(timestamps) < 2 or n_grid < FILTER_LENGTH:
        logger.warning(
            "series too short for pupillary activity (%d samples, %d grid "
            "points); reporting 0", len(timestamps), n_grid)
        return 0.0
    grid = t_start + np.arange(n_grid) / rate
    signal = np.interp(grid, timestamps, values)
    detail = wavedec2_detail(signal)
    maxima = modulus_maxima(detail)
    if len(maxima) == 0:
        return 0.0
    lam = universal_threshold(detail)
    surviving = int(np.sum(np.abs(detail[maxima]) >= lam))
    return surviving / span
