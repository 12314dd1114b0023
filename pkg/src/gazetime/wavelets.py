"""Orthogonal wavelet filter bank and periodized transform.

The scaling filter below is the 32-tap least-asymmetric orthogonal filter
with 16 vanishing moments (symlet-16 family), generated by
``tools/make_scaling_filter.py``.  Orthonormality and the vanishing-moment
conditions hold to ~1e-16 in double precision; the test suite re-checks
them numerically.
"""

import numpy as np

SYM16_DEC_LO = np.array([
    2.4886130446379385e-05,
    5.004404862357365e-05,
    -0.00031806461542141837,
    -0.0006587395993233103,
    0.0019361521588140687,
    0.0039049995940054006,
    -0.008654614801834605,
    -0.017345719766511832,
    0.02596340814931507,
    0.055710956634586896,
    -0.05442474740446879,
    -0.10932173814447667,
    0.24200704402514653,
    0.7113951510631492,
    0.616775904530487,
    0.08221197735161943,
    -0.1556312111138001,
    -0.011154273612198876,
    0.05829728244128703,
    -0.01635633360087952,
    -0.027344240407559332,
    0.012766758253025286,
    0.011195417510109423,
    -0.005449273998107065,
    -0.003333238873398262,
    0.0016544689065060832,
    0.0006981233313770532,
    -0.0003428905100385175,
    -9.075574077493127e-05,
    4.409773896356807e-05,
    5.435866822392437e-06,
    -2.7031723961574194e-06,
])
SYM16_DEC_LO.flags.writeable = False

FILTER_LENGTH = len(SYM16_DEC_LO)


def quadrature_mirror(lo: np.ndarray) -> np.ndarray:
    """High-pass analysis filter: g[k] = (-1)^k * h[L-1-k]."""
    signs = np.where(np.arange(len(lo)) % 2 == 0, 1.0, -1.0)
    return signs * lo[::-1]


SYM16_DEC_HI = quadrature_mirror(SYM16_DEC_LO)
SYM16_DEC_HI.flags.writeable = False


def dwt_periodic(x: np.ndarray, lo: np.ndarray = SYM16_DEC_LO,
                 hi: np.ndarray = SYM16_DEC_HI) -> tuple[np.ndarray, np.ndarray]:
    """One analysis level with periodic (circular) boundary handling.

    Odd-length inputs are extended by repeating the last sample.  The k-th
    output pair is the correlation of the filters with the signal starting
    at position 2k, indices taken modulo the signal length:

        a[k] = sum_m lo[m] * x[(2k + m) mod n]
        d[k] = sum_m hi[m] * x[(2k + m) mod n]
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("dwt_periodic expects a 1-d signal")
    if len(x) % 2 == 1:
        x = np.append(x, x[-1])
    n = len(x)
    if n == 0:
        return np.zeros(0), np.zeros(0)
    idx = (2 * np.arange(n // 2)[:, None] + np.arange(len(lo))[None, :]) % n
    windows = x[idx]
    return windows @ lo, windows @ hi


def wavedec2_detail(x: np.ndarray) -> np.ndarray:
    """Level-2 detail coefficients of the two-level periodized decomposition."""
    approx1, _ = dwt_periodic(x)
    _, detail2 = dwt_periodic(approx1)
    return detail2
