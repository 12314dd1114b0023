import numpy as np
import pytest

from gazetime.wavelets import (
    FILTER_LENGTH,
    SYM16_DEC_HI,
    SYM16_DEC_LO,
    dwt_periodic,
    quadrature_mirror,
)


def test_filter_length_and_normalization():
    assert FILTER_LENGTH == 32
    assert np.sum(SYM16_DEC_LO) == pytest.approx(np.sqrt(2.0), abs=1e-14)
    assert np.sum(SYM16_DEC_LO ** 2) == pytest.approx(1.0, abs=1e-14)


def test_double_shift_orthonormality():
    for k in range(1, FILTER_LENGTH // 2):
        dot = np.dot(SYM16_DEC_LO[: FILTER_LENGTH - 2 * k],
                     SYM16_DEC_LO[2 * k:])
        assert abs(dot) < 1e-14


def test_sixteen_vanishing_moments():
    # the high-pass filter annihilates polynomials up to degree 15
    n = np.arange(FILTER_LENGTH)
    for p in range(16):
        moment = np.sum(SYM16_DEC_HI * n ** p)
        scale = np.sum(np.abs(SYM16_DEC_HI) * n.astype(float) ** p)
        assert abs(moment) / scale < 1e-10


def test_quadrature_mirror_definition():
    g = quadrature_mirror(np.array([1.0, 2.0, 3.0, 4.0]))
    assert g.tolist() == [4.0, -3.0, 2.0, -1.0]


def test_transform_is_orthogonal_on_even_lengths():
    rng = np.random.default_rng(0)
    x = rng.normal(size=64)
    a, d = dwt_periodic(x)
    assert len(a) == 32 and len(d) == 32
    # orthogonal analysis preserves energy
    assert np.sum(a ** 2) + np.sum(d ** 2) == pytest.approx(np.sum(x ** 2),
                                                            rel=1e-12)


def test_constant_signal_has_zero_detail():
    a, d = dwt_periodic(np.full(128, 3.25))
    assert np.max(np.abs(d)) < 1e-13
    assert np.allclose(a, 3.25 * np.sqrt(2.0))


def test_odd_length_is_extended_by_repeating_the_last_sample():
    x = np.arange(65, dtype=float)
    a_odd, d_odd = dwt_periodic(x)
    a_even, d_even = dwt_periodic(np.append(x, x[-1]))
    assert np.array_equal(a_odd, a_even)
    assert np.array_equal(d_odd, d_even)


def test_polynomial_signals_have_interior_zero_detail():
    # degree-3 ramp: detail vanishes away from the periodic wrap point
    x = np.linspace(0.0, 1.0, 256) ** 3
    _, d = dwt_periodic(x)
    interior = d[10:-10]
    assert np.max(np.abs(interior)) < 1e-9
    assert np.max(np.abs(d)) > 1e-4  # the wrap itself is a discontinuity
