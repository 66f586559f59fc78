import math

import numpy as np
import pytest

from becert.kernel import kernel_abs, kernel_point, smoothing_weight


def oracle_K(t: float) -> complex:
    """Direct complex evaluation of the kernel."""
    return 0.5 * (1.0 - t) + 0.5j * ((1.0 - t) / math.tan(math.pi * t) + 1.0 / math.pi)


def test_kernel_abs_at_half():
    # cot(pi/2) = 0, so K(1/2) = 1/4 + i/(2 pi)
    expected = math.sqrt(1.0 / 16.0 + 1.0 / (4.0 * math.pi ** 2))
    assert kernel_abs(0.5) == pytest.approx(expected, rel=1e-14)
    assert kernel_abs(0.5) == pytest.approx(abs(oracle_K(0.5)), rel=1e-14)


def test_kernel_abs_vanishes_at_one():
    # (1-t)cot(pi t) -> -1/pi cancels the +1/pi, and the real part dies too
    assert kernel_abs(1.0 - 1e-7) < 1e-6


def test_kernel_abs_pole_scale_near_zero():
    assert kernel_abs(0.01) == pytest.approx(1.0 / (2.0 * math.pi * 0.01), rel=0.02)


def test_kernel_abs_matches_complex_oracle():
    for t in np.linspace(0.001, 0.999, 499):
        assert kernel_abs(float(t)) == pytest.approx(abs(oracle_K(float(t))), rel=1e-12)


def test_kernel_abs_dominates_real_part():
    for t in np.linspace(0.01, 0.99, 99):
        assert kernel_abs(float(t)) >= (1.0 - t) / 2.0


def test_weight_at_half():
    expected = 0.25 * math.sqrt(1.0 + 4.0 / math.pi ** 2)
    assert smoothing_weight(0.5) == pytest.approx(expected, rel=1e-14)
    oracle = abs(oracle_K(0.5) - 1j / (2.0 * math.pi * 0.5))
    assert smoothing_weight(0.5) == pytest.approx(oracle, rel=1e-14)


def test_weight_limit_at_zero():
    # removable singularity: no overflow, no NaN, limit 1/2
    v = smoothing_weight(1e-12)
    assert math.isfinite(v)
    assert abs(v - 0.5) <= 1e-6


def test_weight_limit_at_one():
    # (1-t)|cot(pi t)| -> 1/pi, so the weight tends to 1/(2 pi)
    assert smoothing_weight(1.0 - 1e-9) == pytest.approx(1.0 / (2.0 * math.pi), abs=1e-6)


def test_weight_matches_complex_oracle():
    # direct subtraction of the pole is stable well above the series switch
    for t in np.linspace(0.001, 0.999, 499):
        oracle = abs(oracle_K(float(t)) - 1j / (2.0 * math.pi * t))
        assert smoothing_weight(float(t)) == pytest.approx(oracle, rel=1e-11)


def test_weight_series_crossover_consistent():
    # series branch and raw branch agree around the 1e-4 switch point
    for t in (0.5e-4, 0.99e-4, 1.01e-4, 2e-4):
        x = math.pi * t
        d_series = -x / 3.0 - x ** 3 / 45.0 - 2.0 * x ** 5 / 945.0
        d_raw = 1.0 / math.tan(x) - 1.0 / x
        w_series = 0.5 * (1.0 - t) * math.sqrt(1.0 + d_series * d_series)
        w_raw = 0.5 * (1.0 - t) * math.sqrt(1.0 + d_raw * d_raw)
        assert w_series == pytest.approx(w_raw, rel=1e-10)
        assert smoothing_weight(t) in (w_series, w_raw)


def test_weight_range():
    ts = np.linspace(1e-9, 1.0 - 1e-9, 2001)
    ws = np.array([smoothing_weight(float(t)) for t in ts])
    assert np.all(ws >= 0.0)
    assert np.all(ws <= 0.5 + 1e-15)


def test_triangle_inequality_against_pole():
    # w = |K - i/(2 pi t)| must sit between | |K| - 1/(2 pi t) | and |K| + 1/(2 pi t)
    for t in np.geomspace(1e-6, 0.99, 200):
        t = float(t)
        k = kernel_abs(t)
        w = smoothing_weight(t)
        pole = 1.0 / (2.0 * math.pi * t)
        assert w <= k + pole + 1e-12 * (k + pole)
        assert w >= abs(k - pole) - 1e-9 * (k + pole)


def test_kernel_point_bundle():
    p = kernel_point(0.3)
    assert p.t == 0.3
    assert p.abs_K == kernel_abs(0.3)
    assert p.smoothing_weight == smoothing_weight(0.3)


@pytest.mark.parametrize("t", [0.0, 1.0, -0.5, 1.5])
def test_domain_rejection(t):
    with pytest.raises(ValueError):
        kernel_abs(t)
    with pytest.raises(ValueError):
        smoothing_weight(t)
