"""High-SNR slope estimation tests."""

import math

import pytest

from icsep.dof import estimate_dof


def test_exact_affine_input_recovers_slope():
    est = estimate_dof(lambda s: 1.5 * 0.5 * math.log2(s), 40, 80, 21)
    assert est.slope == pytest.approx(1.5, abs=1e-9)
    assert est.r_squared == pytest.approx(1.0, abs=1e-12)
    assert est.snr_db_range == (40.0, 80.0)


def test_point_to_point_reads_slope_one():
    est = estimate_dof(lambda s: 0.5 * math.log2(1.0 + s), 40, 80, 21)
    assert est.slope == pytest.approx(1.0, abs=1e-3)


def test_constant_offsets_leave_slope_unchanged():
    base = lambda s: 0.7 * 0.5 * math.log2(s) + 0.3
    ref = estimate_dof(base, 40, 80, 21).slope
    window = 0.5 * math.log2(10.0 ** 8 / 10.0 ** 4)  # x-range of the 40-80 dB window
    for bound in (0.5, 2.0, 10.0):
        shifted = estimate_dof(lambda s: base(s) + bound, 40, 80, 21).slope
        assert abs(shifted - ref) <= 2.0 * bound / window
        assert shifted == pytest.approx(ref, abs=1e-9)


def test_bounded_wiggle_perturbs_slope_within_window_bound():
    base = lambda s: 0.5 * math.log2(s)
    ref = estimate_dof(base, 40, 80, 41).slope
    bound = 0.05
    wiggle = lambda s: base(s) + bound * math.sin(17.0 * math.log(s))
    got = estimate_dof(wiggle, 40, 80, 41).slope
    window = 0.5 * math.log2(10.0 ** 8 / 10.0 ** 4)
    # bounded perturbations move the least-squares slope by O(B / window)
    assert abs(got - ref) <= 3.0 * bound / window


def test_window_validation():
    fn = lambda s: 0.5 * math.log2(s)
    with pytest.raises(ValueError, match="30"):
        estimate_dof(fn, 10, 80, 21)
    with pytest.raises(ValueError, match="exceed"):
        estimate_dof(fn, 50, 40, 21)
    with pytest.raises(ValueError, match="5"):
        estimate_dof(fn, 40, 80, 4)


def test_nonfinite_rate_diagnostic():
    with pytest.raises(ValueError, match="non-finite"):
        estimate_dof(lambda s: float("nan"), 40, 80, 5)
