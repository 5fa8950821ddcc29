import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracplap import (
    Ball,
    Box,
    CubeCalibration,
    CubeUnion,
    FracParams,
    Interval,
    bound_report,
    circumscribed_covering,
    constant_c1,
    constant_c2,
    covering_count,
    eigenvalue_growth_brackets,
    homothety_factor,
    inscribed_packing,
    lower_bound,
    lower_exponent,
    packing_count,
    upper_bound,
    upper_exponent,
)
from fracplap.errors import (
    InvalidParams,
    OrderViolation,
    SizeOrder,
    SubcriticalExponent,
)


def test_calibration_invariants():
    with pytest.raises(InvalidParams):
        CubeCalibration(0.0)
    with pytest.raises(InvalidParams):
        CubeCalibration(1.0, r=0)
    with pytest.raises(InvalidParams):
        CubeCalibration(1.0, r=3, q=2)   # co-genus dominates genus


def test_homothety_factor_examples():
    p1 = FracParams(0.5, 2.0, 1)       # sp = 1
    assert homothety_factor(1.0, 16.0, p1) == pytest.approx(1.0 / 16.0)
    p2 = FracParams(0.5, 4.0, 1)       # sp = 2
    assert homothety_factor(1.0, 16.0, p2) == pytest.approx(0.25)
    assert homothety_factor(1.0, 1.0 + 1e-12, p1) == pytest.approx(1.0, abs=1e-10)
    with pytest.raises(OrderViolation):
        homothety_factor(2.0, 1.0, p1)


def test_packing_covering_examples():
    assert packing_count(1.0, 0.3, 2) == 9
    assert packing_count(1.0, 1.0, 2) == 1
    assert covering_count(1.0, 0.3, 2) == 16
    assert covering_count(1.0, 1.0, 2) == 4      # (floor(1)+1)^2 = 2^N
    with pytest.raises(SizeOrder):
        packing_count(1.0, 2.0, 1)
    with pytest.raises(SizeOrder):
        covering_count(1.0, 2.0, 1)


@settings(max_examples=300, deadline=None)
@given(
    a=st.floats(min_value=1e-3, max_value=1e3),
    ratio=st.floats(min_value=1e-3, max_value=1.0, exclude_max=False),
    dim=st.integers(min_value=1, max_value=2),
)
def test_packing_sandwich(a, ratio, dim):
    a_prime = a * ratio
    m = packing_count(a, a_prime, dim)
    alpha = a / a_prime
    assert m >= 1
    assert 2.0**-dim * alpha**dim <= m + 1e-9
    assert m <= alpha**dim * (1 + 1e-12)


@settings(max_examples=300, deadline=None)
@given(
    b=st.floats(min_value=1e-3, max_value=1e3),
    ratio=st.floats(min_value=1e-3, max_value=1.0),
    dim=st.integers(min_value=1, max_value=2),
)
def test_covering_sandwich(b, ratio, dim):
    a_prime = b * ratio
    k = covering_count(b, a_prime, dim)
    alpha = b / a_prime
    assert alpha**dim <= k * (1 + 1e-12)
    assert k <= 2.0**dim * alpha**dim * (1 + 1e-12)


def test_constant_c1_hand_value():
    params = FracParams(0.5, 2.0, 1)
    cal = CubeCalibration(1.0, r=1, q=1)
    assert constant_c1(cal, params) == 2.0 ** (-1.5)
    assert constant_c1(CubeCalibration(1.0, r=2, q=2), params) == 2.0 * constant_c1(cal, params)


def test_constant_c2_hand_value():
    params = FracParams(0.75, 2.0, 1)   # sp = 1.5
    cal = CubeCalibration(1.0, r=1, q=1)
    assert constant_c2(cal, params) == 256.0
    assert constant_c2(CubeCalibration(1.0, r=1, q=2), params) == 512.0
    with pytest.raises(SubcriticalExponent):
        constant_c2(cal, FracParams(0.4, 2.0, 1))   # sp = 0.8 <= 1


def test_lambda0_power_absent_at_one():
    params = FracParams(0.6, 2.5, 1)
    c_at_1 = constant_c1(CubeCalibration(1.0), params)
    c_at_2 = constant_c1(CubeCalibration(2.0), params)
    assert c_at_1 != c_at_2
    assert c_at_1 == pytest.approx(
        c_at_2 * 2.0 ** (1.0 / (params.dim * params.p - params.dim + params.sp)))


def test_exponent_ordering_sweep():
    rng = np.random.default_rng(41)
    checked = 0
    while checked < 100:
        s = rng.uniform(0.05, 0.95)
        p = rng.uniform(1.05, 6.0)
        dim = int(rng.integers(1, 3))
        if s * p <= dim:
            continue
        params = FracParams(s, p, dim)
        lo, up = lower_exponent(params), upper_exponent(params)
        mid = dim / params.sp
        assert lo <= mid <= up
        checked += 1


def test_exponents_agree_for_large_p():
    dim, s = 1, 0.9
    for p in (10.0, 100.0, 1000.0):
        params = FracParams(s, p, dim)
        mid = dim / params.sp
        assert upper_exponent(params) / mid == pytest.approx(1.0, rel=5.0 / p)


def test_lower_bound_threshold_and_power_law():
    params = FracParams(0.5, 2.0, 1)
    cal = CubeCalibration(1.0)
    packing = (1, 1.0)
    val, valid = lower_bound(cal, params, 1.0, 100.0, packing)
    assert val == pytest.approx(2.0 ** (-1.5) * 10.0)
    assert valid
    below, flag = lower_bound(cal, params, 1.0, 0.5, packing)
    assert below > 0 and not flag
    # doubling law: lambda scaled by 2^((Np-N+sp)/N) doubles the bound
    factor = 2.0 ** ((1 * 2.0 - 1 + 1.0) / 1)
    v2, _ = lower_bound(cal, params, 1.0, 100.0 * factor, packing)
    assert v2 == pytest.approx(2.0 * val)


def test_upper_bound_value_and_threshold():
    params = FracParams(0.75, 2.0, 1)
    cal = CubeCalibration(1.0)
    covering = (1, 1.0)
    val, valid = upper_bound(cal, params, 1.0, 100.0, covering)
    assert val == pytest.approx(256.0 * 100.0**2)
    assert valid
    # threshold lambda0 / (2^(N+1) h b^sp) = 1/4
    _, flag = upper_bound(cal, params, 1.0, 0.2, covering)
    assert not flag
    with pytest.raises(SubcriticalExponent):
        upper_bound(cal, FracParams(0.4, 2.0, 1), 1.0, 10.0, covering)


def test_growth_brackets_invert_bound_curves():
    params = FracParams(0.8, 2.0, 1)
    cal = CubeCalibration(1.3, r=2, q=3)
    volume = 0.7
    for k in (1, 5, 40):
        lo, hi = eigenvalue_growth_brackets(cal, params, volume, k)
        assert lo < hi
        v_low, _ = lower_bound(cal, params, volume, hi, (1, 1.0))
        assert v_low == pytest.approx(float(k), rel=1e-10)
        v_up, _ = upper_bound(cal, params, volume, lo, (1, 1.0))
        assert v_up == pytest.approx(float(k), rel=1e-10)


def test_packing_exact_for_interval_box_cubes():
    n, a, ratio = inscribed_packing(Interval(0.0, 1.0), 8)
    assert (n, a, ratio) == (8, 0.125, 1.0)
    n, a, ratio = inscribed_packing(Box((0.0, 0.0), (1.0, 2.0)), 4)
    assert a == 0.25 and n == 4 * 8 and ratio == pytest.approx(1.0)
    cu = CubeUnion(0.5, ((0.0, 0.0), (1.0, 1.0)))
    assert inscribed_packing(cu)[0] == 2
    assert circumscribed_covering(cu)[2] == pytest.approx(1.0)


def test_packing_ball_ratios():
    ball = Ball((0.0, 0.0), 0.5)
    n, a, ratio = inscribed_packing(ball, 16)
    assert 0.5 < ratio < 1.0
    assert n * a**2 <= ball.volume()
    h, b, cover_ratio = circumscribed_covering(ball, 16)
    assert 1.0 < cover_ratio < 2.0
    assert h * b**2 >= ball.volume()


def test_bound_report_columns_and_validity():
    params = FracParams(0.75, 2.0, 1)
    cal = CubeCalibration(10.0)
    lambdas = np.geomspace(1.0, 1e5, 40)
    report = bound_report(cal, params, Interval(0.0, 1.0), lambdas, granularity=4)
    assert report.c2 is not None
    assert len(report.lower) == 40
    assert (report.lower > 0).all()
    assert report.lower_valid.dtype == bool
    assert (~report.lower_valid[:1]).any() or report.lower_thresh <= 1.0
    sub = FracParams(0.4, 2.0, 1)
    rep2 = bound_report(CubeCalibration(10.0), sub, Interval(0.0, 1.0), lambdas)
    assert rep2.upper is None
    with pytest.raises(SubcriticalExponent):
        bound_report(CubeCalibration(10.0), sub, Interval(0.0, 1.0), lambdas,
                     want_upper=True)


def test_bound_report_measured_counts():
    params = FracParams(0.75, 2.0, 1)
    cal = CubeCalibration(1.0)

    class Vals:
        eigenvalues = np.array([1.0, 2.0, 3.0])

    report = bound_report(cal, params, Interval(0.0, 1.0),
                          np.array([1.5, 2.0, 10.0]), spectrum=Vals)
    np.testing.assert_array_equal(report.measured, [1.0, 1.0, 3.0])
