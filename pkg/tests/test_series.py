import math

import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp, mpf

from photoderiv import (
    OutOfRange,
    PrecisionPolicy,
    TruncationFailure,
    euler_apply,
    z_derivative,
    z_derivative_series,
    z_value,
)

# frozen from the closed forms at 256 bits
Z_AT_02 = "1.091089451179961906330487"
Z1_AT_02 = "1.039132810647582767933798"
Z2_AT_02 = "8.164614940802436033765552"
EULER_1_1_AT_01 = "0.09036746012871967810189633"


def rel_err(a, b):
    with mp.workprec(300):
        if b == 0:
            return abs(a)
        return abs(mpf(a) - mpf(b)) / abs(mpf(b))


class TestZValue:
    def test_zero(self):
        assert z_value(0.0).value == 1

    def test_anchor(self):
        assert rel_err(z_value(0.2).value, mpf(Z_AT_02)) < mpf("1e-24")

    def test_singular_endpoint(self):
        with pytest.raises(OutOfRange):
            z_value(0.5)

    def test_negative(self):
        with pytest.raises(OutOfRange):
            z_value(-0.1)

    def test_log_value(self):
        sv = z_value(0.2)
        assert sv.log_value == pytest.approx(math.log(float(sv.value)), rel=1e-12)


class TestZDerivativeRecurrence:
    def test_first_derivative_closed_form(self):
        # Z' = 4 y (1 - 4y^2)^(-3/2)
        got = z_derivative(1, 0.2).value
        assert rel_err(got, mpf(Z1_AT_02)) < mpf("1e-24")
        with mp.workprec(256):
            want = 4 * mpf(0.2) * (1 - 4 * mpf(0.2) ** 2) ** mpf("-1.5")
        assert rel_err(got, want) < mpf("1e-70")

    def test_second_derivative_closed_form(self):
        # Z'' = 4 (1-4y^2)^(-3/2) + 48 y^2 (1-4y^2)^(-5/2)
        got = z_derivative(2, 0.2).value
        assert rel_err(got, mpf(Z2_AT_02)) < mpf("1e-24")
        with mp.workprec(256):
            y = mpf(0.2)
            d = 1 - 4 * y * y
            want = 4 * d ** mpf("-1.5") + 48 * y * y * d ** mpf("-2.5")
        assert rel_err(got, want) < mpf("1e-70")

    def test_odd_orders_vanish_at_zero(self):
        for j in (1, 3, 5, 11):
            sv = z_derivative(j, 0.0)
            assert sv.value == 0
            assert sv.log_value == float("-inf")

    def test_exact_even_anchors_at_zero(self):
        assert z_derivative(2, 0.0).value == 4
        assert z_derivative(4, 0.0).value == 144
        # C(2m, m) * (2m)! at m = 3
        assert z_derivative(6, 0.0).value == math.comb(6, 3) * math.factorial(6)

    def test_negative_order(self):
        with pytest.raises(OutOfRange):
            z_derivative(-1, 0.1)

    @given(j=st.integers(min_value=1, max_value=40),
           y=st.floats(min_value=1e-4, max_value=0.49),
           dy=st.floats(min_value=1e-4, max_value=0.05))
    @settings(max_examples=60, deadline=None)
    def test_positive_and_strictly_increasing(self, j, y, dy):
        hi = min(y + dy, 0.499)
        a = z_derivative(j, y).value
        b = z_derivative(j, hi).value
        assert a >= 0
        assert b > a

    def test_finite_difference_consistency(self):
        # (Z^(j)(y+h) - Z^(j)(y-h)) / 2h = Z^(j+1)(y) + O(h^2)
        policy = PrecisionPolicy(mantissa_bits=320)
        with mp.workprec(320):
            h = mpf("1e-6")
            for j in range(0, 11):
                for y in (mpf("0.1"), mpf("0.3")):
                    fd = (z_derivative(j, y + h, policy).value
                          - z_derivative(j, y - h, policy).value) / (2 * h)
                    exact = z_derivative(j + 1, y, policy).value
                    assert rel_err(fd, exact) < mpf("1e-8")


class TestZDerivativeSeries:
    def test_matches_z_value(self):
        sv = z_derivative_series(0, 0.2)
        assert rel_err(sv.value, z_value(0.2).value) < mpf("1e-30")
        assert sv.tail_bound <= 1e-30

    def test_single_term_anchors(self):
        assert z_derivative_series(2, 0.0).value == 4
        assert z_derivative_series(4, 0.0).value == 144
        assert z_derivative_series(3, 0.0).value == 0

    def test_recurrence_equiv_medium_orders(self):
        for j in (1, 5, 10, 25, 60, 100):
            for y in (0.05, 0.2, 0.4):
                a = z_derivative(j, y).value
                b = z_derivative_series(j, y).value
                assert rel_err(a, b) < mpf("1e-20"), (j, y)

    def test_tail_bound_is_honest(self):
        # truncation error bounded by the certificate, vs a tighter policy
        loose = PrecisionPolicy(mantissa_bits=256, tail_epsilon=1e-8)
        tight = PrecisionPolicy(mantissa_bits=256, tail_epsilon=1e-40)
        for j, y in [(0, 0.3), (3, 0.2), (8, 0.45)]:
            a = z_derivative_series(j, y, loose)
            b = z_derivative_series(j, y, tight)
            with mp.workprec(256):
                assert abs(a.value - b.value) <= mpf(a.tail_bound) + mpf("1e-45")

    def test_truncation_failure(self):
        with pytest.raises(TruncationFailure):
            z_derivative_series(0, 0.49, PrecisionPolicy(max_terms=5))


class TestEulerApply:
    def test_n0_is_exactly_y_times_derivative(self):
        for l in (0, 1, 2, 7):
            with mp.workprec(256):
                want = mpf(0.3) * z_derivative(l, 0.3).value
            assert euler_apply(0, l, 0.3).value == want

    def test_no_constant_term(self):
        assert euler_apply(1, 1, 0.0).value == 0

    def test_anchor(self):
        got = euler_apply(1, 1, 0.1).value
        assert rel_err(got, mpf(EULER_1_1_AT_01)) < mpf("1e-24")
        # closed form 8 y^2 Z^3 + 48 y^4 Z^5
        with mp.workprec(256):
            y = mpf(0.1)
            z = z_value(y).value
            want = 8 * y**2 * z**3 + 48 * y**4 * z**5
        assert rel_err(got, want) < mpf("1e-30")

    def test_n0_l1_anchor(self):
        got = euler_apply(0, 1, 0.2).value
        assert rel_err(got, mpf("0.2078265621295165535867595")) < mpf("1e-24")

    @pytest.mark.parametrize("l", [0, 1, 2, 3, 6, 9])
    def test_euler_expansion_identities(self, l):
        # (y d/dy)(y Z^(l))   = y Z^(l) + y^2 Z^(l+1)
        # (y d/dy)^2(y Z^(l)) = y Z^(l) + 3 y^2 Z^(l+1) + y^3 Z^(l+2)
        # (y d/dy)^3(y Z^(l)) = y Z^(l) + 7 y^2 Z^(l+1) + 6 y^3 Z^(l+2) + y^4 Z^(l+3)
        with mp.workprec(256):
            y = mpf("0.17")
            zs = [z_derivative(l + i, y).value for i in range(4)]
            e1 = y * zs[0] + y**2 * zs[1]
            e2 = y * zs[0] + 3 * y**2 * zs[1] + y**3 * zs[2]
            e3 = y * zs[0] + 7 * y**2 * zs[1] + 6 * y**3 * zs[2] + y**4 * zs[3]
        assert rel_err(euler_apply(1, l, 0.17).value, e1) < mpf("1e-28")
        assert rel_err(euler_apply(2, l, 0.17).value, e2) < mpf("1e-28")
        assert rel_err(euler_apply(3, l, 0.17).value, e3) < mpf("1e-28")

    @given(n=st.integers(min_value=0, max_value=3), l=st.integers(min_value=0, max_value=12),
           y=st.floats(min_value=0, max_value=0.45))
    @settings(max_examples=60, deadline=None)
    def test_non_negative(self, n, l, y):
        assert euler_apply(n, l, y).value >= 0

    def test_bad_arguments(self):
        with pytest.raises(OutOfRange):
            euler_apply(-1, 0, 0.1)
        with pytest.raises(OutOfRange):
            euler_apply(1, -2, 0.1)
        with pytest.raises(OutOfRange):
            euler_apply(1, 1, 0.6)


class TestPrecisionPolicy:
    def test_invalid_fields(self):
        with pytest.raises(OutOfRange):
            PrecisionPolicy(mantissa_bits=32)
        with pytest.raises(OutOfRange):
            PrecisionPolicy(tail_epsilon=0.0)
        with pytest.raises(OutOfRange):
            PrecisionPolicy(max_terms=0)

    def test_bits_control_accuracy(self):
        coarse = z_derivative(10, 0.3, PrecisionPolicy(mantissa_bits=64)).value
        fine = z_derivative(10, 0.3, PrecisionPolicy(mantissa_bits=320)).value
        assert rel_err(coarse, fine) < mpf("1e-15")
        assert rel_err(coarse, fine) > mpf("1e-22")
