import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import msdsim
from msdsim.errors import DegenerateControlError
from msdsim.pulses import ControlWaveform, GaussianPulse, angular, derived_angles, gaussian

from conftest import ETA0, WIDTH

# frozen oracle values (direct formula evaluation, see the computations in
# each test's comment)
THETA_AT_ZERO = 0.04956492735684238          # atan(exp((t2^2 - t1^2)/T^2))
COUPLING_AT_HALF = 6.906231641595608         # eta0 * exp(-((0.5-0.25)/T)^2)
THETA_DOT_AT_HALF = 3.00365244136939         # 5-point FD of theta at t = 0.5
THETA_DOT_AT_035 = 2.0942875746059646        # 5-point FD at t = 0.35
THETA_DDOT_AT_035 = 9.01846776239316         # 5-point FD (2nd) at t = 0.35
SUPERPOS_ETA2_AT_T3 = 10.130553187542814     # eta0 * (1 + exp(-((t3-t4)/T)^2))


def fd5_first(f, t, h=1e-4):
    return (f(t - 2 * h) - 8 * f(t - h) + 8 * f(t + h) - f(t + 2 * h)) / (12 * h)


def fd5_second(f, t, h=1e-4):
    return (-f(t - 2 * h) + 16 * f(t - h) - 30 * f(t) + 16 * f(t + h)
            - f(t + 2 * h)) / (12 * h * h)


class TestGaussian:
    def test_peak_value(self):
        pulse = GaussianPulse(angular(1.6), 0.75, WIDTH)
        assert gaussian(0.75, pulse) == pytest.approx(ETA0, rel=1e-15)

    @pytest.mark.parametrize("offset", [WIDTH, -WIDTH])
    def test_one_width_off_peak(self, offset):
        pulse = GaussianPulse(angular(1.6), 0.75, WIDTH)
        assert gaussian(0.75 + offset, pulse) == pytest.approx(ETA0 / math.e, rel=1e-14)

    def test_positive_and_peaks_on_grid(self):
        pulse = GaussianPulse(ETA0, 0.75, WIDTH)
        grid = np.linspace(0.0, 2.0, 2001)
        values = gaussian(grid, pulse)
        assert values.min() > 0
        assert abs(values.max() - ETA0) <= 1e-4  # grid lands 1e-3 from the peak

    def test_validation(self):
        with pytest.raises(ValueError):
            GaussianPulse(-1.0, 0.0, 1.0)
        with pytest.raises(ValueError):
            GaussianPulse(1.0, 0.0, 0.0)


class TestTransferWaveform:
    def test_midpoint_is_balanced(self, transfer_default):
        ang = derived_angles(transfer_default, 0.5)
        assert ang.theta == pytest.approx(np.pi / 4, abs=1e-12)

    def test_theta_at_zero_matches_direct_formula(self, transfer_default):
        # theta(0) = atan(exp((t2^2 - t1^2)/T^2)), evaluated directly
        ang = derived_angles(transfer_default, 0.0)
        assert ang.theta == pytest.approx(THETA_AT_ZERO, abs=1e-14)
        direct = math.atan(math.exp((0.25**2 - 0.75**2) / WIDTH**2))
        assert ang.theta == pytest.approx(direct, abs=1e-14)

    def test_boundary_limits(self, transfer_default):
        assert derived_angles(transfer_default, 50.0).theta == pytest.approx(
            np.pi / 2, abs=1e-12)
        assert derived_angles(transfer_default, -50.0).theta == pytest.approx(
            0.0, abs=1e-12)

    def test_far_tail_is_finite(self, transfer_default):
        # both Gaussians underflow there; the log-domain path must stay clean
        ang = derived_angles(transfer_default, 300.0)
        for field in ("eta", "theta", "eta_dot", "theta_dot", "theta_ddot"):
            assert np.isfinite(getattr(ang, field))


class TestSuperpositionWaveform:
    def test_late_time_ratio_one(self, superposition_default):
        assert derived_angles(superposition_default, 50.0).theta == pytest.approx(
            np.pi / 4, abs=1e-10)

    def test_early_time_ratio_zero(self, superposition_default):
        assert derived_angles(superposition_default, -50.0).theta == pytest.approx(
            0.0, abs=1e-12)

    def test_values_at_t3(self, superposition_default):
        e1, e2, *_ = superposition_default.sample(1.15)
        assert e1 == pytest.approx(ETA0, rel=1e-14)
        assert e2 == pytest.approx(SUPERPOS_ETA2_AT_T3, rel=1e-14)


class TestDerivatives:
    @pytest.mark.parametrize("t", [0.05, 0.35, 0.5, 0.8, 1.1])
    def test_channel_derivatives_match_finite_differences(self, transfer_default, t):
        h = 1e-5
        e1, e2, d1, d2, dd1, dd2 = transfer_default.sample(t)
        for idx, (val, dval, ddval) in enumerate([(e1, d1, dd1), (e2, d2, dd2)]):
            f = lambda x: transfer_default.sample(x)[idx]
            fd1 = (f(t + h) - f(t - h)) / (2 * h)
            fd2 = (f(t + h) - 2 * f(t) + f(t - h)) / h**2
            assert dval == pytest.approx(fd1, rel=1e-6)
            assert ddval == pytest.approx(fd2, rel=1e-6, abs=1e-6 * abs(ddval) + 1e-4)

    def test_theta_dot_frozen_values(self, transfer_default):
        assert derived_angles(transfer_default, 0.5).theta_dot == pytest.approx(
            THETA_DOT_AT_HALF, rel=1e-9)
        assert derived_angles(transfer_default, 0.35).theta_dot == pytest.approx(
            THETA_DOT_AT_035, rel=1e-9)

    def test_theta_ddot_frozen_value(self, transfer_default):
        assert derived_angles(transfer_default, 0.35).theta_ddot == pytest.approx(
            THETA_DDOT_AT_035, rel=1e-7)

    @pytest.mark.parametrize("fixture", ["transfer_default", "superposition_default"])
    @pytest.mark.parametrize("t", [0.1, 0.3, 0.5, 0.75, 1.0, 1.3])
    def test_angle_derivatives_match_theta_finite_differences(self, fixture, t, request):
        w = request.getfixturevalue(fixture)
        theta = lambda x: derived_angles(w, x).theta
        eta = lambda x: derived_angles(w, x).eta
        ang = derived_angles(w, t)
        if abs(ang.theta_dot) > 1e-8:
            assert ang.theta_dot == pytest.approx(fd5_first(theta, t), rel=1e-6)
        assert ang.theta_ddot == pytest.approx(
            fd5_second(theta, t), rel=1e-6, abs=1e-6 * max(1.0, abs(ang.theta_ddot)))
        # abs floor covers exact zeros (eta_dot vanishes at the symmetric point)
        assert ang.eta_dot == pytest.approx(fd5_first(eta, t), rel=1e-6,
                                            abs=1e-9 * max(1.0, ang.eta))

    @given(st.floats(-3.0, 4.0))
    @settings(max_examples=60, deadline=None)
    def test_theta_matches_plain_arctan(self, t):
        w = msdsim.transfer_waveform(1.6, 0.75, 0.25, WIDTH)
        e1, e2, *_ = w.sample(t)
        if e2 > 1e-30:
            assert derived_angles(w, t).theta == pytest.approx(
                math.atan2(e1, e2), abs=1e-10)


class TestDegenerateAndEdgeCases:
    def test_constant_ratio_has_frozen_angle(self):
        pulse = GaussianPulse(ETA0, 0.5, WIDTH)
        w = ControlWaveform(eta1=(pulse,), eta2=(pulse,))
        for t in (0.0, 0.4, 1.0):
            ang = derived_angles(w, t)
            assert ang.theta == pytest.approx(np.pi / 4, abs=1e-15)
            assert ang.theta_dot == 0.0
            assert ang.theta_ddot == 0.0

    def test_all_zero_channels_rejected(self):
        w = ControlWaveform(eta1=(GaussianPulse(0.0, 0.5, WIDTH),),
                            eta2=(GaussianPulse(0.0, 0.5, WIDTH),))
        with pytest.raises(DegenerateControlError):
            derived_angles(w, 0.5)

    def test_single_live_channel_is_fine(self):
        w = ControlWaveform(eta1=(GaussianPulse(0.0, 0.5, WIDTH),),
                            eta2=(GaussianPulse(ETA0, 0.5, WIDTH),))
        ang = derived_angles(w, 0.5)
        assert ang.theta == 0.0
        assert ang.theta_dot == 0.0

    def test_channel_count_validation(self):
        with pytest.raises(ValueError):
            ControlWaveform(eta1=(), eta2=(GaussianPulse(1.0, 0.0, 1.0),))

    def test_vectorized_matches_scalar(self, transfer_default):
        ts = np.array([0.1, 0.5, 0.9])
        vec = derived_angles(transfer_default, ts)
        for i, t in enumerate(ts):
            scal = derived_angles(transfer_default, float(t))
            assert vec.theta[i] == scal.theta
            assert vec.theta_dot[i] == scal.theta_dot


def test_angular_units():
    assert angular(1.6) == pytest.approx(2 * np.pi * 1.6, rel=1e-15)
