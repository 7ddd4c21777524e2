"""Analytic Gaussian control waveforms and the derived mixing-angle data.

Two effective coupling strengths eta1(t), eta2(t) (each a sum of one or two
Gaussians) define the mixing angle theta = arctan(eta1/eta2) and the total
amplitude eta = sqrt(eta1^2 + eta2^2).  The corrected driving Hamiltonian
needs eta, theta and their first/second time derivatives, all of which are
available in closed form:

    theta_dot  = (eta1' eta2 - eta2' eta1) / eta^2
    eta_dot    = (eta1 eta1' + eta2 eta2') / eta
    theta_ddot = [(eta1'' eta2 - eta1 eta2'') eta
                  - 2 eta_dot (eta1' eta2 - eta1 eta2')] / eta^3

Far out in the pulse tails both Gaussians underflow, so the ratio-dependent
quantities are evaluated from log-domain values (log-sum-exp across the
Gaussians of one channel) rather than from the possibly-underflowed
amplitudes.  All frequency-like inputs are "value / 2pi in MHz" and are
converted to angular frequency in rad/us (MHz * us = 1).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateControlError

TWO_PI = 2.0 * np.pi

#: Underflow guard on the total amplitude eta (rad/us).
ETA_FLOOR = 1e-30


def angular(value_over_2pi_mhz: float) -> float:
    """Convert 'value/2pi in MHz' to angular frequency in rad/us."""
    return TWO_PI * value_over_2pi_mhz


@dataclass(frozen=True)
class GaussianPulse:
    """amplitude * exp(-[(t - delay)/width]^2), amplitude in rad/us."""

    amplitude: float
    delay: float
    width: float

    def __post_init__(self):
        if self.amplitude < 0:
            raise ValueError("pulse amplitude must be >= 0")
        if self.width <= 0:
            raise ValueError("pulse width must be > 0")

    def value(self, t):
        u = (np.asarray(t, dtype=float) - self.delay) / self.width
        return self.amplitude * np.exp(-(u**2))


def gaussian(t, pulse: GaussianPulse):
    """Evaluate a Gaussian pulse at time t (scalar or array)."""
    return pulse.value(t)


@dataclass(frozen=True)
class DerivedAngles:
    """Amplitude/angle data derived from one waveform sample.

    Every field broadcasts with the time argument that produced it:
    scalars in, scalars out; arrays in, arrays out.
    """

    eta: np.ndarray
    theta: np.ndarray
    eta_dot: np.ndarray
    theta_dot: np.ndarray
    theta_ddot: np.ndarray
    sin_theta: np.ndarray
    cos_theta: np.ndarray


def _channel_stats(pulses, t):
    """Log-amplitude and log-derivative data for a sum of Gaussians.

    Returns (logv, s, q, value) with s = (d/dt) log(channel) and
    q = channel'' / channel.  For a sum, s and q are amplitude-weighted
    means of the per-pulse values; the weights come from a softmax over
    log-amplitudes so the tails never divide underflowed numbers.
    """
    t = np.asarray(t, dtype=float)
    live = [p for p in pulses if p.amplitude > 0]
    if not live:
        zero = np.zeros_like(t)
        return np.full_like(t, -np.inf), zero, zero, zero

    logs, ss, qq = [], [], []
    for p in live:
        u = (t - p.delay) / p.width
        logs.append(np.log(p.amplitude) - u**2)
        ss.append(-2.0 * u / p.width)
        qq.append((4.0 * u**2 - 2.0) / p.width**2)
    logs = np.stack(logs)
    ss = np.stack(ss)
    qq = np.stack(qq)

    top = logs.max(axis=0)
    w = np.exp(logs - top)
    wsum = w.sum(axis=0)
    logv = top + np.log(wsum)
    w = w / wsum
    s = (w * ss).sum(axis=0)
    q = (w * qq).sum(axis=0)
    value = np.exp(logv)
    return logv, s, q, value


@dataclass(frozen=True)
class ControlWaveform:
    """A pair of control channels, each a sum of one or two Gaussians.

    Channel 1 drives the phi2 <-> phi3 transition, channel 2 the
    phi1 <-> phi3 transition.
    """

    eta1: tuple[GaussianPulse, ...]
    eta2: tuple[GaussianPulse, ...]

    def __post_init__(self):
        for name, ch in (("eta1", self.eta1), ("eta2", self.eta2)):
            if not 1 <= len(ch) <= 2:
                raise ValueError(f"{name} must hold one or two Gaussian pulses")

    def sample(self, t):
        """Return (eta1, eta2, eta1', eta2', eta1'', eta2'') at time t."""
        t = np.asarray(t, dtype=float)
        _, s1, q1, v1 = _channel_stats(self.eta1, t)
        _, s2, q2, v2 = _channel_stats(self.eta2, t)
        return v1, v2, s1 * v1, s2 * v2, q1 * v1, q2 * v2

    def derived(self, t) -> DerivedAngles:
        return derived_angles(self, t)


def transfer_waveform(eta0_over_2pi_mhz: float, t1: float, t2: float,
                      width: float) -> ControlWaveform:
    """Population-transfer pair: one Gaussian per channel.

    With t2 < t1 channel 2 peaks first, so the mixing angle runs from
    theta -> 0 before the pulses to theta -> pi/2 after them.
    """
    eta0 = angular(eta0_over_2pi_mhz)
    return ControlWaveform(
        eta1=(GaussianPulse(eta0, t1, width),),
        eta2=(GaussianPulse(eta0, t2, width),),
    )


def superposition_waveform(eta0_over_2pi_mhz: float, t3: float, t4: float,
                           width: float) -> ControlWaveform:
    """Superposition-preparation pair: eta2 carries the extra t3 Gaussian.

    eta1/eta2 -> 0 at the start of the operation and -> 1 at the end, so
    theta runs from 0 to pi/4.
    """
    eta0 = angular(eta0_over_2pi_mhz)
    return ControlWaveform(
        eta1=(GaussianPulse(eta0, t3, width),),
        eta2=(GaussianPulse(eta0, t4, width), GaussianPulse(eta0, t3, width)),
    )


def derived_angles(waveform: ControlWaveform, t) -> DerivedAngles:
    """Closed-form eta, theta and derivatives, stable in the pulse tails.

    The mixing angle is taken from the log-domain channel ratio
    L = log(eta1) - log(eta2); writing m = exp(-|L|) <= 1 gives exact,
    underflow-free expressions such as sin(theta)cos(theta) = m/(1+m^2).
    """
    scalar = np.ndim(t) == 0
    t = np.atleast_1d(np.asarray(t, dtype=float))

    logv1, s1, q1, v1 = _channel_stats(waveform.eta1, t)
    logv2, s2, q2, v2 = _channel_stats(waveform.eta2, t)
    if np.any(np.isneginf(logv1) & np.isneginf(logv2)):
        raise DegenerateControlError(
            "both control channels are identically zero; the mixing angle is undefined"
        )

    ratio_log = logv1 - logv2  # +/- inf in single-channel limits
    swap = ratio_log > 0
    m = np.exp(-np.abs(ratio_log))
    one_plus = 1.0 + m**2
    root = np.sqrt(one_plus)

    theta = np.where(swap, np.pi / 2 - np.arctan(m), np.arctan(m))
    sin_theta = np.where(swap, 1.0 / root, m / root)
    cos_theta = np.where(swap, m / root, 1.0 / root)
    sincos = m / one_plus

    theta_dot = (s1 - s2) * sincos
    log_slope = np.where(swap, (s1 + m**2 * s2) / one_plus,
                         (m**2 * s1 + s2) / one_plus)  # eta'/eta
    theta_ddot = (q1 - q2 - 2.0 * log_slope * (s1 - s2)) * sincos

    eta = np.hypot(v1, v2)
    eta_dot = log_slope * eta

    out = DerivedAngles(eta=eta, theta=theta, eta_dot=eta_dot,
                        theta_dot=theta_dot, theta_ddot=theta_ddot,
                        sin_theta=sin_theta, cos_theta=cos_theta)
    if scalar:
        out = DerivedAngles(*(float(getattr(out, f)[0]) for f in
                              ("eta", "theta", "eta_dot", "theta_dot",
                               "theta_ddot", "sin_theta", "cos_theta")))
    return out
