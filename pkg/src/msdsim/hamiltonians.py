"""Closed-form driving Hamiltonians for the three-level system.

The bare (STIRAP) Hamiltonian couples each outer level to the shared
intermediate level phi3:

    H0 = eta * [[0, 0, cos(theta)], [0, 0, sin(theta)],
                [cos(theta), sin(theta), 0]]

so the (phi1, phi3) coupling equals eta2 and the (phi2, phi3) coupling
equals eta1.  Its spectrum is (-eta, 0, +eta) with the zero-eigenvalue dark
state sin(theta)|phi1> - cos(theta)|phi2>.

The corrected (MSD) Hamiltonian keeps exactly the same coupling structure
and only reshapes the two couplings:

    (phi1, phi3):  eta cos(theta) + V1      V1 = 4 sin(theta) (eta' th' - eta th'') / R^2
    (phi2, phi3):  eta sin(theta) - V2      V2 = 4 cos(theta) (eta' th' - eta th'') / R^2

with R = 2 sqrt(eta^2 + theta_dot^2).  The corrections derive from the
second superadiabatic frame: writing mu = arctan(theta_dot/eta), they are
V1 = -mu' sin(theta), V2 = -mu' cos(theta), which is the form used by the
numerical cross-check in the superadiabatic module.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DegenerateControlError
from .pulses import ControlWaveform, DerivedAngles, ETA_FLOOR, derived_angles

THREE_LEVEL_BASIS = ("phi1", "phi2", "phi3")

_SQRT2 = np.sqrt(2.0)


class HamiltonianSampler:
    """A time -> Hermitian matrix map with a declared basis labelling.

    ``evaluate`` must accept a 1-d float array of times and return the
    stacked (n, dim, dim) complex matrices; `at` and `table` are thin
    wrappers over it.
    """

    def __init__(self, dim: int, basis: tuple[str, ...],
                 evaluate: Callable[[np.ndarray], np.ndarray]):
        self.dim = dim
        self.basis = tuple(basis)
        self._evaluate = evaluate

    def at(self, t: float) -> np.ndarray:
        return self._evaluate(np.atleast_1d(np.asarray(t, dtype=float)))[0]

    def table(self, times) -> np.ndarray:
        times = np.atleast_1d(np.asarray(times, dtype=float))
        return self._evaluate(times)

    def __repr__(self):
        return f"HamiltonianSampler(dim={self.dim}, basis={self.basis})"


def _coupling_matrices(c1, c2) -> np.ndarray:
    """Stack [[0,0,c1],[0,0,c2],[c1,c2,0]] over the trailing time axis."""
    c1 = np.asarray(c1, dtype=float)
    n = c1.shape[0]
    h = np.zeros((n, 3, 3), dtype=complex)
    h[:, 0, 2] = c1
    h[:, 2, 0] = c1
    h[:, 1, 2] = c2
    h[:, 2, 1] = c2
    return h


def stirap_hamiltonian(waveform: ControlWaveform) -> HamiltonianSampler:
    """Bare driving Hamiltonian: couplings are the raw pulse amplitudes."""

    def evaluate(ts):
        e1, e2, *_ = waveform.sample(ts)
        return _coupling_matrices(e2, e1)

    return HamiltonianSampler(3, THREE_LEVEL_BASIS, evaluate)


def msd_couplings(angles: DerivedAngles):
    """Corrected (phi1-phi3, phi2-phi3) couplings from one angle sample."""
    gap_sq = angles.eta**2 + angles.theta_dot**2
    if np.any(gap_sq <= ETA_FLOOR**2):
        raise DegenerateControlError(
            "eta and theta_dot both vanish; the corrected couplings are undefined"
        )
    drive = (angles.eta_dot * angles.theta_dot - angles.eta * angles.theta_ddot) / gap_sq
    c1 = angles.eta * angles.cos_theta + angles.sin_theta * drive
    c2 = angles.eta * angles.sin_theta - angles.cos_theta * drive
    return c1, c2


def msd_hamiltonian(waveform: ControlWaveform) -> HamiltonianSampler:
    """Counterdiabatically corrected Hamiltonian with the bare zero pattern."""

    def evaluate(ts):
        c1, c2 = msd_couplings(derived_angles(waveform, ts))
        return _coupling_matrices(c1, c2)

    return HamiltonianSampler(3, THREE_LEVEL_BASIS, evaluate)


@dataclass(frozen=True)
class StirapEigensystem:
    """Closed-form spectrum of the bare Hamiltonian at one time.

    v_zero is the dark state; v_minus / v_plus are the bright states at
    -eta / +eta.
    """

    e_minus: float
    e_zero: float
    e_plus: float
    v_minus: np.ndarray
    v_zero: np.ndarray
    v_plus: np.ndarray


def dark_state(theta) -> np.ndarray:
    """sin(theta)|phi1> - cos(theta)|phi2>, broadcast over theta."""
    theta = np.asarray(theta, dtype=float)
    return np.stack(
        [np.sin(theta), -np.cos(theta), np.zeros_like(theta)], axis=-1
    ).astype(complex)


def stirap_eigensystem(angles: DerivedAngles) -> StirapEigensystem:
    """Eigenpairs of the bare Hamiltonian for a scalar angle sample."""
    eta = float(angles.eta)
    if eta <= ETA_FLOOR:
        raise DegenerateControlError("eta vanished; the eigensystem is degenerate")
    c, s = angles.cos_theta, angles.sin_theta
    v_minus = np.array([c, s, -1.0], dtype=complex) / _SQRT2
    v_plus = np.array([c, s, 1.0], dtype=complex) / _SQRT2
    v_zero = np.array([s, -c, 0.0], dtype=complex)
    return StirapEigensystem(
        e_minus=-eta, e_zero=0.0, e_plus=eta,
        v_minus=v_minus, v_zero=v_zero, v_plus=v_plus,
    )


def eigenbasis_unitary(angles: DerivedAngles) -> np.ndarray:
    """Unitary whose columns are the (lower, upper, dark) eigenvectors.

    Broadcasts over array-valued angles, returning (..., 3, 3).
    """
    c = np.asarray(angles.cos_theta, dtype=float)
    s = np.asarray(angles.sin_theta, dtype=float)
    shape = np.broadcast(c, s).shape
    a = np.zeros(shape + (3, 3), dtype=complex)
    a[..., 0, 0] = c / _SQRT2
    a[..., 0, 1] = c / _SQRT2
    a[..., 0, 2] = s
    a[..., 1, 0] = s / _SQRT2
    a[..., 1, 1] = s / _SQRT2
    a[..., 1, 2] = -c
    a[..., 2, 0] = -1.0 / _SQRT2
    a[..., 2, 1] = 1.0 / _SQRT2
    return a


def frame_hamiltonian(angles: DerivedAngles) -> np.ndarray:
    """Hamiltonian seen in the instantaneous eigenbasis frame.

    Diagonal (-eta, eta, 0) plus the -i theta_dot/sqrt(2) couplings of the
    frame rotation; Hermitian by construction.  Broadcasts like
    eigenbasis_unitary.
    """
    eta = np.asarray(angles.eta, dtype=float)
    td = np.asarray(angles.theta_dot, dtype=float)
    shape = np.broadcast(eta, td).shape
    h = np.zeros(shape + (3, 3), dtype=complex)
    h[..., 0, 0] = -eta
    h[..., 1, 1] = eta
    h[..., 0, 2] = -1j * td / _SQRT2
    h[..., 1, 2] = -1j * td / _SQRT2
    h[..., 2, 0] = 1j * td / _SQRT2
    h[..., 2, 1] = 1j * td / _SQRT2
    return h


@dataclass(frozen=True)
class FrameEigensystem:
    """Spectrum of the frame Hamiltonian for a scalar angle sample.

    The gap factors satisfy w * q = theta_dot^2, w + q = r and
    r = 2 sqrt(eta^2 + theta_dot^2); lam_minus/lam_plus are -/+ r/2.
    """

    lam_minus: float
    lam_zero: float
    lam_plus: float
    w: float
    q: float
    r: float
    eta: float
    theta_dot: float
    v_minus: np.ndarray
    v_plus: np.ndarray
    v_zero: np.ndarray


def frame_eigensystem(angles: DerivedAngles) -> FrameEigensystem:
    eta = float(angles.eta)
    td = float(angles.theta_dot)
    gap = np.hypot(eta, td)
    w = eta + gap
    q = gap - eta
    r = 2.0 * gap
    if r <= ETA_FLOOR:
        raise DegenerateControlError("eta and theta_dot both vanish (r = 0)")
    v_minus = np.array([1j * w / r, 1j * q / r, _SQRT2 * td / r])
    v_plus = np.array([1j * q / r, 1j * w / r, -_SQRT2 * td / r])
    v_zero = np.array([-1j * _SQRT2 * td / r, 1j * _SQRT2 * td / r, 2.0 * eta / r])
    return FrameEigensystem(
        lam_minus=-gap, lam_zero=0.0, lam_plus=gap,
        w=w, q=q, r=r, eta=eta, theta_dot=td,
        v_minus=v_minus, v_plus=v_plus, v_zero=v_zero,
    )


def frame_eigenbasis_unitary(es: FrameEigensystem) -> np.ndarray:
    """Unitary whose columns are the frame eigenvectors (lower, upper, zero)."""
    return np.stack([es.v_minus, es.v_plus, es.v_zero], axis=-1)
