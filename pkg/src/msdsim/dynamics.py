"""Closed- and open-system propagation plus the two-emitter/resonator model.

Closed runs integrate i dpsi/dt = H(t) psi for the three-level system with
a classic fixed-step 4th-order scheme; no renormalization is applied, the
norm drift is asserted instead.  Open runs integrate the Lindblad master
equation

    drho/dt = -i [H, rho] + kappa D[a] rho
              + sum_j (gamma D[sigma_j^-] rho + gamma_phi D[sigma_j^z] rho)

with D[L] rho = (2 L rho L^dag - L^dag L rho - rho L^dag L) / 2, on the
full 2 (x) 2 (x) 2 product space of a {0,1}-truncated resonator mode and
two emitter qubits.  The cavity dissipator maps |1gg> outside the
one-excitation subspace, so the open dynamics cannot live in 3 dimensions.

Basis ordering is resonator (slowest index) then emitter 1 then emitter 2:
|n_c, s_1, s_2> with g = 0, e = 1, giving the labels in PRODUCT_BASIS and
the embedding phi1 = |0ge>, phi2 = |0eg>, phi3 = |1gg>.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import backend
from .errors import PropagationError
from .hamiltonians import HamiltonianSampler, msd_couplings
from .linalg import adjoint, hermiticity_defect, tensor
from .pulses import ControlWaveform, angular, derived_angles, transfer_waveform

PRODUCT_BASIS = ("0gg", "0ge", "0eg", "0ee", "1gg", "1ge", "1eg", "1ee")
IDX_PHI1 = PRODUCT_BASIS.index("0ge")
IDX_PHI2 = PRODUCT_BASIS.index("0eg")
IDX_PHI3 = PRODUCT_BASIS.index("1gg")

_I2 = np.eye(2, dtype=complex)
_LOWER = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)  # |0><1| resp. |g><e|
_SIGMA_Z = np.array([[-1.0, 0.0], [0.0, 1.0]], dtype=complex)  # |e><e| - |g><g|


def cavity_lowering() -> np.ndarray:
    """Annihilation operator of the {0,1}-truncated resonator mode."""
    return tensor(tensor(_LOWER, _I2), _I2)


def emitter_lowering(j: int) -> np.ndarray:
    """sigma_j^- = |g>_j<e| embedded in the product space (j = 1 or 2)."""
    if j == 1:
        return tensor(tensor(_I2, _LOWER), _I2)
    if j == 2:
        return tensor(tensor(_I2, _I2), _LOWER)
    raise ValueError("emitter index must be 1 or 2")


def emitter_dephasing(j: int) -> np.ndarray:
    """sigma_j^z = |e>_j<e| - |g>_j<g| embedded in the product space."""
    if j == 1:
        return tensor(tensor(_I2, _SIGMA_Z), _I2)
    if j == 2:
        return tensor(tensor(_I2, _I2), _SIGMA_Z)
    raise ValueError("emitter index must be 1 or 2")


def excitation_number() -> np.ndarray:
    """N = a^dag a + sum_j sigma_j^+ sigma_j^-; conserved by the coupling."""
    a = cavity_lowering()
    n = adjoint(a) @ a
    for j in (1, 2):
        s = emitter_lowering(j)
        n = n + adjoint(s) @ s
    return n


@dataclass(frozen=True)
class TimeGrid:
    """Uniform integration grid over [t_start, t_end] with `steps` steps."""

    t_start: float
    t_end: float
    steps: int

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("steps must be a positive integer")
        if not self.t_end > self.t_start:
            raise ValueError("t_end must exceed t_start")

    @property
    def h(self) -> float:
        return (self.t_end - self.t_start) / self.steps

    def times(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, self.steps + 1)

    def stage_times(self) -> np.ndarray:
        """Half-step sample times consumed by the RK4 kernels."""
        return np.linspace(self.t_start, self.t_end, 2 * self.steps + 1)


@dataclass(frozen=True)
class DissipationSpec:
    """Decay rates in 1/us: resonator kappa, emitter gamma and gamma_phi."""

    kappa: float
    gamma: float
    gamma_phi: float

    def __post_init__(self):
        if min(self.kappa, self.gamma, self.gamma_phi) < 0:
            raise ValueError("dissipation rates must be >= 0")


@dataclass(frozen=True)
class HybridSystemSpec:
    """Dispersive emitter-resonator parameters; frequencies as value/2pi MHz.

    The effective drive amplitude is g * omega0 / delta per channel; channel
    j inherits the Gaussian envelope with delay t_j.
    """

    g_over_2pi: float
    delta_over_2pi: float
    omega0_over_2pi: float
    t1: float
    t2: float
    width: float

    @property
    def effective_amplitude_over_2pi(self) -> float:
        return self.g_over_2pi * self.omega0_over_2pi / self.delta_over_2pi

    def dispersive_warnings(self) -> tuple[str, ...]:
        notes = []
        if self.delta_over_2pi < 5 * self.g_over_2pi:
            notes.append("detuning below 5x the resonator coupling")
        if self.delta_over_2pi < 5 * self.omega0_over_2pi:
            notes.append("detuning below 5x the drive amplitude")
        return tuple(notes)

    def waveform(self) -> ControlWaveform:
        return transfer_waveform(self.effective_amplitude_over_2pi,
                                 self.t1, self.t2, self.width)


def hybrid_hamiltonian(spec: HybridSystemSpec, mode: str) -> HamiltonianSampler:
    """H(t) = sum_j eta_j(t) (a sigma_j^dag + a^dag sigma_j^-) on 8 dims.

    In "stirap" mode the channel couplings are the raw pulse amplitudes; in
    "msd" mode they are the corrected couplings, reshaped exactly as in the
    three-level model (channel 1 gets the phi2-phi3 coupling, channel 2 the
    phi1-phi3 one).  Restricted to {phi1, phi2, phi3} the matrix equals the
    corresponding three-level Hamiltonian entrywise.
    """
    if mode not in ("stirap", "msd"):
        raise ValueError(f"unknown driving mode {mode!r}")
    for note in spec.dispersive_warnings():
        warnings.warn(f"dispersive approximation strained: {note}", stacklevel=2)

    waveform = spec.waveform()
    a = cavity_lowering()
    channel_ops = []
    for j in (1, 2):
        s = emitter_lowering(j)
        channel_ops.append(a @ adjoint(s) + adjoint(a) @ s)

    def evaluate(ts):
        if mode == "stirap":
            e1, e2, *_ = waveform.sample(ts)
            c2_phi2, c1_phi1 = e1, e2
        else:
            c1_phi1, c2_phi2 = msd_couplings(derived_angles(waveform, ts))
        return (np.asarray(c2_phi2)[:, None, None] * channel_ops[0]
                + np.asarray(c1_phi1)[:, None, None] * channel_ops[1])

    return HamiltonianSampler(8, PRODUCT_BASIS, evaluate)


@dataclass
class Trajectory:
    """Per-sample observables of one propagation run.

    Closed runs also keep the raw state vectors (`states`); open runs drop
    the density matrices and keep observables only.
    """

    times: np.ndarray
    populations: np.ndarray  # (n_samples, dim)
    labels: tuple[str, ...]
    fidelity: Optional[np.ndarray] = None
    mean_photon: Optional[np.ndarray] = None
    states: Optional[np.ndarray] = None
    diagnostics: dict = field(default_factory=dict)

    def final_populations(self) -> dict[str, float]:
        return {lab: float(p) for lab, p in zip(self.labels, self.populations[-1])}

    def final_fidelity(self) -> Optional[float]:
        return None if self.fidelity is None else float(self.fidelity[-1])

    def max_mean_photon(self) -> Optional[float]:
        return None if self.mean_photon is None else float(self.mean_photon.max())


def population(state: np.ndarray, k: int) -> float:
    """Occupation of basis index k for a state vector or density matrix."""
    state = np.asarray(state)
    if not 0 <= k < state.shape[0]:
        raise IndexError(f"basis index {k} out of range for dim {state.shape[0]}")
    if state.ndim == 1:
        return float(np.abs(state[k]) ** 2)
    return float(state[k, k].real)


def fidelity(state: np.ndarray, target: np.ndarray) -> float:
    """<target|rho|target> for a density matrix, |<target|psi>|^2 for a ket."""
    state = np.asarray(state, dtype=complex)
    target = np.asarray(target, dtype=complex)
    if state.ndim == 1:
        return float(np.abs(np.vdot(target, state)) ** 2)
    return float((target.conj() @ state @ target).real)


def mean_photon_number(rho: np.ndarray) -> float:
    """Tr(a^dag a rho) under the {0,1} resonator truncation."""
    rho = np.asarray(rho)
    if rho.shape != (8, 8):
        raise ValueError("mean photon number is defined on the 8-dim product space")
    return float(sum(rho[k, k].real for k in range(4, 8)))


def _check_population_bounds(populations: np.ndarray) -> None:
    if populations.min() < -1e-9 or populations.max() > 1 + 1e-9:
        raise PropagationError(
            f"population left [0, 1]: min {populations.min():.3e}, "
            f"max {populations.max():.3e}"
        )
    total = populations.sum(axis=1)
    if np.abs(total - 1.0).max() > 1e-7:
        raise PropagationError(
            f"total population drifted by {np.abs(total - 1.0).max():.3e}"
        )


def propagate_schrodinger(sampler: HamiltonianSampler, psi0: np.ndarray,
                          grid: TimeGrid, target: Optional[np.ndarray] = None
                          ) -> Trajectory:
    """Fixed-step RK4 integration of the Schroedinger equation.

    The state is never renormalized; a norm drift beyond 1e-6 over the run
    is reported as a step-size failure.
    """
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (sampler.dim,):
        raise ValueError(f"psi0 shape {psi0.shape} does not match dim {sampler.dim}")
    if abs(np.linalg.norm(psi0) - 1.0) > 1e-9:
        raise ValueError("psi0 must be normalized")

    h_stages = sampler.table(grid.stage_times())
    states = backend.schrodinger_rk4(h_stages, psi0, grid.h)

    norms = np.linalg.norm(states, axis=1)
    drift = float(np.abs(norms - 1.0).max())
    if drift > 1e-6:
        raise PropagationError(
            f"norm drift {drift:.3e} exceeds 1e-6; reduce the grid step "
            f"(h = {grid.h:.3e} us)"
        )

    populations = np.abs(states) ** 2
    _check_population_bounds(populations)
    fid = None
    if target is not None:
        fid = np.abs(states @ np.asarray(target, dtype=complex).conj()) ** 2
    return Trajectory(
        times=grid.times(), populations=populations, labels=sampler.basis,
        fidelity=fid, states=states,
        diagnostics={"max_norm_drift": drift, "steps": grid.steps},
    )


def _hybrid_jumps(diss: DissipationSpec):
    ops = [cavity_lowering(), emitter_lowering(1), emitter_lowering(2),
           emitter_dephasing(1), emitter_dephasing(2)]
    rates = [diss.kappa, diss.gamma, diss.gamma, diss.gamma_phi, diss.gamma_phi]
    return np.stack(ops), np.array(rates, dtype=float)


def propagate_lindblad(sampler: HamiltonianSampler, rho0: np.ndarray,
                       diss: DissipationSpec, grid: TimeGrid,
                       target: Optional[np.ndarray] = None) -> Trajectory:
    """Fixed-step RK4 integration of the Lindblad master equation (8 dims).

    Trace and Hermiticity are asserted, not restored; a density matrix
    eigenvalue below -1e-6 at any sample is a positivity failure.
    """
    rho0 = np.asarray(rho0, dtype=complex)
    if sampler.dim != 8 or rho0.shape != (8, 8):
        raise ValueError("open-system propagation runs on the 8-dim product space")
    if hermiticity_defect(rho0) > 1e-9:
        raise ValueError("rho0 must be Hermitian")
    if abs(np.trace(rho0).real - 1.0) > 1e-7:
        raise ValueError("rho0 must have unit trace")

    h_stages = sampler.table(grid.stage_times())
    jump_ops, rates = _hybrid_jumps(diss)
    rhos = backend.lindblad_rk4(h_stages, rho0, grid.h, jump_ops, rates)

    traces = np.trace(rhos, axis1=1, axis2=2).real
    trace_drift = float(np.abs(traces - 1.0).max())
    if trace_drift > 1e-7:
        raise PropagationError(
            f"trace drift {trace_drift:.3e} exceeds 1e-7; reduce the grid step"
        )
    herm_defect = float(np.abs(rhos - rhos.conj().transpose(0, 2, 1)).max())
    min_eig = float(np.linalg.eigvalsh(rhos).min())
    if min_eig < -1e-6:
        raise PropagationError(
            f"density matrix eigenvalue {min_eig:.3e} below -1e-6 "
            "(positivity violation; step-size failure)"
        )

    populations = np.einsum("tii->ti", rhos).real
    _check_population_bounds(populations)
    fid = None
    if target is not None:
        tgt = np.asarray(target, dtype=complex)
        fid = np.einsum("i,tij,j->t", tgt.conj(), rhos, tgt).real
    nbar = populations[:, 4:].sum(axis=1)
    return Trajectory(
        times=grid.times(), populations=populations, labels=sampler.basis,
        fidelity=fid, mean_photon=nbar,
        diagnostics={"max_trace_drift": trace_drift,
                     "max_hermiticity_defect": herm_defect,
                     "min_eigenvalue": min_eig, "steps": grid.steps},
    )
