"""Generic superadiabatic iteration engine (numerical, any dimension).

Given any sampler H(t) with a nondegenerate spectrum, the engine builds

    A(t) = sum_n |n(t)><n(0)|          (anchored eigenbasis unitary)
    K(t) = i Adot(t) A(t)^dag          (frame-rotation generator)
    H'(t) = A(t)^dag [H(t) - K(t)] A(t)   (next-iteration Hamiltonian)

with eigenvector derivatives estimated by central differences of
gauge-continuous eigenvectors.  Gauge continuity is enforced by walking a
fixed lattice outward from t = 0 and phase-aligning each frame to the
previous one (maximizing the real part of the overlap); the residual
<n|ndot> diagonal is removed explicitly, which makes K independent of the
remaining gauge freedom.

`msd_hamiltonian_numeric` chains two frames to rebuild the corrected
three-level driving Hamiltonian H0(t) + A0(t) K1(t) A0(t)^dag entirely
numerically; it is the independent cross-check for the closed-form
`msd_hamiltonian`.
"""
from __future__ import annotations

import numpy as np

from .errors import DegenerateSpectrumError, StepTooLargeError
from .hamiltonians import HamiltonianSampler, stirap_hamiltonian
from .linalg import adjoint, eigh
from .pulses import ControlWaveform

#: Central-difference step for eigenvector derivatives (us).  Truncation
#: error ~ dt^2 stays well below the 1e-5 comparison tolerances.
DIFF_STEP = 1e-4

#: Lattice spacing of the gauge-continuity walk (us).
WALK_STEP = 1e-3

#: Minimum |<n(t-dt)|n(t+dt)>| before the step counts as too large.
MIN_OVERLAP = 0.9


def _checked_eigh(h: np.ndarray, t: float):
    res = eigh(h)
    if res.degenerate:
        raise DegenerateSpectrumError(
            f"spectrum at t = {t:g} is (near-)degenerate; "
            "the superadiabatic construction assumes nondegenerate eigenstates"
        )
    return res


def _phase_align(vectors: np.ndarray, reference: np.ndarray,
                 context: str) -> np.ndarray:
    """Rotate each column so its overlap with the reference column is real positive."""
    ov = np.einsum("in,in->n", reference.conj(), vectors)
    mags = np.abs(ov)
    if mags.min() < MIN_OVERLAP:
        raise StepTooLargeError(
            f"eigenvector continuity lost ({context}): "
            f"min column overlap {mags.min():.3f} < {MIN_OVERLAP}"
        )
    return vectors * (ov.conj() / mags)


class EigenbasisWalk:
    """Gauge-continuous eigenframes of a sampler, anchored at t = 0.

    Frames are cached on the lattice t = k * step and extended outward on
    demand, so ascending (or descending) queries cost one eigendecomposition
    each.  A single walk is a sequential object; concurrent sweeps should
    each own their walk.
    """

    def __init__(self, sampler: HamiltonianSampler, step: float = WALK_STEP):
        self.sampler = sampler
        self.step = float(step)
        self._frames: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    def _eigh_at(self, t: float):
        return _checked_eigh(self.sampler.at(t), t)

    def _lattice(self, k: int) -> tuple[np.ndarray, np.ndarray]:
        cached = self._frames.get(k)
        if cached is not None:
            return cached
        if 0 not in self._frames:
            res = self._eigh_at(0.0)
            self._frames[0] = (res.values, res.vectors)
        if k == 0:
            return self._frames[0]
        sign = 1 if k > 0 else -1
        start = k  # walk back to the nearest cached lattice point, then forward
        while start != 0 and start not in self._frames:
            start -= sign
        for j in range(start + sign, k + sign, sign):
            ref = self._frames[j - sign][1]
            res = self._eigh_at(j * self.step)
            vectors = _phase_align(res.vectors, ref,
                                   f"walk lattice t = {j * self.step:g}")
            self._frames[j] = (res.values, vectors)
        return self._frames[k]

    def frame(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        """Eigenvalues and continuity-gauged eigenvectors at time t."""
        k = int(np.trunc(t / self.step))
        _, ref = self._lattice(k)
        if t == k * self.step:
            return self._frames[k]
        res = self._eigh_at(t)
        vectors = _phase_align(res.vectors, ref, f"walk off-lattice t = {t:g}")
        return res.values, vectors


def _derivative_correction(sampler: HamiltonianSampler, vectors: np.ndarray,
                           t: float, dt: float) -> np.ndarray:
    """i sum_n (|ndot><n| - <n|ndot>|n><n|) with |ndot> by central differences.

    `vectors` fixes the gauge at t; the flanking frames are aligned to it,
    and the explicit diagonal subtraction removes what is left of the phase
    freedom, so the result is gauge independent up to O(dt^2).
    """
    res_m = _checked_eigh(sampler.at(t - dt), t - dt)
    res_p = _checked_eigh(sampler.at(t + dt), t + dt)
    v_m = _phase_align(res_m.vectors, vectors, f"t = {t:g} - dt")
    v_p = _phase_align(res_p.vectors, vectors, f"t = {t:g} + dt")
    cross = np.abs(np.einsum("in,in->n", v_m.conj(), v_p))
    if cross.min() < MIN_OVERLAP:
        raise StepTooLargeError(
            f"eigenvectors at t = {t:g} +/- {dt:g} overlap by only "
            f"{cross.min():.3f}; reduce the differentiation step"
        )
    v_dot = (v_p - v_m) / (2.0 * dt)
    residual = np.einsum("in,in->n", vectors.conj(), v_dot)  # <n|ndot>
    k = 1j * (v_dot @ adjoint(vectors)
              - (vectors * residual) @ adjoint(vectors))
    # exactly Hermitian in theory; drop the O(dt^2) finite-difference
    # asymmetry so chained iterations pass the Hermiticity gate
    return 0.5 * (k + adjoint(k))


def counterdiabatic_term(sampler: HamiltonianSampler, t: float,
                         dt: float = DIFF_STEP) -> np.ndarray:
    """Generic counterdiabatic correction i sum(|ndot><n| - <n|ndot>|n><n|).

    Refuses degenerate spectra; flanking eigenframes are aligned to the
    frame at t, and a column overlap below MIN_OVERLAP between the two
    flanks reports the step as too large.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    res = _checked_eigh(sampler.at(t), t)
    return _derivative_correction(sampler, res.vectors, t, dt)


def superadiabatic_frame(sampler: HamiltonianSampler, t: float, *,
                         walk: EigenbasisWalk | None = None,
                         diff_step: float = DIFF_STEP,
                         walk_step: float = WALK_STEP):
    """Anchored frame unitary A(t) and generator K(t) for one iteration step."""
    if walk is None:
        walk = EigenbasisWalk(sampler, walk_step)
    _, v0 = walk._lattice(0)
    _, v = walk.frame(t)
    a = v @ adjoint(v0)
    k = _derivative_correction(sampler, v, t, diff_step)
    return a, k


def superadiabatic_iteration(sampler: HamiltonianSampler, *,
                             diff_step: float = DIFF_STEP,
                             walk_step: float = WALK_STEP) -> HamiltonianSampler:
    """Next-iteration sampler H'(t) = A^dag (H - K) A (anchored at t = 0)."""
    walk = EigenbasisWalk(sampler, walk_step)

    def evaluate(ts):
        out = np.empty((ts.shape[0], sampler.dim, sampler.dim), dtype=complex)
        for i, t in enumerate(ts):
            a, k = superadiabatic_frame(sampler, float(t), walk=walk,
                                        diff_step=diff_step)
            out[i] = adjoint(a) @ (sampler.at(float(t)) - k) @ a
        return out

    basis = tuple(f"n{i}(0)" for i in range(sampler.dim))
    return HamiltonianSampler(sampler.dim, basis, evaluate)


def msd_hamiltonian_numeric(waveform: ControlWaveform, *,
                            diff_step: float = DIFF_STEP,
                            walk_step: float = WALK_STEP) -> HamiltonianSampler:
    """Numerically rebuilt corrected Hamiltonian H0 + A0 K1 A0^dag.

    Both frames come from the generic engine (no closed forms), which makes
    this an independent oracle for `msd_hamiltonian`.
    """
    h0 = stirap_hamiltonian(waveform)
    walk0 = EigenbasisWalk(h0, walk_step)
    walk0_step = walk0.step

    def h1_evaluate(ts):
        out = np.empty((ts.shape[0], 3, 3), dtype=complex)
        for i, t in enumerate(ts):
            a0, k0 = superadiabatic_frame(h0, float(t), walk=walk0,
                                          diff_step=diff_step)
            out[i] = adjoint(a0) @ (h0.at(float(t)) - k0) @ a0
        return out

    h1 = HamiltonianSampler(3, ("n0(0)", "n1(0)", "n2(0)"), h1_evaluate)
    walk1 = EigenbasisWalk(h1, walk0_step)

    def evaluate(ts):
        out = np.empty((ts.shape[0], 3, 3), dtype=complex)
        for i, t in enumerate(ts):
            t = float(t)
            _, v0 = walk0._lattice(0)
            _, v = walk0.frame(t)
            a0 = v @ adjoint(v0)
            _, v1 = walk1.frame(t)
            k1 = _derivative_correction(h1, v1, t, diff_step)
            out[i] = h0.at(t) + a0 @ k1 @ adjoint(a0)
        return out

    return HamiltonianSampler(3, h0.basis, evaluate)
