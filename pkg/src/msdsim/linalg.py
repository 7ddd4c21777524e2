"""Dense complex linear algebra for small (d <= 8) quantum objects.

Everything operates on plain numpy arrays: state vectors are 1-d complex
arrays, operators and density matrices are square 2-d complex arrays.
The eigensolver wraps LAPACK's Hermitian decomposition and adds the
deterministic phase gauge and degeneracy flagging that the driving-frame
construction relies on.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonHermitianError

#: Tolerance (relative to the largest entry) below which two eigenvalues
#: count as degenerate for the superadiabatic engine.
DEGENERACY_RTOL = 1e-10

#: Default Hermiticity requirement for eigh inputs.
HERMITIAN_RTOL = 1e-10


def adjoint(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.asarray(m).conj().T


def hermiticity_defect(m: np.ndarray) -> float:
    """Largest entrywise deviation |M - M^dag|."""
    m = np.asarray(m)
    return float(np.abs(m - adjoint(m)).max())


def max_abs(m: np.ndarray) -> float:
    m = np.asarray(m)
    return float(np.abs(m).max()) if m.size else 0.0


def require_hermitian(m: np.ndarray, rtol: float = HERMITIAN_RTOL, name: str = "matrix") -> None:
    """Raise NonHermitianError naming the worst entry if M is not Hermitian."""
    m = np.asarray(m)
    defect = np.abs(m - adjoint(m))
    tol = rtol * max(1.0, max_abs(m))
    if defect.max() > tol:
        i, j = np.unravel_index(int(np.argmax(defect)), defect.shape)
        raise NonHermitianError(
            f"{name} is not Hermitian: |M[{i},{j}] - conj(M[{j},{i}])| = "
            f"{defect[i, j]:.3e} exceeds {tol:.3e}"
        )


def is_unitary(m: np.ndarray, tol: float) -> bool:
    """True iff max entrywise |M^dag M - I| <= tol."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    m = np.asarray(m, dtype=complex)
    d = m.shape[0]
    return bool(np.abs(adjoint(m) @ m - np.eye(d)).max() <= tol)


@dataclass(frozen=True)
class EighResult:
    """Eigendecomposition with ascending eigenvalues and gauged eigenvectors.

    ``degenerate`` is set when some eigenvalue gap falls below
    DEGENERACY_RTOL relative to the matrix scale; the superadiabatic
    engine refuses such inputs.
    """

    values: np.ndarray
    vectors: np.ndarray  # columns are eigenvectors, matching `values`
    degenerate: bool


def eigh(m: np.ndarray) -> EighResult:
    """Hermitian eigendecomposition with a deterministic phase gauge.

    Each eigenvector is rotated so its largest-magnitude component is real
    and positive (ties broken by lowest index), which makes the output a
    well-defined function of the input and lets continuity tracking work
    with finite differences.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    require_hermitian(m)
    values, vectors = np.linalg.eigh(m)

    lead_idx = np.argmax(np.abs(vectors), axis=0)  # first max wins the tie
    lead = vectors[lead_idx, np.arange(vectors.shape[1])]
    phases = lead / np.abs(lead)
    vectors = vectors * phases.conj()

    scale = max_abs(m)
    gaps = np.diff(values)
    degenerate = bool(gaps.size and gaps.min() < DEGENERACY_RTOL * scale)
    return EighResult(values=values, vectors=vectors, degenerate=degenerate)


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; the first factor is the slowest-varying index."""
    return np.kron(np.asarray(a), np.asarray(b))
