"""Pure-numpy RK4 stepping kernels (fallback when the extension is absent).

Both kernels take the Hamiltonian pre-tabulated at the RK4 stage times
t0, t0 + h/2, t0 + h, ... (2 * steps + 1 matrices) and record the state at
every full step.  The Lindblad right-hand side is evaluated in the
"effective-generator" form

    d rho/dt = -(G rho + rho G^dag) + sum_j r_j L_j rho L_j^dag,
    G = i H(t) + (1/2) sum_j r_j L_j^dag L_j,

which is algebraically identical to the usual dissipator sum but needs
fewer matrix products.
"""
from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"


def schrodinger_rk4(h_stages: np.ndarray, psi0: np.ndarray, dt: float) -> np.ndarray:
    """Integrate i dpsi/dt = H(t) psi; returns states at the step boundaries."""
    steps = (h_stages.shape[0] - 1) // 2
    psi = np.array(psi0, dtype=complex)
    out = np.empty((steps + 1, psi.shape[0]), dtype=complex)
    out[0] = psi
    for i in range(steps):
        h0 = h_stages[2 * i]
        hm = h_stages[2 * i + 1]
        h1 = h_stages[2 * i + 2]
        k1 = -1j * (h0 @ psi)
        k2 = -1j * (hm @ (psi + (0.5 * dt) * k1))
        k3 = -1j * (hm @ (psi + (0.5 * dt) * k2))
        k4 = -1j * (h1 @ (psi + dt * k3))
        psi = psi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[i + 1] = psi
    return out


def lindblad_rk4(h_stages: np.ndarray, rho0: np.ndarray, dt: float,
                 jump_ops: np.ndarray, rates: np.ndarray) -> np.ndarray:
    """Integrate the Lindblad master equation; returns rho at step boundaries."""
    steps = (h_stages.shape[0] - 1) // 2
    rho = np.array(rho0, dtype=complex)
    d = rho.shape[0]

    jumps = [(float(r), np.asarray(L, dtype=complex)) for r, L in zip(rates, jump_ops)]
    g_const = np.zeros((d, d), dtype=complex)
    for r, L in jumps:
        g_const += (0.5 * r) * (L.conj().T @ L)
    pairs = [(r, L, L.conj().T) for r, L in jumps]

    def rhs(h, r):
        g = 1j * h + g_const
        out = -(g @ r + r @ g.conj().T)
        for rate, L, Ld in pairs:
            out += rate * (L @ r @ Ld)
        return out

    out = np.empty((steps + 1, d, d), dtype=complex)
    out[0] = rho
    for i in range(steps):
        h0 = h_stages[2 * i]
        hm = h_stages[2 * i + 1]
        h1 = h_stages[2 * i + 2]
        k1 = rhs(h0, rho)
        k2 = rhs(hm, rho + (0.5 * dt) * k1)
        k3 = rhs(hm, rho + (0.5 * dt) * k2)
        k4 = rhs(h1, rho + dt * k3)
        rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[i + 1] = rho
    return out
