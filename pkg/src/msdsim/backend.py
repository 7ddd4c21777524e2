"""Kernel backend selection: compiled extension if available, numpy otherwise."""
from __future__ import annotations

import numpy as np

try:
    from . import _kernels as _impl
except ImportError:  # extension not built; the numpy twin is always present
    from . import _kernels_py as _impl


def backend_name() -> str:
    return _impl.BACKEND_NAME


def schrodinger_rk4(h_stages, psi0, dt):
    h_stages = np.ascontiguousarray(h_stages, dtype=complex)
    psi0 = np.ascontiguousarray(psi0, dtype=complex)
    return _impl.schrodinger_rk4(h_stages, psi0, float(dt))


def lindblad_rk4(h_stages, rho0, dt, jump_ops, rates):
    h_stages = np.ascontiguousarray(h_stages, dtype=complex)
    rho0 = np.ascontiguousarray(rho0, dtype=complex)
    jump_ops = np.ascontiguousarray(jump_ops, dtype=complex)
    rates = np.ascontiguousarray(rates, dtype=float)
    return _impl.lindblad_rk4(h_stages, rho0, float(dt), jump_ops, rates)
