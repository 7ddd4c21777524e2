# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled RK4 stepping kernels (hot path twin of _kernels_py).

Same contracts as the pure-numpy module: Hamiltonians pre-tabulated at the
RK4 stage times, states recorded at every full step, and the Lindblad
right-hand side in the effective-generator form
-(G rho + rho G^dag) + sum_j r_j L_j rho L_j^dag.
"""
import numpy as np

BACKEND_NAME = "compiled"

ctypedef double complex cplx


cdef void _deriv_psi(const cplx[:, :] h, const cplx[:] v, cplx[:] out, Py_ssize_t d) noexcept:
    # out = -i H v
    cdef Py_ssize_t i, j
    cdef cplx acc
    for i in range(d):
        acc = 0
        for j in range(d):
            acc = acc + h[i, j] * v[j]
        out[i] = -1j * acc


def schrodinger_rk4(const cplx[:, :, ::1] h_stages, const cplx[::1] psi0, double dt):
    cdef Py_ssize_t steps = (h_stages.shape[0] - 1) // 2
    cdef Py_ssize_t d = psi0.shape[0]
    cdef Py_ssize_t i, j

    out_arr = np.empty((steps + 1, d), dtype=np.complex128)
    cdef cplx[:, ::1] out = out_arr
    work_arr = np.empty((5, d), dtype=np.complex128)  # k1..k4 + stage input
    cdef cplx[:, ::1] wk = work_arr
    psi_arr = np.array(psi0, dtype=np.complex128)
    cdef cplx[::1] psi = psi_arr

    for j in range(d):
        out[0, j] = psi[j]
    for i in range(steps):
        _deriv_psi(h_stages[2 * i], psi, wk[0], d)
        for j in range(d):
            wk[4, j] = psi[j] + 0.5 * dt * wk[0, j]
        _deriv_psi(h_stages[2 * i + 1], wk[4], wk[1], d)
        for j in range(d):
            wk[4, j] = psi[j] + 0.5 * dt * wk[1, j]
        _deriv_psi(h_stages[2 * i + 1], wk[4], wk[2], d)
        for j in range(d):
            wk[4, j] = psi[j] + dt * wk[2, j]
        _deriv_psi(h_stages[2 * i + 2], wk[4], wk[3], d)
        for j in range(d):
            psi[j] = psi[j] + (dt / 6.0) * (wk[0, j] + 2.0 * wk[1, j] + 2.0 * wk[2, j] + wk[3, j])
            out[i + 1, j] = psi[j]
    return out_arr


cdef void _matmul(const cplx[:, :] a, const cplx[:, :] b, cplx[:, :] c, Py_ssize_t d) noexcept:
    # c = a @ b; a register accumulator beats fancier orderings at d <= 8
    cdef Py_ssize_t i, j, k
    cdef cplx acc
    for i in range(d):
        for j in range(d):
            acc = 0
            for k in range(d):
                acc = acc + a[i, k] * b[k, j]
            c[i, j] = acc


cdef void _lindblad_rhs(const cplx[:, :] h, const cplx[:, :] g_const,
                        const cplx[:, :, :] jumps, const double[:] rates,
                        const cplx[:, :] rho, cplx[:, :] out,
                        cplx[:, :] g, cplx[:, :] t1, cplx[:, :] t2,
                        Py_ssize_t d, Py_ssize_t n_jump) noexcept:
    cdef Py_ssize_t i, j, m
    # g = i h + g_const; out = -(g rho + rho g^dag) + sum_m r_m L rho L^dag
    for i in range(d):
        for j in range(d):
            g[i, j] = 1j * h[i, j] + g_const[i, j]
    _matmul(g, rho, t1, d)
    for i in range(d):
        for j in range(d):
            t2[i, j] = g[j, i].conjugate()
    _matmul(rho, t2, out, d)
    for i in range(d):
        for j in range(d):
            out[i, j] = -(t1[i, j] + out[i, j])
    for m in range(n_jump):
        _matmul(jumps[m], rho, t1, d)
        for i in range(d):
            for j in range(d):
                t2[i, j] = jumps[m, j, i].conjugate()  # L^dag
        _matmul(t1, t2, g, d)
        for i in range(d):
            for j in range(d):
                out[i, j] = out[i, j] + rates[m] * g[i, j]


def lindblad_rk4(const cplx[:, :, ::1] h_stages, const cplx[:, ::1] rho0, double dt,
                 const cplx[:, :, ::1] jump_ops, const double[:] rates):
    cdef Py_ssize_t steps = (h_stages.shape[0] - 1) // 2
    cdef Py_ssize_t d = rho0.shape[0]
    cdef Py_ssize_t n_jump = jump_ops.shape[0]
    cdef Py_ssize_t i, r, c

    g_const_arr = np.zeros((d, d), dtype=np.complex128)
    jump_np = np.asarray(jump_ops)
    for m in range(n_jump):
        L = jump_np[m]
        g_const_arr += (0.5 * rates[m]) * (L.conj().T @ L)
    cdef cplx[:, ::1] g_const = g_const_arr

    out_arr = np.empty((steps + 1, d, d), dtype=np.complex128)
    cdef cplx[:, :, ::1] out = out_arr
    rho_arr = np.array(rho0, dtype=np.complex128)
    cdef cplx[:, ::1] rho = rho_arr

    scratch = np.empty((8, d, d), dtype=np.complex128)
    cdef cplx[:, :, ::1] wk = scratch  # k1..k4, stage input, g, t1, t2

    for r in range(d):
        for c in range(d):
            out[0, r, c] = rho[r, c]
    for i in range(steps):
        _lindblad_rhs(h_stages[2 * i], g_const, jump_ops, rates, rho, wk[0],
                      wk[5], wk[6], wk[7], d, n_jump)
        for r in range(d):
            for c in range(d):
                wk[4, r, c] = rho[r, c] + 0.5 * dt * wk[0, r, c]
        _lindblad_rhs(h_stages[2 * i + 1], g_const, jump_ops, rates, wk[4], wk[1],
                      wk[5], wk[6], wk[7], d, n_jump)
        for r in range(d):
            for c in range(d):
                wk[4, r, c] = rho[r, c] + 0.5 * dt * wk[1, r, c]
        _lindblad_rhs(h_stages[2 * i + 1], g_const, jump_ops, rates, wk[4], wk[2],
                      wk[5], wk[6], wk[7], d, n_jump)
        for r in range(d):
            for c in range(d):
                wk[4, r, c] = rho[r, c] + dt * wk[2, r, c]
        _lindblad_rhs(h_stages[2 * i + 2], g_const, jump_ops, rates, wk[4], wk[3],
                      wk[5], wk[6], wk[7], d, n_jump)
        for r in range(d):
            for c in range(d):
                rho[r, c] = rho[r, c] + (dt / 6.0) * (wk[0, r, c] + 2.0 * wk[1, r, c]
                                                      + 2.0 * wk[2, r, c] + wk[3, r, c])
                out[i + 1, r, c] = rho[r, c]
    return out_arr
