"""Numba-compiled fixed-step RK4 kernels.

All integrators in the package funnel through these kernels: single-state
Schrödinger evolution, cell-parallel sweeps, density-matrix (Lindblad)
evolution and the perturbative-correction hierarchy. Operators are applied
in CSR form; every observable the sweeps need (photon number, S_z, cutoff
projector) is diagonal in the product basis, so sweep kernels only track
diagonal expectations.

Cells in the parallel kernels write disjoint output slices, so results are
independent of thread count and scheduling.
"""

from __future__ import annotations

import warnings

import numba as nb
import numpy as np

# environments with an old TBB fall back to the OpenMP/workqueue layer;
# the advisory warning is noise for callers
warnings.filterwarnings(
    "ignore", message=".*TBB threading layer.*", category=nb.core.errors.NumbaWarning
)


def csr_parts(matrix: np.ndarray):
    """Dense -> (data, indices, indptr) in CSR form, complex128."""
    m = np.asarray(matrix, dtype=np.complex128)
    nrows = m.shape[0]
    data, indices, indptr = [], [], [0]
    for i in range(nrows):
        (cols,) = np.nonzero(m[i])
        data.extend(m[i, cols])
        indices.extend(cols)
        indptr.append(len(data))
    return (
        np.asarray(data, dtype=np.complex128),
        np.asarray(indices, dtype=np.int64),
        np.asarray(indptr, dtype=np.int64),
    )


def csr_stack(matrices):
    """Stack several CSR operators into flat arrays for kernel calls.

    Returns (data, indices, indptr2d) where indptr2d[j] indexes into the
    shared data/indices arrays for operator j.
    """
    dim = matrices[0].shape[0]
    datas, indexes = [], []
    indptr2d = np.zeros((len(matrices), dim + 1), dtype=np.int64)
    offset = 0
    for j, m in enumerate(matrices):
        d, idx, ptr = csr_parts(m)
        datas.append(d)
        indexes.append(idx)
        indptr2d[j] = ptr + offset
        offset += len(d)
    data = np.concatenate(datas) if datas else np.zeros(0, np.complex128)
    idx = np.concatenate(indexes) if indexes else np.zeros(0, np.int64)
    return data, idx, indptr2d


@nb.njit(cache=True, inline="always")
def _csr_matvec(data, indices, indptr, x, out):
    for i in range(out.shape[0]):
        acc = 0.0 + 0.0j
        for k in range(indptr[i], indptr[i + 1]):
            acc += data[k] * x[indices[k]]
        out[i] = acc


@nb.njit(cache=True)
def _schrodinger_rhs(t, y, h0, vdata, vind, vptr, g0, wd, tmp, out):
    # out = -i (H0 y + g(t) V y), H0 diagonal
    _csr_matvec(vdata, vind, vptr, y, tmp)
    g = g0 * np.cos(wd * t)
    for i in range(y.shape[0]):
        out[i] = -1j * (h0[i] * y[i] + g * tmp[i])


@nb.njit(cache=True)
def rk4_state(h0, vdata, vind, vptr, g0, wd, psi0, dt, nsteps, stride):
    """Evolve one state, storing snapshots every `stride` steps.

    Returns (snapshots, psi_final); snapshot 0 is the initial state.
    """
    dim = psi0.shape[0]
    nsnap = nsteps // stride + 1
    snaps = np.empty((nsnap, dim), np.complex128)
    psi = psi0.copy()
    snaps[0] = psi
    k1 = np.empty(dim, np.complex128)
    k2 = np.empty(dim, np.complex128)
    k3 = np.empty(dim, np.complex128)
    k4 = np.empty(dim, np.complex128)
    yt = np.empty(dim, np.complex128)
    tmp = np.empty(dim, np.complex128)
    isnap = 1
    for step in range(nsteps):
        t = step * dt
        _schrodinger_rhs(t, psi, h0, vdata, vind, vptr, g0, wd, tmp, k1)
        for i in range(dim):
            yt[i] = psi[i] + 0.5 * dt * k1[i]
        _schrodinger_rhs(t + 0.5 * dt, yt, h0, vdata, vind, vptr, g0, wd, tmp, k2)
        for i in range(dim):
            yt[i] = psi[i] + 0.5 * dt * k2[i]
        _schrodinger_rhs(t + 0.5 * dt, yt, h0, vdata, vind, vptr, g0, wd, tmp, k3)
        for i in range(dim):
            yt[i] = psi[i] + dt * k3[i]
        _schrodinger_rhs(t + dt, yt, h0, vdata, vind, vptr, g0, wd, tmp, k4)
        for i in range(dim):
            psi[i] = psi[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        if (step + 1) % stride == 0 and isnap < nsnap:
            snaps[isnap] = psi
            isnap += 1
    return snaps, psi


@nb.njit(cache=True, parallel=True)
def rk4_cells_obs(
    h0_cells, vdata, vind, vptr, g0s, wds, psi0, obs_diag, dt, nsteps, stride,
    reduce_max,
):
    """Evolve many independent cells, recording diagonal observables.

    h0_cells: (M, dim) per-cell H0 diagonal; g0s/wds: (M,) per-cell drive.
    obs_diag: (nobs, dim) real diagonals of the observables.
    Returns (series, reduced, final_norm): series is (M, nsnap, nobs) when
    reduce_max is False (otherwise a (M, 1, nobs) stub), reduced is
    (M, nobs) maxima over samples.
    """
    M, dim = h0_cells.shape
    nobs = obs_diag.shape[0]
    nsnap = nsteps // stride + 1
    if reduce_max:
        series = np.zeros((M, 1, nobs))
    else:
        series = np.zeros((M, nsnap, nobs))
    reduced = np.zeros((M, nobs))
    final_norm = np.zeros(M)
    for m in nb.prange(M):
        h0 = h0_cells[m]
        g0 = g0s[m]
        wd = wds[m]
        psi = psi0.copy()
        k1 = np.empty(dim, np.complex128)
        k2 = np.empty(dim, np.complex128)
        k3 = np.empty(dim, np.complex128)
        k4 = np.empty(dim, np.complex128)
        yt = np.empty(dim, np.complex128)
        tmp = np.empty(dim, np.complex128)
        # t = 0 sample
        for k in range(nobs):
            acc = 0.0
            for i in range(dim):
                p = psi[i].real * psi[i].real + psi[i].imag * psi[i].imag
                acc += obs_diag[k, i] * p
            reduced[m, k] = acc
            if not reduce_max:
                series[m, 0, k] = acc
        isnap = 1
        for step in range(nsteps):
            t = step * dt
            _schrodinger_rhs(t, psi, h0, vdata, vind, vptr, g0, wd, tmp, k1)
            for i in range(dim):
                yt[i] = psi[i] + 0.5 * dt * k1[i]
            _schrodinger_rhs(t + 0.5 * dt, yt, h0, vdata, vind, vptr, g0, wd, tmp, k2)
            for i in range(dim):
                yt[i] = psi[i] + 0.5 * dt * k2[i]
            _schrodinger_rhs(t + 0.5 * dt, yt, h0, vdata, vind, vptr, g0, wd, tmp, k3)
            for i in range(dim):
                yt[i] = psi[i] + dt * k3[i]
            _schrodinger_rhs(t + dt, yt, h0, vdata, vind, vptr, g0, wd, tmp, k4)
            for i in range(dim):
                psi[i] = psi[i] + (dt / 6.0) * (
                    k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]
                )
            if (step + 1) % stride == 0 and isnap < nsnap:
                for k in range(nobs):
                    acc = 0.0
                    for i in range(dim):
                        p = psi[i].real * psi[i].real + psi[i].imag * psi[i].imag
                        acc += obs_diag[k, i] * p
                    if acc > reduced[m, k]:
                        reduced[m, k] = acc
                    if not reduce_max:
                        series[m, isnap, k] = acc
                isnap += 1
        acc = 0.0
        for i in range(dim):
            acc += psi[i].real * psi[i].real + psi[i].imag * psi[i].imag
        final_norm[m] = np.sqrt(acc)
    return series, reduced, final_norm


@nb.njit(cache=True, inline="always")
def _csr_matmat_left(data, indices, indptr, r, out):
    # out += M @ r for CSR M
    dim = r.shape[0]
    for i in range(dim):
        for k in range(indptr[i], indptr[i + 1]):
            v = data[k]
            row = indices[k]
            for j in range(dim):
                out[i, j] += v * r[row, j]


@nb.njit(cache=True, inline="always")
def _csr_matmat_right(data, indices, indptr, r, out):
    # out += r @ M for CSR M
    dim = r.shape[0]
    for i in range(dim):
        for k in range(indptr[i], indptr[i + 1]):
            v = data[k]
            col = indices[k]
            for j in range(dim):
                out[j, col] += r[j, i] * v

@nb.njit(cache=True)
def _lindblad_rhs(
    t, rho, h0, vdata, vind, vptr, g0, wd,
    c_data, c_ind, c_ptr2, cd_data, cd_ind, cd_ptr2, dd_data, dd_ind, dd_ptr2,
    n_ops, t1, t2, out,
):
    # out = -i[H, rho] + sum_j (C_j rho C_j† - 1/2 {C_j†C_j, rho})
    dim = rho.shape[0]
    g = g0 * np.cos(wd * t)
    # commutator with H = diag(h0) + g V
    for i in range(dim):
        for j in range(dim):
            out[i, j] = -1j * (h0[i] - h0[j]) * rho[i, j]
    for i in range(dim):
        for j in range(dim):
            t1[i, j] = 0.0 + 0.0j
            t2[i, j] = 0.0 + 0.0j
    _csr_matmat_left(vdata, vind, vptr, rho, t1)   # V rho
    _csr_matmat_right(vdata, vind, vptr, rho, t2)  # rho V
    for i in range(dim):
        for j in range(dim):
            out[i, j] += -1j * g * (t1[i, j] - t2[i, j])
    # dissipators
    for jop in range(n_ops):
        for i in range(dim):
            for j in range(dim):
                t1[i, j] = 0.0 + 0.0j
        _csr_matmat_left(c_data, c_ind, c_ptr2[jop], rho, t1)      # C rho
        for i in range(dim):
            for j in range(dim):
                t2[i, j] = 0.0 + 0.0j
        _csr_matmat_right(cd_data, cd_ind, cd_ptr2[jop], t1, t2)   # C rho C†
        for i in range(dim):
            for j in range(dim):
                out[i, j] += t2[i, j]
        for i in range(dim):
            for j in range(dim):
                t1[i, j] = 0.0 + 0.0j
        _csr_matmat_left(dd_data, dd_ind, dd_ptr2[jop], rho, t1)   # D rho
        _csr_matmat_right(dd_data, dd_ind, dd_ptr2[jop], rho, t1)  # + rho D
        for i in range(dim):
            for j in range(dim):
                out[i, j] -= 0.5 * t1[i, j]


@nb.njit(cache=True)
def rk4_lindblad_rho(
    h0, vdata, vind, vptr, g0, wd,
    c_data, c_ind, c_ptr2, cd_data, cd_ind, cd_ptr2, dd_data, dd_ind, dd_ptr2,
    n_ops, rho0, dt, nsteps, stride,
):
    """Evolve one density matrix, storing snapshots every `stride` steps."""
    dim = rho0.shape[0]
    nsnap = nsteps // stride + 1
    snaps = np.empty((nsnap, dim, dim), np.complex128)
    rho = rho0.copy()
    snaps[0] = rho
    k1 = np.empty((dim, dim), np.complex128)
    k2 = np.empty((dim, dim), np.complex128)
    k3 = np.empty((dim, dim), np.complex128)
    k4 = np.empty((dim, dim), np.complex128)
    yt = np.empty((dim, dim), np.complex128)
    t1 = np.empty((dim, dim), np.complex128)
    t2 = np.empty((dim, dim), np.complex128)
    isnap = 1
    for step in range(nsteps):
        t = step * dt
        _lindblad_rhs(t, rho, h0, vdata, vind, vptr, g0, wd,
                      c_data, c_ind, c_ptr2, cd_data, cd_ind, cd_ptr2,
                      dd_data, dd_ind, dd_ptr2, n_ops, t1, t2, k1)
        for i in range(dim):
            for j in range(dim):
                yt[i, j] = rho[i, j] + 0.5 * dt * k1[i, j]
        _lindblad_rhs(t + 0.5 * dt, yt, h0, vdata, vind, vptr, g0, wd,
                      c_data, c_ind, c_ptr2, cd_data, cd_ind, cd_ptr2,
                      dd_data, dd_ind, dd_ptr2, n_ops, t1, t2, k2)
        for i in range(dim):
            for j in range(dim):
                yt[i, j] = rho[i, j] + 0.5 * dt * k2[i, j]
        _lindblad_rhs(t + 0.5 * dt, yt, h0, vdata, vind, vptr, g0, wd,
                      c_data, c_ind, c_ptr2, cd_data, cd_ind, cd_ptr2,
                      dd_data, dd_ind, dd_ptr2, n_ops, t1, t2, k3)
        for i in range(dim):
            for j in range(dim):
                yt[i, j] = rho[i, j] + dt * k3[i, j]
        _lindblad_rhs(t + dt, yt, h0, vdata, vind, vptr, g0, wd,
                      c_data, c_ind, c_ptr2, cd_data, cd_ind, cd_ptr2,
                      dd_data, dd_ind, dd_ptr2, n_ops, t1, t2, k4)
        for i in range(dim):
            for j in range(dim):
                rho[i, j] = rho[i, j] + (dt / 6.0) * (
                    k1[i, j] + 2.0 * k2[i, j] + 2.0 * k3[i, j] + k4[i, j]
                )
        if (step + 1) % stride == 0 and isnap < nsnap:
            snaps[isnap] = rho
            isnap += 1
    return snaps, rho


@nb.njit(cache=True, parallel=True)
def rk4_lindblad_cells_obs(
    h0_cells, vdata, vind, vptr, g0s, wds,
    c_data, c_ind, c_ptr2, cd_data, cd_ind, cd_ptr2, dd_data, dd_ind, dd_ptr2,
    n_ops, rho0, obs_diag, dt, nsteps, stride, reduce_max,
):
    """Lindblad analogue of rk4_cells_obs; tracks Tr[rho·diag] observables.

    Returns (series, reduced, final_trace_dev) with the same layout as
    rk4_cells_obs, final_trace_dev being |Tr rho - 1| per cell.
    """
    M, dim = h0_cells.shape
    nobs = obs_diag.shape[0]
    nsnap = nsteps // stride + 1
    if reduce_max:
        series = np.zeros((M, 1, nobs))
    else:
        series = np.zeros((M, nsnap, nobs))
    reduced = np.zeros((M, nobs))
    final_trace_dev = np.zeros(M)
    for m in nb.prange(M):
        h0 = h0_cells[m]
        g0 = g0s[m]
        wd = wds[m]
        rho = rho0.copy()
        k1 = np.empty((dim, dim), np.complex128)
        k2 = np.empty((dim, dim), np.complex128)
        k3 = np.empty((dim, dim), np.complex128)
        k4 = np.empty((dim, dim), np.complex128)
        yt = np.empty((dim, dim), np.complex128)
        t1 = np.empty((dim, dim), np.complex128)
        t2 = np.empty((dim, dim), np.complex128)
        for k in range(nobs):
            acc = 0.0
            for i in range(dim):
                acc += obs_diag[k, i] * rho[i, i].real
            reduced[m, k] = acc
            if not reduce_max:
                series[m, 0, k] = acc
        isnap = 1
        for step in range(nsteps):
            t = step * dt
            _lindblad_rhs(t, rho, h0, vdata, vind, vptr, g0, wd,
                          c_data, c_ind, c_ptr2, cd_data, cd_ind, cd_ptr2,
                          dd_data, dd_ind, dd_ptr2, n_ops, t1, t2, k1)
            for i in range(dim):
                for j in range(dim):
                    yt[i, j] = rho[i, j] + 0.5 * dt * k1[i, j]
            _lindblad_rhs(t + 0.5 * dt, yt, h0, vdata, vind, vptr, g0, wd,
                          c_data, c_ind, c_ptr2, cd_data, cd_ind, cd_ptr2,
                          dd_data, dd_ind, dd_ptr2, n_ops, t1, t2, k2)
            for i in range(dim):
                for j in range(dim):
                    yt[i, j] = rho[i, j] + 0.5 * dt * k2[i, j]
            _lindblad_rhs(t + 0.5 * dt, yt, h0, vdata, vind, vptr, g0, wd,
                          c_data, c_ind, c_ptr2, cd_data, cd_ind, cd_ptr2,
                          dd_data, dd_ind, dd_ptr2, n_ops, t1, t2, k3)
            for i in range(dim):
                for j in range(dim):
                    yt[i, j] = rho[i, j] + dt * k3[i, j]
            _lindblad_rhs(t + dt, yt, h0, vdata, vind, vptr, g0, wd,
                          c_data, c_ind, c_ptr2, cd_data, cd_ind, cd_ptr2,
                          dd_data, dd_ind, dd_ptr2, n_ops, t1, t2, k4)
            for i in range(dim):
                for j in range(dim):
                    rho[i, j] = rho[i, j] + (dt / 6.0) * (
                        k1[i, j] + 2.0 * k2[i, j] + 2.0 * k3[i, j] + k4[i, j]
                    )
            if (step + 1) % stride == 0 and isnap < nsnap:
                for k in range(nobs):
                    acc = 0.0
                    for i in range(dim):
                        acc += obs_diag[k, i] * rho[i, i].real
                    if acc > reduced[m, k]:
                        reduced[m, k] = acc
                    if not reduce_max:
                        series[m, isnap, k] = acc
                isnap += 1
        tr = 0.0
        for i in range(dim):
            tr += rho[i, i].real
        final_trace_dev[m] = abs(tr - 1.0)
    return series, reduced, final_trace_dev


@nb.njit(cache=True)
def _hierarchy_rhs(t, y, psi0, m_data, m_ind, m_ptr2, nus, keep, wd, tmp, out):
    # d phi^n/dt = -i cos(wd t) sum_j keep_j e^{i nu_j t} M_j phi^{n-1}
    order, dim = y.shape
    c = np.cos(wd * t)
    for n in range(order):
        src = psi0 if n == 0 else y[n - 1]
        for i in range(dim):
            out[n, i] = 0.0 + 0.0j
        for j in range(4):
            if keep[j] == 0.0:
                continue
            _csr_matvec(m_data, m_ind, m_ptr2[j], src, tmp)
            phase = keep[j] * c * np.exp(1j * nus[j] * t)
            for i in range(dim):
                out[n, i] += phase * tmp[i]
        for i in range(dim):
            out[n, i] *= -1j


@nb.njit(cache=True)
def rk4_hierarchy(
    psi0, m_data, m_ind, m_ptr2, nus, keep, wd, order, dt, nsteps, stride
):
    """Integrate the coupled correction hierarchy in the interaction picture.

    Returns snapshots of shape (nsnap, order, dim); phi^n(0) = 0 for n >= 1.
    """
    dim = psi0.shape[0]
    nsnap = nsteps // stride + 1
    snaps = np.zeros((nsnap, order, dim), np.complex128)
    y = np.zeros((order, dim), np.complex128)
    k1 = np.empty((order, dim), np.complex128)
    k2 = np.empty((order, dim), np.complex128)
    k3 = np.empty((order, dim), np.complex128)
    k4 = np.empty((order, dim), np.complex128)
    yt = np.empty((order, dim), np.complex128)
    tmp = np.empty(dim, np.complex128)
    isnap = 1
    for step in range(nsteps):
        t = step * dt
        _hierarchy_rhs(t, y, psi0, m_data, m_ind, m_ptr2, nus, keep, wd, tmp, k1)
        for n in range(order):
            for i in range(dim):
                yt[n, i] = y[n, i] + 0.5 * dt * k1[n, i]
        _hierarchy_rhs(t + 0.5 * dt, yt, psi0, m_data, m_ind, m_ptr2, nus, keep,
                       wd, tmp, k2)
        for n in range(order):
            for i in range(dim):
                yt[n, i] = y[n, i] + 0.5 * dt * k2[n, i]
        _hierarchy_rhs(t + 0.5 * dt, yt, psi0, m_data, m_ind, m_ptr2, nus, keep,
                       wd, tmp, k3)
        for n in range(order):
            for i in range(dim):
                yt[n, i] = y[n, i] + dt * k3[n, i]
        _hierarchy_rhs(t + dt, yt, psi0, m_data, m_ind, m_ptr2, nus, keep,
                       wd, tmp, k4)
        for n in range(order):
            for i in range(dim):
                y[n, i] = y[n, i] + (dt / 6.0) * (
                    k1[n, i] + 2.0 * k2[n, i] + 2.0 * k3[n, i] + k4[n, i]
                )
        if (step + 1) % stride == 0 and isnap < nsnap:
            snaps[isnap] = y
            isnap += 1
    return snaps
