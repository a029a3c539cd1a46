# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of ``_kernels_py``: residual and banded-Jacobian assembly.

Expression order mirrors the numpy implementation so both backends agree
bit-for-bit.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()

BANDWIDTH = 5

cdef enum:
    BW = 5


def residual(double[::1] u, double[::1] u_prev,
             double[::1] C, double[::1] th_lat,
             double[::1] f_n, double[::1] f_v, double[::1] f_th,
             double dx, double dt, double lam2, double tau, double kap0,
             double wd_k, double wd_m, double wa_k, double wa_m,
             double[::1] bc, bint freeze_n, double[::1] n_target):
    cdef Py_ssize_t N = u.shape[0] // 3
    cdef cnp.ndarray[double, ndim=1] out = np.empty(3 * N)
    cdef double[::1] r = out
    cdef double inv_dx2 = 1.0 / (dx * dx)
    cdef double cc = kap0 * 0.5 * inv_dx2
    cdef Py_ssize_t i
    cdef double nm, ni, np_, vm, vi, vp, tm, ti, tp
    cdef double n0m, n0i, n0p, v0m, v0i, v0p, t0m, t0i, t0p
    cdef double pm, pi, pp, p0m, p0i, p0p
    cdef double diff_k, diff_m, drift_k, drift_m

    for i in range(1, N - 1):
        nm = u[3 * (i - 1)]; ni = u[3 * i]; np_ = u[3 * (i + 1)]
        vm = u[3 * (i - 1) + 1]; vi = u[3 * i + 1]; vp = u[3 * (i + 1) + 1]
        tm = u[3 * (i - 1) + 2]; ti = u[3 * i + 2]; tp = u[3 * (i + 1) + 2]
        pm = nm * tm; pi = ni * ti; pp = np_ * tp

        if freeze_n:
            r[3 * i] = ni - n_target[i]
        else:
            n0m = u_prev[3 * (i - 1)]; n0i = u_prev[3 * i]; n0p = u_prev[3 * (i + 1)]
            v0m = u_prev[3 * (i - 1) + 1]; v0i = u_prev[3 * i + 1]; v0p = u_prev[3 * (i + 1) + 1]
            t0m = u_prev[3 * (i - 1) + 2]; t0i = u_prev[3 * i + 2]; t0p = u_prev[3 * (i + 1) + 2]
            p0m = n0m * t0m; p0i = n0i * t0i; p0p = n0p * t0p
            diff_k = (pp - 2.0 * pi + pm) * inv_dx2
            diff_m = (p0p - 2.0 * p0i + p0m) * inv_dx2
            drift_k = ((np_ + ni) * (vp - vi) - (ni + nm) * (vi - vm)) * (0.5 * inv_dx2)
            drift_m = ((n0p + n0i) * (v0p - v0i) - (n0i + n0m) * (v0i - v0m)) * (0.5 * inv_dx2)
            r[3 * i] = ((ni - n0i) / dt
                        - (wd_k * diff_k + wd_m * diff_m)
                        - (wa_k * drift_k + wa_m * drift_m)
                        - f_n[i])

        r[3 * i + 1] = (-lam2 * (vp - 2.0 * vi + vm) * inv_dx2
                        - (ni - C[i]) - f_v[i])
        r[3 * i + 2] = (cc * ((pp + pi) * (tp - ti) - (pi + pm) * (ti - tm))
                        - (ni / tau) * (ti - th_lat[i])
                        - f_th[i])

    if freeze_n:
        r[0] = u[0] - n_target[0]
        r[3 * (N - 1)] = u[3 * (N - 1)] - n_target[N - 1]
    else:
        r[0] = u[0] - bc[0]
        r[3 * (N - 1)] = u[3 * (N - 1)] - bc[1]
    r[1] = u[1] - bc[2]
    r[3 * (N - 1) + 1] = u[3 * (N - 1) + 1] - bc[3]
    r[2] = u[2] - bc[4]
    r[3 * (N - 1) + 2] = u[3 * (N - 1) + 2] - bc[5]
    return out


def jacobian_banded(double[::1] u, double[::1] C, double[::1] th_lat,
                    double dx, double dt, double lam2, double tau, double kap0,
                    double wd_k, double wa_k, bint freeze_n):
    cdef Py_ssize_t N = u.shape[0] // 3
    cdef cnp.ndarray[double, ndim=2] out = np.zeros((2 * BW + 1, 3 * N))
    cdef double[:, ::1] ab = out
    cdef double inv_dx2 = 1.0 / (dx * dx)
    cdef double half = 0.5 * inv_dx2
    cdef double cc = kap0 * half
    cdef Py_ssize_t i, rc, rp, rt
    cdef double nm, ni, np_, vm, vi, vp, tm, ti, tp
    cdef double dvp, dvm, dtp, dtm, pip, pim

    for i in range(1, N - 1):
        nm = u[3 * (i - 1)]; ni = u[3 * i]; np_ = u[3 * (i + 1)]
        vm = u[3 * (i - 1) + 1]; vi = u[3 * i + 1]; vp = u[3 * (i + 1) + 1]
        tm = u[3 * (i - 1) + 2]; ti = u[3 * i + 2]; tp = u[3 * (i + 1) + 2]
        dvp = vp - vi; dvm = vi - vm
        dtp = tp - ti; dtm = ti - tm
        pip = np_ * tp + ni * ti
        pim = ni * ti + nm * tm
        rc = 3 * i; rp = 3 * i + 1; rt = 3 * i + 2

        # continuity row (ab[BW + row - col, col])
        if freeze_n:
            ab[BW, rc] = 1.0
        else:
            ab[BW + 3, rc - 3] = -wd_k * tm * inv_dx2 + wa_k * half * dvm
            ab[BW, rc] = 1.0 / dt + 2.0 * wd_k * ti * inv_dx2 - wa_k * half * (dvp - dvm)
            ab[BW - 3, rc + 3] = -wd_k * tp * inv_dx2 - wa_k * half * dvp
            ab[BW + 2, rc - 2] = -wa_k * half * (ni + nm)
            ab[BW - 1, rc + 1] = wa_k * half * (np_ + 2.0 * ni + nm)
            ab[BW - 4, rc + 4] = -wa_k * half * (np_ + ni)
            ab[BW + 1, rc - 1] = -wd_k * nm * inv_dx2
            ab[BW - 2, rc + 2] = 2.0 * wd_k * ni * inv_dx2
            ab[BW - 5, rc + 5] = -wd_k * np_ * inv_dx2

        # Poisson row
        ab[BW + 1, rp - 1] = -1.0
        ab[BW + 3, rp - 3] = -lam2 * inv_dx2
        ab[BW, rp] = 2.0 * lam2 * inv_dx2
        ab[BW - 3, rp + 3] = -lam2 * inv_dx2

        # temperature row
        ab[BW + 5, rt - 5] = -cc * tm * dtm
        ab[BW + 2, rt - 2] = cc * ti * (dtp - dtm) - (ti - th_lat[i]) / tau
        ab[BW - 1, rt + 1] = cc * tp * dtp
        ab[BW + 3, rt - 3] = cc * (-nm * dtm + pim)
        ab[BW, rt] = cc * (ni * (dtp - dtm) - pip - pim) - ni / tau
        ab[BW - 3, rt + 3] = cc * (np_ * dtp + pip)

    ab[BW, 0] = 1.0
    ab[BW, 1] = 1.0
    ab[BW, 2] = 1.0
    ab[BW, 3 * (N - 1)] = 1.0
    ab[BW, 3 * (N - 1) + 1] = 1.0
    ab[BW, 3 * (N - 1) + 2] = 1.0
    return out
