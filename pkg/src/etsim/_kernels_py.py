"""Pure-numpy implementation of the hot assembly kernels.

Unknowns are interleaved per node: u[3i] = n_i, u[3i+1] = V_i, u[3i+2] = theta_i.
Residual rows follow the same layout: continuity, Poisson, temperature.
A compiled Cython twin of this module lives in ``_kernels.pyx``; both must
produce bit-identical output for the same inputs (covered by tests).
"""

from __future__ import annotations

import numpy as np

BANDWIDTH = 5  # lower == upper under the interleaved ordering


def residual(u, u_prev, C, th_lat, f_n, f_v, f_th,
             dx, dt, lam2, tau, kap0,
             wd_k, wd_m, wa_k, wa_m,
             bc, freeze_n, n_target):
    """Assemble the 3N residual of one time step.

    wd_* weight the diffusion term at levels k / k-1, wa_* the drift term.
    bc holds the Dirichlet data (n_0, n_1, V_0, V_1, th_0, th_1).
    With freeze_n the continuity rows become identity rows n - n_target
    (used for the elliptic projection of the initial data).
    """
    n, v, th = u[0::3], u[1::3], u[2::3]
    n0, v0, th0 = u_prev[0::3], u_prev[1::3], u_prev[2::3]
    N = n.size
    inv_dx2 = 1.0 / (dx * dx)
    r = np.empty(3 * N)

    p = n * th
    p0 = n0 * th0

    # continuity: diffusion Laplacian of (n theta) and drift div(n grad V)
    diff_k = (p[2:] - 2.0 * p[1:-1] + p[:-2]) * inv_dx2
    diff_m = (p0[2:] - 2.0 * p0[1:-1] + p0[:-2]) * inv_dx2
    drift_k = ((n[2:] + n[1:-1]) * (v[2:] - v[1:-1])
               - (n[1:-1] + n[:-2]) * (v[1:-1] - v[:-2])) * (0.5 * inv_dx2)
    drift_m = ((n0[2:] + n0[1:-1]) * (v0[2:] - v0[1:-1])
               - (n0[1:-1] + n0[:-2]) * (v0[1:-1] - v0[:-2])) * (0.5 * inv_dx2)

    if freeze_n:
        r[0::3] = n - n_target
    else:
        r[3:-3:3] = ((n[1:-1] - n0[1:-1]) / dt
                     - (wd_k * diff_k + wd_m * diff_m)
                     - (wa_k * drift_k + wa_m * drift_m)
                     - f_n[1:-1])
        r[0] = n[0] - bc[0]
        r[3 * (N - 1)] = n[-1] - bc[1]

    # Poisson: -lam2 * Lap V = n - C
    r[4:-3:3] = (-lam2 * (v[2:] - 2.0 * v[1:-1] + v[:-2]) * inv_dx2
                 - (n[1:-1] - C[1:-1]) - f_v[1:-1])
    r[1] = v[0] - bc[2]
    r[3 * (N - 1) + 1] = v[-1] - bc[3]

    # temperature: kap0 * div(n theta grad theta) = (n/tau)(theta - theta_L)
    cc = kap0 * 0.5 * inv_dx2
    r[5:-3:3] = (cc * ((p[2:] + p[1:-1]) * (th[2:] - th[1:-1])
                       - (p[1:-1] + p[:-2]) * (th[1:-1] - th[:-2]))
                 - (n[1:-1] / tau) * (th[1:-1] - th_lat[1:-1])
                 - f_th[1:-1])
    r[2] = th[0] - bc[4]
    r[3 * (N - 1) + 2] = th[-1] - bc[5]
    return r


def jacobian_banded(u, C, th_lat, dx, dt, lam2, tau, kap0,
                    wd_k, wa_k, freeze_n):
    """Exact banded Jacobian of :func:`residual` w.r.t. the level-k unknowns.

    Returned in LAPACK band storage ab[BANDWIDTH + i - j, j] with
    lower = upper = BANDWIDTH.
    """
    n, v, th = u[0::3], u[1::3], u[2::3]
    N = n.size
    inv_dx2 = 1.0 / (dx * dx)
    half = 0.5 * inv_dx2
    ab = np.zeros((2 * BANDWIDTH + 1, 3 * N))

    i = np.arange(1, N - 1)
    rc, rp, rt = 3 * i, 3 * i + 1, 3 * i + 2

    def put(rows, cols, vals):
        ab[BANDWIDTH + rows - cols, cols] = vals

    dvp = v[2:] - v[1:-1]
    dvm = v[1:-1] - v[:-2]
    dtp = th[2:] - th[1:-1]
    dtm = th[1:-1] - th[:-2]
    p = n * th

    # continuity rows
    if freeze_n:
        put(rc, rc, np.ones(i.size))
    else:
        put(rc, rc - 3, -wd_k * th[:-2] * inv_dx2 + wa_k * half * dvm)
        put(rc, rc, 1.0 / dt + 2.0 * wd_k * th[1:-1] * inv_dx2
            - wa_k * half * (dvp - dvm))
        put(rc, rc + 3, -wd_k * th[2:] * inv_dx2 - wa_k * half * dvp)
        put(rc, rc - 2, -wa_k * half * (n[1:-1] + n[:-2]))
        put(rc, rc + 1, wa_k * half * (n[2:] + 2.0 * n[1:-1] + n[:-2]))
        put(rc, rc + 4, -wa_k * half * (n[2:] + n[1:-1]))
        put(rc, rc - 1, -wd_k * n[:-2] * inv_dx2)
        put(rc, rc + 2, 2.0 * wd_k * n[1:-1] * inv_dx2)
        put(rc, rc + 5, -wd_k * n[2:] * inv_dx2)

    # Poisson rows
    put(rp, rp - 1, -np.ones(i.size))
    put(rp, rp - 3, np.full(i.size, -lam2 * inv_dx2))
    put(rp, rp, np.full(i.size, 2.0 * lam2 * inv_dx2))
    put(rp, rp + 3, np.full(i.size, -lam2 * inv_dx2))

    # temperature rows
    cc = kap0 * half
    pip = p[2:] + p[1:-1]
    pim = p[1:-1] + p[:-2]
    put(rt, rt - 5, -cc * th[:-2] * dtm)
    put(rt, rt - 2, cc * th[1:-1] * (dtp - dtm) - (th[1:-1] - th_lat[1:-1]) / tau)
    put(rt, rt + 1, cc * th[2:] * dtp)
    put(rt, rt - 3, cc * (-n[:-2] * dtm + pim))
    put(rt, rt, cc * (n[1:-1] * (dtp - dtm) - pip - pim) - n[1:-1] / tau)
    put(rt, rt + 3, cc * (n[2:] * dtp + pip))

    # Dirichlet identity rows at both contacts (continuity boundary rows are
    # identity in freeze_n mode too)
    for row in (0, 1, 2, 3 * (N - 1), 3 * (N - 1) + 1, 3 * (N - 1) + 2):
        ab[BANDWIDTH, row] = 1.0
    return ab
