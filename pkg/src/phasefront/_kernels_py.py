"""NumPy implementations of the hot numerical kernels.

This module is the fallback backend; `phasefront._kernels` (Cython) provides
the same functions compiled. Keep signatures and semantics in sync, the
backend is chosen once at import in :mod:`phasefront.backend`.
"""

import numpy as np

BACKEND_NAME = "python"


def fd1_periodic(f, dx):
    """4th-order central first derivative along the last axis, periodic wrap.

    Weights are [1, -8, 0, 8, -1] / (12 dx) at offsets [-2, -1, 0, 1, 2].
    """
    f = np.asarray(f, dtype=np.float64)
    fm2 = np.roll(f, 2, axis=-1)
    fm1 = np.roll(f, 1, axis=-1)
    fp1 = np.roll(f, -1, axis=-1)
    fp2 = np.roll(f, -2, axis=-1)
    return (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * dx)


def fd2_periodic(f, dx):
    """4th-order central second derivative along the last axis, periodic wrap.

    Weights are [-1, 16, -30, 16, -1] / (12 dx^2).
    """
    f = np.asarray(f, dtype=np.float64)
    fm2 = np.roll(f, 2, axis=-1)
    fm1 = np.roll(f, 1, axis=-1)
    fp1 = np.roll(f, -1, axis=-1)
    fp2 = np.roll(f, -2, axis=-1)
    return (-fm2 + 16.0 * fm1 - 30.0 * f + 16.0 * fp1 - fp2) / (12.0 * dx * dx)


def allen_cahn_rhs_core(phi, a, D, dx, dy):
    """Reaction-diffusion right-hand side D*lap(phi) - (phi - a)*(phi^2 - 1).

    The Laplacian is the 5-point second-order stencil: periodic in x
    (columns), zero-flux in y (rows) via mirror ghost rows phi[-1] = phi[1].
    """
    lap = (np.roll(phi, 1, axis=1) - 2.0 * phi + np.roll(phi, -1, axis=1)) / (dx * dx)
    ylap = np.empty_like(phi)
    ylap[1:-1] = phi[2:] - 2.0 * phi[1:-1] + phi[:-2]
    ylap[0] = 2.0 * (phi[1] - phi[0])
    ylap[-1] = 2.0 * (phi[-2] - phi[-1])
    lap += ylap / (dy * dy)
    return D * lap - (phi - a) * (phi * phi - 1.0)


def tanh_fit_batch(y, cols, c0, d0, max_iter, step_tol, lam0=1e-3):
    """Fit tanh(c*y - d) to each column of ``cols`` by damped Gauss-Newton.

    Levenberg-style damping: the 2x2 normal matrix diagonal is inflated by
    (1 + lam); lam shrinks on accepted steps and grows on rejected ones. A
    column converges when an accepted update has norm < ``step_tol``.

    Parameters
    ----------
    y : (n_y,) sample positions.
    cols : (n_y, m) one profile per column.
    c0, d0 : (m,) initial parameters per column.
    max_iter : trial-step budget per column.
    step_tol : convergence threshold on the parameter update norm.

    Returns
    -------
    c, d : (m,) fitted parameters.
    converged : (m,) bool mask.
    cost : (m,) final sum of squared residuals.
    """
    y = np.asarray(y, dtype=np.float64)
    cols = np.asarray(cols, dtype=np.float64)
    c = np.array(c0, dtype=np.float64, copy=True)
    d = np.array(d0, dtype=np.float64, copy=True)
    m = cols.shape[1]

    yv = y[:, None]
    lam = np.full(m, lam0)
    th = np.tanh(c * yv - d)
    r = th - cols
    cost = np.einsum("ij,ij->j", r, r)
    active = np.ones(m, dtype=bool)
    converged = np.zeros(m, dtype=bool)

    for _ in range(max_iter):
        s2 = 1.0 - th * th
        jc = yv * s2
        a11 = np.einsum("ij,ij->j", jc, jc)
        a12 = -np.einsum("ij,ij->j", jc, s2)
        a22 = np.einsum("ij,ij->j", s2, s2)
        g1 = np.einsum("ij,ij->j", jc, r)
        g2 = -np.einsum("ij,ij->j", s2, r)

        b11 = a11 * (1.0 + lam)
        b22 = a22 * (1.0 + lam)
        det = b11 * b22 - a12 * a12
        # a singular normal matrix means a fully saturated profile; such
        # columns stall and are reported unconverged
        active &= det > 0.0
        det = np.where(det > 0.0, det, 1.0)
        dc = -(b22 * g1 - a12 * g2) / det
        dd = -(-a12 * g1 + b11 * g2) / det

        ct = np.where(active, c + dc, c)
        dt = np.where(active, d + dd, d)
        tht = np.tanh(ct * yv - dt)
        rt = tht - cols
        cost_t = np.einsum("ij,ij->j", rt, rt)

        better = active & (cost_t <= cost)
        c = np.where(better, ct, c)
        d = np.where(better, dt, d)
        th = np.where(better[None, :], tht, th)
        r = np.where(better[None, :], rt, r)
        cost = np.where(better, cost_t, cost)
        step = np.hypot(dc, dd)
        lam = np.where(better, np.maximum(lam * 0.3, 1e-12),
                       np.where(active, lam * 10.0, lam))
        done = better & (step < step_tol)
        converged |= done
        active &= ~done
        if not active.any():
            break

    return c, d, converged, cost
