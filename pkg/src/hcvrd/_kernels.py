"""Compiled inner loops for the time steppers.

The public solver API lives in solver.py; these kernels only advance raw
arrays.  Arithmetic mirrors the numpy reference step exactly (same
association order) so both paths produce identical trajectories.
"""

from __future__ import annotations

import numba
import numpy as np


@numba.njit(cache=True, inline="always")
def _pde_rhs(y, out, n, inv_h2, D1, D2, D3, lam, d, cb, rho, ar, ek, mu, u, a0, a1, a2, a3):
    for j in range(n):
        if j == 0:
            lH = 2.0 * (y[0, 1] - y[0, 0]) * inv_h2
            lI = 2.0 * (y[1, 1] - y[1, 0]) * inv_h2
            lV = 2.0 * (y[2, 1] - y[2, 0]) * inv_h2
        elif j == n - 1:
            lH = 2.0 * (y[0, n - 2] - y[0, n - 1]) * inv_h2
            lI = 2.0 * (y[1, n - 2] - y[1, n - 1]) * inv_h2
            lV = 2.0 * (y[2, n - 2] - y[2, n - 1]) * inv_h2
        else:
            lH = (y[0, j - 1] - 2.0 * y[0, j] + y[0, j + 1]) * inv_h2
            lI = (y[1, j - 1] - 2.0 * y[1, j] + y[1, j + 1]) * inv_h2
            lV = (y[2, j - 1] - 2.0 * y[2, j] + y[2, j + 1]) * inv_h2
        H = y[0, j]
        I = y[1, j]
        V = y[2, j]
        den = a0 + a1 * H + a2 * V + a3 * H * V
        f = cb * H * V / den
        out[0, j] = D1 * lH + (lam - d * H - f + rho * I)
        out[1, j] = D2 * lI + (f - ar * I)
        out[2, j] = D3 * lV + (ek * I - mu * V - u * f)


@numba.njit(cache=True)
def pde_rk4_chunk(y, nsteps, dt, h, clamp,
                  D1, D2, D3, lam, d, cb, rho, ar, ek, mu, u, a0, a1, a2, a3):
    """Advance ``y`` (3, n) in place by ``nsteps`` classical RK4 steps.

    Returns the total magnitude clamped to zero (0.0 unless ``clamp``).
    """
    n = y.shape[1]
    inv_h2 = 1.0 / (h * h)
    k1 = np.empty_like(y)
    k2 = np.empty_like(y)
    k3 = np.empty_like(y)
    k4 = np.empty_like(y)
    tmp = np.empty_like(y)
    clamped = 0.0
    for _ in range(nsteps):
        _pde_rhs(y, k1, n, inv_h2, D1, D2, D3, lam, d, cb, rho, ar, ek, mu, u, a0, a1, a2, a3)
        for i in range(3):
            for j in range(n):
                tmp[i, j] = y[i, j] + 0.5 * dt * k1[i, j]
        _pde_rhs(tmp, k2, n, inv_h2, D1, D2, D3, lam, d, cb, rho, ar, ek, mu, u, a0, a1, a2, a3)
        for i in range(3):
            for j in range(n):
                tmp[i, j] = y[i, j] + 0.5 * dt * k2[i, j]
        _pde_rhs(tmp, k3, n, inv_h2, D1, D2, D3, lam, d, cb, rho, ar, ek, mu, u, a0, a1, a2, a3)
        for i in range(3):
            for j in range(n):
                tmp[i, j] = y[i, j] + dt * k3[i, j]
        _pde_rhs(tmp, k4, n, inv_h2, D1, D2, D3, lam, d, cb, rho, ar, ek, mu, u, a0, a1, a2, a3)
        for i in range(3):
            for j in range(n):
                y[i, j] = y[i, j] + (dt / 6.0) * (
                    k1[i, j] + 2.0 * (k2[i, j] + k3[i, j]) + k4[i, j]
                )
        if clamp:
            for i in range(3):
                for j in range(n):
                    if y[i, j] < 0.0:
                        clamped += -y[i, j]
                        y[i, j] = 0.0
    return clamped


@numba.njit(cache=True, inline="always")
def _ode_rhs(H, I, V, lam, d, cb, rho, ar, ek, mu, u, a0, a1, a2, a3):
    den = a0 + a1 * H + a2 * V + a3 * H * V
    f = cb * H * V / den
    return (lam - d * H - f + rho * I,
            f - ar * I,
            ek * I - mu * V - u * f)


@numba.njit(cache=True)
def ode_rk4(s0, nsteps, dt, stride, out,
            lam, d, cb, rho, ar, ek, mu, u, a0, a1, a2, a3):
    """RK4 on the reaction system alone; records every ``stride`` steps.

    ``out`` must have shape (nsteps // stride + 2, 3); the used row count
    is returned (initial state, strided samples, final state).
    """
    H = s0[0]
    I = s0[1]
    V = s0[2]
    out[0, 0] = H
    out[0, 1] = I
    out[0, 2] = V
    row = 1
    for s in range(nsteps):
        h1, i1, v1 = _ode_rhs(H, I, V, lam, d, cb, rho, ar, ek, mu, u, a0, a1, a2, a3)
        h2, i2, v2 = _ode_rhs(H + 0.5 * dt * h1, I + 0.5 * dt * i1, V + 0.5 * dt * v1,
                              lam, d, cb, rho, ar, ek, mu, u, a0, a1, a2, a3)
        h3, i3, v3 = _ode_rhs(H + 0.5 * dt * h2, I + 0.5 * dt * i2, V + 0.5 * dt * v2,
                              lam, d, cb, rho, ar, ek, mu, u, a0, a1, a2, a3)
        h4, i4, v4 = _ode_rhs(H + dt * h3, I + dt * i3, V + dt * v3,
                              lam, d, cb, rho, ar, ek, mu, u, a0, a1, a2, a3)
        H = H + (dt / 6.0) * (h1 + 2.0 * (h2 + h3) + h4)
        I = I + (dt / 6.0) * (i1 + 2.0 * (i2 + i3) + i4)
        V = V + (dt / 6.0) * (v1 + 2.0 * (v2 + v3) + v4)
        if (s + 1) % stride == 0 or s == nsteps - 1:
            out[row, 0] = H
            out[row, 1] = I
            out[row, 2] = V
            row += 1
    return row
