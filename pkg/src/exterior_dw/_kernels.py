"""Compiled inner loops for the time steppers.

All kernels work on raw arrays; the public modules wrap them with grids,
configs and validation. Fields vanish at both ends of the mesh.
"""

from __future__ import annotations

import math

import numba
import numpy as np


@numba.njit(cache=True)
def theta_heat_steps(w, r, dr, dt, theta, nsteps):
    """Advance ``w_t = w'' + w'/r`` by ``nsteps`` theta-scheme steps in place.

    ``theta = 1`` is implicit Euler, ``theta = 0.5`` Crank-Nicolson.
    Returns 0 on success and -1 on a zero pivot.
    """
    n = w.shape[0]
    m = n - 2
    if m <= 0 or nsteps <= 0:
        return 0
    inv = 1.0 / (dr * dr)
    lo = np.empty(m)
    up = np.empty(m)
    for k in range(m):
        ri = r[k + 1]
        lo[k] = inv - 0.5 / (dr * ri)
        up[k] = inv + 0.5 / (dr * ri)
    di = -2.0 * inv
    # forward elimination coefficients of (I - theta*dt*A), computed once
    a = -theta * dt
    cp = np.empty(m)
    den = np.empty(m)
    piv = 1.0 + a * di
    if piv == 0.0:
        return -1
    den[0] = piv
    cp[0] = a * up[0] / piv
    for k in range(1, m):
        piv = 1.0 + a * di - a * lo[k] * cp[k - 1]
        if piv == 0.0:
            return -1
        den[k] = piv
        cp[k] = a * up[k] / piv
    b = (1.0 - theta) * dt
    rhs = np.empty(m)
    for _ in range(nsteps):
        for k in range(m):
            i = k + 1
            rhs[k] = w[i] + b * (lo[k] * w[i - 1] + di * w[i] + up[k] * w[i + 1])
        # forward sweep
        rhs[0] = rhs[0] / den[0]
        for k in range(1, m):
            rhs[k] = (rhs[k] - a * lo[k] * rhs[k - 1]) / den[k]
        # back substitution
        for k in range(m - 2, -1, -1):
            rhs[k] = rhs[k] - cp[k] * rhs[k + 1]
        for k in range(m):
            w[k + 1] = rhs[k]
        w[0] = 0.0
        w[n - 1] = 0.0
    return 0


@numba.njit(cache=True, inline="always")
def _power(x, p):
    ax = abs(x)
    if p == 2.0:
        return ax * ax
    if p == 3.0:
        return ax * ax * ax
    if p == 1.5:
        return ax * math.sqrt(ax)
    return ax**p


@numba.njit(cache=True)
def radial_leapfrog_steps(state, r, dr, dt, nsteps, p, with_source, i_hi, m_blow):
    """Leapfrog for ``u_tt - lap u + u_t = |u|^p`` (source optional).

    ``state[0]`` holds ``u^{n-1}``, ``state[1]`` holds ``u^n``; both are
    advanced in place. Nodes beyond ``i_hi`` are known to be zero and the
    active range grows by one node per step (``dt <= dr``).

    Returns ``(steps_done, crossed, i_hi)``; ``crossed`` is set when the new
    level reaches ``|u| >= m_blow`` or stops being finite, and stepping halts
    with that level stored in ``state[1]``.
    """
    n = r.shape[0]
    inv = 1.0 / (dr * dr)
    dt2 = dt * dt
    cminus = 1.0 - 0.5 * dt
    cplus = 1.0 / (1.0 + 0.5 * dt)
    prev = state[0]
    cur = state[1]
    done = 0
    crossed = False
    for _ in range(nsteps):
        top = min(i_hi + 1, n - 2)
        smax = 0.0
        bad = False
        for i in range(1, top + 1):
            lap = (cur[i + 1] - 2.0 * cur[i] + cur[i - 1]) * inv + (cur[i + 1] - cur[i - 1]) / (2.0 * dr * r[i])
            src = _power(cur[i], p) if with_source else 0.0
            new = (2.0 * cur[i] - cminus * prev[i] + dt2 * (lap + src)) * cplus
            prev[i] = new
            a = abs(new)
            if a > smax:
                smax = a
            if not (a < math.inf):
                bad = True
        i_hi = top
        tmp = prev
        prev = cur
        cur = tmp
        done += 1
        if bad or smax >= m_blow:
            crossed = True
            break
    if done % 2 == 1:
        # roles swapped an odd number of times; restore state[0] = old, state[1] = new
        tmp2 = state[0].copy()
        state[0][:] = state[1]
        state[1][:] = tmp2
    return done, crossed, i_hi


@numba.njit(cache=True)
def line_leapfrog_steps(state, m, dy, dt, nsteps):
    """Leapfrog for ``U_tt - U_yy = m U`` on a line with zero end values."""
    n = m.shape[0]
    lam2 = (dt / dy) ** 2
    dt2 = dt * dt
    prev = state[0]
    cur = state[1]
    for _ in range(nsteps):
        for j in range(1, n - 1):
            prev[j] = 2.0 * cur[j] - prev[j] + lam2 * (cur[j + 1] - 2.0 * cur[j] + cur[j - 1]) + dt2 * m[j] * cur[j]
        tmp = prev
        prev = cur
        cur = tmp
    if nsteps % 2 == 1:
        tmp2 = state[0].copy()
        state[0][:] = state[1]
        state[1][:] = tmp2
    return nsteps
