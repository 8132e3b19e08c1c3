"""Compiled Heun inner loop.

Scalar code per row so each trajectory stays in registers; rows never
interact, which keeps results independent of batch composition.
"""

import math

import numba as nb
import numpy as np


@nb.njit(cache=True, inline="always")
def _torque(m0, m1, m2, hx, hy, hz, g, ga):
    c0 = m1 * hz - m2 * hy
    c1 = m2 * hx - m0 * hz
    c2 = m0 * hy - m1 * hx
    d0 = m1 * c2 - m2 * c1
    d1 = m2 * c0 - m0 * c2
    d2 = m0 * c1 - m1 * c0
    return -g * c0 - ga * d0, -g * c1 - ga * d1, -g * c2 - ga * d2


@nb.njit(cache=True, inline="always")
def _field(m0, m1, m2, kx, ky, kz, hx0, hy0, hz0, t0, t1, t2, beta, px, py, pz):
    hx = kx * m0 + hx0 + t0
    hy = ky * m1 + hy0 + t1
    hz = kz * m2 + hz0 + t2
    if beta != 0.0:
        hx += beta * (m1 * pz - m2 * py)
        hy += beta * (m2 * px - m0 * pz)
        hz += beta * (m0 * py - m1 * px)
    return hx, hy, hz


@nb.njit(cache=True)
def heun_block(m, noise, has_noise, hx0, hy0, hz0, kx, ky, kz, beta, px, py, pz, g, ga, dt,
               n_steps, step0, t_start, target, threshold, above, since, rec_every, rec, rec_base, norm_err):
    """Advance every row of ``m`` (n, 3) by ``n_steps`` steps in place.

    ``noise`` is (n, n_steps, 3) when ``has_noise``.  ``rec`` receives the
    state at global steps that are multiples of ``rec_every``; slot index is
    ``step // rec_every - rec_base``.
    """
    n = m.shape[0]
    half = 0.5 * dt
    for i in range(n):
        a0 = m[i, 0]
        a1 = m[i, 1]
        a2 = m[i, 2]
        hxi = hx0[i]
        g0 = target[i, 0]
        g1 = target[i, 1]
        g2 = target[i, 2]
        ab = above[i]
        sn = since[i]
        err = norm_err[i]
        for s in range(n_steps):
            if has_noise:
                w0 = noise[i, s, 0]
                w1 = noise[i, s, 1]
                w2 = noise[i, s, 2]
            else:
                w0 = 0.0
                w1 = 0.0
                w2 = 0.0
            hx, hy, hz = _field(a0, a1, a2, kx, ky, kz, hxi, hy0, hz0, w0, w1, w2, beta, px, py, pz)
            k0, k1, k2 = _torque(a0, a1, a2, hx, hy, hz, g, ga)
            p0 = a0 + dt * k0
            p1 = a1 + dt * k1
            p2 = a2 + dt * k2
            hx, hy, hz = _field(p0, p1, p2, kx, ky, kz, hxi, hy0, hz0, w0, w1, w2, beta, px, py, pz)
            q0, q1, q2 = _torque(p0, p1, p2, hx, hy, hz, g, ga)
            b0 = a0 + half * (k0 + q0)
            b1 = a1 + half * (k1 + q1)
            b2 = a2 + half * (k2 + q2)
            inv = 1.0 / math.sqrt(b0 * b0 + b1 * b1 + b2 * b2)
            a0 = b0 * inv
            a1 = b1 * inv
            a2 = b2 * inv
            e = abs(math.sqrt(a0 * a0 + a1 * a1 + a2 * a2) - 1.0)
            if e > err:
                err = e
            step = step0 + s + 1
            now = a0 * g0 + a1 * g1 + a2 * g2 >= threshold
            if now:
                if not ab:
                    sn = t_start + step * dt
            else:
                sn = np.nan
            ab = now
            if rec_every > 0 and step % rec_every == 0:
                j = step // rec_every - rec_base
                rec[j, i, 0] = a0
                rec[j, i, 1] = a1
                rec[j, i, 2] = a2
        m[i, 0] = a0
        m[i, 1] = a1
        m[i, 2] = a2
        above[i] = ab
        since[i] = sn
        norm_err[i] = err
