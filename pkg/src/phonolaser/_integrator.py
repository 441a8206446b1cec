"""Embedded Dormand-Prince 5(4) stepper for the three coupled complex
mode equations, compiled with numba.

The right-hand side is hard-coded rather than passed as a callable so
the whole time loop stays inside one compiled function; a trajectory of
~10^5-10^6 steps costs tens of milliseconds.
"""

import numpy as np
from numba import njit

STATUS_OK = 0
STATUS_UNDERFLOW = 1
STATUS_NONFINITE = 2
STATUS_MAXSTEPS = 3

# Dormand-Prince 5(4) tableau
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = (19372.0 / 6561.0, -25360.0 / 2187.0,
                          64448.0 / 6561.0, -212.0 / 729.0)
_A61, _A62, _A63, _A64, _A65 = (9017.0 / 3168.0, -355.0 / 33.0,
                                46732.0 / 5247.0, 49.0 / 176.0,
                                -5103.0 / 18656.0)
_B1, _B3, _B4, _B5, _B6 = (35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0,
                           -2187.0 / 6784.0, 11.0 / 84.0)
_E1, _E3, _E4, _E5, _E6, _E7 = (71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0,
                                -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)


@njit(cache=True)
def _rhs(y, dl, ds, g1, g2, jc, g, wm, gm, eps):
    a1, a2, b = y[0], y[1], y[2]
    out = np.empty(3, np.complex128)
    out[0] = (1j * dl - g1) * a1 + 1j * g * (b + np.conj(b)) * a1 - 1j * jc * a2 + eps
    out[1] = (1j * (dl + ds) - g2) * a2 - 1j * jc * a1
    out[2] = -(1j * wm + gm) * b + 1j * g * (a1.real * a1.real + a1.imag * a1.imag)
    return out


@njit(cache=True)
def integrate_modes(y0, t0, t1, rtol, atol, dl, ds, g1, g2, jc, g, wm, gm, eps,
                    sample_dt, max_steps):
    """Adaptive DP54 run. Records the state at the first accepted step on
    or after each sample instant (exact step times are stored, no
    interpolation).

    Returns (times, states, n_accepted, n_rejected, max_err, status, t_reached).
    """
    cap = int((t1 - t0) / sample_dt) + 16
    ts = np.empty(cap)
    ys = np.empty((cap, 3), np.complex128)
    t = t0
    y = y0.copy()
    k = 0
    ts[k] = t
    ys[k] = y
    k += 1
    next_sample = t0 + sample_dt
    h = sample_dt / 8.0
    n_acc = 0
    n_rej = 0
    max_err = 0.0
    status = STATUS_MAXSTEPS
    k1 = _rhs(y, dl, ds, g1, g2, jc, g, wm, gm, eps)
    for _ in range(max_steps):
        if t >= t1:
            status = STATUS_OK
            break
        if h > t1 - t:
            h = t1 - t
        k2 = _rhs(y + h * (_A21 * k1), dl, ds, g1, g2, jc, g, wm, gm, eps)
        k3 = _rhs(y + h * (_A31 * k1 + _A32 * k2), dl, ds, g1, g2, jc, g, wm, gm, eps)
        k4 = _rhs(y + h * (_A41 * k1 + _A42 * k2 + _A43 * k3),
                  dl, ds, g1, g2, jc, g, wm, gm, eps)
        k5 = _rhs(y + h * (_A51 * k1 + _A52 * k2 + _A53 * k3 + _A54 * k4),
                  dl, ds, g1, g2, jc, g, wm, gm, eps)
        k6 = _rhs(y + h * (_A61 * k1 + _A62 * k2 + _A63 * k3 + _A64 * k4 + _A65 * k5),
                  dl, ds, g1, g2, jc, g, wm, gm, eps)
        y_new = y + h * (_B1 * k1 + _B3 * k3 + _B4 * k4 + _B5 * k5 + _B6 * k6)
        k7 = _rhs(y_new, dl, ds, g1, g2, jc, g, wm, gm, eps)

        err = 0.0
        for i in range(3):
            e = h * (_E1 * k1[i] + _E3 * k3[i] + _E4 * k4[i]
                     + _E5 * k5[i] + _E6 * k6[i] + _E7 * k7[i])
            sc = atol + rtol * max(abs(y[i]), abs(y_new[i]))
            q = abs(e) / sc
            err += q * q
        err = np.sqrt(err / 3.0)

        if not np.isfinite(err):
            status = STATUS_NONFINITE
            break
        if err <= 1.0:
            t += h
            y = y_new
            k1 = k7
            n_acc += 1
            if err > max_err:
                max_err = err
            if t >= next_sample and k < cap:
                ts[k] = t
                ys[k] = y
                k += 1
                next_sample += sample_dt * (1.0 + np.floor((t - next_sample) / sample_dt))
            if err > 0.0:
                h *= min(5.0, max(0.2, 0.9 * err ** -0.2))
            else:
                h *= 5.0
        else:
            n_rej += 1
            h *= max(0.1, 0.9 * err ** -0.2)
        if h < 1e-18 * (t1 - t0):
            status = STATUS_UNDERFLOW
            break

    if status == STATUS_OK and ts[k - 1] < t and k < cap:
        ts[k] = t
        ys[k] = y
        k += 1
    return ts[:k], ys[:k], n_acc, n_rej, max_err, status, t
