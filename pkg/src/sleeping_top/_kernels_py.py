"""Pure-Python stepping loops, selected when the compiled kernel is missing.

Same algorithms and calling convention as ``_kernels.pyx`` but built
directly on ``model.hamiltonian_vector_field`` and ``rotation.exp_so3``.
"""

import numpy as np

from .model import PhasePoint, TopParameters, hamiltonian_vector_field
from .rotation import exp_so3

BACKEND = "python"

MID_TOL = 1e-15
MID_ACCEPT = 1e-10
MID_MAXITER = 50


def _field(p, R, pi):
    X = hamiltonian_vector_field(p, PhasePoint(R, pi))
    return X.dtheta, X.dpi


def _dexpinv(u, a):
    c1 = np.cross(u, a)
    return a - 0.5 * c1 + np.cross(u, c1) / 12.0


def _rk4_step(p, R, pi, h):
    w, tau = _field(p, R, pi)
    kw, kp = [h * w], [h * tau]
    for frac in (0.5, 0.5, 1.0):
        uw, up = frac * kw[-1], frac * kp[-1]
        w, tau = _field(p, exp_so3(uw) @ R, pi + up)
        kw.append(h * _dexpinv(uw, w))
        kp.append(h * tau)
    vw = (kw[0] + 2.0 * kw[1] + 2.0 * kw[2] + kw[3]) / 6.0
    vp = (kp[0] + 2.0 * kp[1] + 2.0 * kp[2] + kp[3]) / 6.0
    return exp_so3(vw) @ R, pi + vp


def _midpoint_step(p, R, pi, h):
    w, tau = _field(p, R, pi)
    kw, kp = h * w, h * tau
    diff = size = 1.0
    for _ in range(MID_MAXITER):
        w, tau = _field(p, exp_so3(0.5 * kw) @ R, pi + 0.5 * kp)
        nw, np_ = h * w, h * tau
        diff = max(np.max(np.abs(nw - kw)), np.max(np.abs(np_ - kp)))
        size = max(1.0, np.max(np.abs(nw)), np.max(np.abs(np_)))
        kw, kp = nw, np_
        if diff <= MID_TOL * size:
            break
    if not diff <= MID_ACCEPT * size:
        raise FloatingPointError("midpoint iteration did not converge")
    return exp_so3(kw) @ R, pi + kp


def run(scheme, lam0, pi0, mgl, I1, I3, dt, nsteps, every, out):
    p = TopParameters(mgl, 1.0, 1.0, I1, I3)
    step = _rk4_step if scheme == 0 else _midpoint_step
    R = np.array(lam0, dtype=float).reshape(3, 3)
    pi = np.array(pi0, dtype=float)
    out[0, :9] = R.ravel()
    out[0, 9:] = pi
    row = 0
    for k in range(1, nsteps + 1):
        try:
            with np.errstate(all="raise"):
                R, pi = step(p, R, pi, dt)
        except (FloatingPointError, ValueError):
            return k
        if not (np.all(np.isfinite(R)) and np.all(np.isfinite(pi))):
            return k
        if k % every == 0 or k == nsteps:
            row += 1
            out[row, :9] = R.ravel()
            out[row, 9:] = pi
    return -1


def vector_field(lam, pi, mgl, I1, I3):
    p = TopParameters(mgl, 1.0, 1.0, I1, I3)
    w, tau = _field(p, np.asarray(lam, dtype=float).reshape(3, 3), np.asarray(pi, dtype=float))
    return tuple(w), tuple(tau)
