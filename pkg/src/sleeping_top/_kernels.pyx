# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled stepping loops for the Lie-group integrators.

Attitudes are row-major 3x3 blocks ``R[3*i + j]``.  The physics matches
``model.hamiltonian_vector_field``: ``w = R I^-1 R^T pi``, ``dpi/dt = mgl e3 x R e3``.
"""

from libc.math cimport sqrt, sin, cos, isfinite, fabs

DEF SMALL_ANGLE = 1e-8
DEF MID_TOL = 1e-15
DEF MID_ACCEPT = 1e-10
DEF MID_MAXITER = 50

BACKEND = "cython"


cdef inline void vfield(const double* R, const double* p, double mgl,
                        double ai1, double ai3, double* w, double* tau) nogil:
    cdef double b0, b1, b2
    # body momentum R^T p, scaled by I^-1
    b0 = (R[0] * p[0] + R[3] * p[1] + R[6] * p[2]) * ai1
    b1 = (R[1] * p[0] + R[4] * p[1] + R[7] * p[2]) * ai1
    b2 = (R[2] * p[0] + R[5] * p[1] + R[8] * p[2]) * ai3
    w[0] = R[0] * b0 + R[1] * b1 + R[2] * b2
    w[1] = R[3] * b0 + R[4] * b1 + R[5] * b2
    w[2] = R[6] * b0 + R[7] * b1 + R[8] * b2
    # e3 x (R e3), R e3 = (R[2], R[5], R[8])
    tau[0] = -mgl * R[5]
    tau[1] = mgl * R[2]
    tau[2] = 0.0


cdef inline void expmul(const double* x, const double* R0, double* R) nogil:
    """R = exp(hat(x)) @ R0."""
    cdef double th2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2]
    cdef double th = sqrt(th2)
    cdef double a, b, half, s
    cdef double E[9]
    cdef int i, j
    if th < SMALL_ANGLE:
        a = 1.0 - th2 / 6.0
        b = 0.5 - th2 / 24.0
    else:
        half = 0.5 * th
        s = sin(half) / half
        a = sin(th) / th
        b = 0.5 * s * s
    # I + a K + b K^2 with K^2 = x x^T - |x|^2 I
    E[0] = 1.0 + b * (x[0] * x[0] - th2)
    E[1] = -a * x[2] + b * x[0] * x[1]
    E[2] = a * x[1] + b * x[0] * x[2]
    E[3] = a * x[2] + b * x[1] * x[0]
    E[4] = 1.0 + b * (x[1] * x[1] - th2)
    E[5] = -a * x[0] + b * x[1] * x[2]
    E[6] = -a * x[1] + b * x[2] * x[0]
    E[7] = a * x[0] + b * x[2] * x[1]
    E[8] = 1.0 + b * (x[2] * x[2] - th2)
    for i in range(3):
        for j in range(3):
            R[3 * i + j] = (E[3 * i] * R0[j] + E[3 * i + 1] * R0[3 + j]
                            + E[3 * i + 2] * R0[6 + j])


cdef inline void cross(const double* a, const double* b, double* c) nogil:
    c[0] = a[1] * b[2] - a[2] * b[1]
    c[1] = a[2] * b[0] - a[0] * b[2]
    c[2] = a[0] * b[1] - a[1] * b[0]


cdef inline void dexpinv(const double* u, const double* a, double* out) nogil:
    """a - [u, a]/2 + [u, [u, a]]/12, enough for fourth order."""
    cdef double c1[3]
    cdef double c2[3]
    cross(u, a, c1)
    cross(u, c1, c2)
    out[0] = a[0] - 0.5 * c1[0] + c2[0] / 12.0
    out[1] = a[1] - 0.5 * c1[1] + c2[1] / 12.0
    out[2] = a[2] - 0.5 * c1[2] + c2[2] / 12.0


cdef inline int rk4_step(double* R, double* p, double mgl, double ai1,
                         double ai3, double h) nogil:
    cdef double kw[4][3]
    cdef double kp[4][3]
    cdef double uw[3]
    cdef double up[3]
    cdef double Rs[9]
    cdef double ps[3]
    cdef double w[3]
    cdef double tau[3]
    cdef double d[3]
    cdef double frac
    cdef int s, i
    vfield(R, p, mgl, ai1, ai3, w, tau)
    for i in range(3):
        kw[0][i] = h * w[i]
        kp[0][i] = h * tau[i]
    for s in range(1, 4):
        frac = 1.0 if s == 3 else 0.5
        for i in range(3):
            uw[i] = frac * kw[s - 1][i]
            up[i] = frac * kp[s - 1][i]
            ps[i] = p[i] + up[i]
        expmul(uw, R, Rs)
        vfield(Rs, ps, mgl, ai1, ai3, w, tau)
        dexpinv(uw, w, d)
        for i in range(3):
            kw[s][i] = h * d[i]
            kp[s][i] = h * tau[i]
    for i in range(3):
        uw[i] = (kw[0][i] + 2.0 * kw[1][i] + 2.0 * kw[2][i] + kw[3][i]) / 6.0
        p[i] = p[i] + (kp[0][i] + 2.0 * kp[1][i] + 2.0 * kp[2][i] + kp[3][i]) / 6.0
    expmul(uw, R, Rs)
    for i in range(9):
        R[i] = Rs[i]
    for i in range(9):
        if not isfinite(R[i]):
            return 1
    for i in range(3):
        if not isfinite(p[i]):
            return 1
    return 0


cdef inline int midpoint_step(double* R, double* p, double mgl, double ai1,
                              double ai3, double h) nogil:
    cdef double kw[3]
    cdef double kp[3]
    cdef double hw[3]
    cdef double hp[3]
    cdef double Rs[9]
    cdef double ps[3]
    cdef double w[3]
    cdef double tau[3]
    cdef double diff, size, nw, np_
    cdef int it, i
    vfield(R, p, mgl, ai1, ai3, w, tau)
    for i in range(3):
        kw[i] = h * w[i]
        kp[i] = h * tau[i]
    diff = 1.0
    size = 1.0
    for it in range(MID_MAXITER):
        for i in range(3):
            hw[i] = 0.5 * kw[i]
            ps[i] = p[i] + 0.5 * kp[i]
        expmul(hw, R, Rs)
        vfield(Rs, ps, mgl, ai1, ai3, w, tau)
        diff = 0.0
        size = 1.0
        for i in range(3):
            nw = h * w[i]
            np_ = h * tau[i]
            diff = max(diff, max(fabs(nw - kw[i]), fabs(np_ - kp[i])))
            size = max(size, max(fabs(nw), fabs(np_)))
            kw[i] = nw
            kp[i] = np_
        if not diff <= size * 1e300:
            return 1
        if diff <= MID_TOL * size:
            break
    if not diff <= MID_ACCEPT * size:
        return 1
    expmul(kw, R, Rs)
    for i in range(9):
        R[i] = Rs[i]
    for i in range(3):
        p[i] = p[i] + kp[i]
    for i in range(9):
        if not isfinite(R[i]):
            return 1
    for i in range(3):
        if not isfinite(p[i]):
            return 1
    return 0


def run(int scheme, const double[::1] lam0, const double[::1] pi0, double mgl, double I1,
        double I3, double dt, long nsteps, long every, double[:, ::1] out):
    """Integrate ``nsteps`` steps; write samples into ``out`` rows.

    ``scheme`` is 0 for RKMK4 and 1 for the exponential midpoint rule.  Row 0
    holds the initial state, then every ``every``-th step and the last step.
    Returns -1 on success or the 1-based index of the step that failed.
    """
    cdef double R[9]
    cdef double p[3]
    cdef double ai1 = 1.0 / I1
    cdef double ai3 = 1.0 / I3
    cdef long k, row = 0
    cdef int i, bad
    for i in range(9):
        R[i] = lam0[i]
    for i in range(3):
        p[i] = pi0[i]
    for i in range(9):
        out[0, i] = R[i]
    for i in range(3):
        out[0, 9 + i] = p[i]
    with nogil:
        for k in range(1, nsteps + 1):
            if scheme == 0:
                bad = rk4_step(R, p, mgl, ai1, ai3, dt)
            else:
                bad = midpoint_step(R, p, mgl, ai1, ai3, dt)
            if bad:
                with gil:
                    return k
            if k % every == 0 or k == nsteps:
                row += 1
                for i in range(9):
                    out[row, i] = R[i]
                for i in range(3):
                    out[row, 9 + i] = p[i]
    return -1


def vector_field(const double[::1] lam, const double[::1] pi, double mgl, double I1, double I3):
    """Expose the compiled vector field for cross-checks against the model."""
    cdef double w[3]
    cdef double tau[3]
    cdef double R[9]
    cdef double p[3]
    cdef int i
    for i in range(9):
        R[i] = lam[i]
    for i in range(3):
        p[i] = pi[i]
    vfield(R, p, mgl, 1.0 / I1, 1.0 / I3, w, tau)
    return (w[0], w[1], w[2]), (tau[0], tau[1], tau[2])
