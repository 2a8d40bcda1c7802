"""Symplectic slice at a sleeping equilibrium.

At ``z = (Id, lam I3 e3)`` the slice is ``N = {(dtheta, dpi): dtheta, dpi
perpendicular to e3}`` with the fixed basis

    u1 = (e1, 0), u2 = (e2, 0), u3 = (0, e1), u4 = (0, e2).

Slice vectors are handled as 4-vectors of coordinates in this basis.  The
isotropy circle (the diagonal of T^2) acts on N by rotating both the
``dtheta`` and ``dpi`` parts about e3.
"""

from dataclasses import dataclass

import numpy as np

from .model import (TangentVector, augmented_hamiltonian, displace,
                    sleeping_point, symplectic_form, velocity_compose,
                    VelocityDecomposition)

# Second differences lose ~eps_mach*|h|/step^2 to roundoff, so the step is kept
# large and the O(step^2) truncation removed by one Richardson stage.
FD_STEP = 1e-3


@dataclass(frozen=True)
class SliceBasis:
    u1: TangentVector
    u2: TangentVector
    u3: TangentVector
    u4: TangentVector

    def __iter__(self):
        return iter((self.u1, self.u2, self.u3, self.u4))


@dataclass(frozen=True)
class HessianCoefficients:
    A: float
    B: float
    C: float

    @property
    def det2(self):
        """``AC - B^2``; positive iff the slice Hessian is definite."""
        return self.A * self.C - self.B * self.B


def slice_basis():
    e1, e2, zero = np.eye(3)[0], np.eye(3)[1], np.zeros(3)
    return SliceBasis(TangentVector(e1, zero), TangentVector(e2, zero),
                      TangentVector(zero, e1), TangentVector(zero, e2))


def embed(w):
    """Tangent vector at the sleeping point with slice coordinates ``w``."""
    w1, w2, w3, w4 = w
    return TangentVector((w1, w2, 0.0), (w3, w4, 0.0))


def slice_symplectic(p, lam):
    """Matrix of the slice symplectic form and its inverse.

    Entry ``(i, j)`` is the form evaluated on ``(u_i, u_j)``.
    """
    k = lam * p.I3
    omega = np.array([[0.0, -k, 1.0, 0.0],
                      [k, 0.0, 0.0, 1.0],
                      [-1.0, 0.0, 0.0, 0.0],
                      [0.0, -1.0, 0.0, 0.0]])
    omega_inv = np.array([[0.0, 0.0, -1.0, 0.0],
                          [0.0, 0.0, 0.0, -1.0],
                          [1.0, 0.0, 0.0, -k],
                          [0.0, 1.0, k, 0.0]])
    return omega, omega_inv


def slice_form_value(p, lam, w1, w2):
    w1, w2 = np.asarray(w1, dtype=float), np.asarray(w2, dtype=float)
    th1, pi1 = np.array([w1[0], w1[1], 0.0]), np.array([w1[2], w1[3], 0.0])
    th2, pi2 = np.array([w2[0], w2[1], 0.0]), np.array([w2[2], w2[3], 0.0])
    return float(pi2 @ th1 - pi1 @ th2 - lam * p.I3 * np.cross(th1, th2)[2])


def hessian_coefficients(p, lam, eta):
    """Coefficients of the augmented-Hamiltonian Hessian on N (``xi_R = eta - lam/2``)."""
    I1, I3 = p.I1, p.I3
    A = -p.mgl + lam * lam * I3 / (2.0 * I1) * (2.0 * I3 - I1) - lam * I3 * eta
    B = lam / (2.0 * I1) * (2.0 * I3 - I1) - eta
    return HessianCoefficients(A, B, 1.0 / I1)


def slice_hessian(c):
    A, B, C = c.A, c.B, c.C
    return np.array([[A, 0.0, 0.0, B],
                     [0.0, A, -B, 0.0],
                     [0.0, -B, C, 0.0],
                     [B, 0.0, 0.0, C]])


def hessian_eigenvalues(c):
    """``(sigma_plus, sigma_minus)``, each a double eigenvalue of the slice Hessian."""
    s = c.A + c.C
    root = np.sqrt(s * s - 4.0 * c.det2)
    return 0.5 * (s + root), 0.5 * (s - root)


def finite_difference_hessian(p, lam, eta, eps=FD_STEP, richardson=True):
    """Central-difference Hessian of the augmented Hamiltonian on N.

    Second differences are taken along the curves ``(exp(eps dtheta),
    lam I3 e3 + eps dpi)``.  The sleeping point is critical for the admissible
    velocity, so the second derivative along a curve only depends on its
    tangent and mixed entries follow from polarization.  With ``richardson``
    the steps ``eps`` and ``2 eps`` are combined to cancel the ``eps**2`` term.
    """
    z = sleeping_point(p, lam)
    xi = velocity_compose(VelocityDecomposition(lam, eta))
    h0 = augmented_hamiltonian(p, z, xi)

    def second(w, step):
        v = embed(w)
        fp = augmented_hamiltonian(p, displace(z, v, step), xi)
        fm = augmented_hamiltonian(p, displace(z, v, -step), xi)
        return ((fp - h0) + (fm - h0)) / (step * step)

    def central(step):
        basis = np.eye(4)
        H = np.empty((4, 4))
        for i in range(4):
            H[i, i] = second(basis[i], step)
            for j in range(i):
                H[i, j] = H[j, i] = 0.25 * (second(basis[i] + basis[j], step)
                                            - second(basis[i] - basis[j], step))
        return H

    if not richardson:
        return central(eps)
    return (4.0 * central(eps) - central(2.0 * eps)) / 3.0


def s1_matrix(phi):
    c, s = np.cos(phi), np.sin(phi)
    R = np.array([[c, -s], [s, c]])
    M = np.zeros((4, 4))
    M[:2, :2] = R
    M[2:, 2:] = R
    return M


def slice_s1_action(phi, w):
    return s1_matrix(phi) @ np.asarray(w, dtype=float)


def embedded_form_value(p, lam, w1, w2):
    """Full phase-space symplectic form on the embedded slice vectors."""
    return symplectic_form(sleeping_point(p, lam), embed(w1), embed(w2))
