"""Heavy symmetric top on SO(3) x R^3 in the right trivialization.

A phase point is ``(Lambda, pi)`` with ``Lambda`` the attitude and ``pi`` the
spatial angular momentum.  Tangent vectors are pairs ``(dtheta, dpi)`` with
``dLambda = hat(dtheta) @ Lambda``.

The symmetry group is the torus T^2: rotations about the vertical e3 acting
on the left, and spins about the body axis e3 acting on the right.  Its Lie
algebra splits into the isotropy direction (1, 1) of a sleeping point and a
complement (1, -1); a relative-equilibrium velocity ``(xi_L, xi_R)`` is
therefore carried around as ``(lam, eta)`` with

    xi_L = lam / 2 + eta,    xi_R = -lam / 2 + eta.

``lam`` is the spin rate (positive means counterclockwise about +e3) and
``eta`` the free isotropy coordinate.
"""

from dataclasses import dataclass

import numpy as np

from .rotation import exp_so3, hat, is_rotation

E3 = np.array([0.0, 0.0, 1.0])


class InvalidParameters(ValueError):
    pass


def _frozen_vec(x, n):
    a = np.array(x, dtype=float).reshape(n)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class TopParameters:
    """Physical constants of an axisymmetric top with inertia diag(I1, I1, I3)."""

    m: float
    g: float
    l: float
    I1: float
    I3: float

    def __post_init__(self):
        for name in ("m", "g", "l", "I1", "I3"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise InvalidParameters(f"{name} must be finite and > 0, got {value!r}")
        # axisymmetric form of the triangle inequality I_i < I_j + I_k
        if not self.I3 < 2.0 * self.I1:
            raise InvalidParameters(
                f"inertia triangle inequality violated: need I3 < 2*I1, "
                f"got I3={self.I3!r}, I1={self.I1!r}")

    @property
    def mgl(self):
        return self.m * self.g * self.l

    @property
    def inertia(self):
        return np.diag([self.I1, self.I1, self.I3])

    @property
    def inertia_inv(self):
        return np.diag([1.0 / self.I1, 1.0 / self.I1, 1.0 / self.I3])

    @property
    def is_oblate(self):
        return self.I3 > self.I1

    def as_dict(self):
        return {"m": self.m, "g": self.g, "l": self.l, "I1": self.I1, "I3": self.I3}


@dataclass(frozen=True)
class PhasePoint:
    Lambda: np.ndarray
    pi: np.ndarray

    def __post_init__(self):
        Lam = np.array(self.Lambda, dtype=float).reshape(3, 3)
        if not is_rotation(Lam, 1e-10):
            raise ValueError("Lambda is not a rotation matrix (tol 1e-10)")
        Lam.setflags(write=False)
        object.__setattr__(self, "Lambda", Lam)
        object.__setattr__(self, "pi", _frozen_vec(self.pi, 3))


@dataclass(frozen=True)
class TangentVector:
    dtheta: np.ndarray
    dpi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "dtheta", _frozen_vec(self.dtheta, 3))
        object.__setattr__(self, "dpi", _frozen_vec(self.dpi, 3))

    def as_array(self):
        return np.concatenate([self.dtheta, self.dpi])

    @classmethod
    def from_array(cls, v):
        v = np.asarray(v, dtype=float)
        return cls(v[:3], v[3:])


@dataclass(frozen=True)
class VelocityPair:
    xi_l: float
    xi_r: float


@dataclass(frozen=True)
class VelocityDecomposition:
    lam: float
    eta: float


@dataclass(frozen=True)
class MomentumValue:
    j1: float
    j2: float


def velocity_decompose(xi):
    return VelocityDecomposition(xi.xi_l - xi.xi_r, 0.5 * (xi.xi_l + xi.xi_r))


def velocity_compose(d):
    return VelocityPair(0.5 * d.lam + d.eta, -0.5 * d.lam + d.eta)


def angular_velocity(p, z):
    """Spatial angular velocity ``Lambda I^-1 Lambda^T pi``."""
    Lam = z.Lambda
    return Lam @ (p.inertia_inv @ (Lam.T @ z.pi))


def hamiltonian(p, z):
    kinetic = 0.5 * z.pi @ angular_velocity(p, z)
    return float(p.mgl * (E3 @ z.Lambda @ E3) + kinetic)


def momentum_map(z):
    return MomentumValue(float(z.pi @ E3), float(-(z.pi @ (z.Lambda @ E3))))


def momentum_map_derivative(z, v):
    """``T_z J`` applied to a tangent vector, returned as a length-2 array."""
    axis = z.Lambda @ E3
    return np.array([
        v.dpi @ E3,
        -(v.dpi @ axis) - z.pi @ np.cross(v.dtheta, axis),
    ])


def symplectic_form(z, v1, v2):
    return float(v2.dpi @ v1.dtheta - v1.dpi @ v2.dtheta
                 - z.pi @ np.cross(v1.dtheta, v2.dtheta))


def augmented_hamiltonian(p, z, xi):
    return float(hamiltonian(p, z) - (z.pi @ E3) * xi.xi_l
                 + (z.pi @ (z.Lambda @ E3)) * xi.xi_r)


def d_augmented(p, z, xi, v):
    """Derivative of the augmented Hamiltonian at ``z`` along ``v``."""
    axis = z.Lambda @ E3
    w = angular_velocity(p, z)
    dth, dpi = v.dtheta, v.dpi
    return float(p.mgl * (E3 @ np.cross(dth, axis))
                 + dpi @ w
                 + z.pi @ np.cross(dth, w)
                 - xi.xi_l * (dpi @ E3)
                 + xi.xi_r * (dpi @ axis)
                 + xi.xi_r * (z.pi @ np.cross(dth, axis)))


def d_hamiltonian(p, z, v):
    return d_augmented(p, z, VelocityPair(0.0, 0.0), v)


def hamiltonian_vector_field(p, z):
    """Solve ``omega(z)(X, v) = dh(z) v`` for ``X``.

    Returns ``(w, mgl e3 x Lambda e3)`` where ``w`` is the spatial angular
    velocity, so ``dLambda/dt = hat(w) Lambda`` and ``dpi/dt`` is the
    gravitational torque about the pivot.
    """
    torque = p.mgl * np.cross(E3, z.Lambda @ E3)
    return TangentVector(angular_velocity(p, z), torque)


def sleeping_point(p, lam):
    return PhasePoint(np.eye(3), lam * p.I3 * E3)


def torus_action(theta1, theta2, z):
    """Act by ``(theta1, theta2)``: vertical rotation on the left, body spin on the right."""
    left = exp_so3(theta1 * E3)
    right = exp_so3(-theta2 * E3)
    return PhasePoint(left @ z.Lambda @ right, left @ z.pi)


def displace(z, v, eps):
    """Point ``(exp(eps dtheta) Lambda, pi + eps dpi)`` along a right-trivialized curve."""
    return PhasePoint(exp_so3(eps * v.dtheta) @ z.Lambda, z.pi + eps * v.dpi)


def tilted_sleeping_point(p, lam, tilt):
    """Sleeping point with the body axis tipped by ``tilt`` radians about e1."""
    return PhasePoint(exp_so3((tilt, 0.0, 0.0)), lam * p.I3 * E3)


def tilt_angle(Lambda):
    """Angle between the body symmetry axis ``Lambda e3`` and the vertical."""
    axis = np.asarray(Lambda)[..., :, 2]
    horiz = np.hypot(axis[..., 0], axis[..., 1])
    return np.arctan2(horiz, axis[..., 2])


__all__ = [
    "E3", "InvalidParameters", "TopParameters", "PhasePoint", "TangentVector",
    "VelocityPair", "VelocityDecomposition", "MomentumValue",
    "velocity_decompose", "velocity_compose", "angular_velocity", "hamiltonian",
    "momentum_map", "momentum_map_derivative", "symplectic_form",
    "augmented_hamiltonian", "d_augmented", "d_hamiltonian",
    "hamiltonian_vector_field", "sleeping_point", "torus_action", "displace",
    "tilted_sleeping_point", "tilt_angle",
]
