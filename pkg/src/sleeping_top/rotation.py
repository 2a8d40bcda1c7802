"""SO(3) and so(3) helpers.

All 3x3 matrices are dense ``numpy`` arrays indexed ``M[row, col]``; a
rotation ``R`` acts on column vectors, ``R @ v``.
"""

import numpy as np

# Below this angle Rodrigues' coefficients are replaced by their series.
SMALL_ANGLE = 1e-8


class NotAntisymmetric(ValueError):
    pass


def hat(x):
    """Map a 3-vector to the skew matrix with ``hat(x) @ y == cross(x, y)``."""
    x1, x2, x3 = x
    return np.array([[0.0, -x3, x2],
                     [x3, 0.0, -x1],
                     [-x2, x1, 0.0]])


def vee(M, tol=1e-12):
    M = np.asarray(M, dtype=float)
    if np.max(np.abs(M + M.T)) > tol:
        raise NotAntisymmetric(f"matrix is not antisymmetric within {tol:g}")
    return np.array([M[2, 1], M[0, 2], M[1, 0]])


def rodrigues_coefficients(theta):
    """Return ``(sin t / t, (1 - cos t) / t**2)`` without cancellation."""
    if theta < SMALL_ANGLE:
        return 1.0 - theta * theta / 6.0, 0.5 - theta * theta / 24.0
    half = 0.5 * theta
    s = np.sin(half) / half
    return np.sin(theta) / theta, 0.5 * s * s


def exp_so3(x):
    """Exponential map so(3) -> SO(3) via the Rodrigues formula.

    For ``|x| < SMALL_ANGLE`` the second-order series ``I + K + K^2/2`` is
    used.  ``1 - cos`` is evaluated as ``2 sin^2(t/2)`` everywhere else so
    step-sized angles keep full relative accuracy.
    """
    x = np.asarray(x, dtype=float)
    theta = float(np.sqrt(x @ x))
    K = hat(x)
    a, b = rodrigues_coefficients(theta)
    return np.eye(3) + a * K + b * (K @ K)


def is_rotation(M, tol=1e-12):
    M = np.asarray(M, dtype=float)
    if M.shape != (3, 3) or not np.all(np.isfinite(M)):
        return False
    defect = np.max(np.abs(M.T @ M - np.eye(3)))
    return bool(defect <= tol and np.linalg.det(M) > 0)


def orthogonality_defect(M):
    M = np.asarray(M, dtype=float)
    return float(np.max(np.abs(M.T @ M - np.eye(3))))
