"""Linearization on the symplectic slice and its spectrum.

The linearization ``L = Omega_N^-1 d^2h|_N`` has the S^1-equivariant
Hamiltonian pattern, so its characteristic polynomial is the biquadratic

    t^4 + p2 t^2 + p0,   p2 = 2(AC - B^2) + (2B - C I3 lam)^2,   p0 = (AC - B^2)^2,

and its eigenvalues are ``(i / 2 I1)(+-E +- sqrt F)`` with

    E = I3 lam - I1 (2 eta + lam),    F = I3^2 lam^2 - 4 m g l I1.

``L`` is written with the sign convention ``L = Omega_N^-1 H``; the physical
flow generated by the phase-space vector field is ``-L``.  Only the spectrum
is used downstream and it is symmetric under ``t -> -t``.
"""

import cmath
import enum
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .symplectic_slice import hessian_coefficients, slice_hessian, slice_symplectic

DEFAULT_TOL = 1e-9

# Float coefficients are trusted while |value| >= bound / CANCELLATION_GUARD,
# where bound is the sum of magnitudes of the expanded terms.
CANCELLATION_GUARD = 1e6


class IllConditioned(ArithmeticError):
    pass


class SpectrumClass(enum.Enum):
    REAL_DOUBLE_PAIR = "RealDoublePair"
    COMPLEX_QUADRUPLE = "ComplexQuadruple"
    IMAGINARY_DISTINCT = "ImaginaryDistinct"
    IMAGINARY_DOUBLE_PAIRS = "ImaginaryDoublePairs"
    IMAGINARY_PAIR_PLUS_DOUBLE_ZERO = "ImaginaryPairPlusDoubleZero"
    QUADRUPLE_ZERO = "QuadrupleZero"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class TransitionInvariants:
    E: float
    F: float


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: tuple
    invariants: TransitionInvariants
    cls: SpectrumClass
    boundary: bool = False


def transition_invariants(p, lam, eta):
    E = p.I3 * lam - p.I1 * (2.0 * eta + lam)
    F = p.I3 * p.I3 * lam * lam - 4.0 * p.mgl * p.I1
    return TransitionInvariants(E, F)


def invariant_scale(p, lam):
    """Natural size of ``F`` (and of ``E^2``) used for relative tolerances."""
    return p.I3 * p.I3 * lam * lam + 4.0 * p.mgl * p.I1


def linearization(p, lam, eta):
    c = hessian_coefficients(p, lam, eta)
    A, B, C = c.A, c.B, c.C
    k = lam * p.I3
    D = A - k * B
    G = B - k * C
    return np.array([[0.0, B, -C, 0.0],
                     [-B, 0.0, 0.0, -C],
                     [D, 0.0, 0.0, G],
                     [0.0, D, -G, 0.0]])


def characteristic_polynomial(p, lam, eta):
    """``(p2, p0)`` from the Hessian coefficients."""
    c = hessian_coefficients(p, lam, eta)
    q = c.det2
    s = 2.0 * c.B - c.C * p.I3 * lam
    return 2.0 * q + s * s, q * q


def characteristic_polynomial_ef(p, lam, eta):
    """``(p2, p0)`` written through the invariants ``E`` and ``F``."""
    inv = transition_invariants(p, lam, eta)
    E2 = inv.E * inv.E
    I1sq = p.I1 * p.I1
    return (E2 + inv.F) / (2.0 * I1sq), (E2 - inv.F) ** 2 / (16.0 * I1sq * I1sq)


def sort_eigenvalues(values):
    """Imaginary part descending, ties broken by real part descending."""
    # "+ 0.0" folds negative zeros so serialized output is stable
    vals = (complex(v) for v in values)
    vals = (complex(z.real + 0.0, z.imag + 0.0) for z in vals)
    return tuple(sorted(vals, key=lambda z: (-z.imag, -z.real)))


def eigenvalues_closed_form(p, lam, eta):
    inv = transition_invariants(p, lam, eta)
    E, F = inv.E, inv.F
    two_i1 = 2.0 * p.I1
    if F >= 0.0:
        r = math.sqrt(F)
        vals = [1j * (E + r), 1j * (E - r), 1j * (-E + r), 1j * (-E - r)]
    else:
        # i(+-E +- i sqrt|F|) = -+sqrt|F| +- iE
        r = math.sqrt(-F)
        vals = [complex(-r, E), complex(r, E), complex(-r, -E), complex(r, -E)]
    return sort_eigenvalues(v / two_i1 for v in vals)


def _det(M):
    n = len(M)
    if n == 1:
        return M[0][0]
    if n == 2:
        return M[0][0] * M[1][1] - M[0][1] * M[1][0]
    total = 0
    for j in range(n):
        if M[0][j] == 0:
            continue
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        term = M[0][j] * _det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def _perm(M):
    n = len(M)
    if n == 1:
        return M[0][0]
    return sum(M[0][j] * _perm([row[:j] + row[j + 1:] for row in M[1:]])
               for j in range(n) if M[0][j] != 0)


def _principal_sums(M, k, fn):
    idx = range(len(M))
    return sum(fn([[M[i][j] for j in sub] for i in sub])
               for sub in itertools.combinations(idx, k))


def charpoly_coefficients(L, exact=False):
    """Coefficients ``(c1, c2, c3, c4)`` of ``det(tI - L) = t^4 + c1 t^3 + ...``.

    Built from sums of principal minors.  With ``exact`` the entries are
    converted to ``Fraction`` so the coefficients of the given float matrix
    are computed without rounding.  Also returns per-coefficient magnitude
    bounds (sums of absolute values of the expanded terms).
    """
    rows = [[float(x) for x in row] for row in np.asarray(L, dtype=float)]
    absrows = [[abs(x) for x in row] for row in rows]
    if exact:
        rows = [[Fraction(x) for x in row] for row in rows]
    coeffs, bounds = [], []
    for k in range(1, 5):
        s = _principal_sums(rows, k, _det)
        coeffs.append(s if k % 2 == 0 else -s)
        bounds.append(_principal_sums(absrows, k, _perm))
    return tuple(coeffs), tuple(bounds)


def _biquadratic_roots(p2, p0, disc):
    """Roots of ``t^4 + p2 t^2 + p0`` given the discriminant ``p2^2 - 4 p0``."""
    if disc >= 0.0:
        root = math.sqrt(disc)
        s_big = -0.5 * (p2 + math.copysign(root, p2))
        s_small = p0 / s_big if s_big != 0.0 else 0.0
        squares = (complex(s_big), complex(s_small))
    else:
        im = 0.5 * math.sqrt(-disc)
        squares = (complex(-0.5 * p2, im), complex(-0.5 * p2, -im))
    out = []
    for s in squares:
        r = cmath.sqrt(s)
        out.extend((r, -r))
    return out


def eigenvalues_numeric(L, fallback=True):
    """Eigenvalues of ``L`` from its characteristic polynomial, without ``E``/``F``.

    The polynomial is solved as a biquadratic in ``t^2``.  When the float
    coefficients or the discriminant suffer cancellation beyond
    ``CANCELLATION_GUARD`` the coefficients are recomputed exactly from the
    float entries; with ``fallback=False`` that case raises ``IllConditioned``.
    """
    (c1, c2, c3, c4), (b1, b2, b3, b4) = charpoly_coefficients(L)
    p2, p0 = c2, c4
    disc = p2 * p2 - 4.0 * p0
    disc_bound = p2 * p2 + 4.0 * abs(p0)

    def cancelled(value, bound):
        return bound > 0.0 and abs(value) * CANCELLATION_GUARD < bound

    if cancelled(p2, b2) or cancelled(p0, b4) or cancelled(disc, disc_bound):
        if not fallback:
            raise IllConditioned("characteristic polynomial coefficients lost "
                                 "too many digits to cancellation")
        (_, c2x, _, c4x), _ = charpoly_coefficients(L, exact=True)
        p2, p0 = float(c2x), float(c4x)
        disc = float(c2x * c2x - 4 * c4x)
    return sort_eigenvalues(_biquadratic_roots(p2, p0, disc))


def multiset_distance(a, b):
    """Smallest, over pairings, of the largest gap between paired values."""
    a, b = list(a), list(b)
    if len(a) != len(b):
        raise ValueError("multisets differ in size")
    return min(max(abs(x - y) for x, y in zip(a, perm))
               for perm in itertools.permutations(b))


def _classify(p, lam, inv, tol):
    E, F = inv.E, inv.F
    scale = invariant_scale(p, lam)
    band = tol * scale
    e_small = abs(E) <= tol * math.sqrt(scale)
    if F < -band:
        cls = (SpectrumClass.REAL_DOUBLE_PAIR if e_small
               else SpectrumClass.COMPLEX_QUADRUPLE)
        return cls, False
    if F <= band:
        # collision of imaginary pairs, taken from the stable side
        cls = (SpectrumClass.QUADRUPLE_ZERO if e_small
               else SpectrumClass.IMAGINARY_DOUBLE_PAIRS)
        return cls, True
    if abs(E * E - F) <= band:
        return SpectrumClass.IMAGINARY_PAIR_PLUS_DOUBLE_ZERO, False
    if e_small:
        return SpectrumClass.IMAGINARY_DOUBLE_PAIRS, False
    return SpectrumClass.IMAGINARY_DISTINCT, False


def classify_spectrum(p, lam, eta, tol=DEFAULT_TOL):
    if not tol > 0:
        raise ValueError("tol must be positive")
    return _classify(p, lam, transition_invariants(p, lam, eta), tol)[0]


def spectrum_report(p, lam, eta, tol=DEFAULT_TOL):
    inv = transition_invariants(p, lam, eta)
    cls, boundary = _classify(p, lam, inv, tol)
    return SpectrumReport(eigenvalues_closed_form(p, lam, eta), inv, cls, boundary)


def sp_defect(p, lam, eta):
    """``max |L^T Omega_N + Omega_N L|`` for the slice linearization."""
    L = linearization(p, lam, eta)
    omega, _ = slice_symplectic(p, lam)
    return float(np.max(np.abs(L.T @ omega + omega @ L)))


def linearization_from_hessian(p, lam, eta):
    """``Omega_N^-1 H`` by matrix product, for cross-checking ``linearization``."""
    _, omega_inv = slice_symplectic(p, lam)
    return omega_inv @ slice_hessian(hessian_coefficients(p, lam, eta))
