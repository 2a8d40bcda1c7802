import math

import numpy as np
import pytest

from sleeping_top.model import momentum_map_derivative, sleeping_point
from sleeping_top.symplectic_slice import (embed, embedded_form_value,
                                           finite_difference_hessian,
                                           hessian_coefficients,
                                           hessian_eigenvalues, s1_matrix,
                                           slice_basis, slice_form_value,
                                           slice_hessian, slice_s1_action,
                                           slice_symplectic)
from sleeping_top.transitions import optimal_eta

U = np.eye(4)


def test_basis_is_fixed():
    b = slice_basis()
    e1, e2, zero = np.eye(3)[0], np.eye(3)[1], np.zeros(3)
    expected = [(e1, zero), (e2, zero), (zero, e1), (zero, e2)]
    for u, (th, pi) in zip(b, expected):
        assert np.array_equal(u.dtheta, th) and np.array_equal(u.dpi, pi)


def test_slice_symplectic_examples(oblate):
    omega, inv = slice_symplectic(oblate, 0.0)
    canonical = np.array([[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]])
    assert np.array_equal(omega, canonical)
    omega, _ = slice_symplectic(oblate, 2.0)
    assert omega[0, 1] == -3.0 and omega[1, 0] == 3.0
    rng = np.random.default_rng(0)
    for lam in rng.uniform(-10, 10, 20):
        omega, inv = slice_symplectic(oblate, lam)
        assert np.max(np.abs(omega @ inv - np.eye(4))) <= 1e-14
        assert np.array_equal(omega, -omega.T)
        assert abs(np.linalg.det(omega) - 1) <= 1e-12


def test_slice_form_examples(oblate):
    assert slice_form_value(oblate, 2.0, U[0], U[2]) == 1.0
    assert slice_form_value(oblate, 2.0, U[0], U[1]) == -3.0


def test_slice_form_is_restriction(oblate):
    rng = np.random.default_rng(1)
    for _ in range(100):
        lam = rng.uniform(-3, 3)
        w1, w2 = rng.normal(size=4), rng.normal(size=4)
        omega, _ = slice_symplectic(oblate, lam)
        v = slice_form_value(oblate, lam, w1, w2)
        assert v == pytest.approx(embedded_form_value(oblate, lam, w1, w2), abs=1e-14)
        assert v == pytest.approx(w1 @ omega @ w2, abs=1e-14)


def test_slice_lies_in_kernel_of_momentum_derivative(oblate):
    for lam in (-2.0, 0.0, 0.7, 2.0):
        z = sleeping_point(oblate, lam)
        for u in slice_basis():
            assert np.max(np.abs(momentum_map_derivative(z, u))) <= 1e-14


def test_hessian_coefficient_examples(oblate):
    c = hessian_coefficients(oblate, 2.0, 0.5)
    assert (c.A, c.B, c.C) == (3.5, 1.5, 1.0)
    c = hessian_coefficients(oblate, 0.0, 0.0)
    assert (c.A, c.B, c.C) == (-oblate.mgl, 0.0, 1.0 / oblate.I1)


@pytest.mark.parametrize("lam", [0.0, 0.5, 1.0, 2.0, 3.7])
def test_det2_at_optimal_eta(oblate, prolate, lam):
    for p in (oblate, prolate):
        c = hessian_coefficients(p, lam, optimal_eta(p, lam))
        expected = (lam**2 * p.I3**2 - 4 * p.mgl * p.I1) / (4 * p.I1**2)
        assert c.det2 == pytest.approx(expected, rel=1e-12, abs=1e-14)


def test_slice_hessian_pattern():
    c = hessian_coefficients.__globals__["HessianCoefficients"](3.5, 1.5, 1.0)
    H = slice_hessian(c)
    assert np.array_equal(H, [[3.5, 0, 0, 1.5], [0, 3.5, -1.5, 0], [0, -1.5, 1, 0], [1.5, 0, 0, 1]])
    assert np.array_equal(H, H.T)
    c = type(c)(2.0, 0.0, 0.5)
    assert np.array_equal(slice_hessian(c), np.diag([2.0, 2.0, 0.5, 0.5]))


def test_finite_difference_examples(oblate):
    H = finite_difference_hessian(oblate, 2.0, 0.5)
    assert np.max(np.abs(H - slice_hessian(hessian_coefficients(oblate, 2.0, 0.5)))) <= 1e-6
    H = finite_difference_hessian(oblate, 0.0, 0.0)
    assert np.max(np.abs(H - np.diag([-1.0, -1.0, 1.0, 1.0]))) <= 1e-6
    assert abs(H[0, 1]) <= 1e-6 and abs(H[0, 2]) <= 1e-6


def test_richardson_improves_on_plain_differences(oblate):
    exact = slice_hessian(hessian_coefficients(oblate, 1.3, -0.4))
    plain = np.max(np.abs(finite_difference_hessian(oblate, 1.3, -0.4, richardson=False) - exact))
    extrap = np.max(np.abs(finite_difference_hessian(oblate, 1.3, -0.4) - exact))
    assert extrap < plain / 10


def test_s1_action_examples():
    w = np.array([0.3, -1.2, 0.5, 2.0])
    assert np.allclose(slice_s1_action(0.0, w), w, rtol=0, atol=0)
    assert np.allclose(slice_s1_action(math.pi / 2, U[0]), U[1], atol=1e-16)
    assert np.allclose(slice_s1_action(0.4, slice_s1_action(1.1, w)), slice_s1_action(1.5, w), atol=1e-15)


def test_hessian_and_form_are_equivariant(oblate):
    rng = np.random.default_rng(2)
    for _ in range(20):
        lam, eta, phi = rng.uniform(-3, 3, 3)
        R = s1_matrix(phi)
        H = slice_hessian(hessian_coefficients(oblate, lam, eta))
        omega, _ = slice_symplectic(oblate, lam)
        assert np.max(np.abs(H @ R - R @ H)) <= 1e-12
        assert np.max(np.abs(R.T @ omega @ R - omega)) <= 1e-12


def test_hessian_eigenvalues_match_eigensolve(oblate, prolate):
    rng = np.random.default_rng(3)
    for p in (oblate, prolate):
        for _ in range(30):
            lam, eta = rng.uniform(-3, 3, 2)
            c = hessian_coefficients(p, lam, eta)
            sp, sm = hessian_eigenvalues(c)
            ref = np.linalg.eigvalsh(slice_hessian(c))
            assert np.max(np.abs(np.sort([sm, sm, sp, sp]) - ref)) <= 1e-10
