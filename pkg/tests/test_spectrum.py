import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sleeping_top.model import TopParameters
from sleeping_top.spectrum import (SpectrumClass, characteristic_polynomial,
                                   characteristic_polynomial_ef,
                                   charpoly_coefficients, classify_spectrum,
                                   eigenvalues_closed_form, eigenvalues_numeric,
                                   linearization, linearization_from_hessian,
                                   multiset_distance, sort_eigenvalues,
                                   sp_defect, spectrum_report,
                                   transition_invariants)
from sleeping_top.symplectic_slice import s1_matrix

from conftest import random_samples

PHI = (1 + math.sqrt(5)) / 2


def test_linearization_examples(oblate):
    L = linearization(oblate, 0.0, 0.0)
    assert np.array_equal(L, [[0, 0, -1, 0], [0, 0, 0, -1], [-1, 0, 0, 0], [0, -1, 0, 0]])
    L = linearization(oblate, 2.0, 0.5)
    assert np.array_equal(L, [[0, 1.5, -1, 0], [-1.5, 0, 0, -1], [-1, 0, 0, -1.5], [0, -1, 1.5, 0]])


def test_linearization_is_form_inverse_times_hessian():
    for p, lam, eta in random_samples(200, seed=10):
        L = linearization(p, lam, eta)
        ref = linearization_from_hessian(p, lam, eta)
        assert np.max(np.abs(L - ref)) <= 1e-13 * max(1.0, np.max(np.abs(L)))
        assert sp_defect(p, lam, eta) <= 1e-12 * max(1.0, np.max(np.abs(L)))


def test_charpoly_examples(oblate):
    assert characteristic_polynomial(oblate, 2.0, 0.5) == (2.5, 1.5625)
    assert characteristic_polynomial_ef(oblate, 2.0, 0.5) == (2.5, 1.5625)
    assert characteristic_polynomial(oblate, 0.0, 0.0) == (-2.0, 1.0)


def test_charpoly_forms_agree():
    for p, lam, eta in random_samples(10_000, seed=11):
        a = characteristic_polynomial(p, lam, eta)
        b = characteristic_polynomial_ef(p, lam, eta)
        inv = transition_invariants(p, lam, eta)
        size = (inv.E**2 + abs(inv.F)) / (2 * p.I1**2)
        assert abs(a[0] - b[0]) <= 1e-12 * size
        assert abs(a[1] - b[1]) <= 1e-12 * size * size


def test_charpoly_from_matrix_matches_formula():
    for p, lam, eta in random_samples(200, seed=12):
        (c1, c2, c3, c4), _ = charpoly_coefficients(linearization(p, lam, eta))
        p2, p0 = characteristic_polynomial(p, lam, eta)
        assert c1 == 0 and abs(c3) <= 1e-12 * (1 + abs(p2)) ** 1.5
        assert c2 == pytest.approx(p2, rel=1e-12, abs=1e-12)
        assert c4 == pytest.approx(p0, rel=1e-10, abs=1e-12)


def test_closed_form_examples(oblate):
    vals = eigenvalues_closed_form(oblate, 0.0, 0.0)
    assert vals == (1, 1, -1, -1)
    vals = eigenvalues_closed_form(oblate, 2.0, 0.5)
    h = math.sqrt(5) / 2
    assert multiset_distance(vals, [h * 1j, h * 1j, -h * 1j, -h * 1j]) <= 1e-15
    vals = eigenvalues_closed_form(oblate, 2.0, PHI)
    assert multiset_distance(vals, [math.sqrt(5) * 1j, 0, 0, -math.sqrt(5) * 1j]) <= 1e-14


def test_numeric_examples(oblate):
    assert multiset_distance(eigenvalues_numeric(linearization(oblate, 0.0, 0.0)), [1, 1, -1, -1]) <= 1e-15
    h = 1.118033988749895
    vals = eigenvalues_numeric(linearization(oblate, 2.0, 0.5))
    assert multiset_distance(vals, [h * 1j, h * 1j, -h * 1j, -h * 1j]) <= 1e-15


def test_numeric_matches_closed_form_and_vieta():
    for p, lam, eta in random_samples(2000, seed=13):
        closed = eigenvalues_closed_form(p, lam, eta)
        num = eigenvalues_numeric(linearization(p, lam, eta))
        assert multiset_distance(closed, num) <= 1e-10
        p2, p0 = characteristic_polynomial(p, lam, eta)
        z = np.array(closed)
        assert complex(-0.5 * np.sum(z * z)) == pytest.approx(p2, rel=1e-9, abs=1e-12)
        assert complex(np.prod(z)) == pytest.approx(p0, rel=1e-9, abs=1e-12)


@settings(max_examples=200)
@given(st.floats(0.1, 5), st.floats(0.1, 5), st.floats(0.55, 1.95), st.floats(-5, 5), st.floats(-5, 5))
def test_spectrum_is_hamiltonian_symmetric(mgl, I1, ratio, lam, eta):
    p = TopParameters(mgl, 1.0, 1.0, I1, ratio * I1)
    vals = eigenvalues_closed_form(p, lam, eta)
    assert multiset_distance(vals, [-v for v in vals]) <= 1e-10
    assert multiset_distance(vals, [v.conjugate() for v in vals]) <= 1e-10


def test_sorted_order_is_stable(oblate):
    vals = eigenvalues_closed_form(oblate, 1.0, 0.2)
    assert sort_eigenvalues(reversed(vals)) == vals
    assert all(math.copysign(1, v.real) > 0 for v in sort_eigenvalues([-0.0 + 0j]))


def test_linearization_is_equivariant():
    for p, lam, eta in random_samples(50, seed=14):
        L = linearization(p, lam, eta)
        R = s1_matrix(lam + eta)
        assert np.max(np.abs(L @ R - R @ L)) <= 1e-12 * max(1.0, np.max(np.abs(L)))


@pytest.mark.parametrize("lam,eta,cls", [
    (0.0, 0.0, SpectrumClass.REAL_DOUBLE_PAIR),
    (1.0, 0.0, SpectrumClass.COMPLEX_QUADRUPLE),
    (2.0, 0.5, SpectrumClass.IMAGINARY_DOUBLE_PAIRS),
    (2.0, 1.6180339887498949, SpectrumClass.IMAGINARY_PAIR_PLUS_DOUBLE_ZERO),
    (2.0, 1.0, SpectrumClass.IMAGINARY_DISTINCT),
    (4 / 3, 0.0, SpectrumClass.IMAGINARY_DOUBLE_PAIRS),
])
def test_classification_examples(oblate, lam, eta, cls):
    assert classify_spectrum(oblate, lam, eta, 1e-9) is cls


def test_hopf_boundary_is_flagged(oblate):
    r = spectrum_report(oblate, 4 / 3, 0.0)
    assert r.boundary and r.cls is SpectrumClass.IMAGINARY_DOUBLE_PAIRS
    assert not spectrum_report(oblate, 2.0, 0.5).boundary
    # on the Hopf locus with E = 0 all four eigenvalues vanish
    assert classify_spectrum(oblate, 4 / 3, 1 / 3, 1e-9) is SpectrumClass.QUADRUPLE_ZERO


def test_classification_rejects_bad_tolerance(oblate):
    with pytest.raises(ValueError):
        classify_spectrum(oblate, 1.0, 0.0, 0.0)


def test_exact_fallback_rescues_cancellation():
    # nearly coincident double pair: the discriminant cancels badly in floats
    p = TopParameters(1.0, 1.0, 1.0, 1.0, 1.5)
    lam = 4 / 3 + 1e-7
    eta = 0.3
    closed = eigenvalues_closed_form(p, lam, eta)
    num = eigenvalues_numeric(linearization(p, lam, eta))
    assert multiset_distance(closed, num) <= 1e-10
