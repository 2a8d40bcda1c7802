import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sleeping_top.rotation import (NotAntisymmetric, exp_so3, hat, is_rotation,
                                   orthogonality_defect, vee)

vec = st.lists(st.floats(-10, 10), min_size=3, max_size=3).map(np.array)


def series_exp(M, terms=30):
    out = np.eye(3)
    term = np.eye(3)
    for k in range(1, terms):
        term = term @ M / k
        out = out + term
    return out


def test_hat_examples():
    assert np.array_equal(hat((0, 0, 0)), np.zeros((3, 3)))
    assert np.array_equal(hat((0, 0, 1)), [[0, -1, 0], [1, 0, 0], [0, 0, 0]])
    assert np.array_equal(hat((1, 2, 3)), [[0, -3, 2], [3, 0, -1], [-2, 1, 0]])


def test_vee_examples():
    assert np.array_equal(vee(np.zeros((3, 3))), [0, 0, 0])
    assert np.array_equal(vee(hat((0, 0, 1))), [0, 0, 1])
    with pytest.raises(NotAntisymmetric):
        vee(np.diag([1.0, 2.0, 3.0]))


@given(vec, vec)
def test_hat_is_cross_product(x, y):
    assert np.allclose(hat(x) @ y, np.cross(x, y), rtol=0, atol=1e-15 * (1 + np.abs(x).max() * np.abs(y).max()))


@given(vec)
def test_vee_inverts_hat(x):
    assert np.array_equal(vee(hat(x)), x)


def test_exp_examples():
    assert np.array_equal(exp_so3((0, 0, 0)), np.eye(3))
    R = exp_so3((0, 0, math.pi / 2))
    assert np.allclose(R @ [1, 0, 0], [0, 1, 0], atol=1e-15)
    x = np.array([0.1, 0.2, 0.3])
    R = exp_so3(x)
    assert np.max(np.abs(R - series_exp(hat(x)))) < 1e-15
    assert np.max(np.abs(R.T @ R - np.eye(3))) < 1e-14
    assert abs(np.linalg.det(R) - 1) < 1e-14


@pytest.mark.parametrize("theta", [1e-12, 1e-9, 2e-8, 1e-6, 1e-3, 0.5, 3.0])
def test_exp_matches_series_across_small_angle_switch(theta):
    x = theta * np.array([0.6, -0.8, 0.0])
    ref = series_exp(hat(x))
    assert np.max(np.abs(exp_so3(x) - ref)) < 4e-16 * max(1.0, theta)


def test_is_rotation_examples():
    assert is_rotation(np.eye(3), 1e-12)
    assert not is_rotation(np.diag([1.0, 1.0, -1.0]), 1e-12)
    assert is_rotation(exp_so3((0.3, -0.1, 0.7)), 1e-12)


@settings(max_examples=200)
@given(vec)
def test_exp_lands_in_so3(x):
    R = exp_so3(x)
    assert orthogonality_defect(R) <= 1e-13
    assert abs(np.linalg.det(R) - 1) <= 1e-13


@given(vec, st.floats(-2, 2), st.floats(-2, 2))
def test_exp_one_parameter_subgroup(x, a, b):
    lhs = exp_so3(a * x) @ exp_so3(b * x)
    assert np.max(np.abs(lhs - exp_so3((a + b) * x))) <= 1e-12
