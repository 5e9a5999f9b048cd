import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fallsynth.kinematics.rotation import (DegenerateRotation, NotARotation,
                                           matrix_to_rot6d, rot6d_to_matrix,
                                           rotation_x, rotation_y, rotation_z,
                                           yaw_matrix)


def random_rotations(rng, n):
    # QR of a Gaussian matrix, sign-fixed to det +1
    q, r = np.linalg.qr(rng.normal(size=(n, 3, 3)))
    q = q * np.sign(np.diagonal(r, axis1=-2, axis2=-1))[:, None, :]
    det = np.linalg.det(q)
    q[det < 0, :, 2] *= -1.0
    return q


def test_identity_round_trip():
    r6 = matrix_to_rot6d(np.eye(3))
    assert np.allclose(r6, [1, 0, 0, 0, 1, 0])
    assert np.allclose(rot6d_to_matrix(r6), np.eye(3))


def test_random_6d_maps_onto_rotation_group(rng):
    r = rng.normal(size=(2000, 6))
    m = rot6d_to_matrix(r)
    gram = np.swapaxes(m, -1, -2) @ m
    assert np.abs(gram - np.eye(3)).max() < 1e-6
    assert np.abs(np.linalg.det(m) - 1.0).max() < 1e-6


def test_matrix_round_trip_exact(rng):
    m = random_rotations(rng, 2000)
    back = rot6d_to_matrix(matrix_to_rot6d(m))
    assert np.abs(back - m).max() < 1e-6


def test_gram_schmidt_ignores_column_scale_and_shear(rng):
    # b1 scaled, b2 with an added multiple of b1: same rotation
    r = rng.normal(size=(100, 6))
    m = rot6d_to_matrix(r)
    skewed = r.copy()
    skewed[:, :3] *= 3.7
    skewed[:, 3:] += 0.9 * r[:, :3]
    assert np.abs(rot6d_to_matrix(skewed) - m).max() < 1e-9


def test_third_column_is_cross_product(rng):
    m = rot6d_to_matrix(rng.normal(size=(50, 6)))
    cross = np.cross(m[..., :, 0], m[..., :, 1])
    assert np.abs(m[..., :, 2] - cross).max() < 1e-12


def test_degenerate_inputs_raise():
    with pytest.raises(DegenerateRotation):
        rot6d_to_matrix(np.zeros(6))
    with pytest.raises(DegenerateRotation):
        rot6d_to_matrix(np.array([1.0, 0, 0, 2.0, 0, 0]))  # collinear columns
    with pytest.raises(DegenerateRotation):
        rot6d_to_matrix(np.array([np.nan, 0, 0, 0, 1, 0]))


def test_non_rotation_matrix_rejected():
    with pytest.raises(NotARotation):
        matrix_to_rot6d(2.0 * np.eye(3))
    reflection = np.diag([1.0, 1.0, -1.0])
    with pytest.raises(NotARotation):
        matrix_to_rot6d(reflection)


def test_axis_rotations_match_trig():
    t = 0.3
    assert np.allclose(rotation_x(t) @ [0, 1, 0], [0, np.cos(t), np.sin(t)])
    assert np.allclose(rotation_y(t) @ [0, 0, 1], [np.sin(t), 0, np.cos(t)])
    assert np.allclose(rotation_z(t) @ [1, 0, 0], [np.cos(t), np.sin(t), 0])
    assert np.allclose(yaw_matrix(t), rotation_y(t))
    # yaw leaves the vertical fixed
    assert np.allclose(yaw_matrix(1.1) @ [0, 1, 0], [0, 1, 0])


def test_axis_rotations_are_stacked_for_array_angles():
    thetas = np.linspace(0, 2 * np.pi, 7)
    for fn in (rotation_x, rotation_y, rotation_z):
        stack = fn(thetas)
        assert stack.shape == (7, 3, 3)
        for i, t in enumerate(thetas):
            assert np.allclose(stack[i], fn(float(t)))


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=6, max_size=6))
def test_any_nondegenerate_6d_yields_valid_rotation(values):
    r = np.asarray(values)
    try:
        m = rot6d_to_matrix(r)
    except DegenerateRotation:
        return
    assert np.abs(m.T @ m - np.eye(3)).max() < 1e-6
    assert abs(np.linalg.det(m) - 1.0) < 1e-6


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_round_trip_property(seed):
    m = random_rotations(np.random.default_rng(seed), 4)
    assert np.abs(rot6d_to_matrix(matrix_to_rot6d(m)) - m).max() < 1e-6
