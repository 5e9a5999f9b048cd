"""Rotation algebra for the 6D rotation representation.

A rotation is encoded by the first two columns of its matrix.  Recovery is
Gram-Schmidt on the two columns plus a cross product for the third, which
makes the encoding continuous over SO(3) and tolerant of non-orthonormal
input.

Axis convention (project-wide): right-handed frame, Y is vertical
(gravity is -Y), yaw rotates about Y.
"""
from __future__ import annotations

import numpy as np

DEGENERACY_EPS = 1e-8
ORTHONORMALITY_TOL = 1e-6

IDENTITY_6D = np.array([1.0, 0.0, 0.0, 0.0, 1.0, 0.0])


class DegenerateRotation(ValueError):
    """6D input cannot be orthogonalized (a column norm below DEGENERACY_EPS)."""


class NotARotation(ValueError):
    """Matrix fails the orthonormality / determinant +1 check."""


def rot6d_to_matrix(r: np.ndarray) -> np.ndarray:
    """Convert 6D rotations ``(..., 6)`` to rotation matrices ``(..., 3, 3)``.

    The first three components are the un-normalized first column, the last
    three the un-normalized second column.  Gram-Schmidt imposes
    orthonormality; the third column is the cross product.

    Raises DegenerateRotation when either orthogonalized column has norm
    below DEGENERACY_EPS.
    """
    r = np.asarray(r, dtype=np.float64)
    if r.shape[-1] != 6:
        raise ValueError(f"expected trailing dimension 6, got shape {r.shape}")
    if not np.all(np.isfinite(r)):
        raise DegenerateRotation("non-finite components in 6D rotation")
    a, b = r[..., :3], r[..., 3:]
    na = np.linalg.norm(a, axis=-1, keepdims=True)
    if np.any(na < DEGENERACY_EPS):
        raise DegenerateRotation("first column norm below degeneracy threshold")
    x = a / na
    y = b - np.sum(x * b, axis=-1, keepdims=True) * x
    ny = np.linalg.norm(y, axis=-1, keepdims=True)
    if np.any(ny < DEGENERACY_EPS):
        raise DegenerateRotation("second column collinear with the first")
    y = y / ny
    z = np.cross(x, y)
    return np.stack([x, y, z], axis=-1)


def matrix_to_rot6d(m: np.ndarray) -> np.ndarray:
    """Extract the first two columns of rotation matrices ``(..., 3, 3)``.

    Raises NotARotation unless M^T M = I and det M = +1 within
    ORTHONORMALITY_TOL.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.shape[-2:] != (3, 3):
        raise ValueError(f"expected trailing shape (3, 3), got {m.shape}")
    gram = np.swapaxes(m, -1, -2) @ m
    eye = np.eye(3)
    if np.max(np.abs(gram - eye)) > ORTHONORMALITY_TOL:
        raise NotARotation("matrix columns are not orthonormal")
    if np.max(np.abs(np.linalg.det(m) - 1.0)) > ORTHONORMALITY_TOL:
        raise NotARotation("matrix determinant is not +1")
    return np.concatenate([m[..., :, 0], m[..., :, 1]], axis=-1)


def rotation_x(theta: float | np.ndarray) -> np.ndarray:
    """Rotation about the X axis; theta may be an array (stacked output)."""
    theta = np.asarray(theta, dtype=np.float64)
    c, s = np.cos(theta), np.sin(theta)
    out = np.zeros(theta.shape + (3, 3))
    out[..., 0, 0] = 1.0
    out[..., 1, 1] = c
    out[..., 1, 2] = -s
    out[..., 2, 1] = s
    out[..., 2, 2] = c
    return out


def rotation_y(theta: float | np.ndarray) -> np.ndarray:
    """Rotation about the vertical (yaw)."""
    theta = np.asarray(theta, dtype=np.float64)
    c, s = np.cos(theta), np.sin(theta)
    out = np.zeros(theta.shape + (3, 3))
    out[..., 0, 0] = c
    out[..., 0, 2] = s
    out[..., 1, 1] = 1.0
    out[..., 2, 0] = -s
    out[..., 2, 2] = c
    return out


def rotation_z(theta: float | np.ndarray) -> np.ndarray:
    """Rotation about the Z axis."""
    theta = np.asarray(theta, dtype=np.float64)
    c, s = np.cos(theta), np.sin(theta)
    out = np.zeros(theta.shape + (3, 3))
    out[..., 0, 0] = c
    out[..., 0, 1] = -s
    out[..., 1, 0] = s
    out[..., 1, 1] = c
    out[..., 2, 2] = 1.0
    return out


def yaw_matrix(theta: float) -> np.ndarray:
    """Single yaw rotation matrix (about Y, the project vertical)."""
    return rotation_y(float(theta))
