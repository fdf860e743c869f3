"""Small rotation-algebra helpers shared across the package."""

import numpy as np


def hat(w):
    """Skew matrix of w, satisfying hat(w) @ v == cross(w, v)."""
    w = np.asarray(w, dtype=float)
    return np.array([
        [0.0, -w[2], w[1]],
        [w[2], 0.0, -w[0]],
        [-w[1], w[0], 0.0],
    ])


def rotation_about_axis(axis, angle):
    """Rodrigues rotation by ``angle`` (right-handed) about ``axis``."""
    a = np.asarray(axis, dtype=float)
    n = np.linalg.norm(a)
    if n == 0.0:
        raise ValueError("rotation axis must be nonzero")
    a = a / n
    c, s = np.cos(angle), np.sin(angle)
    return c * np.eye(3) + s * hat(a) + (1.0 - c) * np.outer(a, a)


def orthogonality_residual(R):
    """Frobenius norm of R^T R - 1."""
    R = np.asarray(R, dtype=float)
    return float(np.linalg.norm(R.T @ R - np.eye(3)))


def random_rotation(rng):
    """Uniform-ish random rotation from a QR factorization (test helper)."""
    Q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    if np.linalg.det(Q) < 0:
        Q[:, 0] = -Q[:, 0]
    return Q
