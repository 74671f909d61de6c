"""Rotation-vector chart on SO(3).

A rotation by angle ``alpha`` about the unit axis ``k`` (counterclockwise
seen from the tip of ``k``) is coordinatized by ``n = k tan(alpha/2)``.
Every finite ``n`` is a valid coordinate; the chart misses the rotations by
exactly ``pi``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ChartBoundaryError, InvalidInputError

# Levi-Civita symbol, eps[i, j, k].
EPS = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    EPS[_i, _j, _k] = 1.0
    EPS[_j, _i, _k] = -1.0

ORTHO_TOL = 1e-9
BOUNDARY_TOL = 1e-9
ZERO_ANGLE = 1e-12
# below this sin(alpha) the axis comes from the symmetric part (alpha near pi)
ANTISYM_SIN_MIN = 1e-4


def hat(v):
    """Skew matrix with ``hat(v) @ x == cross(v, x)``; equals ``-eps_ijk v_k``."""
    x, y, z = v
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def vee(S):
    return np.array([S[2, 1], S[0, 2], S[1, 0]])


def _vec3(v, name="vector"):
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise InvalidInputError(f"{name} must have shape (3,), got {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InvalidInputError(f"{name} has non-finite components")
    return v


def _mat3(M, name="matrix"):
    M = np.asarray(M, dtype=float)
    if M.shape != (3, 3):
        raise InvalidInputError(f"{name} must have shape (3, 3), got {M.shape}")
    if not np.all(np.isfinite(M)):
        raise InvalidInputError(f"{name} has non-finite components")
    return M


@dataclass(frozen=True)
class AxisAngle:
    axis: np.ndarray
    angle: float

    def __post_init__(self):
        axis = _vec3(self.axis, "axis")
        if abs(np.linalg.norm(axis) - 1.0) > 1e-9:
            raise InvalidInputError(f"axis is not a unit vector (|k| = {np.linalg.norm(axis)!r})")
        object.__setattr__(self, "axis", axis)
        object.__setattr__(self, "angle", float(self.angle))


def rotation_from_axis_angle(aa: AxisAngle) -> np.ndarray:
    k, a = aa.axis, aa.angle
    c, s = np.cos(a), np.sin(a)
    return c * np.eye(3) + (1.0 - c) * np.outer(k, k) + s * hat(k)


def rotation_vector_from_axis_angle(aa: AxisAngle) -> np.ndarray:
    if aa.angle >= np.pi:
        raise ChartBoundaryError(f"angle {aa.angle!r} is outside [0, pi)", axis=aa.axis)
    if aa.angle < 0.0:
        raise InvalidInputError(f"angle {aa.angle!r} is negative")
    return aa.axis * np.tan(0.5 * aa.angle)


def axis_angle_from_rotation_vector(n) -> AxisAngle:
    n = _vec3(n, "n")
    r = np.linalg.norm(n)
    if r == 0.0:
        return AxisAngle(np.array([0.0, 0.0, 1.0]), 0.0)
    return AxisAngle(n / r, 2.0 * np.arctan(r))


def rotation_matrix(n) -> np.ndarray:
    """R(n) = [(1 - n^2) 1 + 2 n n^T + 2 hat(n)] / (1 + n^2)."""
    n = _vec3(n, "n")
    n2 = n @ n
    return ((1.0 - n2) * np.eye(3) + 2.0 * np.outer(n, n) + 2.0 * hat(n)) / (1.0 + n2)


def axis_angle_from_rotation(R) -> AxisAngle:
    """Invert :func:`rotation_from_axis_angle` on ``alpha in [0, pi)``.

    The identity maps to axis ``(0, 0, 1)``, angle 0. Rotations within
    ``BOUNDARY_TOL`` of angle pi raise :class:`ChartBoundaryError`.
    """
    R = _mat3(R, "R")
    if np.abs(R.T @ R - np.eye(3)).max() > ORTHO_TOL or np.linalg.det(R) <= 0.0:
        raise InvalidInputError("R is not a proper rotation matrix")
    w = 0.5 * vee(R - R.T)  # k sin(alpha)
    s = np.linalg.norm(w)
    c = 0.5 * (np.trace(R) - 1.0)
    angle = float(np.arctan2(s, c))
    if angle < ZERO_ANGLE:
        return AxisAngle(np.array([0.0, 0.0, 1.0]), 0.0)
    if s > ANTISYM_SIN_MIN or c > 0.0:
        k = w / s
    else:
        # near pi: R + R^T = 2c 1 + 2(1 - c) k k^T
        K = (0.5 * (R + R.T) - c * np.eye(3)) / (1.0 - c)
        col = int(np.argmax(np.diag(K)))
        k = K[:, col] / np.sqrt(K[col, col])
        k /= np.linalg.norm(k)
        if k @ w < 0.0:
            k = -k
    if np.pi - angle < BOUNDARY_TOL:
        raise ChartBoundaryError(
            f"rotation angle {angle!r} is within {BOUNDARY_TOL} of pi", axis=k)
    return AxisAngle(k, angle)


def rotation_vector(R) -> np.ndarray:
    """Chart coordinate of a rotation matrix."""
    return rotation_vector_from_axis_angle(axis_angle_from_rotation(R))


def a_matrix(n) -> np.ndarray:
    """A(n) = [1 + hat(n)] / (1 + n^2)."""
    n = _vec3(n, "n")
    return (np.eye(3) + hat(n)) / (1.0 + n @ n)


def a_tilde(n) -> np.ndarray:
    """Inverse of A(n): 1 + n n^T - hat(n)."""
    n = _vec3(n, "n")
    return np.eye(3) + np.outer(n, n) - hat(n)


def body_angular_velocity(n, ndot) -> np.ndarray:
    return 2.0 * a_matrix(n).T @ _vec3(ndot, "ndot")


def angular_velocity_from_rdot(R, Rdot) -> np.ndarray:
    """Omega_k = -1/2 eps_kij (R^T Rdot)_ij."""
    return -0.5 * np.einsum("kij,ij->k", EPS, np.asarray(R).T @ np.asarray(Rdot))


def _check_spd(I):
    I = _mat3(I, "inertia")
    if np.abs(I - I.T).max() > 1e-12 * max(1.0, np.abs(I).max()):
        raise InvalidInputError("inertia is not symmetric")
    if np.linalg.eigvalsh(I).min() <= 0.0:
        raise InvalidInputError("inertia is not positive definite")
    return I


def _as_matrix(I):
    return I.matrix if hasattr(I, "matrix") else _check_spd(I)


def metric(n, I) -> np.ndarray:
    """G(n) = 4 A I A^T."""
    A = a_matrix(n)
    return 4.0 * A @ _as_matrix(I) @ A.T


def inverse_metric(n, I) -> np.ndarray:
    """G^{-1}(n) = 1/4 At^T I^{-1} At."""
    At = a_tilde(n)
    Iinv = I.inverse if hasattr(I, "inverse") else np.linalg.inv(_as_matrix(I))
    return 0.25 * At.T @ Iinv @ At


def format_matrix(M) -> str:
    """Row-major, comma separated, 17 significant digits."""
    return ",".join(f"{x:.17g}" for x in np.asarray(M, dtype=float).ravel())
