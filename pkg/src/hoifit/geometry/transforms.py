"""Rigid-similarity transforms and closed-form point-set alignment."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.transform import Rotation

from ..errors import DegenerateConfigurationError, InvalidInputError


def axis_angle_to_matrix(axis_angle) -> np.ndarray:
    return Rotation.from_rotvec(np.asarray(axis_angle, dtype=np.float64)).as_matrix()


def matrix_to_axis_angle(matrix) -> np.ndarray:
    return Rotation.from_matrix(np.asarray(matrix, dtype=np.float64)).as_rotvec()


@dataclass
class RigidSimTransform:
    """Isotropic scale, then rotation (axis-angle, radians), then translation."""

    scale: float = 1.0
    rotation: np.ndarray = field(default_factory=lambda: np.zeros(3))
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        self.scale = float(self.scale)
        self.rotation = np.asarray(self.rotation, dtype=np.float64).reshape(3)
        self.translation = np.asarray(self.translation, dtype=np.float64).reshape(3)
        if not self.scale > 0:
            raise InvalidInputError(f"scale must be positive, got {self.scale}")
        if not np.isfinite(self.rotation).all() or not np.isfinite(self.translation).all():
            raise InvalidInputError("transform has non-finite entries")

    @property
    def rotation_matrix(self) -> np.ndarray:
        return axis_angle_to_matrix(self.rotation)

    def apply(self, points: np.ndarray) -> np.ndarray:
        p = np.asarray(points, dtype=np.float64)
        return self.scale * (p @ self.rotation_matrix.T) + self.translation

    def as_matrix(self) -> np.ndarray:
        m = np.eye(4)
        m[:3, :3] = self.scale * self.rotation_matrix
        m[:3, 3] = self.translation
        return m

    def compose_rotation(self, delta_axis_angle) -> "RigidSimTransform":
        """Left-multiply an incremental rotation onto this transform."""
        r = axis_angle_to_matrix(delta_axis_angle) @ self.rotation_matrix
        return RigidSimTransform(self.scale, matrix_to_axis_angle(r), self.translation.copy())

    def inverse(self) -> "RigidSimTransform":
        r_inv = self.rotation_matrix.T
        s_inv = 1.0 / self.scale
        return RigidSimTransform(
            s_inv, matrix_to_axis_angle(r_inv), -s_inv * (r_inv @ self.translation)
        )


def procrustes_align(src: np.ndarray, dst: np.ndarray) -> RigidSimTransform:
    """Similarity transform minimizing mean squared error mapping src onto dst.

    Closed-form solution via SVD of the cross-covariance (Umeyama). Requires
    at least 3 non-collinear correspondences.
    """
    src = np.asarray(src, dtype=np.float64)
    dst = np.asarray(dst, dtype=np.float64)
    if src.shape != dst.shape or src.ndim != 2 or src.shape[1] != 3:
        raise InvalidInputError(f"need matching (n, 3) point sets, got {src.shape} vs {dst.shape}")
    n = len(src)
    if n < 3:
        raise InvalidInputError(f"need >= 3 correspondences, got {n}")

    mu_src = src.mean(axis=0)
    mu_dst = dst.mean(axis=0)
    x = src - mu_src
    y = dst - mu_dst
    var_src = (x**2).sum() / n
    if var_src < 1e-18:
        raise DegenerateConfigurationError("source points are coincident")

    cov = y.T @ x / n
    u, d, vt = np.linalg.svd(cov)
    # Collinear sources leave the rotation about the line unconstrained.
    spread = np.linalg.svd(x, compute_uv=False)
    if spread[1] < 1e-9 * max(spread[0], 1.0):
        raise DegenerateConfigurationError("source points are collinear")

    s = np.eye(3)
    if np.linalg.det(u) * np.linalg.det(vt) < 0:
        s[2, 2] = -1.0
    rot = u @ s @ vt
    scale = float(np.trace(np.diag(d) @ s) / var_src)
    if scale <= 0:
        raise DegenerateConfigurationError("alignment collapsed to non-positive scale")
    trans = mu_dst - scale * rot @ mu_src
    return RigidSimTransform(scale, matrix_to_axis_angle(rot), trans)
