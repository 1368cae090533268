"""Pinhole camera and perspective projection."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch

from ..errors import BehindCameraError, InvalidInputError


@dataclass
class Camera:
    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self):
        if not (self.fx > 0 and self.fy > 0):
            raise InvalidInputError(f"focal lengths must be positive: {self.fx}, {self.fy}")

    @property
    def image_diagonal(self) -> float:
        return float(np.hypot(self.width, self.height))

    def intrinsics(self) -> np.ndarray:
        return np.array(
            [[self.fx, 0.0, self.cx], [0.0, self.fy, self.cy], [0.0, 0.0, 1.0]]
        )

    def to_dict(self) -> dict:
        return {
            "fx": self.fx,
            "fy": self.fy,
            "cx": self.cx,
            "cy": self.cy,
            "width": self.width,
            "height": self.height,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Camera":
        return cls(
            fx=float(d["fx"]),
            fy=float(d["fy"]),
            cx=float(d["cx"]),
            cy=float(d["cy"]),
            width=int(d["width"]),
            height=int(d["height"]),
        )


def project_perspective(points, camera: Camera) -> np.ndarray:
    """Pixel coordinates of camera-frame points; all z must be positive."""
    p = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if (p[:, 2] <= 0).any():
        raise BehindCameraError("point with z <= 0 cannot be projected")
    uv = np.empty((len(p), 2))
    uv[:, 0] = camera.fx * p[:, 0] / p[:, 2] + camera.cx
    uv[:, 1] = camera.fy * p[:, 1] / p[:, 2] + camera.cy
    return uv if np.asarray(points).ndim == 2 else uv[0]


def project_perspective_torch(points: torch.Tensor, camera: Camera, z_min: float = 1e-6) -> torch.Tensor:
    """Differentiable projection; z is clamped away from the image plane."""
    z = points[:, 2].clamp_min(z_min)
    u = camera.fx * points[:, 0] / z + camera.cx
    v = camera.fy * points[:, 1] / z + camera.cy
    return torch.stack([u, v], dim=1)
