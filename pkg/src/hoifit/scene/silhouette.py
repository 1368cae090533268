"""Mask rasterization and the fixed per-mask distance fields.

Projected meshes are rasterized with OpenCV in fixed-point subpixel
coordinates; distance transforms are precomputed once per mask so loss
evaluations only do differentiable bilinear lookups.
"""
from __future__ import annotations

from dataclasses import dataclass

import cv2
import numpy as np
import torch
from scipy.ndimage import distance_transform_edt

from ..errors import InvalidInputError

_SHIFT = 4  # fractional bits for cv2 fixed-point polygon coordinates


def rasterize_mask(verts2d: np.ndarray, faces: np.ndarray, shape: tuple[int, int],
                   supersample: int = 1) -> np.ndarray:
    """Boolean silhouette of projected triangles on an (H, W) canvas."""
    h, w = shape
    s = int(supersample)
    canvas = np.zeros((h * s, w * s), dtype=np.uint8)
    if len(faces) and len(verts2d):
        pts = verts2d * s + (s - 1) / 2.0
        fixed = np.round(pts * (1 << _SHIFT)).astype(np.int64)
        fixed = np.clip(fixed, -(2**30), 2**30).astype(np.int32)
        polys = fixed[faces]
        cv2.fillPoly(canvas, list(polys), 1, lineType=cv2.LINE_8, shift=_SHIFT)
    if s > 1:
        canvas = canvas.reshape(h, s, w, s).max(axis=(1, 3))
    return canvas.astype(bool)


def mask_boundary(mask: np.ndarray) -> np.ndarray:
    """Mask pixels with at least one background 4-neighbor."""
    m = mask.astype(np.uint8)
    eroded = cv2.erode(m, np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=np.uint8))
    return (m > 0) & (eroded == 0)


def boundary_pixels(mask: np.ndarray) -> np.ndarray:
    """(n, 2) float (x, y) coordinates of boundary pixels."""
    ys, xs = np.nonzero(mask_boundary(mask))
    return np.stack([xs, ys], axis=1).astype(np.float64)


def mask_iou(a: np.ndarray, b: np.ndarray) -> float:
    inter = np.logical_and(a, b).sum()
    union = np.logical_or(a, b).sum()
    return float(inter / union) if union > 0 else 0.0


def load_mask_png(path) -> np.ndarray:
    img = cv2.imread(str(path), cv2.IMREAD_GRAYSCALE)
    if img is None:
        raise InvalidInputError(f"cannot read mask image {path}")
    return img > 127


def save_mask_png(path, mask: np.ndarray) -> None:
    cv2.imwrite(str(path), mask.astype(np.uint8) * 255)


@dataclass
class MaskFields:
    """Precomputed lookups for one detection mask."""

    mask: np.ndarray
    outside_distance: torch.Tensor   # px to nearest mask pixel, 0 inside
    boundary_distance: torch.Tensor  # px to nearest mask-boundary pixel
    boundary_px: torch.Tensor        # (n, 2) subsampled boundary coordinates
    diagonal: float

    @classmethod
    def build(cls, mask: np.ndarray, max_boundary_points: int = 1024) -> "MaskFields":
        mask = np.asarray(mask).astype(bool)
        if not mask.any():
            raise InvalidInputError("mask is empty")
        outside = distance_transform_edt(~mask)
        boundary = mask_boundary(mask)
        bdist = distance_transform_edt(~boundary)
        bpx = boundary_pixels(mask)
        if len(bpx) > max_boundary_points:
            stride = int(np.ceil(len(bpx) / max_boundary_points))
            bpx = bpx[::stride]
        h, w = mask.shape
        return cls(
            mask=mask,
            outside_distance=torch.tensor(outside, dtype=torch.float64),
            boundary_distance=torch.tensor(bdist, dtype=torch.float64),
            boundary_px=torch.tensor(bpx, dtype=torch.float64),
            diagonal=float(np.hypot(h, w)),
        )


def sample_field_bilinear(field: torch.Tensor, xy: torch.Tensor) -> torch.Tensor:
    """Differentiable bilinear lookup of an (H, W) field at (x, y) pixels."""
    h, w = field.shape
    x = xy[:, 0].clamp(0.0, w - 1.0)
    y = xy[:, 1].clamp(0.0, h - 1.0)
    x0 = x.detach().floor().long().clamp(0, w - 2)
    y0 = y.detach().floor().long().clamp(0, h - 2)
    fx = x - x0.to(x.dtype)
    fy = y - y0.to(y.dtype)
    v00 = field[y0, x0]
    v01 = field[y0, x0 + 1]
    v10 = field[y0 + 1, x0]
    v11 = field[y0 + 1, x0 + 1]
    return (
        v00 * (1 - fy) * (1 - fx)
        + v01 * (1 - fy) * fx
        + v10 * fy * (1 - fx)
        + v11 * fy * fx
    )


def silhouette_vertex_indices(verts2d: np.ndarray, faces: np.ndarray,
                              shape: tuple[int, int], tol_px: float = 1.5) -> np.ndarray:
    """Vertices whose projection lies on the current silhouette boundary.

    Falls back to the 2D convex hull when rasterization yields too few,
    e.g. for a sliver projection.
    """
    sil = rasterize_mask(verts2d, faces, shape)
    if sil.any():
        bdist = distance_transform_edt(~mask_boundary(sil))
        xi = np.clip(np.round(verts2d[:, 0]).astype(int), 0, shape[1] - 1)
        yi = np.clip(np.round(verts2d[:, 1]).astype(int), 0, shape[0] - 1)
        idx = np.flatnonzero(bdist[yi, xi] <= tol_px)
        if len(idx) >= 8:
            return idx
    from scipy.spatial import ConvexHull

    try:
        return np.unique(ConvexHull(verts2d).vertices)
    except Exception:
        return np.arange(len(verts2d))
