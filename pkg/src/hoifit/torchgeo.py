"""Differentiable geometry helpers shared by the fitting modules (float64)."""
from __future__ import annotations

import torch


def rodrigues(axis_angle: torch.Tensor) -> torch.Tensor:
    """Axis-angle vectors (..., 3) to rotation matrices (..., 3, 3).

    Uses series expansions of sin(t)/t and (1-cos(t))/t^2 near zero so the
    map stays differentiable at the identity.
    """
    w = axis_angle
    t2 = (w * w).sum(dim=-1, keepdim=True).unsqueeze(-1)
    t = torch.sqrt(t2.clamp_min(1e-32))
    small = t2 < 1e-12
    a = torch.where(small, 1.0 - t2 / 6.0 + t2 * t2 / 120.0, torch.sin(t) / t)
    b = torch.where(small, 0.5 - t2 / 24.0 + t2 * t2 / 720.0, (1.0 - torch.cos(t)) / t2.clamp_min(1e-32))

    zeros = torch.zeros_like(w[..., 0])
    k = torch.stack(
        [
            zeros, -w[..., 2], w[..., 1],
            w[..., 2], zeros, -w[..., 0],
            -w[..., 1], w[..., 0], zeros,
        ],
        dim=-1,
    ).reshape(*w.shape[:-1], 3, 3)
    eye = torch.eye(3, dtype=w.dtype, device=w.device).expand(k.shape)
    return eye + a * k + b * (k @ k)


def sample_sdf_torch(values: torch.Tensor, origin: torch.Tensor, cell: torch.Tensor, points: torch.Tensor) -> torch.Tensor:
    """Differentiable counterpart of geometry.sdf.sample_sdf.

    `values` is the (nx, ny, nz) node grid; outside queries are clamped to
    the boundary and the Euclidean distance to the grid box is added.
    """
    res = torch.tensor(values.shape, dtype=points.dtype, device=points.device)
    local = (points - origin) / cell
    clamped = torch.stack([local[:, k].clamp(0.0, res[k] - 1.0) for k in range(3)], dim=1)
    outside = torch.linalg.norm((local - clamped) * cell, dim=1)

    i0 = clamped.detach().floor().long()
    for k in range(3):
        i0[:, k] = i0[:, k].clamp(0, values.shape[k] - 2)
    frac = clamped - i0.to(points.dtype)
    x0, y0, z0 = i0[:, 0], i0[:, 1], i0[:, 2]
    fx, fy, fz = frac[:, 0], frac[:, 1], frac[:, 2]
    v = values
    c00 = v[x0, y0, z0] * (1 - fx) + v[x0 + 1, y0, z0] * fx
    c01 = v[x0, y0, z0 + 1] * (1 - fx) + v[x0 + 1, y0, z0 + 1] * fx
    c10 = v[x0, y0 + 1, z0] * (1 - fx) + v[x0 + 1, y0 + 1, z0] * fx
    c11 = v[x0, y0 + 1, z0 + 1] * (1 - fx) + v[x0 + 1, y0 + 1, z0 + 1] * fx
    c0 = c00 * (1 - fy) + c10 * fy
    c1 = c01 * (1 - fy) + c11 * fy
    return c0 * (1 - fz) + c1 * fz + outside


def area_weighted_part_normal(verts: torch.Tensor, faces: torch.Tensor) -> torch.Tensor:
    """Unit mean normal of the faces (differentiable); zero-safe normalization."""
    a = verts[faces[:, 0]]
    b = verts[faces[:, 1]]
    c = verts[faces[:, 2]]
    n = torch.cross(b - a, c - a, dim=1).sum(dim=0)
    return n / torch.linalg.norm(n).clamp_min(1e-12)
