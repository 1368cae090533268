"""One-way and symmetric Chamfer distances between vertex sets."""
from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree

from ..errors import InvalidInputError


def _check_points(name, pts) -> np.ndarray:
    p = np.asarray(pts, dtype=np.float64)
    if p.ndim != 2 or p.shape[1] != 3 or len(p) == 0:
        raise InvalidInputError(f"{name} must be a non-empty (n, 3) array, got {p.shape}")
    return p


def one_way_chamfer(src, dst, squared: bool = False) -> float:
    """Mean distance from each src vertex to its nearest dst vertex.

    Unsquared by default; `squared` averages squared distances instead.
    Uses a k-d tree, which matches the O(n^2) scan exactly.
    """
    src = _check_points("src", src)
    dst = _check_points("dst", dst)
    d, _ = cKDTree(dst).query(src, k=1)
    if squared:
        return float(np.mean(d**2))
    return float(np.mean(d))


def symmetric_chamfer(a, b, squared: bool = False) -> float:
    """Mean of the two one-way Chamfer terms."""
    return 0.5 * (one_way_chamfer(a, b, squared) + one_way_chamfer(b, a, squared))
